"""Mellin transforms of archimedean Whittaker functions and their algebra.

The rank-one transform is an exact product of two Gamma factors.  One rank up
there is still a closed form (a ratio of six Gamma factors), which we both
implement directly and recover numerically from the contour recursion that
expresses the rank-n transform through the rank-(n-1) one.  On top of the
evaluators sit the structural identities: shift equations that trade a
polynomial factor for a translate of the transform, first-order residue
formulas at the leading pole families, and the inverse transform back to the
classical rank-one Whittaker function.

Normalization note: all contour measures include the 1/(2*pi*i) per variable,
and in this normalization the rank-one transform is exactly
Gamma(s + a) * Gamma(s - a) while the rank-two closed form has unit leading
constant.  The latter is not assumed: it is calibrated once against the
recursion and cached.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .quadrature import vertical_line_integral, vertical_plane_integral, circle_integral_mean
from .special import PoleError, DegenerateParameterError, validate_langlands, log_gamma

_SUM_TOL = 1e-10


def _as_alpha(alpha, n: int) -> np.ndarray:
    a = np.asarray(alpha, dtype=np.complex128)
    if a.shape != (n,):
        raise ValueError(f"expected {n} spectral parameters, got shape {a.shape}")
    if abs(a.sum()) > _SUM_TOL * max(1.0, float(np.abs(a).max())):
        raise ValueError("spectral parameters must sum to zero")
    return a


@dataclass(frozen=True)
class MellinPoint:
    """A transform evaluation point: spectral parameters plus s-arguments."""

    alpha: tuple[complex, ...]
    s: tuple[complex, ...]

    def __post_init__(self) -> None:
        _as_alpha(self.alpha, len(self.alpha))
        if len(self.s) != len(self.alpha) - 1:
            raise ValueError("need one s-variable fewer than spectral parameters")

    @property
    def n(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class ShiftVector:
    """Nonnegative integer translate applied to the s-arguments."""

    offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(o < 0 for o in self.offsets):
            raise ValueError("shift offsets must be nonnegative")

    @property
    def weight(self) -> int:
        return sum(self.offsets)

    def apply(self, s) -> tuple[complex, ...]:
        if len(s) != len(self.offsets):
            raise ValueError("shift length mismatch")
        return tuple(sv + o for sv, o in zip(s, self.offsets))


def pochhammer(z: complex, k: int) -> complex:
    """Rising factorial z (z+1) ... (z+k-1); empty product for k = 0."""
    if k < 0:
        raise ValueError("pochhammer order must be nonnegative")
    out = 1.0 + 0.0j
    for j in range(k):
        out *= z + j
    return out


def _gl2_param(alpha) -> complex:
    """Accept a scalar parameter a or the full pair (a, -a)."""
    if np.isscalar(alpha) or np.asarray(alpha).ndim == 0:
        return complex(alpha)
    return complex(_as_alpha(alpha, 2)[0])


def mellin_gl2(alpha, s):
    """Rank-one transform Gamma(s + a) Gamma(s - a) for alpha = (a, -a).

    Scalar s raises PoleError on a Gamma pole; array s evaluates elementwise
    without the pole guard (contour nodes stay off the pole set).
    """
    a = _gl2_param(alpha)
    if np.isscalar(s) or np.asarray(s).ndim == 0:
        return complex(np.exp(log_gamma(complex(s) + a) + log_gamma(complex(s) - a)))
    sv = np.asarray(s, dtype=np.complex128)
    return np.exp(loggamma(sv + a) + loggamma(sv - a))


def _truncation_half_length(alpha: np.ndarray) -> float:
    return max(30.0, 10.0 + 3.0 * float(np.abs(alpha.imag).max(initial=0.0)))


def _contour_abscissa(s_re: np.ndarray) -> float:
    lo = float(np.min(s_re))
    if lo <= 0.01:
        raise ValueError("recursion contour needs Re(s) bounded away from 0")
    return 0.5 * min(1.0, lo)


def _recursion_gl3(alpha: np.ndarray, s, tol: float, nodes_per_panel: int) -> complex:
    s1, s2 = complex(s[0]), complex(s[1])
    eps = _contour_abscissa(np.array([s1.real, s2.real]))
    am = alpha[2]
    beta = alpha[:2] + am / 2.0
    btilde = (beta[0] - beta[1]) / 2.0
    prefactor = np.exp(log_gamma(s1 + am) + log_gamma(s2 - am))

    def f(z):
        return np.exp(
            loggamma(s1 - z - am / 2.0)
            + loggamma(s2 - z + am / 2.0)
            + loggamma(z + btilde)
            + loggamma(z - btilde)
        )

    half = _truncation_half_length(alpha)
    val = vertical_line_integral(
        f, eps, tol, initial_half_length=half, nodes_per_panel=nodes_per_panel
    )
    return complex(prefactor * val / (2j * np.pi))


def _recursion_gl4(alpha: np.ndarray, s, tol: float, nodes_per_panel: int) -> complex:
    s1, s2, s3 = (complex(v) for v in s)
    eps = _contour_abscissa(np.array([s1.real, s2.real, s3.real]))
    am = alpha[3]
    beta = alpha[:3] + am / 3.0
    prefactor = np.exp(log_gamma(s1 + am) + log_gamma(s3 - am))

    def f(z1, z2):
        outer = np.exp(
            loggamma(s1 - z1 - am / 3.0)
            + loggamma(s2 - z1 + 2.0 * am / 3.0)
            + loggamma(s2 - z2 - 2.0 * am / 3.0)
            + loggamma(s3 - z2 + am / 3.0)
        )
        return outer * mellin_gl3_closed(beta, (z1, z2))

    half = _truncation_half_length(alpha)
    val = vertical_plane_integral(
        f, (eps, eps), tol, initial_half_length=half, nodes_per_panel=nodes_per_panel
    )
    return complex(prefactor * val / (2j * np.pi) ** 2)


def mellin_recursive(
    n: int, alpha, s, tol: float = 1e-8, nodes_per_panel: int = 16
) -> complex:
    """Transform via the contour recursion onto one rank lower.

    The rank-(n-1) parameters are alpha_j + alpha_n/(n-1); the inner transform
    is the exact product for n = 3 and the closed rank-two form for n = 4.
    Requires Re(s_j) > 0 for every j so the separating contour exists.
    ``nodes_per_panel`` exists so self-convergence can be probed by doubling.
    """
    a = _as_alpha(alpha, n)
    if len(s) != n - 1:
        raise ValueError("need n - 1 s-variables")
    if n == 2:
        return complex(mellin_gl2(a, s[0]))
    if n == 3:
        return _recursion_gl3(a, s, tol, nodes_per_panel)
    if n == 4:
        return _recursion_gl4(a, s, tol, nodes_per_panel)
    raise NotImplementedError("recursion implemented for n <= 4")


@functools.lru_cache(maxsize=1)
def gl3_normalization(tol: float = 1e-10) -> float:
    """Leading constant of the rank-two closed form, calibrated once.

    Measured against the recursion at the reference point alpha = 0,
    s = (1, 1), where the closed form with unit constant equals 1.
    """
    ref = mellin_recursive(3, (0.0, 0.0, 0.0), (1.0, 1.0), tol=tol)
    if abs(ref.imag) > 1e-6 or ref.real <= 0:
        raise AssertionError(f"calibration point gave non-positive value {ref}")
    return ref.real


def mellin_gl3_closed(alpha, s, kappa: float | None = None):
    """Closed rank-two transform: six Gamma factors over Gamma(s1 + s2).

    Accepts scalar or broadcastable array s-components.  ``kappa`` overrides
    the calibrated leading constant (mainly for the calibration test itself).
    """
    a = _as_alpha(alpha, 3)
    if kappa is None:
        kappa = gl3_normalization()
    s1 = np.asarray(s[0], dtype=np.complex128)
    s2 = np.asarray(s[1], dtype=np.complex128)
    if s1.ndim == 0 and s2.ndim == 0:
        log = sum(log_gamma(complex(s1) + ai) for ai in a)
        log += sum(log_gamma(complex(s2) - ai) for ai in a)
        log -= log_gamma(complex(s1 + s2))
        return kappa * complex(np.exp(log))
    log = sum(loggamma(s1 + ai) for ai in a)
    log = log + sum(loggamma(s2 - ai) for ai in a)
    log = log - loggamma(s1 + s2)
    return kappa * np.exp(log)


def mellin_value(n: int, alpha, s, tol: float = 1e-8) -> complex:
    """Best available evaluator: exact products for n <= 3, recursion for n = 4."""
    if n == 2:
        return complex(mellin_gl2(alpha, s[0]))
    if n == 3:
        return complex(mellin_gl3_closed(alpha, s))
    return mellin_recursive(n, alpha, s, tol=tol)


class WhittakerEvaluator:
    """Bundles spectral parameters with the transform evaluators.

    Quadrature policy lives here: relative tolerance and nodes per unit
    length of contour (a 16-node Gauss-Legendre panel per unit width).
    """

    def __init__(self, n: int, alpha, tol: float = 1e-8, nodes_per_panel: int = 16):
        if n not in (2, 3, 4):
            raise ValueError("supported ranks: n in {2, 3, 4}")
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        self.n = n
        self.alpha = tuple(np.asarray(_as_alpha(alpha, n)))
        self.tol = tol
        self.nodes_per_panel = nodes_per_panel

    @property
    def truncation_height(self) -> float:
        return _truncation_half_length(np.asarray(self.alpha))

    def mellin(self, s) -> complex:
        return mellin_value(self.n, self.alpha, s, tol=self.tol)

    def mellin_recursive(self, s) -> complex:
        return mellin_recursive(
            self.n, self.alpha, s, tol=self.tol, nodes_per_panel=self.nodes_per_panel
        )

    def value(self, y: float, b: float = 0.5) -> float:
        if self.n != 2:
            raise NotImplementedError("inverse transform implemented for n = 2")
        return whittaker_value(self.alpha, y, b=b, tol=self.tol)


# ---------------------------------------------------------------------------
# shift identities


def subset_sum_polynomial(alpha, m: int, s_m: complex) -> complex:
    """Product over all m-element index sets K of (s_m + sum of alpha over K)."""
    a = _as_alpha(alpha, len(alpha))
    out = 1.0 + 0.0j
    for ks in itertools.combinations(range(len(a)), m):
        out *= s_m + sum(a[k] for k in ks)
    return out


def shift_residual_gl2(alpha, s: complex, delta: int) -> float:
    """Relative defect in the rank-one shift identity at displacement delta.

    The identity moves s to s + delta at the cost of the degree-2*delta
    polynomial (s+a)_delta (s-a)_delta; it holds exactly.
    """
    a = _as_alpha(alpha, 2)[0]
    lhs = mellin_gl2(alpha, s) * pochhammer(s + a, delta) * pochhammer(s - a, delta)
    rhs = mellin_gl2(alpha, s + delta)
    return abs(lhs - rhs) / abs(rhs)


def shift_residual_gl3(alpha, s, m: int) -> float:
    """Relative defect in the rank-two shift identity with unit displacement.

    Multiplying by the subset-sum polynomial in s_m equals (s1 + s2) times
    the transform translated by the m-th unit vector.
    """
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2")
    sv = (complex(s[0]), complex(s[1]))
    lhs = subset_sum_polynomial(alpha, m, sv[m - 1]) * mellin_gl3_closed(alpha, sv)
    shift = ShiftVector((1, 0) if m == 1 else (0, 1))
    rhs = (sv[0] + sv[1]) * mellin_gl3_closed(alpha, shift.apply(sv))
    return abs(lhs - rhs) / abs(rhs)


def shift_identity_check(
    n: int,
    m: int,
    delta: int,
    alpha=None,
    s=None,
    rng: np.random.Generator | None = None,
    samples: int = 12,
) -> dict:
    """Numerically verify a shift identity and its degree bookkeeping.

    The degree budget is delta * C(n, m); each verified identity reports the
    polynomial degree and twice the shift weight, which must sum to the
    budget.  Supported: n = 2 (any delta, exact) and n = 3 (delta = 1).
    Pass an explicit (alpha, s) to check one point, otherwise random
    tempered samples are drawn.
    """
    rng = rng or np.random.default_rng(0)
    budget = delta * math.comb(n, m)
    worst = 0.0
    explicit = alpha is not None and s is not None
    if explicit:
        samples = 1
    if n == 2:
        if m != 1:
            raise ValueError("rank one has a single s-variable")
        poly_degree, shift_weight = 0, delta
        for _ in range(samples):
            if explicit:
                al, sv = alpha, complex(s)
            else:
                t = rng.uniform(0.2, 2.0)
                al = (1j * t, -1j * t)
                sv = complex(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0))
            worst = max(worst, shift_residual_gl2(al, sv, delta))
    elif n == 3 and delta == 1:
        poly_degree, shift_weight = 1, 1
        for _ in range(samples):
            if explicit:
                al, sv = alpha, (complex(s[0]), complex(s[1]))
            else:
                t = rng.uniform(0.2, 1.5, size=2)
                al = (1j * t[0], 1j * t[1], -1j * (t[0] + t[1]))
                sv = (
                    complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)),
                    complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)),
                )
            worst = max(worst, shift_residual_gl3(al, sv, m))
    else:
        raise NotImplementedError("verified shift identities: n = 2, or n = 3 with delta = 1")
    return {
        "n": n,
        "m": m,
        "delta": delta,
        "samples": samples,
        "max_residual": worst,
        "degree_budget": budget,
        "poly_degree": poly_degree,
        "shift_weight": shift_weight,
        "balanced": poly_degree + 2 * shift_weight == budget,
    }


# ---------------------------------------------------------------------------
# residues


@dataclass(frozen=True)
class ResidueSpec:
    """Which pole: the variable index m and the integer displacement delta."""

    m: int
    delta: int = 0

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("variable index m starts at 1")
        if not 0 <= self.delta <= 3:
            raise ValueError("implemented displacement range is 0..3")


def residue_gl2(alpha, delta: int) -> complex:
    """Residue of the rank-one transform at s = -a - delta.

    Equals (-1)^delta / delta! times Gamma(-2a - delta); the mirror pole
    family at s = a - delta carries the same formula with a negated.
    """
    a = _gl2_param(alpha)
    return (-1) ** delta / math.factorial(delta) * complex(np.exp(log_gamma(-2.0 * a - delta)))


def first_residue_gl3(alpha, m: int, s_other: complex) -> complex:
    """Residue of the rank-two transform at the leading pole in s_m.

    For m = 1 the pole sits at s_1 = -alpha_1 with the second variable free;
    for m = 2 at s_2 = alpha_3 with the first variable free.
    """
    a = _as_alpha(alpha, 3)
    if m == 1:
        log = log_gamma(a[1] - a[0]) + log_gamma(a[2] - a[0])
        log += log_gamma(s_other - a[1]) + log_gamma(s_other - a[2])
    elif m == 2:
        log = log_gamma(s_other + a[0]) + log_gamma(s_other + a[1])
        log += log_gamma(a[2] - a[0]) + log_gamma(a[2] - a[1])
    else:
        raise ValueError("m must be 1 or 2")
    return gl3_normalization() * complex(np.exp(log))


def check_pole_separation(n: int, alpha, m: int, delta: int, radius: float = 0.1) -> complex:
    """Return the pole center in s_m, or raise if another pole crowds the contour.

    Pole candidates in the m-th variable are -(sum of any m parameters) - k.
    A circle of the given radius about the target must keep every other
    candidate at distance at least twice the radius.
    """
    a = _as_alpha(alpha, n)
    center = -np.sum(a[:m]) - delta
    for ks in itertools.combinations(range(n), m):
        base = -sum(a[k] for k in ks)
        for k in range(delta + 4):
            pole = base - k
            d = abs(pole - center)
            if d > 1e-12 and d < 2.0 * radius:
                raise DegenerateParameterError(
                    f"pole at {pole:.4f} within {d:.3f} of target contour"
                )
    return complex(center)


def residue_formula(n: int, spec: ResidueSpec, alpha, s_rest: complex | None = None) -> complex:
    """Residue of the rank-(n-1) transform at s_m = -(alpha_1+...+alpha_m) - delta.

    Validates general position before evaluating.  For n = 3 the residue is
    still a function of the remaining s-variable, passed as ``s_rest``.
    """
    if n == 2:
        a0 = _gl2_param(alpha)
        a = np.array([a0, -a0])
    else:
        a = _as_alpha(alpha, n)
    check_pole_separation(n, a, spec.m, spec.delta)
    if n == 2:
        if spec.m != 1:
            raise ValueError("rank one has a single s-variable")
        return residue_gl2(a, spec.delta)
    if n == 3 and spec.delta == 0:
        if s_rest is None:
            raise ValueError("rank two residues need the remaining s-variable")
        return first_residue_gl3(a, spec.m, s_rest)
    raise NotImplementedError("closed residues: n = 2 any delta <= 3, n = 3 first poles")


def residue_check(
    n: int,
    alpha,
    m: int = 1,
    delta: int = 0,
    s_other: complex = 0.75,
    radius: float = 0.1,
    tol: float = 1e-8,
) -> dict:
    """Compare a closed-form residue against a small-circle contour integral.

    The contour route never uses the residue formula, so agreement within
    tol is an independent confirmation.  Parameters must be in general
    position relative to the contour radius.
    """
    a = _as_alpha(alpha, n)
    center = check_pole_separation(n, a, m, delta, radius=radius)
    if n == 2:
        closed = residue_gl2(a, delta)
        contour = circle_integral_mean(lambda sv: mellin_gl2(a, sv), center, radius)
    elif n == 3 and delta == 0:
        closed = first_residue_gl3(a, m, s_other)
        if m == 1:
            def f(sv):
                return mellin_gl3_closed(a, (sv, s_other * np.ones_like(sv)))
        else:
            def f(sv):
                return mellin_gl3_closed(a, (s_other * np.ones_like(sv), sv))
        contour = circle_integral_mean(f, center, radius)
    else:
        raise NotImplementedError("closed residues: n = 2 any delta, n = 3 first poles")
    err = abs(closed - contour)
    scale = max(1.0, abs(closed))
    return {
        "n": n,
        "m": m,
        "delta": delta,
        "closed": closed,
        "contour": contour,
        "abs_err": err,
        "rel_err": err / scale,
        "passed": err / scale <= tol,
    }


# ---------------------------------------------------------------------------
# inverse transform


def whittaker_value(alpha, y: float, b: float = 0.5, tol: float = 1e-8) -> float:
    """Rank-one Whittaker function from its Mellin transform.

    Inverts along Re(s) = 2b with the half-parameter transform inside; any
    b > 0 gives the same value since no poles are crossed.  For tempered
    parameters the value is real; the real part is returned.
    """
    a = _gl2_param(alpha)
    if y <= 0:
        raise ValueError("y must be positive")
    if b <= 0:
        raise ValueError("the inversion line must have Re(s) > 0")
    root_y = math.sqrt(y)
    log_piy = math.log(math.pi * y)

    def f(sv):
        return np.exp(
            loggamma((sv + a) / 2.0)
            + loggamma((sv - a) / 2.0)
            - sv * log_piy
        )

    val = 0.5 * root_y * vertical_line_integral(f, 2.0 * b, tol) / (2j * np.pi)
    return float(val.real)

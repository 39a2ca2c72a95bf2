"""Complex log-Gamma, the ratio Gamma_R, the pair polynomial F_R, the bound
function B, and the block decompositions of Gamma products.

All Gamma arithmetic is done in log space; moduli of products that would
overflow float64 (|Im| ~ 10^3) stay finite as log-modulus sums.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import loggamma as _loggamma

from .combinatorics import Composition, degree_D


class PoleError(ValueError):
    """Evaluation requested at a pole; carries the pole location."""

    def __init__(self, location: complex):
        self.location = location
        super().__init__(f"pole at z = {location}")


class DegenerateParameterError(ValueError):
    """Spectral parameter not in general position for the requested identity."""


def _is_nonpositive_integer(z: complex, tol: float = 1e-12) -> bool:
    z = complex(z)
    if abs(z.imag) > tol:
        return False
    r = round(z.real)
    return r <= 0 and abs(z.real - r) <= tol


def log_gamma(z: complex) -> complex:
    """Principal-branch log Gamma(z); raises PoleError at 0, -1, -2, ..."""
    if _is_nonpositive_integer(z):
        raise PoleError(complex(z))
    return complex(_loggamma(complex(z)))


def stirling_log_modulus(sigma: float, t: float) -> float:
    """log of the classical large-|t| modulus sqrt(2 pi) |t|^{sigma-1/2}
    e^{-pi |t|/2}, for fixed real part sigma."""
    t = abs(t)
    return 0.5 * math.log(2 * math.pi) + (sigma - 0.5) * math.log(t) - math.pi * t / 2


def gamma_R(z: complex, R: int) -> complex:
    """The ratio Gamma((1/2 + R + z)/2) / Gamma(z).

    Vanishes (exactly) at z = 0, -1, -2, ... where 1/Gamma(z) has a zero; for
    integer R >= 1 the numerator argument is a half-integer there, so the zero
    is never cancelled by a numerator pole.
    """
    if R < 1 or R != int(R):
        raise ValueError(f"R must be a positive integer, got {R}")
    num_arg = (0.5 + R + z) / 2
    if _is_nonpositive_integer(z):
        return 0.0 + 0.0j
    if _is_nonpositive_integer(num_arg):
        raise PoleError(complex(z))
    return cmath.exp(log_gamma(num_arg) - log_gamma(z))


def gamma_R_pair_log(t: float, R: int) -> float:
    """log |Gamma_R(2it) Gamma_R(-2it)| - pi*|t|, the exponential-free
    log-modulus of the spectral weight pair.

    Grows like (R + 1/2) log|2t| for large |t|; finite for all t != 0.
    """
    if t == 0:
        return -math.inf  # Gamma_R(0) = 0
    z = 2j * t
    val = (
        log_gamma((0.5 + R + z) / 2).real
        + log_gamma((0.5 + R - z) / 2).real
        - log_gamma(z).real
        - log_gamma(-z).real
    )
    return val - math.pi * abs(t)


def subset_pairs(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Unordered pairs {K, L} of distinct equal-size subsets of {0,...,n-1}
    with 1 <= #K = #L <= n-2.  Their count is degree_D(n)."""
    pairs = []
    idx = range(n)
    for j in range(1, n - 1):
        subs = list(itertools.combinations(idx, j))
        for k_i in range(len(subs)):
            for l_i in range(k_i + 1, len(subs)):
                pairs.append((subs[k_i], subs[l_i]))
    return pairs


def f_R_poly(alpha: Sequence[complex], R: int) -> complex:
    """The pair polynomial: product over unordered pairs {K, L} of distinct
    equal-size subsets of (1 + Delta)^{R/2} (1 - Delta)^{R/2} where
    Delta = sum_K alpha - sum_L alpha.

    The defining product over ordered pairs contains each unordered pair twice
    with opposite signs of Delta (and K = L gives a factor 1), so this is the
    same function; for tempered alpha each base 1 -/+ Delta is real >= 1 and
    the value is real and >= 1.  Odd R uses principal-branch half powers.
    """
    a = np.asarray(alpha, dtype=complex)
    n = len(a)
    if n < 2:
        raise ValueError("need n >= 2")
    log_total = 0.0 + 0.0j
    for K, L in subset_pairs(n):
        delta = a[list(K)].sum() - a[list(L)].sum()
        log_total += (R / 2) * (cmath.log(1 + delta) + cmath.log(1 - delta))
    return cmath.exp(log_total)


def bound_B(a: float, eps: float = 1e-9) -> float:
    """Piecewise bound function: 0 for a < 0; floor(a) + 2 frac(a) on the
    lower half of each unit interval; ceil(a) on the upper half.

    Positive a within eps of an integer is rejected (the two branches do not
    agree there and every consumer assumes a is bounded away from Z).
    """
    if a < 0:
        return 0.0
    if abs(a - round(a)) <= eps:
        if a <= eps:  # a = 0 is the continuous seam of the first branch
            return 0.0
        raise ValueError(f"a = {a} is within {eps} of an integer")
    fl = math.floor(a)
    frac = a - fl
    if frac <= 0.5:
        return fl + 2 * frac
    return float(math.ceil(a))


def _bound_B_cont(a: float) -> float:
    """bound_B extended by continuity to integers (B(k) = k); internal use."""
    if a < 0:
        return 0.0
    fl = math.floor(a)
    frac = a - fl
    if frac <= 0.5:
        return fl + 2 * frac
    return float(math.ceil(a))


def bound_B_sharp(a: float) -> float:
    """min(2a, a + 1/2) for a > 0, else 0.

    This is the decay exponent the two-variable integral actually attains at
    m = 2; bound_B is the coarser piecewise form entering the headline
    exponent, with bound_B <= bound_B_sharp everywhere.
    """
    if a < 0:
        return 0.0
    return min(2 * a, a + 0.5)


def verify_B_lemmas(
    grid: Sequence[float], rng: np.random.Generator, trials: int = 200
) -> dict:
    """Pointwise checks of the B-function identities and inequalities.

    (i)   max{0, 2(ceil(a) - a) - 1} - ceil(a) equals -B(a) on both branches;
    (ii)  a <= B(a) <= a + 1/2 for a > 0;
    (iii) the shifted-argument inequality
          sum_{j<m} B(a_j - (j/m) c) + sum_{j=1}^{n-m-1} B(a_{m+j} - ((n-m-j)/(n-m)) c)
          >= sum_j B(a_j) - ((n-2)/2)(c + 1) - B(a_m),   c = a_m - delta_m > 0,
          for random positive shift vectors, 2 <= n <= 6.

    Returns {"passed": bool, "violations": [...], "checked": int}.
    """
    violations = []
    checked = 0
    for a in grid:
        if abs(a - round(a)) < 1e-9:
            raise ValueError(f"grid point {a} too close to an integer")
        checked += 1
        lhs = max(0.0, 2 * (math.ceil(a) - a) - 1) - math.ceil(a)
        if a > 0:
            if abs(lhs + bound_B(a)) > 1e-12:
                violations.append(("max-simplify", a, lhs, -bound_B(a)))
            if not (a - 1e-12 <= bound_B(a) <= a + 0.5 + 1e-12):
                violations.append(("band", a, bound_B(a)))
        else:
            frac = a - math.floor(a)
            expect = (
                -math.ceil(a) if frac >= 0.5 else -math.floor(a) - 2 * frac
            )
            if abs(lhs - expect) > 1e-12:
                violations.append(("max-simplify", a, lhs, expect))
    for _ in range(trials):
        n = int(rng.integers(2, 7))
        avec = rng.uniform(0.05, 4.0, size=n - 1)
        avec += 1e-3 * (np.abs(avec - np.round(avec)) < 1e-3)  # dodge integers
        m = int(rng.integers(1, n))
        a_m = avec[m - 1]
        delta_m = int(rng.integers(0, max(1, math.floor(a_m)) + 1))
        c = a_m - delta_m
        if c <= 0:
            continue
        checked += 1
        lhs = sum(
            _bound_B_cont(avec[j - 1] - (j / m) * c) for j in range(1, m)
        ) + sum(
            _bound_B_cont(avec[m + j - 1] - ((n - m - j) / (n - m)) * c)
            for j in range(1, n - m)
        )
        rhs = sum(_bound_B_cont(x) for x in avec) - (n - 2) / 2 * (
            c + 1
        ) - _bound_B_cont(a_m)
        if lhs < rhs - 1e-9:
            violations.append(("shifted-inequality", tuple(avec), m, delta_m, lhs, rhs))
    return {"passed": not violations, "violations": violations, "checked": checked}


def validate_langlands(
    alpha: Sequence[complex], require_tempered: bool = False, tol: float = 1e-12
) -> np.ndarray:
    """Check the zero-sum invariant (and temperedness if asked); returns the
    parameter as a complex array."""
    a = np.asarray(alpha, dtype=complex)
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if abs(a.sum()) > tol * scale * len(a):
        raise ValueError(f"entries must sum to 0, got sum {a.sum()}")
    if require_tempered and float(np.abs(a.real).max(initial=0.0)) > tol:
        raise ValueError("parameter is not tempered (nonzero real parts)")
    return a


def is_tempered(alpha: Sequence[complex], tol: float = 1e-12) -> bool:
    a = np.asarray(alpha, dtype=complex)
    return float(np.abs(a.real).max(initial=0.0)) <= tol


@dataclass(frozen=True)
class PartitionedParameter:
    """A zero-sum parameter split along a composition: per-block recentered
    parameters alpha^(l) (each zero-sum) and the block sums beta."""

    base: tuple[complex, ...]
    composition: Composition
    blocks: tuple[tuple[complex, ...], ...]
    beta: tuple[complex, ...]

    def block(self, ell: int) -> np.ndarray:
        return np.asarray(self.blocks[ell], dtype=complex)


def partition_parameter(
    alpha: Sequence[complex], comp: Composition
) -> PartitionedParameter:
    """Split alpha along comp: alpha^(l)_j = alpha_{n-hat_{l-1}+j} - beta_l/n_l
    with beta_l the l-th block sum.  Each block sums to zero and

        sum_i alpha_i^2 = sum_l ( |alpha^(l)|^2 + beta_l^2 / n_l )

    holds exactly (checked by the caller via alpha_square_residual).
    """
    a = validate_langlands(alpha)
    if len(a) != comp.n:
        raise ValueError(f"parameter has length {len(a)}, composition sums to {comp.n}")
    nhat = (0,) + comp.partial_sums
    blocks = []
    beta = []
    for ell in range(comp.r):
        seg = a[nhat[ell] : nhat[ell + 1]]
        b = seg.sum()
        beta.append(complex(b))
        blocks.append(tuple(complex(x) for x in (seg - b / comp.parts[ell])))
    return PartitionedParameter(
        base=tuple(complex(x) for x in a),
        composition=comp,
        blocks=tuple(blocks),
        beta=tuple(beta),
    )


def alpha_square_residual(pp: PartitionedParameter) -> float:
    """|sum alpha^2 - sum_l (|alpha^(l)|^2 + beta_l^2/n_l)| for the split."""
    a = np.asarray(pp.base, dtype=complex)
    total = np.sum(a**2)
    split = sum(
        np.sum(np.asarray(blk, dtype=complex) ** 2) + b**2 / p
        for blk, b, p in zip(pp.blocks, pp.beta, pp.composition.parts)
    )
    return abs(total - split)


def _log_mod_gamma_R(z: complex, R: int) -> float:
    v = gamma_R(z, R)
    if v == 0:
        raise DegenerateParameterError(f"Gamma_R vanishes at {z}")
    return math.log(abs(v))


def gamma_product_decomposition_residual(
    alpha: Sequence[complex], comp: Composition, R: int
) -> float:
    """Log-modulus residual of the block/cross factorization of
    prod_{i != j} Gamma_R(alpha_i - alpha_j).

    The left side is evaluated from the raw parameter, the right side from the
    recentered blocks alpha^(l) and offsets beta_k/n_k - beta_m/n_m; both are
    log-modulus sums, and for a parameter in general position the residual is
    rounding-level.
    """
    a = validate_langlands(alpha)
    n = len(a)
    diffs = [a[i] - a[j] for i in range(n) for j in range(n) if i != j]
    if any(abs(d) < 1e-10 for d in diffs):
        raise DegenerateParameterError("coincident parameter entries")
    lhs = sum(_log_mod_gamma_R(d, R) for d in diffs)

    pp = partition_parameter(a, comp)
    rhs = 0.0
    for ell in range(comp.r):
        blk = pp.block(ell)
        for i in range(len(blk)):
            for j in range(len(blk)):
                if i != j:
                    rhs += _log_mod_gamma_R(blk[i] - blk[j], R)
    parts = comp.parts
    for k in range(comp.r):
        for m in range(k + 1, comp.r):
            offset = pp.beta[k] / parts[k] - pp.beta[m] / parts[m]
            for x in pp.block(k):
                for y in pp.block(m):
                    arg = x - y + offset
                    rhs += _log_mod_gamma_R(arg, R) + _log_mod_gamma_R(-arg, R)
    return abs(lhs - rhs)


def gamma_product_split_residual(alpha: Sequence[complex], k: int, R: int) -> float:
    """Two-block variant: independent coding of the r=2 factorization with the
    single offset (n/(k(n-k))) alpha-hat_k, cross-checking the general form."""
    a = validate_langlands(alpha)
    n = len(a)
    if not 1 <= k <= n - 1:
        raise ValueError("need 1 <= k <= n-1")
    ahat_k = a[:k].sum()
    beta = a[:k] - ahat_k / k
    gamma = a[k:] + ahat_k / (n - k)
    diffs = [a[i] - a[j] for i in range(n) for j in range(n) if i != j]
    if any(abs(d) < 1e-10 for d in diffs):
        raise DegenerateParameterError("coincident parameter entries")
    lhs = sum(_log_mod_gamma_R(d, R) for d in diffs)
    rhs = 0.0
    for vec in (beta, gamma):
        for i in range(len(vec)):
            for j in range(len(vec)):
                if i != j:
                    rhs += _log_mod_gamma_R(vec[i] - vec[j], R)
    off = n / (k * (n - k)) * ahat_k
    for b in beta:
        for g in gamma:
            rhs += _log_mod_gamma_R(b - g + off, R) + _log_mod_gamma_R(g - b - off, R)
    return abs(lhs - rhs)


def f_R_decomposition_report(comp: Composition) -> dict:
    """Multiset bookkeeping behind F_R^(n) = P * prod_{n_l != 1} F_R^(n_l).

    Each factor of a block polynomial, written in the original coordinates, is
    the factor of the full polynomial indexed by the embedded subset pair; the
    report verifies the embedded pairs are distinct factors of the full
    product and that the leftover count is degree_D(n) - sum degree_D(n_l).
    """
    n = comp.n
    full = {frozenset((frozenset(K), frozenset(L))) for K, L in subset_pairs(n)}
    nhat = (0,) + comp.partial_sums
    embedded: set[frozenset] = set()
    ok = True
    for ell, p in enumerate(comp.parts):
        if p == 1:
            continue
        for K, L in subset_pairs(p):
            K2 = frozenset(i + nhat[ell] for i in K)
            L2 = frozenset(i + nhat[ell] for i in L)
            pair = frozenset((K2, L2))
            if pair in embedded or pair not in full:
                ok = False
            embedded.add(pair)
    expected_left = degree_D(n) - sum(degree_D(p) for p in comp.parts if p != 1)
    return {
        "blocks_embed_distinctly": ok,
        "leftover_count": len(full) - len(embedded),
        "expected_leftover": expected_left,
        "passed": ok and len(full) - len(embedded) == expected_left,
    }


def extra_gamma_sum_identity(beta: Sequence[Fraction], parts: Sequence[int]) -> bool:
    """Exact-rational identity: sum_{k<m} n_k n_m (beta_k/n_k - beta_m/n_m)
    equals sum_j (n_j + n_{j+1}) beta-hat_j, for zero-sum rational beta."""
    beta = [Fraction(b) for b in beta]
    parts = list(parts)
    if len(beta) != len(parts):
        raise ValueError("beta and parts must have equal length")
    if sum(beta) != 0:
        raise ValueError("beta must sum to 0")
    r = len(parts)
    lhs = Fraction(0)
    for k in range(r):
        for m in range(k + 1, r):
            lhs += parts[k] * parts[m] * (beta[k] / parts[k] - beta[m] / parts[m])
    bhat = list(itertools.accumulate(beta))
    rhs = sum((parts[j] + parts[j + 1]) * bhat[j] for j in range(r - 1))
    return lhs == rhs


def verify_gamma_decompositions(
    alpha: Sequence[complex], comp: Composition, R: int
) -> dict:
    """Bundle: Gamma-product factorization residual, pair-polynomial multiset
    report, block-sum exact identity, and the quadratic split residual."""
    pp = partition_parameter(alpha, comp)
    beta_rational = [
        Fraction(round(b.imag * 2**20), 2**20) for b in pp.beta
    ]
    # Re-center to an exact zero sum for the rational identity.
    beta_rational[-1] = -sum(beta_rational[:-1])
    return {
        "gamma_residual": gamma_product_decomposition_residual(alpha, comp, R),
        "f_R": f_R_decomposition_report(comp),
        "extra_sum_exact": extra_gamma_sum_identity(beta_rational, comp.parts),
        "quad_residual": alpha_square_residual(pp),
    }

"""Spectral test functions, shifted-contour integrals, and scaling laws.

The central objects are the archimedean test function on the transform side
(a Gaussian times the auxiliary pair polynomial times a ring of Gamma
factors), its inverse-transform avatar evaluated on shifted vertical lines,
and the power-of-T scaling exponents that the desk-scale experiments verify:
the norm integral grows like T to R(2 D(n) + n(n-1)) + n - 1, and the
shifted-line integral like T to R + 3/2 minus the contour-dependent gain.

Everything integral-valued here runs in log space.  The shifted integrands
pair a Gamma ring that grows like exp(pi t) against an inner factor that
decays like exp(-pi max(|u|, t)); the exponential parts are combined before
exponentiation, so no intermediate overflows even at T in the hundreds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma, rgamma

from .combinatorics import Composition, degree_D
from .mellin import gl3_normalization
from .quadrature import AccuracyError, line_nodes
from .special import bound_B, f_R_poly

_TEMPERED_TOL = 1e-10


@dataclass(frozen=True)
class TestFunctionParams:
    """Spectral localization scale T and smoothing order R.

    ``gaussian_width`` is the w in exp(-w t^2 / T^2) after restricting to
    the tempered line; the two printed normalizations of the Gaussian damp
    factor differ here, so the width is explicit (4.0 reproduces the
    shifted-contour convention used throughout).
    """

    __test__ = False  # name collides with pytest's collection prefix

    T: float
    R: int
    gaussian_width: float = 4.0

    def __post_init__(self) -> None:
        if self.T <= 0:
            raise ValueError("T must be positive")
        if int(self.R) != self.R or self.R < 1:
            raise ValueError("R must be an integer >= 1")
        if self.gaussian_width <= 0:
            raise ValueError("gaussian_width must be positive")


def _as_params(params) -> TestFunctionParams:
    if isinstance(params, TestFunctionParams):
        return params
    T, R = params
    return TestFunctionParams(T=T, R=R)


def p_sharp(alpha, params) -> complex:
    """Transform-side test function.

    Gaussian damp at scale T, the auxiliary polynomial at half argument, and
    one Gamma factor (1 + 2R + alpha_j - alpha_k)/4 per ordered pair.
    """
    p = _as_params(params)
    a = np.asarray(alpha, dtype=np.complex128)
    n = a.size
    log = complex(np.sum(a**2)) / (2.0 * p.T**2)
    for j in range(n):
        for k in range(n):
            if j != k:
                log += loggamma((1.0 + 2.0 * p.R + a[j] - a[k]) / 4.0)
    return complex(f_R_poly(a / 2.0, p.R) * np.exp(log))


def h_value(alpha, params) -> float:
    """Spectral weight |p_sharp|^2 over the ring of Gamma((1+alpha_j-alpha_k)/2).

    Defined on the tempered line only; a parameter off the line is a domain
    error rather than an analytic continuation we silently trust.
    """
    p = _as_params(params)
    a = np.asarray(alpha, dtype=np.complex128)
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if float(np.abs(a.real).max(initial=0.0)) > _TEMPERED_TOL * scale:
        raise ValueError("spectral weight is defined for tempered parameters")
    n = a.size
    log = 2.0 * math.log(abs(p_sharp(a, p)))
    for j in range(n):
        for k in range(n):
            if j != k:
                log -= float(loggamma((1.0 + a[j] - a[k]) / 2.0).real)
    return math.exp(log)


# ---------------------------------------------------------------------------
# the rank-one inverse-transform avatar on shifted lines


def _outer_log(t: np.ndarray, p: TestFunctionParams) -> np.ndarray:
    """log of the Gaussian times |Gamma_R(2it)|^2 along the tempered line."""
    with np.errstate(divide="ignore", invalid="ignore"):
        g = 2.0 * loggamma((0.5 + p.R + 2j * t) / 2.0).real
        g -= 2.0 * loggamma(2j * t).real
    out = -p.gaussian_width * t**2 / p.T**2 + g
    return np.where(t == 0.0, -np.inf, out)


def _line_field(p: TestFunctionParams, line: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inner-line field collapsed over t: returns (u, wu, column sums).

    The y-dependence of the rank-one avatar enters only through the scalar
    prefactor and a phase linear in u, so one field evaluation serves a whole
    y-grid.
    """
    t_half = 3.2 * p.T / math.sqrt(p.gaussian_width / 4.0) + 12.0
    u_half = t_half + 16.0
    t, wt = line_nodes(t_half)
    u, wu = line_nodes(u_half)
    base = _outer_log(t, p)
    col = np.zeros(u.size, dtype=np.complex128)
    block = 128
    for lo in range(0, t.size, block):
        hi = min(lo + block, t.size)
        tb = t[lo:hi][:, None]
        g = loggamma(line + 1j * (u[None, :] + tb)) + loggamma(line + 1j * (u[None, :] - tb))
        ltu = base[lo:hi][:, None] + g.real
        col += np.sum(wt[lo:hi][:, None] * np.exp(ltu + 1j * g.imag), axis=0)
    return u, wu, col


def p_y_batch(y_values, params, line: float = 0.75) -> np.ndarray:
    """Rank-one avatar p(y) on the vertical line Re(s) = line, for many y.

    line must avoid the nonpositive integers where the inner Gamma factors
    put poles on the contour.
    """
    p = _as_params(params)
    if line <= 0 and abs(line - round(line)) < 1e-6:
        raise ValueError("contour line sits on a pole of the integrand")
    u, wu, col = _line_field(p, line)
    out = np.empty(len(y_values))
    for i, y in enumerate(y_values):
        if y <= 0:
            raise ValueError("y must be positive")
        c = math.log(math.pi * y)
        pref = math.sqrt(y) * math.exp(-2.0 * line * c)
        val = pref * np.sum(wu * col * np.exp(-2j * u * c)) / (2.0 * math.pi) ** 2
        out[i] = val.real
    return out


def p_y(y: float, params, line: float = 0.75) -> float:
    return float(p_y_batch([y], params, line=line)[0])


def _gl3_spectral_log(t1: np.ndarray, t2: np.ndarray, p: TestFunctionParams) -> np.ndarray:
    """log of the rank-three spectral density on the tempered line.

    Parameters (i t1, i t2, -i(t1 + t2)); the three unordered differences
    each contribute the pair-polynomial factor at full argument and the
    quotient of the shifted Gamma ring by the coincidence measure.  The
    Gaussian width carries over from the rank-one convention (w = 16 is
    the plain exp(2 sum alpha^2 / T^2) weight).  Exact coincidences are
    zeros of the density, returned as -inf.
    """
    out = -(p.gaussian_width / 8.0) * (t1**2 + t2**2 + (t1 + t2) ** 2) / p.T**2
    for d in (t1 - t2, 2.0 * t1 + t2, t1 + 2.0 * t2):
        sing = np.abs(d) < 1e-12
        dd = np.where(sing, 1.0, d)
        out = out + (p.R / 2.0) * np.log1p(d**2)
        out = out + 2.0 * loggamma((1.0 + 2.0 * p.R + 1j * d) / 4.0).real
        out = out - 2.0 * loggamma(0.5j * dd).real
        out = np.where(sing, -np.inf, out)
    return out


def _gl3_plane(
    log_py1: float,
    log_py2: float,
    tau1: float,
    tau2: float,
    line: float,
    v: np.ndarray,
    rg: np.ndarray,
    kappa: float,
) -> complex:
    """Double Mellin integral of the closed rank-two transform at one
    spectral point, as (2 pi i)^{-2} times the contour integral over the
    product of two copies of Re(s) = line.

    The transform's reciprocal coupling depends only on s1 + s2, so on
    uniform grids the tensor sum collapses to a single convolution of the
    per-line fields; rg must hold the reciprocal coupling on the sum grid
    2 v[0] + step * arange(2 len(v) - 1).
    """
    h = v[1] - v[0]
    s = line + 1j * v
    e1 = np.exp(
        loggamma(s + 1j * tau1)
        + loggamma(s + 1j * tau2)
        + loggamma(s - 1j * (tau1 + tau2))
        - 2.0 * s * log_py1
    )
    e2 = np.exp(
        loggamma(s - 1j * tau1)
        + loggamma(s - 1j * tau2)
        + loggamma(s + 1j * (tau1 + tau2))
        - 2.0 * s * log_py2
    )
    return kappa * (h / (2.0 * math.pi)) ** 2 * complex(np.dot(np.convolve(e1, e2), rg))


def p_y_gl3(
    y,
    params,
    *,
    experimental: bool = False,
    line: float = 0.75,
    spectral_step: float = 0.25,
    spectral_pad: float = 6.0,
    mellin_step: float = 0.125,
    mellin_pad: float = 10.0,
    density_floor: float = 1e-16,
) -> float:
    """Rank-three inverse-transform avatar at y = (y1, y2).

    Four nested contours: the tempered spectral plane weighted by
    _gl3_spectral_log, times the double Mellin integral of the closed
    rank-two transform against y1 y2 (pi y1)^{-2 s1} (pi y2)^{-2 s2},
    with the overall 2^{-(n-1)}.  The Mellin plane collapses to one
    convolution per spectral node (see _gl3_plane), so a full evaluation
    at the default steps costs seconds rather than minutes; it is still
    gated behind ``experimental`` because the quadrature is fixed-step
    with no adaptive refinement, and unlike the rank-one avatar there is
    no shifted-contour decomposition here to check it against.

    Uniform-step aliasing on each Mellin line is controlled by the width
    of the pole-free strip, decaying like exp(-2 pi line / mellin_step);
    the plane sums cancel by many orders, and the default step keeps the
    aliasing below that floor.  y far from 1/pi adds phase 2 v log(pi y)
    and may need a smaller step still.
    """
    if not experimental:
        raise ValueError(
            "the rank-three avatar is experimental (fixed-step quadrature "
            "over four nested contours); pass experimental=True to evaluate"
        )
    y1, y2 = float(y[0]), float(y[1])
    if y1 <= 0 or y2 <= 0:
        raise ValueError("y components must be positive")
    p = _as_params(params)
    half_t = 6.4 * p.T / math.sqrt(p.gaussian_width) + spectral_pad
    n_t = int(math.ceil(half_t / spectral_step))
    tau = spectral_step * np.arange(-n_t, n_t + 1)
    # the line fields peak near v = -shift with shifts up to twice the
    # Gaussian-supported spectral range
    half_v = 2.0 * (half_t - spectral_pad) + mellin_pad
    n_v = int(math.ceil(half_v / mellin_step))
    v = mellin_step * np.arange(-n_v, n_v + 1)
    u = 2.0 * v[0] + mellin_step * np.arange(2 * v.size - 1)
    rg = rgamma(2.0 * line + 1j * u)
    if not np.all(np.isfinite(rg)):
        raise AccuracyError(
            "reciprocal coupling overflows on the sum grid; the fixed-grid "
            "rank-three avatar is limited to moderate T"
        )
    kappa = gl3_normalization()
    log_py1 = math.log(math.pi * y1)
    log_py2 = math.log(math.pi * y2)
    t1g, t2g = np.meshgrid(tau, tau, indexing="ij")
    dens = _gl3_spectral_log(t1g, t2g, p)
    cut = dens.max() + math.log(density_floor)
    total = 0.0 + 0.0j
    for i, j in np.argwhere(dens > cut):
        total += math.exp(dens[i, j]) * _gl3_plane(
            log_py1, log_py2, tau[i], tau[j], line, v, rg, kappa
        )
    scale = y1 * y2 * spectral_step**2 / (4.0 * (2.0 * math.pi) ** 2)
    return float((scale * total).real)


def residue_term(y: float, params, delta: int = 0, a=None, comp=(1, 1)) -> float:
    """One constant-free residue term of the rank-one contour shift.

    This is the term picked up at the inner pole with displacement delta;
    the decomposition multiplies it by the composition constant.  When the
    shift vector ``a`` is supplied, the admissibility gate applies: a
    composition whose cut has a nonpositive shift entry contributes nothing,
    and neither do displacements beyond floor(a) at the cut.
    """
    p = _as_params(params)
    comp = comp if isinstance(comp, Composition) else Composition(tuple(comp))
    if a is not None:
        a_vec = np.atleast_1d(np.asarray(a, dtype=float))
        cuts = np.cumsum(comp.parts)[:-1]
        if np.any(a_vec[cuts - 1] <= 0.0):
            return 0.0
        if delta > math.floor(float(a_vec[cuts[0] - 1])):
            return 0.0
    if y <= 0:
        raise ValueError("y must be positive")
    t_half = 3.2 * p.T / math.sqrt(p.gaussian_width / 4.0) + 12.0
    t, wt = line_nodes(t_half)
    base = _outer_log(t, p)
    g = loggamma(-delta - 2j * t)
    c = math.log(math.pi * y)
    phase = np.exp(base + g.real + 1j * (g.imag + 2.0 * t * c))
    total = np.sum(wt * phase) * (-1.0) ** delta / math.factorial(delta)
    pref = math.sqrt(y) * math.exp(2.0 * delta * c) / (2.0 * math.pi)
    return float((pref * total).real)


def residue_decomposition_check(
    params,
    a: float = 0.75,
    line: float = 0.75,
    y_values=None,
) -> dict:
    """Fit the single composition constant in the contour-shift decomposition.

    Computes p(y) on the unshifted and shifted lines over a y-grid, forms the
    displacement-summed residue column, and solves for the one scalar kappa
    by least squares.  The relative residual measures how well the three-term
    decomposition closes; the constant should be the composition count 2.
    """
    p = _as_params(params)
    if a <= 0 or abs(a - round(a)) < 1e-9:
        raise ValueError("shift a must be positive and nonintegral")
    if y_values is None:
        y_values = np.geomspace(0.4, 2.5, 10)
    y_values = np.asarray(y_values, dtype=float)
    lhs = p_y_batch(y_values, p, line=line) - p_y_batch(y_values, p, line=-a)
    basis = np.zeros_like(lhs)
    for i, y in enumerate(y_values):
        for delta in range(int(math.floor(a)) + 1):
            basis[i] += residue_term(y, p, delta=delta, a=(a,), comp=(1, 1))
    kappa_fit = float(np.dot(lhs, basis) / np.dot(basis, basis))
    resid = lhs - kappa_fit * basis
    scale = float(np.abs(lhs).max())
    return {
        "a": a,
        "line": line,
        "y_values": y_values.tolist(),
        "kappa_fit": kappa_fit,
        "max_rel_residual": float(np.abs(resid).max() / scale),
        "expected_kappa": 2.0,
    }


# ---------------------------------------------------------------------------
# shifted-line norm integral and its scaling


def itr_log(a: float, params, grid_step: float = 1.0 / 16, t_factor: float = 2.7, pad: float = 14.0) -> float:
    """log of the shifted-line norm integral for the rank-one transform.

    Outer tempered integral against |Gamma_R(2it)|^2, inner integral of
    |Gamma(-a+i(u+t)) Gamma(-a+i(u-t))| along Re(s) = -a.  The inner Gamma
    pair is tabulated once with its exponential part removed and recombined
    by index shifting, which keeps the whole computation polynomial-sized
    in log space.
    """
    p = _as_params(params)
    if abs(a - round(a)) < 1e-9 and a >= 0:
        raise ValueError("shift a must avoid the pole set of the integrand")
    dv = grid_step
    t_max = t_factor * p.T + 12.0
    t = np.arange(dv, t_max, dv)
    u = np.arange(-(t_max + pad), t_max + pad + dv / 2, dv)
    lh = loggamma(-a + 1j * u).real + np.pi * np.abs(u) / 2.0
    n0 = u.size
    log_inner = np.empty_like(t)
    for i, ti in enumerate(t):
        k = int(round(ti / dv))
        if n0 - 2 * k <= 0:
            log_inner[i] = -np.inf
            continue
        s = lh[2 * k :] + lh[: n0 - 2 * k] if k > 0 else 2.0 * lh
        uc = u[k : n0 - k]
        tot = s + np.minimum(0.0, -np.pi * (np.abs(uc) - ti))
        mx = tot.max()
        log_inner[i] = mx + math.log(np.sum(np.exp(tot - mx)) * dv)
    li = _outer_log(t, p) - np.pi * t + log_inner
    mx = li.max()
    return float(mx + math.log(2.0 * np.sum(np.exp(li - mx)) * dv))


def itr_value(a: float, params, **kw) -> float:
    return math.exp(itr_log(a, params, **kw))


# ---------------------------------------------------------------------------
# main-term norm integrals


def _pair_polynomial_log3(t1: np.ndarray, t2: np.ndarray, R: int) -> np.ndarray:
    # three singleton subset pairs at half argument
    d12 = (t1 - t2) / 2.0
    d13 = (2.0 * t1 + t2) / 2.0
    d23 = (t1 + 2.0 * t2) / 2.0
    return (R / 2.0) * (np.log1p(d12**2) + np.log1p(d13**2) + np.log1p(d23**2))


def main_term_log(n: int, R: int, T: float) -> float:
    """log of the spectral norm integral whose T-growth is the main term.

    The integrand is |p_sharp|^2 over the Plancherel Gamma ring, restricted
    to the tempered line and evaluated on a uniform grid; the coincidence
    hyperplanes carry double zeros and are excised exactly.
    """
    if n == 2:
        t = np.arange(1.0 / 16, 3.2 * T + 20.0, 1.0 / 8)
        with np.errstate(divide="ignore"):
            ln = 4.0 * loggamma((2.0 * R + 1.0 + 2j * t) / 4.0).real
            ln -= 2.0 * loggamma(1j * t).real
        li = -2.0 * t**2 / T**2 + ln
        mx = li.max()
        return float(mx + math.log(2.0 * np.sum(np.exp(li - mx)) / 8.0))
    if n == 3:
        h = 0.5
        g = np.arange(-3.0 * T - 15.0, 3.0 * T + 15.0 + h / 2, h)
        t1, t2 = np.meshgrid(g, g, indexing="ij")
        t3 = -t1 - t2
        li = -(t1**2 + t2**2 + t3**2) / T**2 + 2.0 * _pair_polynomial_log3(t1, t2, R)
        with np.errstate(divide="ignore", invalid="ignore"):
            for x, yv in ((t1, t2), (t1, t3), (t2, t3)):
                d = x - yv
                li += 4.0 * loggamma((2.0 * R + 1.0 + 1j * d) / 4.0).real
                li -= 2.0 * loggamma(1j * d / 2.0 + np.where(np.abs(d) < 1e-12, 1.0, 0.0)).real
                li = np.where(np.abs(d) < 1e-12, -np.inf, li)
        mx = li.max()
        return float(mx + math.log(np.sum(np.exp(li - mx)) * h * h))
    raise NotImplementedError("main-term integral implemented for n = 2, 3")


# ---------------------------------------------------------------------------
# scaling fits


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares slope of log(value) against log(T), with the prediction."""

    T_values: tuple[float, ...]
    log_values: tuple[float, ...]
    slope: float
    intercept: float
    predicted: float

    @property
    def residual(self) -> float:
        return self.slope - self.predicted

    @property
    def within(self) -> float:
        return abs(self.residual)


def fit_scaling(T_values, log_values, predicted: float) -> ScalingFit:
    """Fit a power law from >= 4 log-spaced scales."""
    T_values = [float(v) for v in T_values]
    log_values = [float(v) for v in log_values]
    if len(T_values) < 4:
        raise ValueError("need at least 4 scales for a stable slope")
    if len(T_values) != len(log_values):
        raise ValueError("length mismatch")
    slope, intercept = np.polyfit(np.log(T_values), log_values, 1)
    return ScalingFit(
        T_values=tuple(T_values),
        log_values=tuple(log_values),
        slope=float(slope),
        intercept=float(intercept),
        predicted=float(predicted),
    )


def itr_scaling(a: float, R: int, T_values=(16.0, 32.0, 64.0, 128.0)) -> ScalingFit:
    """Measured vs predicted growth of the shifted-line norm integral.

    Prediction R + 3/2 - B(a) with the piecewise contour gain B.
    """
    logs = [itr_log(a, TestFunctionParams(T=T, R=R)) for T in T_values]
    return fit_scaling(T_values, logs, R + 1.5 - bound_B(a))


def main_term_scaling(n: int, R: int, T_values=None) -> ScalingFit:
    """Measured vs predicted growth of the main-term norm integral.

    Prediction R (2 D(n) + n(n-1)) + n - 1.
    """
    if T_values is None:
        T_values = (16.0, 32.0, 64.0, 128.0) if n == 2 else (8.0, 16.0, 32.0, 64.0)
    logs = [main_term_log(n, R, T) for T in T_values]
    predicted = R * (2 * degree_D(n) + n * (n - 1)) + n - 1
    return fit_scaling(T_values, logs, predicted)

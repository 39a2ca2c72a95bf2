"""Matrix-level structure: Iwasawa coordinates, the power function, additive
characters, block anti-diagonal Weyl elements, and modular characters.

Conventions: t(a) = diag(a_1 ... a_{n-1}, ..., a_1 a_2, a_1, 1), so the
bottom-right entry is normalized to 1 and the Iwasawa y-variables are ratios
of consecutive diagonal entries read from the bottom up.  Permutation
matrices act by W e_j = e_{sigma(j)}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .combinatorics import Composition


class DecompositionError(ValueError):
    """Matrix not decomposable (numerically singular)."""


@dataclass(frozen=True)
class IwasawaPoint:
    """x t(y): strictly upper triangular coordinates plus positive y."""

    x: np.ndarray  # (n, n) strictly upper triangular
    y: np.ndarray  # (n-1,) positive

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        n = x.shape[0]
        if x.shape != (n, n) or len(y) != n - 1:
            raise ValueError("inconsistent dimensions")
        if np.any(np.tril(x, 0) != 0):
            raise ValueError("x must be strictly upper triangular")
        if np.any(y <= 0):
            raise ValueError("y entries must be positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def matrix(self) -> np.ndarray:
        return (np.eye(self.n) + self.x) @ toric_matrix(self.y)


def toric_matrix(a: Sequence[float]) -> np.ndarray:
    """diag(a_1...a_{n-1}, ..., a_1 a_2, a_1, 1) for positive a."""
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise ValueError("entries must be positive")
    n = len(a) + 1
    d = np.ones(n)
    for i in range(n - 2, -1, -1):
        d[i] = d[i + 1] * a[n - 2 - i]
    return np.diag(d)


def iwasawa_decompose(g: np.ndarray) -> tuple[IwasawaPoint, np.ndarray, float]:
    """g = x t(y) k c with k orthogonal and c > 0 scalar.

    Rows are orthogonalized from the bottom up, which pins the normalization
    to the bottom-right entry; determinant sign lands in k.
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    if g.shape != (n, n):
        raise ValueError("need a square matrix")
    scale = np.abs(g).max()
    if scale == 0:
        raise DecompositionError("zero matrix")
    k = np.zeros((n, n))
    d = np.zeros(n)
    coeff = np.zeros((n, n))
    for i in range(n - 1, -1, -1):
        v = g[i].astype(float).copy()
        for j in range(i + 1, n):
            coeff[i, j] = g[i] @ k[j]
            v -= coeff[i, j] * k[j]
        norm = np.linalg.norm(v)
        if norm < 1e-13 * scale:
            raise DecompositionError("matrix is numerically singular")
        d[i] = norm
        k[i] = v / norm
    x = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            x[i, j] = coeff[i, j] / d[j]
    c = d[n - 1]
    y = d[:-1][::-1] / d[1:][::-1]  # y_k = d_{n-k}/d_{n-k+1}, 1-based
    return IwasawaPoint(x=x, y=y), k, float(c)


def power_function(p: IwasawaPoint, alpha: Sequence[complex]) -> complex:
    """prod_i y_i^(alpha-hat_{n-i} + rho-hat_{n-i}) with rho_i = (n+1)/2 - i."""
    a = np.asarray(alpha, dtype=complex)
    n = p.n
    if len(a) != n:
        raise ValueError("parameter length must match the matrix size")
    if abs(a.sum()) > 1e-10 * max(1.0, np.abs(a).max()):
        raise ValueError("parameter entries must sum to 0")
    ahat = np.cumsum(a)
    rhohat = np.cumsum([(n + 1) / 2 - i for i in range(1, n + 1)])
    out = 1.0 + 0.0j
    for i in range(1, n):
        out *= complex(p.y[i - 1]) ** (ahat[n - i - 1] + rhohat[n - i - 1])
    return out


def psi_phase(x: np.ndarray, m: Sequence[int]) -> float:
    """Superdiagonal phase sum m_1 x_{1,2} + ... + m_{n-1} x_{n-1,n}."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    n = x.shape[0]
    if len(m) != n - 1:
        raise ValueError("index vector must have length n-1")
    return float(sum(m[k] * x[k, k + 1] for k in range(n - 1)))


def psi_M(x: np.ndarray, m: Sequence[int]) -> tuple[complex, float]:
    """The character e^(2 pi i phase) and its phase."""
    phase = psi_phase(x, m)
    return complex(np.exp(2j * np.pi * phase)), phase


def psi_M_twisted(x: np.ndarray, m: Sequence[int], v: Sequence[int]) -> tuple[complex, float]:
    """psi_M(v^-1 x v) for v = diag(+-1): flips m_k by the sign v_k v_{k+1}."""
    v = np.asarray(v, dtype=int)
    if set(np.abs(v)) != {1}:
        raise ValueError("v must be a vector of +-1 signs")
    m = np.asarray(m, dtype=int)
    flipped = m * v[:-1] * v[1:]
    return psi_M(x, flipped)


@dataclass(frozen=True)
class WeylElement:
    """Block anti-diagonal permutation w_(n_1,...,n_r): identity blocks of
    sizes n_r, ..., n_1 read down the anti-diagonal."""

    composition: Composition

    @property
    def n(self) -> int:
        return self.composition.n

    def matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for i, s in enumerate(self.permutation()):
            w[s, i] = 1.0
        return w

    def permutation(self) -> tuple[int, ...]:
        """sigma with W e_j = e_sigma(j): block l of columns maps to rows
        starting at n - nhat_l (0-based)."""
        n = self.n
        nhat = (0,) + self.composition.partial_sums
        sigma = [0] * n
        for ell, p in enumerate(self.composition.parts):
            for j in range(p):
                sigma[nhat[ell] + j] = n - nhat[ell + 1] + j
        return tuple(sigma)

    def inversion_pairs(self) -> list[tuple[int, int]]:
        """0-based (i, j), i < j, with sigma(i) > sigma(j): the coordinate
        pattern of the opposite unipotent subgroup attached to w."""
        s = self.permutation()
        n = self.n
        return [(i, j) for i in range(n) for j in range(i + 1, n) if s[i] > s[j]]

    @property
    def is_long(self) -> bool:
        return self.composition.parts == (1,) * self.n


def weyl_conjugate_y(w: WeylElement, y: Sequence[float]) -> np.ndarray:
    """Iwasawa y-coordinates of w t(y) w^-1, by the block closed form:
    within a block the variables shift, y'_{nhat_{i-1}+j} = y_{n-nhat_i+j};
    at each block boundary the new variable is an inverted product,
    y'_{nhat_i} = (prod_{k=1}^{n_i+n_{i+1}-1} y_{n-nhat_{i+1}+k})^(-1).
    """
    comp = w.composition
    if comp.r < 2:
        raise ValueError("the identity block w_(n) does not move y")
    y = np.asarray(y, dtype=float)
    n = comp.n
    if len(y) != n - 1 or np.any(y <= 0):
        raise ValueError("y must be a positive vector of length n-1")
    parts = comp.parts
    nhat = (0,) + comp.partial_sums
    out = np.empty(n - 1)
    for i in range(1, comp.r + 1):
        for j in range(1, parts[i - 1]):
            out[nhat[i - 1] + j - 1] = y[n - nhat[i] + j - 1]
        if i < comp.r:
            prod = 1.0
            for k in range(1, parts[i - 1] + parts[i]):
                prod *= y[n - nhat[i + 1] + k - 1]
            out[nhat[i] - 1] = 1.0 / prod
    return out


def weyl_conjugate_y_oracle(w: WeylElement, y: Sequence[float]) -> np.ndarray:
    """Same map by direct matrix conjugation: permute the diagonal of t(y)
    and read off consecutive ratios (scale-invariant)."""
    t = toric_matrix(y)
    wm = w.matrix()
    d = np.diag(wm @ t @ wm.T)
    n = len(d)
    return np.array([d[n - k - 1] / d[n - k] for k in range(1, n)])


def weyl_norm_exponents(w: WeylElement, a: Sequence[float]) -> np.ndarray:
    """Exponent vector e with ||w y w^-1||^a = prod_k y_k^e_k, from the
    closed form -a_{nhat_{i-1}} + a_{nhat_{i-1}+j} - a_{nhat_i} attached to
    y_{n-nhat_i+j} (conventions a_0 = a_n = 0)."""
    comp = w.composition
    n = comp.n
    a_ext = np.zeros(n + 1)
    a_ext[1:n] = np.asarray(a, dtype=float)
    parts = comp.parts
    nhat = (0,) + comp.partial_sums
    e = np.zeros(n - 1)
    for i in range(1, comp.r + 1):
        for j in range(1, parts[i - 1] + 1):
            idx = n - nhat[i] + j
            if idx == n:
                continue
            e[idx - 1] += -a_ext[nhat[i - 1]] + a_ext[nhat[i - 1] + j] - a_ext[nhat[i]]
    return e


def modular_delta_diag(d: Sequence[float]) -> float:
    """The modular character with d(t^-1 u t) = delta(t) du on the upper
    unipotent coordinates: prod_{i<j} d_j/d_i.  Scale-invariant."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("diagonal entries must be positive")
    n = len(d)
    out = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            out *= d[j] / d[i]
    return float(out)


def modular_delta(y: Sequence[float]) -> float:
    """delta(t(y)); satisfies delta^(-1/2)(y) = ||y||^a, a_j = j(n-j)/2."""
    return modular_delta_diag(np.diag(toric_matrix(y)))


def y_norm(y: Sequence[float], a: Sequence[float]) -> float:
    """||y||^a = prod y_k^a_k."""
    y = np.asarray(y, dtype=float)
    a = np.asarray(a, dtype=float)
    if len(a) != len(y):
        raise ValueError("length mismatch")
    return float(np.prod(y**a))


def half_weight_exponents(n: int) -> list[Fraction]:
    """a_j = j(n-j)/2, the exponents with delta^(-1/2)(y) = ||y||^a."""
    return [Fraction(j * (n - j), 2) for j in range(1, n)]


def delta_w(w: WeylElement, y: Sequence[float]) -> float:
    """Jacobian of u -> t u t^(-1) on the opposite-pattern coordinates of w,
    at t = t(y): the product of d_i/d_j over inversion pairs (i, j)."""
    d = np.diag(toric_matrix(y))
    out = 1.0
    for i, j in w.inversion_pairs():
        out *= d[i] / d[j]
    return float(out)


def delta_w_identity_residual(w: WeylElement, y: Sequence[float]) -> float:
    """|delta_w(y) - delta^(-1/2)(y) delta^(1/2)(w y w^-1)| / delta_w(y).

    Both sides are scale-invariant, so conjugating the literal diagonal and
    conjugating the normalized toric form give the same value.
    """
    t = toric_matrix(y)
    wm = w.matrix()
    d_conj = np.diag(wm @ t @ wm.T)
    lhs = delta_w(w, y)
    rhs = math.sqrt(modular_delta_diag(d_conj)) / math.sqrt(modular_delta(y))
    return abs(lhs - rhs) / abs(lhs)


def xi_polynomials_long_gl4(u: np.ndarray) -> np.ndarray:
    """Closed polynomial forms of (xi_1, xi_2, xi_3) for the n = 4 long
    element: sums of squared minors of the bottom rows of w u.

    Independent of the Iwasawa route in xi_values; the two must agree on
    the full inversion pattern.
    """
    u = np.asarray(u, dtype=float)
    x12, x13, x14 = u[0, 1], u[0, 2], u[0, 3]
    x23, x24 = u[1, 2], u[1, 3]
    x34 = u[2, 3]
    xi1 = 1 + x12**2 + x13**2 + x14**2
    xi2 = (
        1
        + x23**2
        + x24**2
        + (x12 * x24 - x14) ** 2
        + (x12 * x23 - x13) ** 2
        + (x13 * x24 - x14 * x23) ** 2
    )
    xi3 = (
        1
        + x34**2
        + (x23 * x34 - x24) ** 2
        + (x12 * x23 * x34 - x13 * x34 - x12 * x24 + x14) ** 2
    )
    return np.array([xi1, xi2, xi3])


def xi_values(w: WeylElement, u: np.ndarray) -> np.ndarray:
    """(xi_1, ..., xi_{n-1}) of wu via Iwasawa: with wu = u_0 t k and
    t = diag(t_1, ..., t_n), xi_k = (t_{n-k+1} ... t_n)^2.

    u must be upper unipotent supported on the inversion pattern of w.
    """
    u = np.asarray(u, dtype=float)
    n = w.n
    if u.shape != (n, n):
        raise ValueError("u has the wrong size")
    if np.any(np.diag(u) != 1) or np.any(np.tril(u, -1) != 0):
        raise ValueError("u must be upper unipotent")
    allowed = set(w.inversion_pairs())
    for i in range(n):
        for j in range(i + 1, n):
            if u[i, j] != 0 and (i, j) not in allowed:
                raise ValueError(f"entry ({i + 1},{j + 1}) is outside the pattern of w")
    p, _, c = iwasawa_decompose(w.matrix() @ u)
    t_diag = np.diag(toric_matrix(p.y)) * c
    xi = np.empty(n - 1)
    acc = 1.0
    for k in range(1, n):
        acc *= t_diag[n - k] ** 2
        xi[k - 1] = acc
    return xi

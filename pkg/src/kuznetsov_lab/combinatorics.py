"""Exact combinatorics of compositions and block Weyl elements.

Compositions (n_1,...,n_r) of n index the relevant Weyl elements and the
residue terms of the shifted contour expansion.  Everything in this module is
exact integer / rational arithmetic; floating point never enters.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class Composition:
    """Ordered tuple of positive integers (n_1,...,n_r) summing to n."""

    parts: tuple[int, ...]
    n: int = field(init=False)
    r: int = field(init=False)

    def __post_init__(self) -> None:
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError(f"parts must be positive integers, got {self.parts}")
        object.__setattr__(self, "n", sum(self.parts))
        object.__setattr__(self, "r", len(self.parts))

    @property
    def partial_sums(self) -> tuple[int, ...]:
        """(n-hat_1, ..., n-hat_r) with n-hat_r = n."""
        return tuple(itertools.accumulate(self.parts))


def enumerate_compositions(n: int, min_length: int = 1) -> list[Composition]:
    """All ordered compositions of n with at least min_length parts, in
    lexicographic order of the parts tuple."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out: list[Composition] = []

    def rec(remaining: int, prefix: tuple[int, ...]) -> None:
        if remaining == 0:
            if len(prefix) >= min_length:
                out.append(Composition(prefix))
            return
        for p in range(1, remaining + 1):
            rec(remaining - p, prefix + (p,))

    rec(n, ())
    out.sort(key=lambda c: c.parts)
    return out


def admissible_compositions(a: Sequence[float]) -> list[Composition]:
    """Compositions of n = len(a)+1 with r >= 2 whose interior partial sums
    n-hat_i all land on strictly positive shift entries a_{n-hat_i}.

    Only these compositions contribute residue terms when the Mellin contour
    is moved from Re(s) = b > 0 to Re(s) = -a.
    """
    n = len(a) + 1
    keep = []
    for comp in enumerate_compositions(n, min_length=2):
        if all(a[k - 1] > 0 for k in comp.partial_sums[:-1]):
            keep.append(comp)
    return keep


def degree_D(n: int) -> int:
    """Degree count D(n) for the pair polynomial, via its two closed forms.

    The sum over subset sizes and the central-binomial form must agree; both
    are computed and cross-checked on every call.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    by_sum = sum(
        math.comb(n, j) * (math.comb(n, j) - 1) // 2 for j in range(1, n - 1)
    )
    by_binom = math.comb(2 * n, n) // 2 - n * (n - 1) // 2 - 2 ** (n - 1)
    if by_sum != by_binom:
        raise AssertionError(f"D({n}) closed forms disagree: {by_sum} != {by_binom}")
    return by_sum


def phi(comp: Composition) -> Fraction:
    """The exponent functional Phi(n_1,...,n_r) = (1/2) sum_k (n_k+n_{k+1})
    (n - n-hat_k) n-hat_k, as an exact rational.

    Half-integer values occur (e.g. (1,2,1) has a 9/2 contribution), so the
    result is a Fraction; it is asserted to be integral or half-integral.
    """
    if comp.r < 2:
        raise ValueError("phi needs r >= 2")
    n = comp.n
    nhat = comp.partial_sums
    total = Fraction(0)
    for k in range(comp.r - 1):
        total += Fraction((comp.parts[k] + comp.parts[k + 1]) * (n - nhat[k]) * nhat[k], 2)
    assert total.denominator in (1, 2)
    return total


def kappa(comp: Composition) -> int:
    """Orbit constant kappa(C) = n! / (n_1! ... n_{r-1}!).

    Note the last part is absent from the denominator; see kappa_orbit for the
    brute-force orbit count, which divides by n_r! as well.  The two agree
    exactly when n_r = 1.
    """
    if comp.r < 2:
        raise ValueError("kappa needs r >= 2")
    denom = math.prod(math.factorial(p) for p in comp.parts[:-1])
    return math.factorial(comp.n) // denom


def kappa_orbit(comp: Composition) -> int:
    """Brute-force size of the S_n orbit of the interior partial-sum tuple.

    Generic parameters are modeled by alpha_i = 2^i, whose subset sums are
    injective, so two permutations give the same tuple of partial sums iff
    they give the same flag of initial sets.  Feasible for n <= 8.
    """
    if comp.r < 2:
        raise ValueError("kappa_orbit needs r >= 2")
    n = comp.n
    if n > 8:
        raise ValueError("orbit enumeration is exponential; use n <= 8")
    generic = [2**i for i in range(n)]
    cuts = comp.partial_sums[:-1]
    seen = set()
    for perm in itertools.permutations(range(n)):
        acc = 0
        sums = []
        for i, idx in enumerate(perm, start=1):
            acc += generic[idx]
            if i in cuts:
                sums.append(acc)
        seen.add(tuple(sums))
    return len(seen)


def verify_partition_identities(n_max: int) -> dict:
    """Exhaustively check the two exact composition identities for n <= n_max.

    For C = (n_1,...,n_r) of n:
      (i)  sum_{k<k'} n_k n_{k'} + sum_k n_k(n_k-1)/2             = n(n-1)/2
      (ii) n^2 + sum_l ( n_l(n_l-1)/2 - n_l n-hat_l )             = n(n-1)/2

    Returns {"passed": bool, "checked": int, "first_counterexample": ...}.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    checked = 0
    for n in range(2, n_max + 1):
        target = n * (n - 1) // 2
        for comp in enumerate_compositions(n, min_length=1):
            parts, nhat = comp.parts, comp.partial_sums
            cross = sum(
                parts[k] * parts[kp]
                for k in range(comp.r)
                for kp in range(k + 1, comp.r)
            )
            within = sum(p * (p - 1) // 2 for p in parts)
            lhs2 = n * n + sum(
                p * (p - 1) // 2 - p * h for p, h in zip(parts, nhat)
            )
            checked += 1
            if cross + within != target or lhs2 != target:
                return {
                    "passed": False,
                    "checked": checked,
                    "first_counterexample": parts,
                }
    return {"passed": True, "checked": checked, "first_counterexample": None}


def _require_half_integer(rho: Fraction) -> Fraction:
    rho = Fraction(rho)
    if rho.denominator != 2:
        raise ValueError(f"rho must be a half-integer, got {rho}")
    return rho


def exponent_vector_a(n: int, rho: Fraction) -> list[Fraction]:
    """The canonical shift a_k = rho + k(n-k)/2, k = 1..n-1 (exact)."""
    rho = Fraction(rho)
    return [rho + Fraction(k * (n - k), 2) for k in range(1, n)]


def count_nonintegral_exponents(comp: Composition, rho: Fraction) -> int:
    """Count the non-integral entries among the canonical a_k and the block
    exponents b_{i,j} = a_{n-hat_{i-1}} - a_{n-hat_{i-1}+j} + a_{n-hat_i}.

    The b-count runs over 1 <= i <= r, 1 <= j <= n_i with the boundary pair
    (i,j) = (r, n_r) excluded: that entry merely duplicates a_{n-hat_{r-1}},
    which is already counted among the a_k, and only n-1 of the b's are honest
    components.  (For odd n and r=2 the total must be n-1, which pins this
    convention down.)

    The count equals even_odd_exact_form for every composition.  The simpler
    even_odd_closed_form matches it for all odd n but overcounts some even-n
    compositions: a middle block of odd size sitting at an odd partial sum
    contributes floor(n_i/2), not ceil(n_i/2).  First divergence at n=4,
    C=(1,1,2): b_{2,1} = a_1 is an integer for every half-integer rho, so the
    middle block contributes 0 where the simple form claims 1.
    """
    rho = _require_half_integer(rho)
    n = comp.n
    a = [Fraction(0)] + exponent_vector_a(n, rho) + [Fraction(0)]  # a[0..n]
    count = sum(1 for k in range(1, n) if a[k].denominator != 1)
    nhat = (0,) + comp.partial_sums
    for i in range(1, comp.r + 1):
        for j in range(1, comp.parts[i - 1] + 1):
            if i == comp.r and j == comp.parts[i - 1]:
                continue
            b = a[nhat[i - 1]] - a[nhat[i - 1] + j] + a[nhat[i]]
            if b.denominator != 1:
                count += 1
    return count


def even_odd_closed_form(comp: Composition) -> int:
    """Simple closed form for the nonintegral-exponent count (rho-free).

    Odd n: 2n - n_1 - n_r - 1.  Even n: n/2 - 1 + floor(n_1/2) + floor(n_r/2)
    + sum over middle blocks of ceil(n_i/2).  Exact for odd n; for even n it
    overcounts whenever an odd middle block starts at an odd partial sum (see
    even_odd_exact_form).
    """
    n, parts, r = comp.n, comp.parts, comp.r
    if n % 2 == 1:
        return 2 * n - parts[0] - parts[-1] - 1
    middle = sum(-(-parts[i] // 2) for i in range(1, r - 1))  # ceil
    return n // 2 - 1 + parts[0] // 2 + parts[-1] // 2 + middle


def even_odd_exact_form(comp: Composition) -> int:
    """Cut-parity-aware closed form; agrees with count_nonintegral_exponents
    for every composition and every half-integer rho.

    Same as even_odd_closed_form except that for even n an odd-sized middle
    block contributes ceil(n_i/2) when its starting partial sum n-hat_{i-1}
    is even but floor(n_i/2) when it is odd (the parity of k+j, not j alone,
    decides integrality of b_{i,j}).
    """
    n, parts, r = comp.n, comp.parts, comp.r
    if n % 2 == 1:
        return 2 * n - parts[0] - parts[-1] - 1
    nhat = (0,) + comp.partial_sums
    middle = 0
    for i in range(1, r - 1):
        p = parts[i]
        if p % 2 == 0 or nhat[i] % 2 == 0:
            middle += -(-p // 2)  # ceil
        else:
            middle += p // 2
    return n // 2 - 1 + parts[0] // 2 + parts[-1] // 2 + middle

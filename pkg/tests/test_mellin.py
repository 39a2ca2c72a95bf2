"""Mellin transform evaluators, shift identities, residues, inversion."""

import math

import numpy as np
import pytest

from kuznetsov_lab.mellin import (
    MellinPoint,
    ResidueSpec,
    ShiftVector,
    WhittakerEvaluator,
    check_pole_separation,
    first_residue_gl3,
    gl3_normalization,
    mellin_gl2,
    mellin_gl3_closed,
    mellin_recursive,
    pochhammer,
    residue_check,
    residue_formula,
    residue_gl2,
    shift_identity_check,
    shift_residual_gl2,
    whittaker_value,
)
from kuznetsov_lab.quadrature import circle_integral_mean
from kuznetsov_lab.special import DegenerateParameterError, PoleError

# modified-Bessel route evaluated separately at 30 digits and frozen here:
# 2 sqrt(y) K_a(2 pi y)
BESSEL_ORACLE = [
    (0.7j, 0.8, 6.1329092957132797e-3),
    (0.3j, 1.0, 1.8209784095190721e-3),
    (1.1j, 0.5, 3.5203010715208273e-2),
]


def _random_tempered3(rng):
    t = rng.uniform(0.2, 1.5, size=2)
    return (1j * t[0], 1j * t[1], -1j * (t[0] + t[1]))


class TestRankOne:
    def test_trivial_point(self):
        assert mellin_gl2(0.0, 1.0) == pytest.approx(1.0)

    def test_half_integer_point(self):
        # Gamma(3/2) Gamma(1/2) = pi/2
        assert mellin_gl2(0.5, 1.0) == pytest.approx(math.pi / 2, rel=1e-14)

    def test_even_in_alpha(self):
        s = 0.8 + 0.3j
        assert mellin_gl2(0.45j, s) == pytest.approx(mellin_gl2(-0.45j, s), rel=1e-14)

    def test_pair_and_scalar_parameter_agree(self):
        assert mellin_gl2((0.3j, -0.3j), 1.2) == pytest.approx(
            mellin_gl2(0.3j, 1.2), rel=1e-14
        )

    def test_pole_raises(self):
        with pytest.raises(PoleError):
            mellin_gl2(0.5, -0.5)


class TestRecursionRankTwo:
    def test_reference_point_positive(self):
        v = mellin_recursive(3, (0.0, 0.0, 0.0), (1.0, 1.0))
        assert v.real > 0
        assert abs(v.imag) < 1e-9

    def test_normalization_close_to_one(self):
        assert gl3_normalization() == pytest.approx(1.0, abs=1e-9)

    def test_closed_form_matches_recursion_random(self):
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(20):
            alpha = _random_tempered3(rng)
            s = (0.75, 0.75)
            rec = mellin_recursive(3, alpha, s, tol=1e-9)
            closed = mellin_gl3_closed(alpha, s)
            worst = max(worst, abs(rec - closed) / abs(closed))
        assert worst <= 1e-6

    def test_permutation_invariance(self):
        import itertools

        rng = np.random.default_rng(5)
        alpha = np.asarray(_random_tempered3(rng))
        s = (0.75, 0.75)
        base = mellin_recursive(3, alpha, s, tol=1e-9)
        for perm in itertools.permutations(range(3)):
            v = mellin_recursive(3, tuple(alpha[list(perm)]), s, tol=1e-9)
            assert abs(v - base) / abs(base) <= 1e-6

    def test_requires_positive_real_part(self):
        with pytest.raises(ValueError):
            mellin_recursive(3, (0.0, 0.0, 0.0), (-0.5, 1.0))

    def test_closed_form_manifestly_symmetric(self):
        alpha = (0.4j, 0.15j, -0.55j)
        s = (0.9 + 0.2j, 0.7 - 0.1j)
        v = mellin_gl3_closed(alpha, s)
        w = mellin_gl3_closed((alpha[2], alpha[0], alpha[1]), s)
        assert v == pytest.approx(w, rel=1e-13)


class TestRecursionRankThree:
    def test_self_convergence_doubled_nodes(self):
        alpha = (0.0, 0.0, 0.0, 0.0)
        s = (1.0, 1.0, 1.0)
        v16 = mellin_recursive(4, alpha, s, tol=1e-7, nodes_per_panel=16)
        v32 = mellin_recursive(4, alpha, s, tol=1e-7, nodes_per_panel=32)
        assert abs(v16 - v32) / abs(v32) <= 1e-5

    def test_permutation_probe(self):
        alpha = (0.3j, 0.1j, -0.15j, -0.25j)
        s = (0.9, 1.1, 0.8)
        base = mellin_recursive(4, alpha, s, tol=1e-7)
        swapped = mellin_recursive(4, (0.1j, -0.15j, 0.3j, -0.25j), s, tol=1e-7)
        assert abs(base - swapped) / abs(base) <= 1e-5

    def test_unsupported_rank(self):
        with pytest.raises(NotImplementedError):
            mellin_recursive(5, (0.0,) * 5, (1.0,) * 4)


class TestShiftIdentities:
    def test_rank_one_exact_sweep(self):
        rng = np.random.default_rng(23)
        for delta in range(6):
            worst = 0.0
            for _ in range(100):
                t = rng.uniform(0.1, 2.5)
                s = complex(rng.uniform(0.4, 2.5), rng.uniform(-1.5, 1.5))
                worst = max(worst, shift_residual_gl2((1j * t, -1j * t), s, delta))
            assert worst <= 1e-12, f"delta={delta}: {worst:.2e}"

    def test_named_example(self):
        assert shift_residual_gl2((0.3j, -0.3j), 0.7, 1) <= 1e-13

    def test_delta_zero_is_identity(self):
        assert shift_residual_gl2((0.4j, -0.4j), 1.1, 0) == 0.0

    def test_rank_two_unit_shift(self):
        for m in (1, 2):
            report = shift_identity_check(3, m, 1, samples=15)
            assert report["max_residual"] <= 1e-9
            assert report["balanced"]

    def test_degree_ledger(self):
        r2 = shift_identity_check(2, 1, 4, samples=5)
        assert r2["degree_budget"] == 8
        assert r2["poly_degree"] + 2 * r2["shift_weight"] == 8
        r3 = shift_identity_check(3, 1, 1, samples=5)
        assert r3["degree_budget"] == 3
        assert r3["poly_degree"] + 2 * r3["shift_weight"] == 3

    def test_pochhammer(self):
        assert pochhammer(2.0, 3) == pytest.approx(24.0)
        assert pochhammer(0.5, 0) == 1.0

    def test_shift_vector(self):
        sv = ShiftVector((1, 0))
        assert sv.weight == 1
        assert sv.apply((0.5, 0.75)) == (1.5, 0.75)
        with pytest.raises(ValueError):
            ShiftVector((-1, 0))


class TestResidues:
    def test_rank_one_leading(self):
        # residue of Gamma(s+a) at s=-a is 1, leaving Gamma(-2a)
        from scipy.special import gamma as _g

        a = 0.6j
        assert residue_gl2((a, -a), 0) == pytest.approx(complex(_g(-2 * a)), rel=1e-12)

    def test_rank_one_contour_all_deltas(self):
        for delta in range(4):
            rep = residue_check(2, (0.6j, -0.6j), delta=delta)
            assert rep["passed"], rep

    def test_named_contour_example(self):
        rep = residue_check(2, (0.4j, -0.4j), delta=1)
        assert rep["rel_err"] <= 1e-8

    def test_rank_two_first_residues(self):
        for m in (1, 2):
            rep = residue_check(3, (0.65j, 0.2j, -0.85j), m=m, s_other=0.8 + 0.05j)
            assert rep["passed"], rep

    def test_residue_formula_dispatch(self):
        v = residue_formula(2, ResidueSpec(m=1, delta=2), 0.55j)
        assert v == pytest.approx(residue_gl2(0.55j, 2), rel=1e-13)
        w = residue_formula(3, ResidueSpec(m=2), (0.65j, 0.2j, -0.85j), s_rest=0.9)
        assert w == pytest.approx(first_residue_gl3((0.65j, 0.2j, -0.85j), 2, 0.9), rel=1e-13)

    def test_degenerate_parameters_rejected(self):
        with pytest.raises(DegenerateParameterError):
            check_pole_separation(3, (0.45j, 0.3j, -0.75j), 1, 0)

    def test_spec_bounds(self):
        with pytest.raises(ValueError):
            ResidueSpec(m=1, delta=4)
        with pytest.raises(ValueError):
            ResidueSpec(m=0)


class TestInverseTransform:
    def test_matches_bessel_route(self):
        for a, y, ref in BESSEL_ORACLE:
            assert whittaker_value((a, -a), y) == pytest.approx(ref, rel=1e-10)

    def test_contour_shift_invariance(self):
        v1 = whittaker_value(0.7j, 1.0, b=0.5)
        v2 = whittaker_value(0.7j, 1.0, b=1.0)
        assert abs(v1 - v2) / abs(v2) <= 1e-8

    def test_positive_and_conjugate_symmetric(self):
        v = whittaker_value(0.9j, 0.7)
        w = whittaker_value(-0.9j, 0.7)
        assert v > 0
        assert v == pytest.approx(w, rel=1e-12)

    def test_exponential_decay(self):
        assert whittaker_value(0.7j, 1.0) / whittaker_value(0.7j, 5.0) > 1e3

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            whittaker_value(0.5j, -1.0)
        with pytest.raises(ValueError):
            whittaker_value(0.5j, 1.0, b=0.0)


class TestEvaluatorBundle:
    def test_dispatch(self):
        ev = WhittakerEvaluator(3, (0.4j, 0.15j, -0.55j))
        s = (0.8, 0.9)
        assert ev.mellin(s) == pytest.approx(mellin_gl3_closed(ev.alpha, s), rel=1e-13)
        assert abs(ev.mellin_recursive(s) - ev.mellin(s)) / abs(ev.mellin(s)) <= 1e-6

    def test_truncation_height_floor(self):
        assert WhittakerEvaluator(2, (0.1j, -0.1j)).truncation_height == 30.0
        tall = WhittakerEvaluator(2, (9.0j, -9.0j)).truncation_height
        assert tall == pytest.approx(37.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            WhittakerEvaluator(5, (0.0,) * 5)
        with pytest.raises(ValueError):
            WhittakerEvaluator(2, (0.1j, -0.1j), tol=0.0)

    def test_point_types(self):
        p = MellinPoint((0.2j, -0.2j), (0.9,))
        assert p.n == 2
        with pytest.raises(ValueError):
            MellinPoint((0.2j, -0.2j), (0.9, 1.0))
        with pytest.raises(ValueError):
            MellinPoint((0.2j, 0.2j), (0.9,))


class TestContourOracleMachinery:
    def test_circle_rule_on_simple_pole(self):
        # f(z) = 1/(z - 2) + entire part; mean recovers the residue
        val = circle_integral_mean(lambda z: 1.0 / (z - 2.0) + np.exp(z), 2.0, 0.1)
        assert val == pytest.approx(1.0, abs=1e-12)

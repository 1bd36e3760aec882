from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, strategies as st

from voanet.fields import ModeIndex, generator_vector, mode_of, reconstruct_field, sugawara_vector
from voanet.graded import GradedOperator, GradedVector
from voanet.models import HeisenbergModel, TensorModel, VirasoroModel, apply_generator_mode, tensor_lift

HEIS = HeisenbergModel(8)
VIR = VirasoroModel(Fraction(1, 2), 8)
VIR_GENERIC = VirasoroModel(Fraction(-3, 7), 8)


def _vec_add(*terms):
    out = {}
    for scale, vec in terms:
        for s, c in vec.items():
            v = out.get(s, 0) + scale * c
            if v:
                out[s] = v
            else:
                out.pop(s, None)
    return out


def _states(model, top):
    return [s for lv in range(top + 1) for s in model.basis(lv)]


def test_mode_index_conventions():
    idx = ModeIndex(3, "shifted")
    assert idx.to_unshifted(2) == ModeIndex(4, "unshifted")
    assert ModeIndex(4, "unshifted").to_shifted(2) == idx
    with pytest.raises(ValueError):
        ModeIndex(1, "sideways")


def test_vacuum_field_is_identity():
    table = reconstruct_field(HEIS, HEIS.vacuum_vector)
    assert table.mode(-1).equals_on_domain(GradedOperator.identity(HEIS))
    for n in (-3, -2, 0, 2):
        assert table.mode(n).is_zero()


def test_generator_fields_are_the_generator_modes():
    alpha = reconstruct_field(HEIS, generator_vector(HEIS))
    for n in range(-3, 4):
        assert alpha.mode(n).equals_on_domain(HEIS.generator_matrix("alpha", n))
    nu = reconstruct_field(VIR, generator_vector(VIR))
    for n in range(-3, 4):
        assert nu.mode(n + 1).equals_on_domain(VIR.virasoro_matrix(n))


def test_two_way_reconstruction_of_a_composite():
    # L_{-2} L_{-3} Ω = L_{-3} L_{-2} Ω + L_{-5} Ω in the ordered basis
    v = VIR_GENERIC.vector({(3,): 1})
    got = apply_generator_mode(VIR_GENERIC, -2, v)
    assert got.entries == {(3, 2): 1, (5,): 1}
    # and the fields agree as well, mode by mode
    lhs = reconstruct_field(VIR_GENERIC, got)
    rhs_a = reconstruct_field(VIR_GENERIC, VIR_GENERIC.vector({(3, 2): 1}))
    rhs_b = reconstruct_field(VIR_GENERIC, VIR_GENERIC.vector({(5,): 1}))
    for n in range(-2, 6):
        assert lhs.mode(n).equals_on_domain(rhs_a.mode(n) + rhs_b.mode(n))


@pytest.mark.parametrize("model", [HEIS, VIR_GENERIC], ids=["heisenberg", "virasoro"])
def test_borcherds_commutator_formula(model):
    # [a_(m), b_(n)] v = Σ_j C(m, j) (a_(j) b)_(m+n-j) v for m >= 0
    states = _states(model, 3)
    for sa in states[1:]:
        for sb in states[1:]:
            a, b = {sa: 1}, {sb: 1}
            for m in range(0, 3):
                for n in range(-2, 2):
                    for sv in _states(model, 2):
                        v = {sv: 1}
                        lhs = _vec_add(
                            (1, model.field_vec(a, m, model.field_vec(b, n, v))),
                            (-1, model.field_vec(b, n, model.field_vec(a, m, v))),
                        )
                        rhs = {}
                        for j in range(m + 1):
                            ajb = model.field_vec(a, j, b)
                            rhs = _vec_add((1, rhs), (comb(m, j), model.field_vec(ajb, m + n - j, v)))
                        assert lhs == rhs, (sa, sb, m, n, sv)


def _l_minus_one_power(model, j, vec):
    for _ in range(j):
        vec = model.virasoro_vec(-1, vec)
    return vec


@pytest.mark.parametrize("model", [HEIS, VIR_GENERIC], ids=["heisenberg", "virasoro"])
def test_skew_symmetry(model):
    # a_(n) b = Σ_j (-1)^{n+j+1} L_{-1}^j / j! b_(n+j) a
    states = _states(model, 4)
    for sa in states:
        for sb in states:
            a, b = {sa: 1}, {sb: 1}
            for n in range(-2, 4):
                lhs = model.field_vec(a, n, b)
                rhs = {}
                j = 0
                while True:
                    bna = model.field_vec(b, n + j, a)
                    if not bna and n + j > model.level(sa) + model.level(sb):
                        break
                    term = _l_minus_one_power(model, j, bna)
                    rhs = _vec_add((1, rhs), (Fraction(-1 if (n + j) % 2 == 0 else 1, factorial(j)), term))
                    j += 1
                assert lhs == rhs, (sa, sb, n)


def test_sugawara_modes_match_explicit_normal_ordered_sum():
    nu = reconstruct_field(HEIS, sugawara_vector(HEIS))
    for n in range(-3, 4):
        for s in _states(HEIS, 5):
            lv = HEIS.level(s)
            # L_n = 1/2 Σ_j :α_j α_{n-j}: with the annihilator on the right
            total = {}
            for j in range(n - lv - 1, lv + 2):
                k = n - j
                first, second = (j, k) if j <= k else (k, j)
                inner = HEIS.act("alpha", second, s)
                outer = HEIS.act_vec("alpha", first, inner)
                total = _vec_add((1, total), (Fraction(1, 2), outer))
            got = HEIS.field_vec(sugawara_vector(HEIS).entries, n + 1, {s: 1})
            assert got == total, (n, s)
        assert nu.mode(n + 1).equals_on_domain(HEIS.virasoro_matrix(n))


def test_vanishing_index_bounds_the_field():
    table = reconstruct_field(VIR, VIR.vector({(2, 2): 1}))
    for s in _states(VIR, 5):
        b = VIR.vector({s: 1})
        k = table.vanishing_index(b)
        for n in range(k, k + 4):
            assert table.apply(n, b).is_zero()


def test_shifted_modes_need_homogeneous_states():
    a = HEIS.vector({(1,): 1, (1, 1): 1})
    with pytest.raises(ValueError):
        mode_of(HEIS, a, ModeIndex(0, "shifted"))
    alpha = generator_vector(HEIS)
    assert mode_of(HEIS, alpha, ModeIndex(2, "shifted")).equals_on_domain(HEIS.generator_matrix("alpha", 2))


def test_tensor_field_of_lifted_generator():
    left, right = HeisenbergModel(4), VirasoroModel(Fraction(1, 2), 4)
    t = TensorModel(left, right)
    a = reconstruct_field(t, generator_vector(t, "left:alpha"))
    for n in range(-2, 3):
        assert a.mode(n).equals_on_domain(tensor_lift(left.generator_matrix("alpha", n), t, "left"))
    nu = reconstruct_field(t, t.conformal_vector)
    expected = tensor_lift(left.virasoro_matrix(0), t, "left") + tensor_lift(right.virasoro_matrix(0), t, "right")
    assert nu.mode(1).equals_on_domain(expected)


@given(st.integers(-4, 4), st.fractions(max_denominator=9), st.fractions(max_denominator=9))
def test_modes_are_linear_in_the_state(n, x, y):
    a = HEIS.vector({(2,): 1})
    b = HEIS.vector({(1, 1): 1})
    combined = reconstruct_field(HEIS, GradedVector(HEIS, {(2,): x, (1, 1): y}))
    ma, mb = reconstruct_field(HEIS, a).mode(n), reconstruct_field(HEIS, b).mode(n)
    assert combined.mode(n).equals_on_domain(ma * x + mb * y)

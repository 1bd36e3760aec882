import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from voanet.axioms import virasoro_operator
from voanet.fields import generator_vector, reconstruct_field
from voanet.graded import GradedOperator
from voanet.models import HeisenbergModel, VirasoroModel
from voanet.smearing import (
    Arc,
    Bump,
    TrigPoly,
    arcs_cover_circle,
    commutator_decay,
    energy_bound_estimate,
    fourier_coefficients,
    heisenberg_pairing,
    smear,
    standard_bump_pair,
)

HEIS = HeisenbergModel(5)
ALPHA = generator_vector(HEIS)

trig_polys = st.dictionaries(
    st.integers(-4, 4), st.fractions(max_denominator=7).filter(lambda q: q != 0), max_size=4
).map(TrigPoly)


# -- arcs ----------------------------------------------------------------------

def test_arc_basics():
    a = Arc(Fraction(3, 2), Fraction(1, 2))  # wraps through 0
    assert a.length == 1
    assert a.contains_point(0) and not a.contains_point(1)
    assert a.disjoint(Arc(Fraction(1, 2), Fraction(3, 2)))
    assert a.contains(Arc(Fraction(7, 4), Fraction(1, 4)))
    assert not a.contains(Arc(0, 1))
    assert Arc.parse("1/2", "3/2") == Arc(Fraction(1, 2), Fraction(3, 2))
    with pytest.raises(ValueError):
        Arc(1, 3)


def test_arc_cover():
    three = [Arc(Fraction(11, 6), Fraction(5, 6)), Arc(Fraction(1, 2), Fraction(3, 2)),
             Arc(Fraction(7, 6), Fraction(1, 6))]
    assert arcs_cover_circle(three)
    # open half-circles miss their two common endpoints
    assert not arcs_cover_circle([Arc(0, 1), Arc(1, 2)])


# -- bumps -----------------------------------------------------------------------

def test_bump_is_real_nonnegative_and_supported_in_arc():
    arc = Arc(Fraction(1, 3), Fraction(4, 3))
    f = Bump(arc)
    theta = np.linspace(0, 2 * np.pi, 4001)
    vals = f(theta)
    assert np.isrealobj(vals) and (vals >= 0).all() and vals.max() > 0
    inside = np.array([f.support.contains_point(Fraction(t / np.pi).limit_denominator(10 ** 6)) for t in theta])
    assert (vals[~inside] == 0).all()
    assert arc.contains(f.support)


def test_bump_coefficients_match_quadrature():
    arc = Arc(0, Fraction(1, 2))
    fine, coarse = Bump(arc, samples_log2=12), Bump(arc)
    fc, cc = fourier_coefficients(fine, 6), fourier_coefficients(coarse, 6)
    sup = fine.support
    lo, hi = float(sup.start) * np.pi, float(sup.start + sup.length) * np.pi
    alias = coarse.aliasing_estimate(6)
    assert alias < 1e-10
    for n in range(-6, 7):
        re = quad(lambda t: fine(t) * np.cos(n * t), lo, hi, limit=200, epsabs=1e-14)[0] / (2 * np.pi)
        im = -quad(lambda t: fine(t) * np.sin(n * t), lo, hi, limit=200, epsabs=1e-14)[0] / (2 * np.pi)
        assert fc[n] == pytest.approx(complex(re, im), abs=1e-13)
        # the default grid is off by its aliasing error only
        assert abs(cc[n] - complex(re, im)) <= 2 * alias
        assert cc[-n] == pytest.approx(np.conj(cc[n]), abs=1e-15)


def test_bump_rejects_undersampling():
    with pytest.raises(ValueError, match="undersampled"):
        Bump(Arc(0, 1), samples_log2=5).fourier_coefficients(16)


# -- smearing identities ---------------------------------------------------------

@pytest.mark.parametrize("k", [-3, -1, 0, 2])
def test_single_fourier_mode_gives_the_mode(k):
    s = smear(HEIS, ALPHA, TrigPoly({k: Fraction(1)}), 4)
    assert s.exact.equals_on_domain(reconstruct_field(HEIS, ALPHA).shifted_mode(k))
    assert s.exact.difference_witness(HEIS.generator_matrix("alpha", k)) is None


def test_constant_function_on_conformal_vector_gives_l0():
    vir = VirasoroModel(Fraction(1, 2), 6)
    s = smear(vir, vir.conformal_vector, TrigPoly({0: Fraction(1)}), 3)
    assert s.exact.equals_on_domain(virasoro_operator(vir, 0))
    s = smear(HEIS, HEIS.conformal_vector, TrigPoly({0: Fraction(1)}), 3)
    assert s.exact.equals_on_domain(virasoro_operator(HEIS, 0))


def test_zero_state_smears_to_zero():
    s = smear(HEIS, HEIS.vector({}), Bump(Arc(0, 1)), 8)
    assert s.exact.is_zero()
    assert not s.projected.any()


@given(trig_polys, trig_polys)
def test_smear_is_linear_in_f(f, g):
    lhs = smear(HEIS, ALPHA, f + g, 4).exact
    rhs = smear(HEIS, ALPHA, f, 4).exact + smear(HEIS, ALPHA, g, 4).exact
    assert lhs.equals_on_domain(rhs)


def test_projected_matrix_agrees_with_exact_on_domain():
    f = TrigPoly({-2: Fraction(1), 1: Fraction(3, 2)})
    s = smear(HEIS, ALPHA, f, 3)
    dense = s.exact.to_dense()
    for j in range(HEIS.dim):
        if HEIS.level_of_index(j) in s.exact.domain:
            np.testing.assert_allclose(s.projected[:, j], dense[:, j])


def test_trig_polys_with_vanishing_pairing_commute_exactly():
    # Σ m f̂_m ĝ_{-m} = 2·1·1 + (-2)·1·1 = 0
    f = TrigPoly({2: Fraction(1), -2: Fraction(1)})
    g = TrigPoly({2: Fraction(1), -2: Fraction(1), 3: Fraction(5)})
    assert heisenberg_pairing(f.coeffs, g.coeffs, 3) == 0
    a, b = smear(HEIS, ALPHA, f, 3).exact, smear(HEIS, ALPHA, g, 3).exact
    comm = a @ b - b @ a
    assert comm.is_zero() and comm.domain
    assert comm.equals_on_domain(GradedOperator.zero(HEIS))


def test_heisenberg_pairing_equals_direct_sum():
    f, g = standard_bump_pair(Arc(0, Fraction(1, 2)), Arc(1, Fraction(3, 2)))
    fc, gc = fourier_coefficients(f, 16), fourier_coefficients(g, 16)
    direct = 0j
    for m in range(-16, 17):
        direct += m * fc[m] * gc[-m]
    assert heisenberg_pairing(fc, gc, 16) == pytest.approx(direct, abs=1e-18)


# -- decay -----------------------------------------------------------------------

def test_decay_untruncated_norm_is_the_scalar_pairing():
    model = HeisenbergModel(3)
    alpha = generator_vector(model)
    rows = commutator_decay(model, alpha, alpha, Arc(0, Fraction(1, 2)), Arc(1, Fraction(3, 2)),
                            cutoffs=(8, 16))
    for r in rows:
        assert r.norm == pytest.approx(abs(r.pairing), rel=1e-6)


def test_decay_rejects_overlapping_arcs():
    arc = Arc(0, Fraction(1, 2))
    with pytest.raises(ValueError):
        commutator_decay(HEIS, ALPHA, ALPHA, arc, arc)


def test_decay_with_zero_function_is_zero():
    arcs = Arc(0, Fraction(1, 2)), Arc(1, Fraction(3, 2))
    model = HeisenbergModel(3)
    alpha = generator_vector(model)
    rows = commutator_decay(model, alpha, alpha, *arcs, f=TrigPoly({}), g=Bump(arcs[1]),
                            cutoffs=(8, 16, 32))
    assert all(r.norm == 0 and r.norm_projected == 0 and r.pairing == 0 for r in rows)


# -- energy bounds ---------------------------------------------------------------

def _alpha_bound_oracle(e_max, s, k, index_range):
    # on level l, ‖α_n‖ = sqrt(|n| · (max occupation of mode |n|, +1 if creating))
    best = 0.0
    for n in range(-index_range, index_range + 1):
        if n == 0:
            continue
        for lv in range(e_max + 1):
            if n < 0 and lv - n > e_max:
                continue
            occ = lv // abs(n) + (1 if n < 0 else 0)
            if occ == 0:
                continue
            ratio = math.sqrt(abs(n) * occ) / (lv + 1) ** k
            best = max(best, ratio / (abs(n) + 1) ** s)
    return best


@pytest.mark.parametrize("s, k", [(1, 1), (0, 1), (1, 0), (2, 2)])
def test_energy_bound_matches_closed_form(s, k):
    rep = energy_bound_estimate(HEIS, ALPHA, s, k, index_range=4, windows=(3, 5))
    for e, m in rep.m_est.items():
        assert m == pytest.approx(_alpha_bound_oracle(e, s, k, 4), rel=1e-12)


def test_energy_bound_of_zero_state():
    rep = energy_bound_estimate(HEIS, HEIS.vector({}), 1, 1, windows=(3, 4))
    assert rep.m_est == {3: 0.0, 4: 0.0}


def test_energy_bound_is_monotone_in_window():
    vir = VirasoroModel(Fraction(1), 8)
    rep = energy_bound_estimate(vir, generator_vector(vir), 3, 1, index_range=4, windows=(4, 6, 8))
    m = [rep.m_est[e] for e in (4, 6, 8)]
    assert m[0] <= m[1] <= m[2]
    assert m == pytest.approx([0.8, 6 / 7, 8 / 9], rel=1e-9)


def test_smearing_on_a_module_with_null_vectors():
    from voanet.smearing import orthonormal_transform

    vir = VirasoroModel(Fraction(1, 2), 7)
    assert orthonormal_transform(vir).shape == (sum(vir.dims()) - 2, vir.dim)
    nu = generator_vector(vir)
    rows = commutator_decay(vir, nu, nu, Arc(0, Fraction(1, 2)), Arc(1, Fraction(3, 2)), cutoffs=(8, 16))
    assert all(np.isfinite(r.norm) and r.norm >= 0 for r in rows)
    rep = energy_bound_estimate(vir, nu, 3, 1, index_range=3, windows=(6, 7))
    # L_0 contributes e/(e+1), which dominates for s = 3
    assert rep.m_est[7] == pytest.approx(7 / 8, rel=1e-9)

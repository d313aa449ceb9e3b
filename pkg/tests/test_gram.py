import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import random_feasible_params, random_states

from bosonbunch.errors import DomainError, FeasibilityError, UnsupportedError
from bosonbunch.gram import (
    Gram3Params,
    GramMatrix,
    InternalStateSet,
    StatePrepParams,
    average_overlap,
    bargmann_invariant,
    cholesky_realize,
    gram_from_params,
    gram_from_states,
    min_eigenvalue,
    normalize_gauge,
    overlap_from_visibility,
    params_from_gram,
    states_from_prep,
    triad_family,
    triad_phase,
    triad_phase_bound,
)

angles = st.floats(-math.pi, math.pi, allow_nan=False)
unit = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def feasible_params(draw):
    p = Gram3Params(draw(unit), draw(unit), draw(unit), draw(angles))
    if p.determinant() < 1e-9:
        # overlaps below 1/4 are feasible at any phase
        s = draw(st.floats(0.0, 0.25))
        p = Gram3Params(p.d12 * s, p.d13 * s, p.d23 * s, p.phi)
    return p


def test_all_ones():
    g = gram_from_params(Gram3Params(1, 1, 1, 0))
    assert np.allclose(g.matrix, np.ones((3, 3)))
    assert bargmann_invariant(g) == pytest.approx(1)
    assert average_overlap(g) == pytest.approx(1)


def test_quarter_overlaps_at_pi_are_feasible():
    g = gram_from_params(Gram3Params(0.25, 0.25, 0.25, math.pi))
    assert bargmann_invariant(g) == pytest.approx(-1 / 8)
    assert average_overlap(g) == pytest.approx(0.25)


def test_large_overlaps_at_pi_are_infeasible():
    with pytest.raises(FeasibilityError, match="cos"):
        gram_from_params(Gram3Params(0.81, 0.81, 0.81, math.pi))


def test_overlap_out_of_range():
    with pytest.raises(DomainError):
        gram_from_params(Gram3Params(1.2, 0.5, 0.5, 0))


def test_phase_sits_on_the_23_entry():
    g = gram_from_params(Gram3Params(0.5, 0.4, 0.3, 0.7))
    assert g.matrix[0, 1].imag == 0 and g.matrix[0, 2].imag == 0
    assert np.angle(g.matrix[1, 2]) == pytest.approx(0.7)


def test_gram_validation():
    with pytest.raises(FeasibilityError):
        GramMatrix(np.array([[1, 0.5], [0.4, 1]], dtype=complex))
    with pytest.raises(FeasibilityError):
        GramMatrix(np.array([[2, 0], [0, 1]], dtype=complex))
    assert average_overlap(GramMatrix.identity(3)) == 0


@pytest.mark.parametrize(
    "amp,expected",
    [(0.5, None), (0.6, math.acos(0.08 / 0.432)), (1.0, 0.0)],
)
def test_triad_phase_bound(amp, expected):
    got = triad_phase_bound(amp, amp, amp)
    if expected is None:
        assert got is None
    else:
        assert got == pytest.approx(expected, abs=1e-9)


def test_triad_phase_bound_with_vanishing_amplitude():
    assert triad_phase_bound(0.0, 0.9, 0.9) is None


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_phase_bound_sits_on_the_boundary(x, y, z):
    try:
        b = triad_phase_bound(x, y, z)
    except FeasibilityError:
        return
    if b is None:
        return
    det = 1 + 2 * x * y * z * math.cos(b) - x * x - y * y - z * z
    assert abs(det) < 1e-9


@settings(max_examples=200, deadline=None)
@given(feasible_params())
def test_params_round_trip(p):
    g = gram_from_params(p)
    back = params_from_gram(g)
    assert back.d12 == pytest.approx(p.d12, abs=1e-12)
    assert back.d13 == pytest.approx(p.d13, abs=1e-12)
    assert back.d23 == pytest.approx(p.d23, abs=1e-12)
    z = bargmann_invariant(g)
    assert abs(z) == pytest.approx(math.sqrt(p.d12 * p.d13 * p.d23), abs=1e-12)
    if abs(z) > 1e-9:
        assert abs(math.remainder(triad_phase(g) - p.phi, 2 * math.pi)) < 1e-9


@settings(max_examples=200, deadline=None)
@given(feasible_params())
def test_am_gm_chain(p):
    g = gram_from_params(p)
    r = abs(bargmann_invariant(g))
    dbar = average_overlap(g)
    assert r ** (2 / 3) <= dbar + 1e-10
    assert dbar <= (1 + 2 * r * math.cos(p.phi)) / 3 + 1e-10


def test_cholesky_round_trip_many(rng):
    worst = 0.0
    for _ in range(1000):
        g = gram_from_params(random_feasible_params(rng))
        back = gram_from_states(cholesky_realize(g), gauge=False)
        worst = max(worst, np.max(np.abs(back.matrix - g.matrix)))
    assert worst < 1e-9


@pytest.mark.parametrize(
    "g,rank",
    [(GramMatrix.identity(3), 3), (GramMatrix.ones(3), 1), (GramMatrix.ones(2).with_orthogonal(1), 2)],
)
def test_cholesky_rank_deficient(g, rank):
    s = cholesky_realize(g)
    assert s.rank_dim == rank
    assert np.allclose(gram_from_states(s, gauge=False).matrix, g.matrix)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_states_give_psd_gram(n, r, seed):
    v = random_states(np.random.default_rng(seed), n, r)
    g = gram_from_states(InternalStateSet(v))
    assert min_eigenvalue(g.matrix) >= -1e-12
    assert np.allclose(np.diag(g.matrix), 1)


def test_gauge_makes_first_row_real(rng):
    v = random_states(rng, 3, 3)
    raw = np.conj(v) @ v.T
    g = normalize_gauge(raw)
    assert np.allclose(g[0].imag, 0) and np.all(g[0].real >= 0)
    # the invariant is unchanged by rephasing
    assert raw[0, 1] * raw[1, 2] * raw[2, 0] == pytest.approx(g[0, 1] * g[1, 2] * g[2, 0])


def test_gauge_degenerate_phase_is_zero():
    g = gram_from_params(Gram3Params(0.0, 0.5, 0.5, 1.0))
    assert g.gauge_degenerate
    assert triad_phase(g) == 0.0


def test_states_from_prep_identical():
    g = gram_from_states(states_from_prep(StatePrepParams(0, 0, 0, 0, 1)))
    assert np.allclose(g.matrix, 1)


def test_states_from_prep_time_only():
    g = gram_from_states(states_from_prep(StatePrepParams(0, 0, 0, 0, 0.5)))
    assert g.overlap(0, 1) == pytest.approx(1)
    assert g.overlap(0, 2) == pytest.approx(0.25)
    assert g.overlap(1, 2) == pytest.approx(0.25)
    assert triad_phase(g) == 0


@settings(max_examples=100, deadline=None)
@given(angles, angles, angles, angles, unit)
def test_state_prep_overlaps_closed_form(a, b, c, ph, x):
    g = gram_from_states(states_from_prep(StatePrepParams(a, b, c, ph, x)))
    assert g.overlap(0, 1) == pytest.approx(math.cos(a - b) ** 2, abs=1e-12)
    d13 = x * x * abs(math.cos(a) * math.cos(c) + math.sin(a) * math.sin(c) * np.exp(1j * ph)) ** 2
    assert g.overlap(0, 2) == pytest.approx(d13, abs=1e-12)


@pytest.mark.parametrize("phi", np.linspace(-math.pi, math.pi, 7))
def test_triad_family_overlaps_are_quarter(phi):
    g = gram_from_states(states_from_prep(triad_family(math.pi / 6, phi)))
    for i, j in ((0, 1), (0, 2), (1, 2)):
        assert g.overlap(i, j) == pytest.approx(0.25, abs=1e-10)


def test_overlap_from_visibility():
    assert overlap_from_visibility(0.90, 0.017) == pytest.approx(0.9329, abs=5e-5)
    assert overlap_from_visibility(0.7, 0.0) == pytest.approx(0.7)
    assert overlap_from_visibility(1.0, 0.02) == 1.0
    with pytest.raises(DomainError):
        overlap_from_visibility(0.5, 1.0)


def test_invariant_needs_three_photons():
    with pytest.raises(UnsupportedError):
        bargmann_invariant(GramMatrix.ones(4))


def test_unit_norm_enforced():
    with pytest.raises(DomainError):
        InternalStateSet(np.array([[1.0, 1.0]]))
    with pytest.raises(DomainError):
        StatePrepParams(0, 0, 0, 0, 1.5)

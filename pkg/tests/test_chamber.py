import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylconv.chamber import (ChamberPoint, HypergroupElement, Multiplicity,
                              as_element, multiplicity_from, project_to_chamber,
                              rho, rho_from_triple)


def test_project_sorts_descending():
    assert project_to_chamber([3, 1, 2]).coords == (3.0, 2.0, 1.0)
    assert project_to_chamber([1, 1]).coords == (1.0, 1.0)


def test_project_clamps_near_one():
    out = project_to_chamber([1 - 1e-14, 2])
    assert out.coords == (2.0, 1.0)


def test_project_rejects_nonfinite():
    with pytest.raises(ValueError):
        project_to_chamber([np.nan, 1.0])
    with pytest.raises(ValueError):
        project_to_chamber([np.inf, 1.0])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 50.0), min_size=1, max_size=6))
def test_project_idempotent_and_permutation_invariant(vals):
    rng = np.random.default_rng(0)
    once = project_to_chamber(vals)
    assert project_to_chamber(once.coords).coords == once.coords
    assert project_to_chamber(rng.permutation(vals)).coords == once.coords


def test_chamber_point_validation():
    with pytest.raises(ValueError):
        ChamberPoint((1.0, 2.0))
    with pytest.raises(ValueError):
        ChamberPoint((1.0, -0.5))
    cp = ChamberPoint.of([2.0, 1.0, 0.0])
    assert cp.q == 3 and cp.top == 2.0


def test_multiplicity_examples():
    k = multiplicity_from(5, 2, 1)
    assert k.triple == (2.0, 1.5, 1.0)
    q = 3
    k = multiplicity_from(2 * q - 1, q, 0)
    assert k.triple == (q - 1.0, 0.5, 1.0)
    k = multiplicity_from(3, 1, -0.5)
    assert k.triple == (2.5, 0.0, 1.0)
    # alpha = k1 + k2 - 1/2 must recover p - 1
    assert (k.k1 + k.k2 - 0.5).real == pytest.approx(2.0)


def test_multiplicity_rejects_small_p():
    with pytest.raises(ValueError):
        multiplicity_from(2.9, 2, 0.0)


def test_rho_examples():
    # q = 1 collapses the half sum to p + l
    assert np.allclose(rho(multiplicity_from(3, 1, 0)), [3.0])
    assert np.allclose(rho(multiplicity_from(2.5, 1, 0.5)), [3.0])
    assert np.allclose(rho(multiplicity_from(4, 2, 1)), [6.0, 4.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.floats(0.0, 5.0), st.floats(-2.0, 2.0))
def test_rho_two_routes_agree(q, dp, l):
    k = multiplicity_from(2 * q - 1 + dp, q, l)
    assert np.allclose(rho(k), rho_from_triple(k), atol=1e-12)


def test_real_l_guard():
    k = Multiplicity(5.0, 2, 0.5 + 0.1j)
    with pytest.raises(ValueError):
        k.require_real_l()
    assert Multiplicity(5.0, 2, 0.5 + 0j).require_real_l() == 0.5


def test_as_element_coercions():
    e = as_element(((2.0, 1.0), 0.3))
    assert e.t.coords == (2.0, 1.0) and e.theta == 0.3
    e = as_element(1.5)
    assert e.t.coords == (1.5,) and e.theta == 0.0
    e = as_element(HypergroupElement.identity(2))
    assert e.t.coords == (0.0, 0.0)

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import coarsecohom as cc
from coarsecohom import L1, L1_ZERO, SCALAR


entry_dicts = st.dictionaries(
    st.integers(0, 30),
    st.floats(-10, 10, allow_nan=False).filter(lambda v: abs(v) > 1e-9),
    max_size=6)


def test_dirac_and_zero():
    v = cc.dirac(3)
    assert v.norm == 1.0 and v.support == {3} and v.get(3) == 1.0
    assert cc.zero().is_zero()
    assert cc.dirac(2, weight=-2.5).norm == 2.5


def test_dirac_diff():
    v = cc.dirac_diff(4, 1)
    assert v.module == L1_ZERO
    assert v.get(4) == 1.0 and v.get(1) == -1.0 and v.norm == 2.0
    assert cc.dirac_diff(2, 2).is_zero()


def test_zero_sum_enforced():
    with pytest.raises(ValueError, match="sum to 0"):
        cc.SupportedVector(L1_ZERO, {0: 1.0, 1: -0.5})
    # balanced entries pass
    cc.SupportedVector(L1_ZERO, {0: 1.0, 1: -1.0})


def test_pruning():
    v = cc.SupportedVector(L1, {0: 1.0, 1: 1e-16, 2: -1e-16})
    assert v.support == {0}


def test_arithmetic_and_module_mismatch():
    a = cc.dirac(0) + cc.dirac(1)
    assert a.norm == 2.0
    assert (a - a).is_zero()
    assert (2.0 * cc.dirac(5)).get(5) == 2.0
    assert (-cc.dirac(5)).get(5) == -1.0
    with pytest.raises(ValueError, match="module mismatch: l1 vs l1_0"):
        cc.dirac(0) + cc.dirac_diff(1, 0)
    with pytest.raises(TypeError):
        cc.dirac(0) + 3.0


def test_scalar_module():
    s = cc.scalar_of(-2.0)
    assert s.norm == 2.0 and s.support == frozenset()
    assert (s + cc.scalar_of(3.0)).scalar == 1.0
    with pytest.raises(TypeError):
        cc.pi_sum(s)


def test_pi_sum_and_sections():
    v = cc.SupportedVector(L1, {0: 0.25, 3: 0.5})
    assert cc.pi_sum(v) == 0.75
    lifted = cc.lift_scalar(0.75, 3)
    assert cc.pi_sum(lifted) == 0.75
    assert lifted.support == {3} and lifted.norm == 0.75


def test_inclusion_and_retag():
    z = cc.dirac_diff(1, 0)
    inc = cc.include_in_l1(z)
    assert inc.module == L1 and inc.entries == z.entries
    assert cc.as_l1_zero(inc).module == L1_ZERO
    with pytest.raises(ValueError):
        cc.include_in_l1(cc.dirac(0))
    with pytest.raises(ValueError):
        cc.as_l1_zero(cc.dirac(0))
    with pytest.raises(ValueError):
        cc.as_l1_zero(cc.scalar_of(1.0))


@settings(deadline=None, max_examples=60)
@given(entry_dicts, entry_dicts)
def test_l1_distance_matches_difference_norm(da, db):
    u = cc.SupportedVector(L1, da)
    v = cc.SupportedVector(L1, db)
    direct = sum(abs(u.get(k) - v.get(k)) for k in set(da) | set(db))
    assert math.isclose(cc.l1_distance(u, v), direct, rel_tol=0, abs_tol=1e-12)
    assert cc.l1_distance(u, u) == 0.0


def test_entry_gap():
    u = cc.SupportedVector(L1, {0: 1.0, 1: 2.0})
    v = cc.SupportedVector(L1, {1: 2.5, 2: -0.25})
    assert cc.entry_gap(u, v) == 1.0
    assert cc.entry_gap(u) == 2.0
    assert cc.entry_gap(cc.scalar_of(3.0), cc.scalar_of(1.0)) == 2.0
    with pytest.raises(ValueError, match="module mismatch"):
        cc.entry_gap(u, cc.dirac_diff(0, 1))


def test_json_round_trip():
    v = cc.SupportedVector(L1, {5: 1.25, 2: -0.5})
    assert v.to_json() == {"module": "l1", "entries": [[2, -0.5], [5, 1.25]]}
    back = cc.SupportedVector.from_json(v.to_json())
    assert back.entries == v.entries
    # duplicate points in a literal are summed
    merged = cc.SupportedVector.from_json(
        {"module": "l1", "entries": [[1, 1.0], [1, 2.0]]})
    assert merged.get(1) == 3.0
    # scalars serialize as a single point-ignored entry
    s = cc.scalar_of(4.5)
    assert s.to_json() == {"module": "scalar", "entries": [[0, 4.5]]}
    assert cc.SupportedVector.from_json(s.to_json()).scalar == 4.5


def test_pair_vector():
    h = cc.PairVector({(0, 1): 2.0, (3, 2): -1.0, (4, 4): 1e-16})
    assert h.norm == 3.0
    assert h.support == {(0, 1), (3, 2)}
    assert cc.PairVector().is_zero()


def test_boundary_pairs_hand_example():
    h = cc.PairVector({(0, 1): 1.0, (1, 2): 1.0})
    out = cc.boundary_pairs(h)
    # telescoping: -delta_0 + delta_2
    assert out.get(0) == -1.0 and out.get(2) == 1.0 and out.get(1) == 0.0
    assert out.module == L1_ZERO


pair_dicts = st.dictionaries(
    st.tuples(st.integers(0, 8), st.integers(0, 8)),
    st.floats(-5, 5, allow_nan=False).filter(lambda v: abs(v) > 1e-9),
    max_size=6)


@settings(deadline=None, max_examples=60)
@given(pair_dicts)
def test_boundary_contraction_property(entries):
    h = cc.PairVector(entries)
    out = cc.boundary_pairs(h)
    assert out.norm <= 2.0 * h.norm + 1e-12
    assert abs(cc.pi_sum(out)) <= 1e-12


@settings(deadline=None, max_examples=60)
@given(entry_dicts, st.integers(0, 30))
def test_lift_boundary_round_trip(entries, base):
    # symmetrize into a genuine zero-sum vector first
    balanced = dict(entries)
    drift = sum(balanced.values())
    balanced[31] = balanced.get(31, 0.0) - drift
    h = cc.SupportedVector(L1_ZERO, balanced)
    lifted = cc.lift_boundary(h, base)
    assert cc.entry_gap(cc.boundary_pairs(lifted), h) <= 1e-12
    assert lifted.norm <= h.norm + 1e-12
    assert all(z0 == base and z1 in h.support for z0, z1 in lifted.support)


def test_lift_boundary_rejects_drift():
    with pytest.raises(ValueError, match="pi_sum"):
        cc.lift_boundary(cc.dirac(0), 1)
    with pytest.raises(ValueError):
        cc.lift_boundary(cc.scalar_of(0.0), 1)


def test_unknown_module_tag():
    with pytest.raises(ValueError, match="unknown module"):
        cc.SupportedVector("l2", {0: 1.0})

"""Ranked mass states: construction, scaling, dislocation, distances."""

import pytest

from fragsim import (
    MassState,
    dislocate,
    from_masses,
    prefix_mass,
    scale,
    uniform_dist,
    validate_fragments,
)
from fragsim.errors import (
    InvalidFragmentVector,
    MassBudgetExceeded,
    NegativeMass,
    RankOutOfRange,
    ScaleOutOfRange,
)


def test_from_masses_sorts_and_strips_zeros():
    st = from_masses([0.2, 0.5, 0.0, 0.3])
    assert st.parts == (0.5, 0.3, 0.2)
    assert st.dust == 0.0
    assert st.nominal == 1.0
    st = from_masses([], dust=0.4, nominal=0.4)
    assert st.parts == ()


def test_from_masses_validation():
    with pytest.raises(NegativeMass):
        from_masses([0.5, -0.1])
    with pytest.raises(NegativeMass):
        from_masses([0.5], dust=-0.1)
    with pytest.raises(NegativeMass):
        from_masses([0.5], nominal=0.0)
    with pytest.raises(MassBudgetExceeded):
        from_masses([0.7, 0.4])
    with pytest.raises(MassBudgetExceeded):
        from_masses([0.7], dust=0.31)
    # budget slack: a femto-scale float overshoot is accepted
    from_masses([0.7, 0.3 + 1e-12])


def test_scale():
    st = from_masses([0.6, 0.4], dust=0.0, nominal=1.0)
    half = scale(st, 0.5)
    assert half.parts == (0.3, 0.2)
    assert half.nominal == 0.5
    assert scale(st, 0.0) == MassState((), 0.0, 0.0)
    assert scale(st, 1.0) == st
    for bad in (-0.1, 1.5):
        with pytest.raises(ScaleOutOfRange):
            scale(st, bad)


def test_validate_fragments():
    assert validate_fragments((0.6, 0.4)) == (0.6, 0.4)
    assert validate_fragments((0.5, 0.3, 0.0)) == (0.5, 0.3)
    assert validate_fragments(()) == ()
    with pytest.raises(InvalidFragmentVector):
        validate_fragments((0.4, 0.6))
    with pytest.raises(InvalidFragmentVector):
        validate_fragments((0.5, -0.1))
    with pytest.raises(InvalidFragmentVector):
        validate_fragments((0.8, 0.4))


def test_dislocate_basic():
    st = from_masses([1.0])
    st = dislocate(st, 1, (0.6, 0.4))
    assert st.parts == (0.6, 0.4)
    st = dislocate(st, 1, (0.6, 0.4))
    # 0.6 -> 0.36, 0.24; the untouched 0.4 slots between them
    assert st.parts == (0.4, 0.36, 0.24)
    assert st.dust == 0.0
    assert sum(st.parts) + st.dust == pytest.approx(1.0, abs=1e-15)


def test_dislocate_deficit_to_dust():
    st = from_masses([0.8, 0.2])
    st = dislocate(st, 1, (0.5,))
    assert st.parts == (0.4, 0.2)
    assert st.dust == pytest.approx(0.4, abs=1e-15)
    # empty fragment vector sends everything to dust
    st = dislocate(st, 2, ())
    assert st.parts == (0.4,)
    assert st.dust == pytest.approx(0.6, abs=1e-15)


def test_dislocate_mass_floor():
    st = from_masses([1.0])
    st = dislocate(st, 1, (0.9, 0.1), mass_floor=0.2)
    assert st.parts == (0.9,)
    assert st.dust == pytest.approx(0.1, abs=1e-15)
    # floored mass still counts toward the budget
    assert sum(st.parts) + st.dust == pytest.approx(1.0, abs=1e-15)


def test_dislocate_rank_bounds():
    st = from_masses([0.5, 0.5])
    for bad in (0, 3, -1):
        with pytest.raises(RankOutOfRange):
            dislocate(st, bad, (0.5, 0.5))


def test_dislocate_tie_order_is_stable():
    # splitting rank 2 of (0.5, 0.5) into equal quarters keeps the untouched
    # 0.5 first and the new pieces after any pre-existing equal mass
    st = from_masses([0.5, 0.5])
    st = dislocate(st, 2, (0.5, 0.5))
    assert st.parts == (0.5, 0.25, 0.25)


def test_uniform_dist():
    a = from_masses([0.5, 0.3])
    b = from_masses([0.5, 0.2, 0.1])
    assert uniform_dist(a, b) == pytest.approx(0.1)
    assert uniform_dist(a, a) == 0.0
    assert uniform_dist(from_masses([]), b) == 0.5


def test_prefix_mass():
    st = from_masses([0.5, 0.3, 0.1])
    assert prefix_mass(st, 1) == 0.5
    assert prefix_mass(st, 2) == 0.8
    assert prefix_mass(st, 10) == pytest.approx(0.9)
    with pytest.raises(RankOutOfRange):
        prefix_mass(st, 0)

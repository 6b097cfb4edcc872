import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvemac.boundary import BoundarySpec, Segment, apply_pressure_bc, apply_velocity_bc
from curvemac.errors import ConfigError
from curvemac.solver import FlowState

NX, NY = 5, 4


def state_with(seed=0):
    rng = np.random.default_rng(seed)
    s = FlowState.quiescent((NX, NY))
    s.u[:] = rng.standard_normal(s.u.shape)
    s.v[:] = rng.standard_normal(s.v.shape)
    return s


def test_cnei_west():
    s = state_with()
    s.v[1, 2] = 0.4
    apply_velocity_bc(s, BoundarySpec.uniform(west="CNEI", east="CNEI", north="CNEI",
                                              south="CNEI"))
    assert s.v[0, 2] == -0.4
    assert np.all(s.u[0, 1:NY + 1] == 0.0)


def test_cles_north():
    s = state_with()
    s.u[2, NY] = 0.3
    apply_velocity_bc(s, BoundarySpec.uniform(north=("CLES", 1.0), west="CNEI", east="CNEI",
                                              south="CNEI"))
    assert s.u[2, NY + 1] == pytest.approx(1.7, abs=1e-15)
    assert np.all(s.v[1:NX + 1, NY] == 0.0)


def test_cipr_west():
    s = state_with()
    apply_velocity_bc(s, BoundarySpec.uniform(west=("CIPR", 0.1467), east="CECO",
                                              north="CNEI", south="CNEI"))
    assert np.all(s.u[0, 1:NY + 1] == 0.1467)


def test_ceco_east_copies_outward():
    s = state_with()
    apply_velocity_bc(s, BoundarySpec.uniform(west=("CIPR", 1.0), east="CECO",
                                              north="CNEI", south="CNEI"))
    # the boundary face keeps its own value; the ghost beyond copies it
    np.testing.assert_array_equal(s.u[NX + 1, 1:NY + 1], s.u[NX, 1:NY + 1])
    np.testing.assert_array_equal(s.v[NX + 1, 1:NY], s.v[NX, 1:NY])


def test_ceco_north():
    s = state_with()
    apply_velocity_bc(s, BoundarySpec.uniform(north="CECO", west="CNEI", east="CNEI",
                                              south=("CIPR", 1.0)))
    np.testing.assert_array_equal(s.u[1:NX, NY + 1], s.u[1:NX, NY])
    np.testing.assert_array_equal(s.v[1:NX + 1, NY + 1], s.v[1:NX + 1, NY])
    assert np.all(s.v[1:NX + 1, 0] == 1.0)


@pytest.mark.parametrize("side", ["west", "east", "north", "south"])
def test_wall_mean_tangential_is_zero(side):
    sides = dict(west="CNEI", east="CNEI", north="CNEI", south="CNEI")
    s = state_with(3)
    apply_velocity_bc(s, BoundarySpec.uniform(**sides))
    if side == "west":
        mean = 0.5 * (s.v[0, 1:NY] + s.v[1, 1:NY])
    elif side == "east":
        mean = 0.5 * (s.v[NX, 1:NY] + s.v[NX + 1, 1:NY])
    elif side == "south":
        mean = 0.5 * (s.u[1:NX, 0] + s.u[1:NX, 1])
    else:
        mean = 0.5 * (s.u[1:NX, NY] + s.u[1:NX, NY + 1])
    np.testing.assert_allclose(mean, 0.0, atol=1e-15)


def test_lid_mean_equals_slip():
    s = state_with(4)
    apply_velocity_bc(s, BoundarySpec.uniform(north=("CLES", 2.5), west="CNEI", east="CNEI",
                                              south="CNEI"))
    np.testing.assert_allclose(0.5 * (s.u[1:NX, NY] + s.u[1:NX, NY + 1]), 2.5, atol=1e-14)


def test_segments_split_a_side():
    spec = BoundarySpec((Segment("west", "CIPR", 2.0, 1, 2), Segment("west", "CNEI", None, 3, 4),
                         Segment("east", "CECO"), Segment("north", "CNEI"),
                         Segment("south", "CNEI")))
    spec.validate((NX, NY))
    s = state_with()
    apply_velocity_bc(s, spec)
    assert s.u[0, 1:3].tolist() == [2.0, 2.0]
    assert s.u[0, 3:5].tolist() == [0.0, 0.0]


def test_case_letters_accepted():
    assert Segment("a", "cnei").side == "west" and Segment("d", "CNEI").side == "south"


@pytest.mark.parametrize("args", [("up", "CNEI"), ("west", "FOO"), ("west", "CIPR"),
                                  ("west", "CNEI", 1.0), ("north", "CLES", float("nan"))])
def test_invalid_segments(args):
    with pytest.raises(ConfigError):
        Segment(*args)


def test_coverage_checked():
    with pytest.raises(ConfigError, match="uncovered"):
        BoundarySpec.uniform(west="CNEI", east="CNEI", north="CNEI").validate((NX, NY))
    spec = BoundarySpec((Segment("west", "CNEI"), Segment("west", "CNEI", None, 2, 2),
                         Segment("east", "CNEI"), Segment("north", "CNEI"),
                         Segment("south", "CNEI")))
    with pytest.raises(ConfigError, match="twice"):
        spec.validate((NX, NY))


SPECS = [
    BoundarySpec.uniform(west="CNEI", east="CNEI", north=("CLES", 1.0), south="CNEI"),
    BoundarySpec.uniform(west=("CIPR", 1.0), east="CECO", north="CNEI", south="CNEI"),
    BoundarySpec.uniform(west="CECO", east=("CIPR", -1.0), north="CECO", south=("CIPR", 0.5)),
    BoundarySpec((Segment("west", "CIPR", 1.0, 1, 2), Segment("west", "CECO", None, 3, 4),
                  Segment("east", "CLES", 0.2), Segment("north", "CECO"),
                  Segment("south", "CNEI"))),
]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31), st.sampled_from(range(len(SPECS))))
def test_idempotent(seed, k):
    s = state_with(seed)
    apply_velocity_bc(s, SPECS[k])
    once = (s.u.copy(), s.v.copy())
    apply_velocity_bc(s, SPECS[k])
    assert np.array_equal(s.u, once[0]) and np.array_equal(s.v, once[1])


def test_pressure_neumann():
    p = np.zeros((4, 5))
    p[1:-1, 1:-1] = np.arange(6.0).reshape(2, 3) + 2.5
    apply_pressure_bc(p)
    np.testing.assert_array_equal(p[0, 1:-1], p[1, 1:-1])
    np.testing.assert_array_equal(p[-1, 1:-1], p[-2, 1:-1])
    np.testing.assert_array_equal(p[:, 0], p[:, 1])
    np.testing.assert_array_equal(p[:, -1], p[:, -2])
    q = np.full((4, 4), 3.0)
    assert np.array_equal(apply_pressure_bc(q.copy()), q)

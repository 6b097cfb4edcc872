import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvemac.errors import GeometryError, ZeroChordError
from curvemac.spline import (build_spline, evaluate_spline, read_edges, sample_boundary,
                             write_edges)
from oracles import chord_knots, natural_spline_eval


def test_two_points_give_the_chord():
    s = build_spline([(0, 0), (1, 1)])
    np.testing.assert_allclose(evaluate_spline(s, 0.5), [0.5, 0.5], atol=1e-15)


def test_three_collinear_points_midpoint():
    s = build_spline([(0, 0), (1, 0), (2, 0)])
    assert s.knots.tolist() == [0.0, 0.5, 1.0]
    np.testing.assert_allclose(evaluate_spline(s, 0.5), [1.0, 0.0], atol=1e-15)


def test_interpolates_control_points():
    pts = np.array([(0, 0), (1, 0.3), (2.5, -0.2), (3, 1.0), (4.2, 0.7)])
    s = build_spline(pts)
    np.testing.assert_allclose(evaluate_spline(s, s.knots), pts, atol=1e-13)


def test_matches_dense_natural_spline_oracle():
    pts = np.array([(0, 0), (0.7, 0.4), (1.9, 0.1), (2.4, 1.2), (3.8, 1.0), (4.0, 2.0)])
    s = build_spline(pts)
    knots = chord_knots(pts)
    np.testing.assert_allclose(s.knots, knots, rtol=0, atol=1e-15)
    t = np.linspace(0, 1, 101)
    ref = np.column_stack([natural_spline_eval(knots, pts[:, c], t) for c in (0, 1)])
    np.testing.assert_allclose(evaluate_spline(s, t), ref, atol=1e-12)


def test_natural_end_conditions():
    s = build_spline([(0, 0), (1, 2), (2, 1), (3, 3)])
    np.testing.assert_allclose(s.derivative([0.0, 1.0], 2), 0.0, atol=1e-10)


def test_segment_coeffs_shape():
    s = build_spline([(0, 0), (1, 2), (2, 1), (3, 3)])
    assert s.segment_coeffs.shape == (2, 4, 3)


def test_coincident_points_rejected():
    with pytest.raises(ZeroChordError):
        build_spline([(0, 0), (1, 1), (1, 1), (2, 0)])


def test_too_few_points():
    with pytest.raises(GeometryError):
        build_spline([(0, 0)])


@pytest.mark.parametrize("t", [-0.1, 1.0001, np.nan])
def test_parameter_range(t):
    s = build_spline([(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        evaluate_spline(s, t)


def test_sample_boundary_endpoints_exact():
    pts = [(0.1, 0.2), (0.35, 0.9), (1.3, 0.4)]
    out = sample_boundary(build_spline(pts), 17)
    assert out.shape == (17, 2)
    assert tuple(out[0]) == pts[0] and tuple(out[-1]) == pts[-1]
    with pytest.raises(ValueError):
        sample_boundary(build_spline(pts), 1)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=2, max_size=8))
def test_interpolation_exact_property(pts):
    pts = np.array(pts)
    if np.any(np.hypot(*np.diff(pts, axis=0).T) < 1e-3):
        return
    s = build_spline(pts)
    np.testing.assert_allclose(evaluate_spline(s, s.knots), pts, atol=1e-9)


def test_edge_file_round_trip(tmp_path):
    edges = {
        "south": np.array([(0.0, 0.0), (1.0, 0.1), (2.0, 0.0)]),
        "east": np.array([(2.0, 0.0), (2.0, 1.0)]),
        "north": np.array([(0.0, 1.0), (1.0 / 3.0, 0.9), (2.0, 1.0)]),
        "west": np.array([(0.0, 0.0), (0.0, 1.0)]),
    }
    write_edges(tmp_path / "g.txt", edges)
    back = read_edges(tmp_path / "g.txt")
    for k in edges:
        assert np.array_equal(back[k], edges[k])


def test_edge_file_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("#edge\n0 0\n1 0\n#edge\n1 0\n1 1\n")
    with pytest.raises(GeometryError, match="4 edge blocks"):
        read_edges(p)
    p.write_text("#edge\n0 zero\n")
    with pytest.raises(GeometryError, match="malformed"):
        read_edges(p)

import numpy as np
import pytest

from curvemac import kernels
from curvemac.errors import GeometryError, MeshQualityError, TopologyError
from curvemac.grid import (CurvilinearMesh, generate_grid, read_mesh, transfinite_interpolation,
                           validate_grid, write_mesh)
from curvemac.scenarios import stenosis_edges


def rect_edges(n_xi, n_eta, L=2.0, H=1.0):
    x = np.linspace(0, L, n_xi)
    y = np.linspace(0, H, n_eta)
    return {
        "south": np.column_stack([x, np.zeros(n_xi)]),
        "north": np.column_stack([x, np.full(n_xi, H)]),
        "west": np.column_stack([np.zeros(n_eta), y]),
        "east": np.column_stack([np.full(n_eta, L), y]),
    }


def test_tfi_reproduces_uniform_rectangle():
    e = rect_edges(5, 4)
    x, y = transfinite_interpolation(e["south"], e["east"], e["north"], e["west"])
    X, Y = np.meshgrid(np.linspace(0, 2, 5), np.linspace(0, 1, 4), indexing="ij")
    np.testing.assert_allclose(x, X, atol=1e-15)
    np.testing.assert_allclose(y, Y, atol=1e-15)


def test_rectangle_is_a_fixed_point_of_smoothing():
    mesh = generate_grid(rect_edges(9, 5))
    assert mesh.iterations == 1
    X, Y = np.meshgrid(np.linspace(0, 2, 9), np.linspace(0, 1, 5), indexing="ij")
    np.testing.assert_allclose(mesh.x, X, atol=1e-14)
    np.testing.assert_allclose(mesh.y, Y, atol=1e-14)


@pytest.mark.parametrize("method", ["laplace", "winslow"])
def test_boundary_nodes_untouched(method):
    e = stenosis_edges(n_xi=33, n_eta=9)
    mesh = generate_grid(e, method=method)
    np.testing.assert_array_equal(np.column_stack([mesh.x[:, 0], mesh.y[:, 0]]), e["south"])
    np.testing.assert_array_equal(np.column_stack([mesh.x[:, -1], mesh.y[:, -1]]), e["north"])
    np.testing.assert_array_equal(np.column_stack([mesh.x[0], mesh.y[0]]), e["west"])
    np.testing.assert_array_equal(np.column_stack([mesh.x[-1], mesh.y[-1]]), e["east"])
    assert validate_grid(mesh).valid


def test_laplace_residual_history_converges():
    mesh = generate_grid(stenosis_edges(n_xi=33, n_eta=9), tol=1e-6)
    h = np.array(mesh.residual_history)
    assert h[-1] < 1e-6 and h[0] > h[-1]


def test_smoothed_interior_is_discrete_harmonic():
    mesh = generate_grid(stenosis_edges(n_xi=33, n_eta=9), tol=1e-12, max_iter=20000)
    for a in (mesh.x, mesh.y):
        avg = 0.25 * (a[2:, 1:-1] + a[:-2, 1:-1] + a[1:-1, 2:] + a[1:-1, :-2])
        assert np.max(np.abs(avg - a[1:-1, 1:-1])) < 1e-11


def test_max_iter_cap_reported():
    mesh = generate_grid(stenosis_edges(n_xi=33, n_eta=9), max_iter=3, tol=1e-14)
    assert mesh.iterations == 3


def test_count_mismatch():
    e = rect_edges(5, 4)
    e["north"] = e["north"][:-1]
    with pytest.raises(TopologyError):
        generate_grid(e)


def test_corner_mismatch():
    e = rect_edges(5, 4)
    e["east"] = e["east"] + [0.0, 1e-6]
    with pytest.raises(GeometryError, match="corner"):
        generate_grid(e)


def test_unknown_method():
    with pytest.raises(ValueError):
        generate_grid(rect_edges(5, 4), method="hyperbolic")


def test_validate_flags_folded_cell():
    x, y = np.meshgrid(np.arange(4.0), np.arange(4.0), indexing="ij")
    x[1, 1], y[1, 1] = 2.4, 2.4  # pushed across the diagonal node
    q = validate_grid(CurvilinearMesh(x, y))
    # the cell owning the moved node as its sw corner is turned inside out; (0, 0) stays a convex kite
    assert not q.valid and (1, 1) in q.folded and (0, 0) not in q.folded


def test_folding_boundary_raises():
    e = rect_edges(5, 5, L=1.0, H=1.0)
    # north edge dips below the south edge in the middle
    e["north"][2, 1] = -0.5
    with pytest.raises(MeshQualityError):
        generate_grid(e, max_iter=0)


def test_mesh_round_trip(tmp_path, skewed):
    write_mesh(tmp_path / "m.txt", skewed)
    back = read_mesh(tmp_path / "m.txt")
    assert np.array_equal(back.x, skewed.x) and np.array_equal(back.y, skewed.y)


def test_backends_agree_on_smoothing():
    from curvemac.grid import transfinite_interpolation as tfi
    e = stenosis_edges(n_xi=17, n_eta=7)
    out = []
    for name in ("cython", "python"):
        x, y = tfi(e["south"], e["east"], e["north"], e["west"])
        h = kernels.backend(name).smooth_grid(x, y, 50, 1e-10, True)
        out.append((x, y, np.array(h)))
    for a, b in zip(out[0], out[1]):
        assert np.array_equal(a, b)

import math

import numpy as np
import pytest

import sphaerica as sp

CENTER = (0.1, 0.2, 0.95)


def test_fundamental_at_antipode():
    assert sp.fundamental(-1.0) == pytest.approx(1.0 / (4.0 * math.pi), abs=1e-15)
    with pytest.raises(sp.ValidationError):
        sp.fundamental(1.0)


def test_green_functions_vanish_or_are_flux_free_on_the_boundary():
    b = sp.boundary_grid(CENTER, 0.5, 16)
    xi = sp.unit_vector(*_lonlat(CENTER))
    for eta in b["nodes"]:
        assert abs(sp.dirichlet_green(CENTER, 0.5, xi, tuple(eta))) < 1e-12


def test_grids_integrate_area():
    g = sp.sphere_grid(16, 32)
    assert g["weights"].sum() == pytest.approx(4.0 * math.pi, rel=1e-13)
    c = sp.cap_grid(CENTER, 0.5, 8, 16)
    assert c["weights"].sum() == pytest.approx(2.0 * math.pi * 0.5, rel=1e-13)
    assert c["nodes"].shape == (128, 3)


def test_dirichlet_solver_reproduces_inner_harmonic():
    b = sp.boundary_grid(CENTER, 0.5, 256)
    F = sp.inner_harmonic(CENTER, 0.5, 3, 2, b["nodes"])
    pts = sp.cap_grid(CENTER, 0.3, 3, 6)["nodes"]
    U = sp.dirichlet_solve(CENTER, 0.5, F, pts)
    assert np.max(np.abs(U - sp.inner_harmonic(CENTER, 0.5, 3, 2, pts))) < 1e-8


def test_neumann_solver_constant_shift():
    b = sp.boundary_grid(CENTER, 0.5, 128)
    pts = sp.cap_grid(CENTER, 0.3, 2, 4)["nodes"]
    U = sp.neumann_solve(CENTER, 0.5, np.zeros(128), 0.25, pts)
    assert np.all(U == 0.25)
    with pytest.raises(sp.ValidationError):
        sp.neumann_solve(CENTER, 0.5, np.ones(128), 0.0, pts)


def test_vortices_are_deterministic_and_fit():
    a = sp.random_vortices((0, 0, 1), 0.9, 5, 3)
    b = sp.random_vortices((0, 0, 1), 0.9, 5, 3)
    assert np.array_equal(a["centers"], b["centers"])
    pts = sp.cap_grid((0, 0, 1), 0.72, 4, 8)["nodes"]
    r = sp.vortex_mfs((0, 0, 1), 0.9, 5, 1, 100, 1.0, points=pts)
    assert r["rel_max_error"] < 1e-6


def test_vertical_deflection_round_trip():
    center = sp.unit_vector(20.0, 45.0)
    pts = sp.cap_grid(center, 0.4, 3, 6)["nodes"]
    r = sp.vd_round_trip(center, 0.5, 48, 96, 10, 7, 3, 8, pts)
    assert r["rel_l2_error"] < 5e-2


def test_csv_round_trip(tmp_path):
    pts = sp.cap_grid(CENTER, 0.5, 2, 4)["nodes"]
    path = tmp_path / "f.csv"
    sp.save_field_csv(str(path), pts, np.arange(8, dtype=float))
    t = sp.load_field_csv(str(path))
    assert np.array_equal(t["values"], np.arange(8, dtype=float))
    text = path.read_text()
    sp.save_field_csv(str(tmp_path / "g.csv"), pts, np.arange(8, dtype=float))
    assert (tmp_path / "g.csv").read_text() == text
    vec = tmp_path / "v.csv"
    sp.save_field_csv(str(vec), pts, np.zeros((8, 3)))
    assert sp.load_field_csv(str(vec))["vectors"].shape == (8, 3)


def test_run_selfcheck(tmp_path):
    code, log = sp.run({"command": "selfcheck", "out": str(tmp_path)})
    assert code == 0, log
    assert "FAIL" not in (tmp_path / "selfcheck_report.txt").read_text()
    assert sp.run({"command": "bogus", "out": str(tmp_path)})[0] == 2
    assert "vortex" in sp.COMMANDS


def _lonlat(v):
    x, y, z = v
    n = math.sqrt(x * x + y * y + z * z)
    return math.degrees(math.atan2(y, x)), math.degrees(math.asin(z / n))

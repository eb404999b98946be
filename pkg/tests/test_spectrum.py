import warnings

import numpy as np
import pytest

from s3kepler.geometry import SystemParams
from s3kepler.lrl import hamiltonian_from_casimir
from s3kepler.so4 import build_irrep
from s3kepler.spectrum import (
    RadialGrid,
    closed_form_levels,
    degeneracy_check,
    level_energy,
    radial_eigenvalues,
    spectrum_table,
    tower_values,
)

GRID = RadialGrid(8000)


def test_closed_form_examples():
    assert [lv.h for lv in closed_form_levels(0, 4)] == [0, 3, 8, 15]
    levels = closed_form_levels(1, 2)
    assert levels[0].h == -1
    assert (levels[1].h, levels[1].degeneracy) == (2.75, 4)
    lv = closed_form_levels(1, 2, SystemParams(m=2, lam=3))[1]
    assert lv.H == pytest.approx(9 * 2.75)
    with pytest.raises(ValueError):
        closed_form_levels(1, 0)


def test_radial_examples():
    np.testing.assert_allclose(radial_eigenvalues(0, 0, 3, RadialGrid(4000)), [0, 3, 8], atol=1e-3)
    assert abs(radial_eigenvalues(1, 0, 1, GRID)[0] + 1) < 1e-3
    assert abs(radial_eigenvalues(1, 1, 1, GRID)[0] - 2.75) < 1e-3


def test_degeneracy_examples():
    assert degeneracy_check(0, 3, GRID) < 1e-3
    assert all(abs(v - 8) < 1e-3 for v in tower_values(0, 3, GRID).values())
    assert degeneracy_check(1, 3, GRID) <= 2e-3
    assert all(abs(v - (8 - 1 / 9)) < 2e-3 for v in tower_values(1, 3, GRID).values())
    assert degeneracy_check(1, 1, GRID) == 0


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_closed_form_matches_casimir(alpha):
    for n in range(1, 11):
        h = hamiltonian_from_casimir(build_irrep(f"{n - 1}/2"), alpha)
        assert np.abs(h - level_energy(n, alpha) * np.eye(n * n)).max() < 1e-9


def test_second_order_convergence():
    coarse, fine = RadialGrid(500), RadialGrid(1001)
    exact = np.array([level_energy(n, 1.0) for n in (1, 2, 3)])
    e1 = np.abs(radial_eigenvalues(1.0, 0, 3, coarse) - exact)
    e2 = np.abs(radial_eigenvalues(1.0, 0, 3, fine) - exact)
    np.testing.assert_allclose(e1 / e2, 4.0, rtol=0.05)


def test_richardson_improves():
    exact = np.array([level_energy(n, 1.0) for n in range(2, 5)])
    plain = np.abs(radial_eigenvalues(1.0, 1, 3, RadialGrid(1000)) - exact).max()
    rich = np.abs(radial_eigenvalues(1.0, 1, 3, RadialGrid(1000), richardson=True) - exact).max()
    assert rich < plain / 100


def test_monotone_in_alpha():
    for n in (1, 2, 3):
        vals = [radial_eigenvalues(a, 0, n, GRID)[-1] for a in (0.0, 0.5, 1.0)]
        assert vals[0] > vals[1] > vals[2]


def test_spectrum_even_in_alpha():
    for l in (0, 1, 2):
        np.testing.assert_allclose(radial_eigenvalues(1.0, l, 3, GRID), radial_eigenvalues(-1.0, l, 3, GRID), atol=1e-9)


def test_coarse_grid_warns_and_rejects():
    with pytest.raises(ValueError):
        RadialGrid(50)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        radial_eigenvalues(2.0, 0, 5, RadialGrid(100), richardson=True, refine_tol=1e-6)
    assert any("too coarse" in str(w.message) for w in caught)


def test_refined_grid_halves_spacing():
    g = RadialGrid(400)
    assert g.refined().spacing == pytest.approx(g.spacing / 2, rel=1e-15)


@pytest.mark.parametrize("parallel", [False, True])
def test_table_rows(parallel):
    rows = spectrum_table(1.0, 4, RadialGrid(2000), richardson=True, parallel=parallel)
    assert [r["n"] for r in rows] == [1, 2, 3, 4]
    assert all(len(r["h_radial"]) == r["n"] for r in rows)
    assert max(r["max_abs_delta"] for r in rows) < 1e-6

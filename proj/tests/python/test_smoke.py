import json

import mpmath as mp
import pytest

import quelab

mp.mp.dps = 40


def delta_by_product(N):
    c = [0] * (N + 1)
    c[1] = 1
    for n in range(1, N + 1):
        for _ in range(24):
            for i in range(N, n - 1, -1):
                c[i] -= c[i - n]
    return c


def test_delta_series_matches_product():
    assert quelab.delta_series(30) == delta_by_product(30)


def test_weight_grid_and_dimensions():
    assert quelab.cusp_dim(12) == 1 and quelab.cusp_dim(14) == 0 and quelab.cusp_dim(24) == 2
    assert quelab.weight_grid(12, 20) == [12, 16, 18, 20]


def test_lambdas_of_delta():
    s = quelab.Session()
    (lam,) = s.lambdas(12, 3)
    tau = delta_by_product(3)
    for n in (1, 2, 3):
        assert abs(mp.mpf(lam[n - 1]) - tau[n] / mp.mpf(n) ** mp.mpf(5.5)) < mp.mpf(10) ** -35


def test_t2_charpoly_weight_24():
    # T_2 on S_24 has eigenvalues 540 +- 12 sqrt(144169)
    assert quelab.Session().t2_charpoly(24) == [540**2 - 144 * 144169, -1080, 1]


def test_masses_and_norm():
    s = quelab.Session()
    n = s.norm(12, 1)
    assert abs(mp.mpf(n["norm_sq"]) / mp.mpf("1.035362056804320922347817e-6") - 1) < 1e-16
    # tests/oracles/rect_mass.py 12 0 0.25 1
    assert abs(mp.mpf(s.rect_mass(12, 1, 0, 0.25, 1)) - mp.mpf("0.20160664492394863573")) < 1e-18
    full = mp.mpf(s.rect_mass(12, 1, -0.5, 0.5, 1.5))
    assert abs(full - mp.mpf(s.vertical_mass(12, 1, 1.5))) < mp.mpf(2) ** -100
    sg = s.siegel_mass(12, 1, 120)
    assert sg["in_hypothesis"] and mp.mpf(sg["log_mu"]) <= mp.mpf(sg["log_bound"])


def test_errors_map_to_python_exceptions():
    s = quelab.Session()
    with pytest.raises(ValueError):
        s.norm(12, 2)
    with pytest.raises(quelab.DomainError):
        s.rect_mass(12, 1, 0.3, 0.2, 1)
    with pytest.raises(ArithmeticError):
        s.vertical_mass(12, 1, 1e-9)
    with pytest.raises(ValueError):
        quelab.verify(s, "vertical", k_mni=12)


def test_verify_reports(tmp_path):
    s = quelab.Session(cache_dir=tmp_path)
    rep = quelab.verify(s, "vertical", k_min=12, k_max=18)
    assert rep["scenario"] == "vertical" and rep["runtime_s"] is None
    assert [r["k"] for r in rep["rows"]] == [12, 16, 18]
    assert s.decompositions == 3
    warm = quelab.Session(cache_dir=tmp_path)
    assert quelab.verify(warm, "vertical", k_min=12, k_max=18) == rep
    assert warm.decompositions == 0
    g = quelab.verify(s, "gammalemma", delta=0.49, k_grid=[100, 1000])
    assert g["verdict"] == "PASS"
    assert all(mp.mpf(r["gap"]) > 0 for r in g["rows"])


def test_cli_entry(tmp_path):
    code, out, err = quelab.run_cli(["--cache-dir", str(tmp_path), "verify", "siegel", "--k-list", "12"])
    assert code == 0 and json.loads(out)["verdict"] == "PASS"
    assert quelab.run_cli(["--nope"])[0] == 2

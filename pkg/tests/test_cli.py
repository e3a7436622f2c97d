import json
from pathlib import Path

import pytest

from slopes import cli
from slopes.cache import CacheKey, ResultCache


def run(tmp_path, *args, prec=96):
    out = tmp_path / "out"
    cache = tmp_path / "cache"
    return cli.main(["--prec", str(prec), "--out", str(out),
                     "--cache-dir", str(cache), *args]), out


class TestModular:
    def test_minima_artifact(self, tmp_path):
        rc, out = run(tmp_path, "modular", "minima", "--k", "2")
        assert rc == 0
        data = json.loads((out / "minima-k2.json").read_text())
        assert len(data["slopes"]) == 2
        assert data["slopes"][0]["witness"] == [0, 1]

    def test_hecke_report(self, tmp_path):
        rc, out = run(tmp_path, "modular", "hecke", "--k", "2", "--p", "2")
        assert rc == 0
        data = json.loads((out / "hecke-p2-k2.json").read_text())
        assert data["trace"] == 1080
        assert data["det"] == -20468736
        assert data["charpoly_discriminant"] == 24**2 * 144169

    def test_cache_hit_byte_identical(self, tmp_path):
        rc1, out = run(tmp_path, "modular", "gram", "--k", "1")
        blob1 = (out / "gram-k1-A.json").read_bytes()
        cache = ResultCache(str(tmp_path / "cache"))
        assert any(tmp_path.joinpath("cache").iterdir())
        rc2, out = run(tmp_path, "modular", "gram", "--k", "1")
        blob2 = (out / "gram-k1-A.json").read_bytes()
        assert rc1 == rc2 == 0
        assert blob1 == blob2

    def test_corrupted_cache_recomputed(self, tmp_path):
        rc1, out = run(tmp_path, "modular", "gram", "--k", "1")
        blob1 = (out / "gram-k1-A.json").read_bytes()
        for f in (tmp_path / "cache").iterdir():
            data = json.loads(f.read_text())
            data["payload"]["gram_mantissa"][0][0] = "1/3"  # corrupt
            f.write_text(json.dumps(data))
        rc2, out = run(tmp_path, "modular", "gram", "--k", "1")
        blob2 = (out / "gram-k1-A.json").read_bytes()
        assert rc2 == 0
        assert blob1 == blob2  # checksum mismatch forced a clean recompute

    def test_usage_error_exit_2(self, tmp_path):
        rc, _ = run(tmp_path, "modular", "minima", "--k", "0")
        assert rc == 2

    def test_congruence_default_vector(self, tmp_path):
        rc, out = run(tmp_path, "modular", "congruence", "--k", "2")
        assert rc == 0
        data = json.loads((out / "congruence-k2.json").read_text())
        assert data["verdict"] == "congruence-witness"

    def test_filtered_measure(self, tmp_path):
        rc, out = run(tmp_path, "modular", "measure", "--k", "2", "--L", "2")
        assert rc == 0
        data = json.loads((out / "measure-k2-L2.json").read_text())
        assert len(data["atoms"]) == 2


class TestPoly:
    def test_gram_exact(self, tmp_path):
        rc, out = run(tmp_path, "poly", "gram", "--center", "1/4",
                      "--radius", "1/4", "--n", "2")
        assert rc == 0
        data = json.loads((out / "poly-gram-n2.json").read_text())
        assert data["entries"][0][1] == "1/4"
        assert data["entries"][1][1] == "1/8"

    def test_minima(self, tmp_path):
        rc, out = run(tmp_path, "poly", "minima", "--center", "1/4",
                      "--radius", "1/4", "--n", "6")
        assert rc == 0
        data = json.loads((out / "poly-min-n6.json").read_text())
        assert data["certified"] is True
        assert data["norm_sq"].count("/") == 1

    def test_sweep_small(self, tmp_path):
        rc, out = run(tmp_path, "poly", "sweep", "--center", "1/2",
                      "--radius", "1/2", "--degrees", "2:6:2")
        assert rc == 0
        data = json.loads((out / "poly-sweep.json").read_text())
        assert [r["degree"] for r in data["rows"]] == [2, 4, 6]

    def test_factor_with_pool_persistence(self, tmp_path):
        pool = tmp_path / "pool.json"
        pool.write_text(json.dumps([[0, 1]]))
        rc, out = run(tmp_path, "poly", "factor",
                      "--coeffs", "0,0,-1,2", "--pool", str(pool))
        assert rc == 0
        stored = json.loads(pool.read_text())
        assert [0, 1] in stored and [-1, 2] in stored

    def test_rational_parsing_rejects_floats(self, tmp_path):
        with pytest.raises(SystemExit) as e:
            cli.main(["poly", "gram", "--center", "0.25x", "--n", "2"])
        assert e.value.code == 2


class TestCheby:
    def test_verify_ok(self, tmp_path):
        rc, _ = run(tmp_path, "cheby", "verify", "--nmax", "5")
        assert rc == 0

    def test_verify_failure_exit_4(self, tmp_path, monkeypatch):
        import slopes.chebyshev as ch

        real = ch.f_oracle_sq_rational
        monkeypatch.setattr(cli.chebyshev, "f_oracle_sq_rational",
                            lambda n, a, r2, weight="sine": real(n, a, r2) + 1)
        rc, _ = run(tmp_path, "cheby", "verify", "--nmax", "3")
        assert rc == 4

    def test_eval_csv(self, tmp_path):
        rc, out = run(tmp_path, "cheby", "eval", "--family", "boundary",
                      "--r", "1/4", "--grid", "64")
        assert rc == 0
        lines = (out / "cheby-boundary.csv").read_text().splitlines()
        header = json.loads(lines[0])
        assert header["family"] == "boundary"
        assert lines[1] == "alpha,value"
        vals = [float(l.split(",")[1]) for l in lines[2:]]
        assert max(vals) == pytest.approx(0.8813, abs=2e-3)

    def test_bound(self, tmp_path):
        rc, out = run(tmp_path, "cheby", "bound", "--family", "boundary",
                      "--r", "1/4", "--n", "50")
        assert rc == 0
        data = json.loads((out / "cheby-bound.json").read_text())
        assert float(data["bound_over_n"]) == pytest.approx(0.881373587, abs=1e-6)


class TestMeasure:
    def test_serre_from_file(self, tmp_path):
        rows = {
            "rows": [
                {"degree": 50, "factors": [[[0, 1], 34], [[-1, 2], 6],
                                           [[1, -4, 5], 3],
                                           [[1, -8, 27, -44, 29], 1]]},
                {"degree": 100, "factors": [[[0, 1], 63], [[-1, 2], 11],
                                            [[1, -4, 5], 4],
                                            [[1, -8, 27, -44, 29], 1],
                                            [[1, 0, 0, 0, 0, 0, 9], 1],
                                            [[1, 0, 0, 0, 0, 0, 0, 0, 3], 1]]},
            ],
        }
        f = tmp_path / "factors.json"
        f.write_text(json.dumps(rows))
        rc, out = run(tmp_path, "measure", "serre", "--in", str(f),
                      "--window", "2")
        assert rc == 0
        data = json.loads((out / "serre.json").read_text())
        atomic = dict(data["atomic"])
        assert "1*z" in atomic

    def test_equi(self, tmp_path):
        rc, _ = run(tmp_path, "measure", "equi", "--m", "8")
        assert rc == 0

    def test_ks(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        a.write_text(json.dumps({"atoms": [["0", "1"]]}))
        b.write_text(json.dumps({"atoms": [["1", "1"]]}))
        rc, _ = run(tmp_path, "measure", "ks", "--a", str(a), "--b", str(b))
        assert rc == 0

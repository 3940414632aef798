import math

import pytest

from qhm import ball_chain, run_converge, run_equal_glue_demo, run_glue_diverge
from qhm.errors import QhmError


def _strip_elapsed(csv_text: str) -> list[str]:
    lines = csv_text.strip().split("\n")
    header = lines[0].split(",")
    drop = [i for i, c in enumerate(header) if "elapsed" in c]
    keep = [i for i in range(len(header)) if i not in drop]
    return [",".join(line.split(",")[i] for i in keep) for line in lines]


class TestConverge:
    def test_interval_family(self, tmp_path):
        out = tmp_path / "rows.csv"
        res = run_converge("interval", [2, 3, 5, 9], seed=0, out=out)
        assert [r["n"] for r in res.rows] == [2, 3, 5, 9]
        for r in res.rows:
            assert r["status"] == "finite"
            assert r["m_value"] == pytest.approx(0.5, abs=1e-9)
        # nested family carries chain diagnostics
        assert res.rows[1]["chain_step"] <= 1e-6
        assert out.exists()
        assert out.read_text().startswith("k,n,status")
        diag = tmp_path / "rows.csv.diag.csv"
        assert res.metadata["diagnostics_csv"] == str(diag)
        assert diag.read_text().startswith("k,n_k,i_mu,flatness,seminorm_step")

    def test_circle_family(self):
        res = run_converge("circle", [4, 8, 16], seed=0)
        for r in res.rows:
            assert r["m_value"] == pytest.approx(math.pi / 2, abs=1e-9)

    def test_ball_family_small(self):
        res = run_converge("ball3", [21, 41], seed=0)
        values = [r["m_value"] for r in res.rows]
        assert values[0] <= values[1] < 2.0
        assert all(r["m_value"] >= r["i_uniform"] - 1e-12 for r in res.rows)

    def test_non_nested_sizes_skip_chain_columns(self):
        res = run_converge("interval", [3, 4], seed=0)
        assert all(r.get("chain_flatness") is None for r in res.rows)

    def test_sizes_must_ascend(self):
        with pytest.raises(QhmError):
            run_converge("interval", [5, 3], seed=0)
        with pytest.raises(QhmError):
            run_converge("interval", [3, 3], seed=0)

    def test_unknown_family(self):
        with pytest.raises(QhmError):
            run_converge("torus", [3], seed=0)

    def test_deterministic_bytes(self, tmp_path):
        a = run_converge("circle", [4, 8], seed=1, out=tmp_path / "a.csv")
        b = run_converge("circle", [4, 8], seed=1, out=tmp_path / "b.csv")
        assert (_strip_elapsed((tmp_path / "a.csv").read_text())
                == _strip_elapsed((tmp_path / "b.csv").read_text()))


class TestBallChain:
    def test_nested_and_sized(self):
        master, chains, spaces = ball_chain([11, 26, 51])
        prev = set()
        for ix, sub in zip(chains, spaces):
            s = set(ix)
            assert prev.issubset(s)
            prev = s
            assert sub.n == len(ix)
            assert 0 in s  # origin always included
        assert spaces[-1].n <= master.n


class TestGlueDiverge:
    def test_predictions_match_and_grow(self, tmp_path):
        out = tmp_path / "rows.csv"
        res = run_glue_diverge([11, 26, 51], seed=0, out=out)
        glued = [r["m_glued"] for r in res.rows]
        assert all(r["verdict"] == "Strict" for r in res.rows)
        assert all(r["rel_err"] <= 1e-6 for r in res.rows)
        assert all(b > a for a, b in zip(glued, glued[1:]))
        assert out.exists()

    def test_prediction_formula_column(self):
        res = run_glue_diverge([11, 21], seed=0)
        for r in res.rows:
            m = r["m_component"]
            assert r["predicted"] == pytest.approx((2.25 - m) / (2.0 - m))


class TestEqualGlueDemo:
    @pytest.mark.parametrize("n", [3, 5])
    def test_all_rows_ok(self, n):
        res = run_equal_glue_demo(n)
        assert len(res.rows) == 2 * n + 2
        assert all(r["ok"] for r in res.rows)
        sizes = [r["n"] for r in res.rows]
        assert sizes == sorted(sizes)
        glued = res.rows[-1]
        assert glued["verdict"] == "NonStrict"
        assert glued["m_value"] == pytest.approx(res.metadata["component_m"])

    def test_polygon_minimum(self):
        with pytest.raises(QhmError):
            run_equal_glue_demo(2)


class TestCsvFormat:
    def test_cell_encodings(self, tmp_path):
        res = run_converge("interval", [2, 3], seed=0)
        text = res.to_csv_text()
        lines = text.split("\n")
        assert lines[0] == "k,n,status,m_value,i_uniform,resid_flatness," \
                           "chain_flatness,chain_step,elapsed_s,error"
        # '.' decimal separator, no locale surprises
        assert "," not in lines[1].split(",")[3] and "." in lines[1].split(",")[3]

import json

import pytest

from conelab import cli, generators, mesh


@pytest.fixture()
def t3_file(tmp_path):
    path = tmp_path / "t3.json"
    mesh.save_mesh(generators.freudenthal_torus(3, 3), path)
    return str(path)


@pytest.fixture()
def s2_file(tmp_path):
    path = tmp_path / "s2.json"
    mesh.save_mesh(generators.icosphere(1), path)
    return str(path)


def run(argv):
    return cli.main(argv)


class TestSpectrum:
    def test_basic(self, s2_file, tmp_path):
        out = tmp_path / "spec.json"
        code = run(["spectrum", "--mesh", s2_file, "--degree", "0",
                    "--modes", "5", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["near_zero_count"] == 1
        assert len(doc["eigenvalues"]) == 5
        assert doc["conelab_version"]

    def test_missing_mesh_is_error(self, tmp_path, capsys):
        code = run(["spectrum", "--mesh", str(tmp_path / "none.json"),
                    "--degree", "0"])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_deterministic_reports(self, s2_file, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(["spectrum", "--mesh", s2_file, "--degree", "1", "--modes", "4",
             "--out", str(a)])
        run(["spectrum", "--mesh", s2_file, "--degree", "1", "--modes", "4",
             "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestIndicial:
    def test_single_degree(self, t3_file, tmp_path):
        out = tmp_path / "ind.json"
        code = run(["indicial", "--mesh", t3_file, "--cone-dim", "4",
                    "--degree", "1", "--modes", "8", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        rep = doc["reports"][0]
        assert rep["m"] == 0.0
        assert rep["no_log_verdict"]["passed"]
        assert rep["no_log_verdict"]["claim"] == "no-log-gap"

    def test_batch_degrees_with_pool(self, t3_file, tmp_path, monkeypatch):
        monkeypatch.setenv("CONELAB_THREADS", "2")
        out = tmp_path / "ind.json"
        code = run(["indicial", "--mesh", t3_file, "--cone-dim", "4",
                    "--degree", "0", "--degree", "1", "--modes", "6",
                    "--csv", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc["reports"]) == 2
        assert "csv" in doc

    def test_csv_output_file(self, t3_file, tmp_path):
        out = tmp_path / "ind.csv"
        code = run(["indicial", "--mesh", t3_file, "--cone-dim", "4",
                    "--degree", "1", "--modes", "6", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("j,lambda")
        assert len(lines) == 7


class TestCheckCone:
    def test_odp_passes(self, tmp_path):
        out = tmp_path / "cc.json"
        code = run(["check-cone", "--record", "odp-3fold", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["betti_hypothesis"]["holds"]
        assert doc["local_cohomology_flag"]["status"] == "violated"

    def test_t5_fails_with_exit_2(self, tmp_path):
        code = run(["check-cone", "--record", "t5-link",
                    "--out", str(tmp_path / "x.json")])
        assert code == 2

    def test_fail_verdict_names_claim(self, tmp_path):
        out = tmp_path / "cc.json"
        run(["check-cone", "--record", "t5-link", "--out", str(out)])
        doc = json.loads(out.read_text())
        assert doc["betti_hypothesis"]["claim"] == "link-betti-vanishing"


class TestGlue:
    def test_glue_run(self, tmp_path):
        poly = tmp_path / "p.json"
        poly.write_text(json.dumps({"terms": {
            "z1 zbar1": 1.0, "z2 zbar2": 1.0, "z1 z1": 0.15, "zbar1 zbar1": 0.15,
        }}))
        out = tmp_path / "glue.json"
        code = run(["glue", "--weights", "0.7,0.9", "--potential", str(poly),
                    "--samples", "1500", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert all(doc["checks"].values())

    def test_bad_weights(self, tmp_path, capsys):
        poly = tmp_path / "p.json"
        poly.write_text(json.dumps({"terms": {"z1 zbar1": 1.0}}))
        code = run(["glue", "--weights", "0.7,1.9", "--potential", str(poly)])
        assert code == 1


class TestCatalog:
    def test_list(self, capsys):
        assert run(["catalog", "list"]) == 0
        out = capsys.readouterr().out
        assert "odp-3fold" in out

    def test_show(self, capsys):
        assert run(["catalog", "show", "--name", "s2xs3-link"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["record"]["betti"] == [1, 0, 1, 1, 0, 1]

    def test_check_exit_codes(self, tmp_path):
        assert run(["catalog", "check", "--name", "odp-3fold",
                    "--out", str(tmp_path / "a.json")]) == 0
        assert run(["catalog", "check", "--name", "t5-link",
                    "--out", str(tmp_path / "b.json")]) == 2


class TestArtinCheck:
    def test_small_suite(self, tmp_path):
        out = tmp_path / "artin.json"
        code = run(["artin-check", "--k", "3", "--rank", "5", "--trials", "15",
                    "--seed", "3", "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["failures"] == []
        assert doc["claim"] == "module-reflexivity"


class TestMeshGen:
    def test_presets(self, tmp_path, capsys):
        for preset, extra in [("s3", []), ("t2", ["--n", "4"])]:
            out = tmp_path / f"{preset}.json"
            assert run(["mesh-gen", "--preset", preset, "--out", str(out)] + extra) == 0
            cx = mesh.load_mesh(str(out))
            assert cx.dim >= 2

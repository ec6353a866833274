import json
import math
import subprocess
import sys

import pytest

TWO_PI = 2.0 * math.pi


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "exforms.cli", *argv],
        capture_output=True, text=True,
    )


@pytest.fixture
def analyze_file(tmp_path):
    return write(tmp_path / "spec.json", {
        "variables": ["x", "y", "z", "t"],
        "one_form": {"dy": "x", "dt": "z"},
        "box": {v: [-1.0, 1.0] for v in ("x", "y", "z", "t")},
        "samples": 50,
        "seed": 7,
    })


@pytest.fixture
def vortex_file(tmp_path):
    return write(tmp_path / "vortex.json", {
        "variables": ["x", "y", "z"],
        "one_form": {"dx": "y/(x^2+y^2)", "dy": "-x/(x^2+y^2)"},
        "curves": [{"parameter": "t", "period": TWO_PI,
                    "components": ["cos(t)", "sin(t)", "0"]}],
        "quadrature": {"rule": "simpson", "panels": 512},
    })


@pytest.fixture
def hopf_file(tmp_path):
    return write(tmp_path / "hopf.json", {
        "variables": ["x", "y", "z"],
        "curves": [
            {"parameter": "t", "period": TWO_PI, "components": ["cos(t)", "sin(t)", "0"]},
            {"parameter": "s", "period": TWO_PI, "components": ["1+cos(s)", "0", "sin(s)"]},
        ],
        "quadrature": {"rule": "simpson", "panels": 128},
    })


class TestAnalyzeCommand:
    def test_text_report(self, analyze_file):
        r = run_cli("analyze", "--input", analyze_file)
        assert r.returncode == 0
        assert "Pfaff dimension: 4" in r.stdout
        assert "disconnected" in r.stdout
        assert "open sets (9)" in r.stdout

    def test_machine_report_is_deterministic(self, analyze_file, tmp_path):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        assert run_cli("analyze", "--input", analyze_file, "--format", "machine",
                       "--out", str(out1)).returncode == 0
        assert run_cli("analyze", "--input", analyze_file, "--format", "machine",
                       "--out", str(out2)).returncode == 0
        assert out1.read_bytes() == out2.read_bytes()
        doc = json.loads(out1.read_text())
        assert doc["pfaff_dimension"] == 4

    def test_sampling_overrides(self, analyze_file):
        r = run_cli("analyze", "--input", analyze_file, "--samples", "30",
                    "--seed", "5", "--tol-abs", "1e-8", "--tol-rel", "1e-8")
        assert r.returncode == 0

    def test_topology_command(self, analyze_file):
        r = run_cli("topology", "--input", analyze_file)
        assert r.returncode == 0
        assert "closed sets (9)" in r.stdout

    def test_input_error_exit_code(self, tmp_path):
        bad = write(tmp_path / "bad.json", {
            "variables": ["x"], "one_form": {"dx": "x +"}, "box": {"x": [0, 1]},
        })
        r = run_cli("analyze", "--input", bad)
        assert r.returncode == 1
        assert "offset" in r.stderr

    def test_missing_file_exit_code(self):
        r = run_cli("analyze", "--input", "/nonexistent.json")
        assert r.returncode == 1

    def test_inconclusive_exit_code(self, tmp_path):
        spec = write(tmp_path / "inc.json", {
            "variables": ["x"],
            "one_form": {"dx": "x"},
            "box": {"x": [-1.0, 1.0]},
            "exclusion": "1",
            "exclusion_min": 2.0,
        })
        r = run_cli("analyze", "--input", spec)
        assert r.returncode == 2


class TestIntegralCommands:
    def test_circulate(self, vortex_file):
        r = run_cli("circulate", "--input", vortex_file, "--format", "machine")
        assert r.returncode == 0
        assert abs(json.loads(r.stdout)["value"]) == pytest.approx(TWO_PI, abs=1e-6)

    def test_circulate_panel_override_and_refine(self, vortex_file):
        r = run_cli("circulate", "--input", vortex_file,
                    "--panels", "64", "--refine", "2", "--format", "machine")
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        assert len(doc["convergence"]) == 3

    def test_link(self, hopf_file):
        r = run_cli("link", "--input", hopf_file, "--format", "machine")
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        assert abs(doc["nearest_integer"]) == 1
        assert abs(doc["integer_residual"]) < 1e-3

    def test_link_text_mentions_integer(self, hopf_file):
        r = run_cli("link", "--input", hopf_file)
        assert "nearest integer" in r.stdout

    def test_touching_curves_exit_code(self, tmp_path, hopf_file):
        doc = json.loads(open(hopf_file).read())
        doc["curves"][1]["components"] = ["2+cos(s)", "0", "sin(s)"]
        bad = write(tmp_path / "touch.json", doc)
        r = run_cli("link", "--input", bad)
        assert r.returncode == 3
        assert "minimum distance" in r.stderr

    def test_braid(self, tmp_path):
        spec = write(tmp_path / "braid.json", {
            "variables": ["x", "y", "z"],
            "curves": [
                {"parameter": "t", "period": TWO_PI, "components": ["cos(t)", "sin(t)", "0"]},
                {"parameter": "u", "period": TWO_PI, "components": ["2+cos(u)", "sin(u)", "0"]},
                {"parameter": "w", "period": TWO_PI, "components": ["4+cos(w)", "2+sin(w)", "0"]},
            ],
            "quadrature": {"rule": "trapezoid", "panels": 24},
            "signature": {"signs": [1, 1]},
            "constants": {"E_over_c": 1.0},
        })
        r = run_cli("braid", "--input", spec, "--format", "machine")
        assert r.returncode == 0
        assert json.loads(r.stdout)["value"] == pytest.approx(0.0, abs=1e-6)


class TestPhysicsCommand:
    def test_abc_flow_parity(self, tmp_path):
        spec = write(tmp_path / "abc.json", {
            "variables": ["x", "y", "z", "t"],
            "fluid": {"v": ["sin(z)+cos(y)", "sin(x)+cos(z)", "sin(y)+cos(x)"],
                      "psi": "0", "nu": 0.01},
            "samples": 40,
            "seed": 2,
        })
        r = run_cli("physics", "--input", spec, "--format", "machine")
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        parity = doc["fluid"]["parity"]
        assert parity.startswith("-0.02")
        assert doc["fluid"]["parity_at_origin"] == pytest.approx(-0.06)
        assert doc["fluid"]["helicity"]["parity_form_vanishes"] is False

    def test_inviscid_parity_is_zero(self, tmp_path):
        spec = write(tmp_path / "abc0.json", {
            "variables": ["x", "y", "z", "t"],
            "fluid": {"v": ["sin(z)+cos(y)", "sin(x)+cos(z)", "sin(y)+cos(x)"],
                      "psi": "0", "nu": 0.0},
            "samples": 40,
        })
        r = run_cli("physics", "--input", spec, "--format", "machine")
        assert json.loads(r.stdout)["fluid"]["parity"] == "0"

    def test_em_fixture(self, tmp_path):
        spec = write(tmp_path / "em.json", {
            "variables": ["x", "y", "z", "t"],
            "em": {"a": ["-y", "x", "0"], "phi": "0"},
        })
        r = run_cli("physics", "--input", spec)
        assert r.returncode == 0
        assert "B: (0, 0, 2)" in r.stdout

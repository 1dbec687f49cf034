import subprocess
import sys

import numpy as np
import pytest

from transmutation.cli import main
from transmutation.config import parse_key_values
from transmutation.grid import Grid, read_csv, write_csv


def run(tmp_path, verb, *extra, **cfg):
    text = "\n".join(f"{k} = {v}" for k, v in cfg.items())
    path = tmp_path / "run.cfg"
    path.write_text(text + "\n")
    return main([verb, "--config", str(path), "--out", str(tmp_path / "out"), *extra])


def poly_input(tmp_path, n=200):
    g = Grid(1.0, n)
    write_csv(g.sample(lambda x: 1 + x - 2 * x**3 + 0j), tmp_path / "u.csv")
    return tmp_path / "u.csv"


class TestKernelVerb:
    def test_zero_potential(self, tmp_path):
        assert run(tmp_path, "kernel", n=20) == 0
        data = np.loadtxt(tmp_path / "out" / "kernel.csv", delimiter=",", skiprows=1)
        assert np.all(data[:, 2:] == 0)

    def test_constant_metadata(self, tmp_path, capsys):
        assert run(tmp_path, "kernel", potential="const:1") == 0
        meta = parse_key_values((tmp_path / "out" / "kernel.meta").read_text())
        assert float(meta["tail_bound"]) <= 1e-12
        assert int(meta["iterations"]) <= 25
        assert capsys.readouterr().out.startswith("kernel:")

    @pytest.mark.parametrize("bad", ["step:x:0", "bogus:1", "poly:", "const:"])
    def test_malformed_potential(self, tmp_path, capsys, bad):
        assert run(tmp_path, "kernel", potential=bad, n=20) == 1
        err = capsys.readouterr().err
        assert "potential" in err
        assert "potential: potential" not in err

    def test_unknown_key(self, tmp_path, capsys):
        assert run(tmp_path, "kernel", colour="blue") == 1
        assert "colour" in capsys.readouterr().err

    def test_odd_n(self, tmp_path, capsys):
        assert run(tmp_path, "kernel", n=21) == 1
        assert "n:" in capsys.readouterr().err

    def test_truncation_is_numeric_error(self, tmp_path):
        assert run(tmp_path, "kernel", potential="const:5", n=40, kernel_n_max=3) == 2
        assert (tmp_path / "out" / "kernel.csv").exists()

    def test_missing_config_is_io_error(self, tmp_path):
        assert main(["kernel", "--config", str(tmp_path / "nope.cfg")]) == 3

    def test_deterministic(self, tmp_path):
        outs = []
        for sub in ("a", "b"):
            d = tmp_path / sub
            d.mkdir()
            assert run(d, "kernel", potential="poly:0,0,1", n=40) == 0
            outs.append((d / "out" / "kernel.csv").read_bytes())
        assert outs[0] == outs[1]


class TestApplyVerb:
    def test_round_trip(self, tmp_path):
        u = poly_input(tmp_path)
        assert run(tmp_path, "apply", "--input", str(u), "--which", "T", potential="const:1", n=200) == 0
        Tu = tmp_path / "out" / "apply_T.csv"
        assert run(tmp_path, "apply", "--input", str(Tu), "--which", "Tinv",
                   "--output", str(tmp_path / "back.csv"), potential="const:1", n=200) == 0
        back = read_csv(tmp_path / "back.csv")
        assert np.max(np.abs(back.values - read_csv(u).values)) <= 1e-4

    def test_identity_config(self, tmp_path):
        u = poly_input(tmp_path)
        assert run(tmp_path, "apply", "--input", str(u), n=200) == 0
        assert np.array_equal(read_csv(tmp_path / "out" / "apply_T.csv").values, read_csv(u).values)

    def test_spec_identity_matches_T(self, tmp_path):
        u = poly_input(tmp_path)
        for which in ("T", "spec"):
            assert run(tmp_path, "apply", "--input", str(u), "--which", which, potential="step:1:0", n=200) == 0
        a = read_csv(tmp_path / "out" / "apply_T.csv").values
        b = read_csv(tmp_path / "out" / "apply_spec.csv").values
        assert np.max(np.abs(a - b)) <= 1e-6

    def test_grid_mismatch(self, tmp_path):
        u = poly_input(tmp_path, n=100)
        assert run(tmp_path, "apply", "--input", str(u), n=200) == 2

    def test_transpose_needs_support(self, tmp_path):
        u = poly_input(tmp_path)
        assert run(tmp_path, "apply", "--input", str(u), "--which", "Ttrans", n=200) == 2


class TestOtherVerbs:
    def test_basis(self, tmp_path):
        assert run(tmp_path, "basis", potential="const:1", n=100, k_max=6) == 0
        head = (tmp_path / "out" / "basis.csv").read_text().splitlines()[0].split(",")
        assert len(head) == 1 + 2 * 7

    def test_spps(self, tmp_path):
        assert run(tmp_path, "spps", potential="zero", n=200, lambdas="1, -4, 2+1j") == 0
        for i in range(3):
            assert (tmp_path / "out" / f"spps_{i}.csv").exists()
        data = np.loadtxt(tmp_path / "out" / "spps_0.csv", delimiter=",", skiprows=1)
        assert np.max(np.abs(data[:, 1] - np.cosh(data[:, 0]))) <= 1e-8

    def test_eig(self, tmp_path, capsys):
        assert run(tmp_path, "eig", potential="zero") == 0
        lines = (tmp_path / "out" / "eigenvalues.txt").read_text().splitlines()
        values = [float(s) for s in lines if not s.startswith("#")]
        np.testing.assert_allclose(values, [-(m * np.pi) ** 2 for m in (1, 2, 3)], atol=1e-5)
        assert capsys.readouterr().out.startswith("eigenvalues:")

    @pytest.mark.parametrize("pot", ["zero", "const:1"])
    def test_verify_passes(self, tmp_path, capsys, pot):
        assert run(tmp_path, "verify", potential=pot) == 0
        out = capsys.readouterr()
        passed, total = out.out.split()[1].split("/")
        assert passed == total
        assert "goursat_bc_diagonal" in out.err

    def test_verify_failure_exit_code(self, tmp_path):
        # a grid this coarse cannot meet the fixed thresholds
        assert run(tmp_path, "verify", potential="const:1", n=10) == 4


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "transmutation", "eig", "--out", str(tmp_path)],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert proc.stdout.startswith("eigenvalues:")

import json
import subprocess
import sys

import numpy as np
import pytest

from specstab import (ACPiece, Atom, MatrixMeasure, ScanConfig, scan_forbidden)
from specstab.cli import main
from specstab.io import InputError, load_herglotz, load_hermitian


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh)
    return str(path)


class TestScanForbidden:
    def test_piece_plus_atom(self, mixed_measure):
        # piece on [0,1] with unit density, atom at 2
        config = ScanConfig(-0.5, 2.5, steps=61)
        records = scan_forbidden(mixed_measure, config)
        by_x = {round(r.x, 9): r for r in records}
        for r in records:
            if 0.0 < r.x < 1.0:
                assert not r.t_finite and r.in_support
        assert not by_x[2.0].t_finite  # the atom
        r15 = by_x[1.5]
        assert r15.t_finite and not r15.in_support
        # 1/(1.5-1) - 1/1.5 + 1/(1.5-2)^2 = 16/3
        assert np.asarray(r15.t_value)[0, 0] == pytest.approx(16.0 / 3.0)

    def test_far_point_finite(self):
        omega = MatrixMeasure(1, [Atom(0.0, [[1.0]])])
        records = scan_forbidden(omega, ScanConfig(5.0, 6.0, steps=3))
        assert all(r.t_finite and not r.in_support for r in records)

    def test_regularized_diagonals_nondecreasing_in_m(self, mixed_measure):
        config = ScanConfig(-0.5, 2.5, steps=31)
        for rec in scan_forbidden(mixed_measure, config):
            ms = sorted(rec.regularized_diagonals)
            for m1, m2 in zip(ms[:-1], ms[1:]):
                a = np.array(rec.regularized_diagonals[m1])
                b = np.array(rec.regularized_diagonals[m2])
                assert np.all(b >= a - 1e-12)

    def test_dyadic_demo_divergence_spreads(self):
        # atoms at j/2^m with weights 16^-m: every atom gridpoint diverges,
        # and the divergence points fill [0,1] as the depth grows
        for depth in [2, 4, 6]:
            seen = {}
            for m in range(depth + 1):
                for j in range(2 ** m + 1):
                    seen.setdefault(j / 2 ** m, 16.0 ** -m)
            atoms = [Atom(x, [[w]]) for x, w in sorted(seen.items())]
            omega = MatrixMeasure(1, atoms)
            grid = ScanConfig(0.0, 1.0, steps=2 ** depth + 1)
            records = scan_forbidden(omega, grid)
            assert all(not r.t_finite for r in records)

    def test_bad_grid_rejected(self):
        with pytest.raises(ValueError):
            ScanConfig(1.0, 0.0, steps=10)
        with pytest.raises(ValueError):
            ScanConfig(0.0, 1.0, steps=1)


class TestIO:
    def test_load_measure_with_offset(self, tmp_path):
        path = write_json(tmp_path / "m.json", {
            "n": 1, "atoms": [{"x": 0.0, "W": [[[1, 0]]]}], "C": [[[0.5, 0]]]})
        m = load_herglotz(path)
        assert m.C[0, 0] == 0.5

    def test_non_psd_weight_names_atom(self, tmp_path):
        path = write_json(tmp_path / "bad.json", {
            "n": 1, "atoms": [{"x": 0.0, "W": [[[1, 0]]]},
                              {"x": 1.0, "W": [[[-1, 0]]]}]})
        with pytest.raises(InputError, match=r"atoms\[1\]"):
            load_herglotz(path)

    def test_bad_complex_entry(self, tmp_path):
        path = write_json(tmp_path / "bad.json", {
            "n": 1, "atoms": [{"x": 0.0, "W": [["nope"]]}]})
        with pytest.raises(InputError, match="re, im"):
            load_herglotz(path)

    def test_load_hermitian_rejects_nonhermitian(self, tmp_path):
        path = write_json(tmp_path / "d.json", [[[0, 0], [1, 0]], [[0, 0], [0, 0]]])
        with pytest.raises(InputError, match="Hermitian"):
            load_hermitian(path)


class TestCLI:
    def run(self, *argv):
        return main(list(argv))

    def test_eval(self, single_atom_file, capsys):
        assert self.run("eval", "--measure", single_atom_file, "--z", "0,1") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["value"][0][0] == [0.0, 1.0]

    def test_boundary(self, single_atom_file, capsys):
        assert self.run("boundary", "--measure", single_atom_file, "--x", "2") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["converged"] and doc["m_boundary"][0][0][0] == pytest.approx(-0.5)

    def test_tmatrix(self, single_atom_file, capsys):
        assert self.run("tmatrix", "--measure", single_atom_file, "--x", "2") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["t_finite"] and doc["t"][0][0][0] == pytest.approx(0.25)

    def test_masses(self, single_atom_file, capsys):
        assert self.run("masses", "--measure", single_atom_file, "--x", "0") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["mass"][0][0][0] == pytest.approx(1.0)

    def test_eigs(self, single_atom_file, tmp_path, capsys):
        d = write_json(tmp_path / "d.json", [[[-0.5, 0]]])
        assert self.run("eigs", "--measure", single_atom_file,
                        "--d-matrix", d, "--grid=-1:5:2") == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["poles"]) == 1
        assert doc["poles"][0]["p"] == pytest.approx(2.0, abs=1e-9)
        assert doc["poles"][0]["is_max_mult"]

    def test_test_command(self, single_atom_file, tmp_path, capsys):
        d = write_json(tmp_path / "d.json", [[[-0.5, 0]]])
        assert self.run("test", "--measure", single_atom_file,
                        "--d-matrix", d, "--x", "2") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["verdict"] and doc["t_finite"]

    def test_test_command_with_dprime(self, single_atom_file, tmp_path, capsys):
        d = write_json(tmp_path / "d.json", [[[-0.5, 0]]])
        dp = write_json(tmp_path / "dp.json", [[[0.0, 0]]])
        assert self.run("test", "--measure", single_atom_file, "--d-matrix", d,
                        "--d-prime", dp, "--x", "2") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["verdict"]

    def test_scan_csv(self, tmp_path, capsys):
        path = write_json(tmp_path / "m.json", {
            "n": 1,
            "atoms": [{"x": 2.0, "W": [[[1, 0]]]}],
            "ac": [{"a": 0.0, "b": 1.0, "rho": [[[1, 0]]]}]})
        out = tmp_path / "scan.csv"
        assert self.run("scan", "--measure", path, "--grid=-0.5:2.5:61",
                        "--format", "csv", "--out", str(out)) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("x,in_support,t_finite,divergent_directions")
        assert len(lines) == 62

    def test_verify_ok_and_deterministic(self, single_atom_file, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert self.run("verify", "--measure", single_atom_file, "--trials", "3",
                        "--seed", "7", "--out", str(out1)) == 0
        assert self.run("verify", "--measure", single_atom_file, "--trials", "3",
                        "--seed", "7", "--out", str(out2)) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_input_error_exit_code(self, tmp_path, capsys):
        path = write_json(tmp_path / "bad.json", {
            "n": 1, "atoms": [{"x": 0.0, "W": [[[-1, 0]]]}]})
        assert self.run("tmatrix", "--measure", path, "--x", "2") == 2
        assert "atoms[0]" in capsys.readouterr().err

    def test_module_entry_point(self, single_atom_file):
        proc = subprocess.run(
            [sys.executable, "-m", "specstab.cli", "tmatrix",
             "--measure", single_atom_file, "--x", "2"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["t_finite"]

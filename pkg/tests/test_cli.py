import numpy as np
import pytest

from viscotv import netpbm
from viscotv.cli import run


def write_pgm(path, samples, maxval=255, magic="P5"):
    netpbm.write(path, netpbm.NetpbmImage(magic, maxval, samples.astype(np.uint16)))


@pytest.fixture
def board(tmp_path):
    yy, xx = np.indices((16, 16))
    samples = (((yy + xx) % 2) * 255)[:, :, None]
    path = tmp_path / "board.pgm"
    write_pgm(path, samples)
    mask = np.zeros((16, 16), dtype=int)
    mask[6:10, 6:10] = 255
    mask_path = tmp_path / "mask.pgm"
    write_pgm(mask_path, mask[:, :, None])
    return path, mask_path


class TestValidation:
    def test_zeta_one_rejected(self, tmp_path, board, capsys):
        code = run(
            ["--input", str(board[0]), "--output", str(tmp_path / "o.pgm"), "--zeta", "1.0"]
        )
        assert code == 1
        assert "--zeta" in capsys.readouterr().err

    def test_missing_input_file(self, tmp_path, capsys):
        code = run(
            ["--input", str(tmp_path / "nope.pgm"), "--output", str(tmp_path / "o.pgm")]
        )
        assert code == 1

    def test_unknown_flag(self, tmp_path, board):
        assert run(["--input", str(board[0]), "--frobnicate"]) == 1

    def test_malformed_image(self, tmp_path, capsys):
        bad = tmp_path / "bad.pgm"
        bad.write_bytes(b"P5\n4 4\n255\nxx")
        assert run(["--input", str(bad), "--output", str(tmp_path / "o.pgm")]) == 1

    def test_smoothing_needs_small_zeta(self, tmp_path, board):
        code = run(
            [
                "--input", str(board[0]),
                "--output", str(tmp_path / "o.pgm"),
                "--fidelity-smoothing", "1e-3",
            ]
        )
        assert code == 1

    def test_mask_dimension_mismatch(self, tmp_path, board):
        small = tmp_path / "small.pgm"
        write_pgm(small, np.zeros((4, 4, 1)))
        code = run(
            [
                "--input", str(board[0]),
                "--mask", str(small),
                "--output", str(tmp_path / "o.pgm"),
            ]
        )
        assert code == 1


class TestRuns:
    def test_constant_input_is_identity(self, tmp_path):
        src = tmp_path / "const.pgm"
        write_pgm(src, np.full((8, 8, 1), 77))
        out = tmp_path / "out.pgm"
        report = tmp_path / "rep.txt"
        code = run(
            ["--input", str(src), "--output", str(out), "--report", str(report)]
        )
        assert code == 0
        assert src.read_bytes() == out.read_bytes()
        text = report.read_text()
        assert "relative_gap=0.0" in text
        assert "max_principle_pass=true" in text

    def test_inpainting_run_certifies(self, tmp_path, board):
        src, mask = board
        out = tmp_path / "out.pgm"
        report = tmp_path / "rep.txt"
        csv = tmp_path / "log.csv"
        code = run(
            [
                "--input", str(src),
                "--mask", str(mask),
                "--output", str(out),
                "--report", str(report),
                "--log-csv", str(csv),
            ]
        )
        assert code == 0
        lines = csv.read_text().splitlines()
        assert lines[0] == (
            "outer_iter,delta,inner_iters,I_delta,I,R_hat,gap_rel,"
            "grad_inf_norm,max_abs_u,seconds"
        )
        report_text = dict(
            line.split("=", 1) for line in report.read_text().splitlines()
        )
        assert float(report_text["relative_gap"]) <= 1e-4
        assert int(report_text["outer_steps"]) == len(lines) - 1
        assert report_text["max_principle_pass"] == "true"
        # output preserves format and maxval
        restored = netpbm.read(out)
        assert restored.magic == "P5" and restored.maxval == 255

    def test_nonconvergence_exits_two_with_report(self, tmp_path, board):
        src, mask = board
        report = tmp_path / "rep.txt"
        code = run(
            [
                "--input", str(src),
                "--mask", str(mask),
                "--output", str(tmp_path / "o.pgm"),
                "--report", str(report),
                "--tol", "1e-30",
                "--delta0", "0.1",
                "--delta-min", "0.1",
            ]
        )
        assert code == 2
        assert report.exists()
        assert "relative_gap=" in report.read_text()

    def test_denoise_without_mask(self, tmp_path):
        rng = np.random.default_rng(0)
        src = tmp_path / "noisy.pgm"
        write_pgm(src, rng.integers(0, 256, size=(8, 8, 1)))
        code = run(
            ["--input", str(src), "--output", str(tmp_path / "o.pgm"), "--lambda", "5"]
        )
        assert code == 0


class TestDeterminism:
    def test_same_seed_same_bytes(self, tmp_path, board):
        src, mask = board
        args = lambda: [
            "--input", str(src),
            "--mask", str(mask),
            "--output", str(tmp_path / "out.pgm"),
            "--report", str(tmp_path / "rep.txt"),
            "--log-csv", str(tmp_path / "log.csv"),
            "--seed", "11",
        ]
        assert run(args()) == 0
        first_report = (tmp_path / "rep.txt").read_bytes()
        first_csv = (tmp_path / "log.csv").read_text().splitlines()
        first_out = (tmp_path / "out.pgm").read_bytes()
        assert run(args()) == 0
        assert (tmp_path / "rep.txt").read_bytes() == first_report
        assert (tmp_path / "out.pgm").read_bytes() == first_out
        second_csv = (tmp_path / "log.csv").read_text().splitlines()
        # the trailing wall-clock column is the only volatile field
        strip = lambda rows: [r.rsplit(",", 1)[0] for r in rows]
        assert strip(second_csv) == strip(first_csv)
        assert len(second_csv) == len(first_csv)

"""Batch front end: netpbm ingestion, solver invocation, report/log emission.

Mask polarity: bright pixels (value >= 128) mark the damaged region, i.e.
"paint the hole white".  Pixel intensities are mapped to [0, 1] on load and
quantized back with round-half-even on save, preserving the input's format
and maxval.

The report and CSV are byte-deterministic for identical inputs and seed;
wall-clock timing is therefore confined to stdout and the CSV's ``seconds``
column.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import netpbm
from .density import DensityParams
from .energy import ModelParams
from .solver import SolverConfig, check_max_principle, continuation

__all__ = ["load_image", "load_mask", "save_image", "run", "main"]


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def load_image(path) -> np.ndarray:
    """Read a PGM/PPM file as an (H, W, M) field with intensities in [0, 1]."""
    img = netpbm.read(path)
    return img.samples.astype(float) / img.maxval


def load_mask(path, image_shape) -> np.ndarray:
    """Read a PGM damage mask; sample >= 128 means damaged (in D).

    Rejects masks whose dimensions disagree with the image and masks that
    damage every pixel.
    """
    img = netpbm.read(path)
    if img.channels != 1:
        raise ValueError(f"mask must be grayscale PGM, got {img.magic}")
    if (img.height, img.width) != tuple(image_shape[:2]):
        raise ValueError(
            f"mask is {img.width}x{img.height} but image is "
            f"{image_shape[1]}x{image_shape[0]}"
        )
    damaged = img.samples[:, :, 0] >= 128
    if damaged.all():
        raise ValueError("mask damages entire domain")
    return damaged


def save_image(path, u, magic: str, maxval: int) -> None:
    """Clamp to [0, 1], quantize with round-half-even, write with given format."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    samples = np.rint(u * maxval).astype(np.uint16)
    netpbm.write(path, netpbm.NetpbmImage(magic=magic, maxval=maxval, samples=samples))


def _build_parser() -> _Parser:
    p = _Parser(
        prog="viscotv",
        description=(
            "Certified inpainting/denoising: smooth linear-growth TV surrogate, "
            "vanishing-viscosity continuation, duality-gap certificate."
        ),
    )
    p.add_argument("--input", required=True, help="input PGM (P2/P5) or PPM (P3/P6)")
    p.add_argument(
        "--mask",
        default=None,
        help="damage mask PGM; bright (>=128) = damaged; absent = pure denoising",
    )
    p.add_argument("--output", required=True, help="restored image path")
    p.add_argument("--mu", type=float, default=2.0, help="ellipticity exponent (> 1)")
    p.add_argument("--zeta", type=float, default=2.0, help="fidelity exponent (> 1)")
    p.add_argument("--lambda", dest="lam", type=float, default=10.0, help="fidelity weight")
    p.add_argument("--delta0", type=float, default=0.1, help="initial viscosity")
    p.add_argument("--delta-min", type=float, default=1e-8, help="final viscosity")
    p.add_argument("--delta-factor", type=float, default=0.1, help="viscosity shrink factor")
    p.add_argument("--tol", type=float, default=1e-4, help="relative duality-gap target")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized initialization")
    p.add_argument("--report", default=None, help="write key=value run report here")
    p.add_argument("--log-csv", dest="log_csv", default=None, help="per-outer-step CSV log")
    p.add_argument(
        "--fidelity-smoothing",
        dest="fidelity_smoothing",
        type=float,
        default=0.0,
        help="optional fidelity smoothing epsilon, only meaningful for zeta < 2",
    )
    p.add_argument(
        "--inner-max-iters",
        dest="inner_max_iters",
        type=int,
        default=5000,
        help="iteration cap per inner smooth solve",
    )
    return p


def _validate(args):
    if args.mu <= 1.0:
        raise ValueError(f"--mu must be > 1, got {args.mu}")
    if args.zeta <= 1.0:
        raise ValueError(f"--zeta must be > 1, got {args.zeta}")
    if args.lam <= 0.0:
        raise ValueError(f"--lambda must be > 0, got {args.lam}")
    if not 0.0 < args.delta_factor < 1.0:
        raise ValueError(f"--delta-factor must be in (0, 1), got {args.delta_factor}")
    if not 0.0 < args.delta_min <= args.delta0:
        raise ValueError("need 0 < --delta-min <= --delta0")
    if args.tol <= 0.0:
        raise ValueError(f"--tol must be > 0, got {args.tol}")
    if args.fidelity_smoothing < 0.0:
        raise ValueError("--fidelity-smoothing must be >= 0")
    if args.fidelity_smoothing > 0.0 and args.zeta >= 2.0:
        raise ValueError("--fidelity-smoothing applies to zeta < 2 only")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_report(path, pairs) -> None:
    with open(path, "w", newline="\n") as handle:
        for key, value in pairs:
            handle.write(f"{key}={_fmt(value)}\n")


def _write_csv(path, records) -> None:
    header = "outer_iter,delta,inner_iters,I_delta,I,R_hat,gap_rel,grad_inf_norm,max_abs_u,seconds"
    with open(path, "w", newline="\n") as handle:
        handle.write(header + "\n")
        for i, rec in enumerate(records, start=1):
            row = [
                str(i),
                _fmt(rec.delta),
                str(rec.inner_iterations),
                _fmt(rec.I_delta_value),
                _fmt(rec.I_value),
                _fmt(rec.dual_value),
                _fmt(rec.relative_gap),
                _fmt(rec.residual_inf_norm),
                _fmt(rec.max_abs_u),
                f"{rec.wall_seconds:.6f}",
            ]
            handle.write(",".join(row) + "\n")


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
        source = netpbm.read(args.input)
        f = source.samples.astype(float) / source.maxval
        if args.mask is not None:
            mask = load_mask(args.mask, f.shape)
        else:
            mask = np.zeros(f.shape[:2], dtype=bool)
    except (_ArgumentError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    params = ModelParams(
        lam=args.lam,
        zeta=args.zeta,
        density=DensityParams(mu=args.mu),
        eps_fid=args.fidelity_smoothing,
    )
    cfg = SolverConfig(
        delta0=args.delta0,
        delta_min=args.delta_min,
        delta_factor=args.delta_factor,
        inner_tol=1e-8,
        inner_max_iters=args.inner_max_iters,
        gap_tol=args.tol,
        seed=args.seed,
    )

    started = time.perf_counter()
    try:
        u, cert, records = continuation(f, mask, params, cfg)
    except Exception as exc:  # line-search abort or similar: nothing to certify
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    wall = time.perf_counter() - started
    mp = check_max_principle(u, f, mask)

    try:
        save_image(args.output, u, source.magic, source.maxval)
        if args.report:
            _write_report(
                args.report,
                [
                    ("input", args.input),
                    ("mask", args.mask if args.mask is not None else "none"),
                    ("output", args.output),
                    ("mu", args.mu),
                    ("zeta", args.zeta),
                    ("lambda", args.lam),
                    ("delta0", args.delta0),
                    ("delta_min", args.delta_min),
                    ("delta_factor", args.delta_factor),
                    ("inner_tol", cfg.inner_tol),
                    ("inner_max_iters", cfg.inner_max_iters),
                    ("gap_tol", args.tol),
                    ("seed", args.seed),
                    ("fidelity_smoothing", args.fidelity_smoothing),
                    ("final_I", cert.primal_value),
                    ("dual_value", cert.dual_value),
                    ("relative_gap", cert.relative_gap),
                    ("max_principle_pass", "true" if mp.passed else "false"),
                    ("max_principle_margin", mp.margin),
                    ("outer_steps", len(records)),
                    ("total_inner_iterations", sum(r.inner_iterations for r in records)),
                ],
            )
        if args.log_csv:
            _write_csv(args.log_csv, records)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    converged = cert.relative_gap <= args.tol and mp.passed
    print(
        f"viscotv: I={cert.primal_value:.9g} R_hat={cert.dual_value:.9g} "
        f"gap_rel={cert.relative_gap:.3e} max_principle="
        f"{'pass' if mp.passed else 'FAIL'} outer_steps={len(records)} "
        f"wall_seconds={wall:.3f}"
    )
    return 0 if converged else 2


def main() -> None:
    sys.exit(run())

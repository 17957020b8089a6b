"""Discrete primal energies and their exact first variation.

The objective is ``sum_pixels F_delta(grad u) + (lam/zeta) sum_known |u - f|^zeta``
with the channel-Euclidean norm per pixel and the damaged pixels carrying no
fidelity.  ``euler_residual`` is its gradient with respect to every pixel
value, exact to floating precision, so a vanishing residual characterizes the
(unique, delta > 0) minimizer.

Scalar reductions use ``math.fsum`` in a fixed row-major order: energies are
reproducible bit for bit regardless of how callers partition the work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .density import DensityParams, density_gradient, density_value
from .grid import channel_norms, divergence, gradient

__all__ = ["ModelParams", "fidelity", "primal_energy", "euler_residual"]


@dataclass(frozen=True)
class ModelParams:
    """Fidelity weight ``lam`` (> 0), exponent ``zeta`` (> 1) and the density.

    ``eps_fid`` optionally smooths the fidelity norm to
    ``sqrt(|u - f|^2 + eps^2)``; meant for zeta < 2, default off.
    """

    lam: float
    zeta: float
    density: DensityParams
    eps_fid: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise ValueError(f"lam must be a finite real > 0, got {self.lam!r}")
        if not (math.isfinite(self.zeta) and self.zeta > 1.0):
            raise ValueError(f"zeta must be a finite real > 1, got {self.zeta!r}")
        if not (math.isfinite(self.eps_fid) and self.eps_fid >= 0.0):
            raise ValueError(f"eps_fid must be a finite real >= 0, got {self.eps_fid!r}")

    def with_delta(self, delta: float) -> "ModelParams":
        return replace(self, density=DensityParams(self.density.mu, delta))

    def without_viscosity(self) -> "ModelParams":
        return self.with_delta(0.0)


def _fsum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def _shape_check(u, f, mask):
    u = np.asarray(u, dtype=float)
    f = np.asarray(f, dtype=float)
    mask = np.asarray(mask)
    if u.shape != f.shape:
        raise ValueError(f"u shape {u.shape} != f shape {f.shape}")
    if mask.shape != u.shape[:2]:
        raise ValueError(f"mask shape {mask.shape} != grid shape {u.shape[:2]}")
    return u, f, mask


def _deviation_norms(u, f, params: ModelParams) -> np.ndarray:
    dev = u - f
    if params.eps_fid > 0.0:
        return np.sqrt(np.sum(dev * dev, axis=-1) + params.eps_fid**2)
    return channel_norms(dev)


def fidelity(u, f, mask, params: ModelParams) -> float:
    """``(lam/zeta) sum_{known pixels} |u - f|^zeta``; f is ignored on damaged pixels."""
    u, f, mask = _shape_check(u, f, mask)
    norms = _deviation_norms(u, f, params)
    known = ~mask
    return (params.lam / params.zeta) * _fsum(norms[known] ** params.zeta)


def primal_energy(u, f, mask, params: ModelParams) -> float:
    """Density term plus fidelity; with ``delta = 0`` this is the target energy."""
    u, f, mask = _shape_check(u, f, mask)
    return _fsum(density_value(params.density, gradient(u))) + fidelity(
        u, f, mask, params
    )


def euler_residual(u, f, mask, params: ModelParams) -> np.ndarray:
    """Exact gradient of ``primal_energy`` with respect to every pixel value.

    ``-div(DF_delta(grad u)) + lam * 1_known * |u-f|^(zeta-2) (u-f)``, the
    fidelity factor taken as 0 at u = f when zeta < 2 (its continuous limit).
    """
    u, f, mask = _shape_check(u, f, mask)
    g = -divergence(density_gradient(params.density, gradient(u)))
    dev = u - f
    norms = _deviation_norms(u, f, params)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > 0.0, norms ** (params.zeta - 2.0), 0.0)
    g += params.lam * (~mask)[..., None] * scale[..., None] * dev
    return g

"""Pixel-lattice fields, damage masks, and the gradient/divergence pair.

Conventions used throughout the package:

* image fields are float64 arrays of shape ``(height, width, channels)``;
* damage masks are bool arrays of shape ``(height, width)``, True = damaged;
* gradient-like fields are float64 arrays of shape ``(height, width, 2, M)``
  holding one 2 x M matrix per pixel, component 0 the forward difference
  along x (width), component 1 along y (height), pixel spacing 1.

``divergence`` is the exact negative adjoint of ``gradient``:
``<gradient(u), p> == -<u, divergence(p)>`` for every u and p, which is the
identity the discrete Euler equation and the dual functional are built on.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "gradient",
    "divergence",
    "clamp_to_ball",
    "channel_norms",
    "pixel_norms",
    "validate_image",
    "validate_mask",
    "poincare_ratio",
]


def validate_image(u, name="image") -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 3 or min(u.shape) < 1:
        raise ValueError(
            f"{name} must have shape (height, width, channels), got {u.shape}"
        )
    if not np.isfinite(u).all():
        raise ValueError(f"{name} contains non-finite entries")
    return u


def validate_mask(mask, image=None) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.dtype != bool or mask.ndim != 2:
        raise ValueError(f"mask must be a 2-d bool array, got {mask.dtype}/{mask.ndim}d")
    if mask.all():
        raise ValueError("mask damages the entire domain; at least one pixel must be known")
    if image is not None and mask.shape != np.shape(image)[:2]:
        raise ValueError(
            f"mask shape {mask.shape} does not match image shape {np.shape(image)[:2]}"
        )
    return mask


def channel_norms(u) -> np.ndarray:
    """Per-pixel Euclidean norm over channels: (H, W, M) -> (H, W)."""
    u = np.asarray(u, dtype=float)
    return np.sqrt(np.sum(u * u, axis=-1))


def pixel_norms(p) -> np.ndarray:
    """Per-pixel Frobenius norm: (H, W, 2, M) -> (H, W)."""
    p = np.asarray(p, dtype=float)
    return np.sqrt(np.sum(p * p, axis=(-2, -1)))


def gradient(u) -> np.ndarray:
    """Forward differences with zero one-sided difference at the far edges."""
    u = np.asarray(u, dtype=float)
    h, w, m = u.shape
    g = np.zeros((h, w, 2, m))
    g[:, :-1, 0, :] = u[:, 1:, :] - u[:, :-1, :]
    g[:-1, :, 1, :] = u[1:, :, :] - u[:-1, :, :]
    return g


def divergence(p) -> np.ndarray:
    """Negative adjoint of ``gradient``; backward differences with truncation.

    Entries in the last column's x-component and last row's y-component are
    never read (the gradient's range has them zero).
    """
    p = np.asarray(p, dtype=float)
    h, w, _, m = p.shape
    px = p[:, :, 0, :]
    py = p[:, :, 1, :]
    div = np.zeros((h, w, m))
    div[:, :-1, :] += px[:, :-1, :]
    div[:, 1:, :] -= px[:, :-1, :]
    div[:-1, :, :] += py[:-1, :, :]
    div[1:, :, :] -= py[:-1, :, :]
    return div


def clamp_to_ball(u, radius: float) -> np.ndarray:
    """Project each pixel's channel vector onto the ball of the given radius."""
    if radius < 0.0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    u = np.asarray(u, dtype=float)
    norms = channel_norms(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > radius, radius / norms, 1.0)
    return u * scale[..., None]


def poincare_ratio(u, mask) -> float:
    """Diagnostic ratio ||u - mean_known(u)||_2 / ||gradient(u)||_2.

    Finite for nonconstant u because constants are the only fields with zero
    discrete gradient; no sharp constant is claimed for the discrete lattice.
    """
    u = np.asarray(u, dtype=float)
    known = ~np.asarray(mask)
    mean = u[known].mean(axis=0)
    num = float(np.linalg.norm(u - mean))
    den = float(np.linalg.norm(gradient(u)))
    if den == 0.0:
        return 0.0 if num == 0.0 else float("inf")
    return num / den

"""Radial linear-growth density, its derivatives and Fenchel conjugate.

The regularizer applied to a gradient tensor P is the radial density
``F(P) = phi(|P|)`` built from the second derivative ``(1 + t)**(-mu)``,
``mu > 1``.  It grows linearly at infinity with slope ``cbar = 1/(mu - 1)``
(the recession constant), which is also the radius of the ball on which the
Fenchel conjugate ``phi_conjugate`` stays finite.  A quadratic viscosity term
``(delta/2)|P|**2`` can be blended in through ``DensityParams.delta``; the
conjugate is only defined for the viscosity-free density.

All operations are pure and accept scalars or numpy arrays (broadcasting over
leading axes for the tensor-valued ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DensityParams",
    "phi",
    "phi_prime",
    "phi_second",
    "density_value",
    "density_gradient",
    "phi_conjugate",
    "recession_constant",
]

# Below this, the mu != 2 closed form divides by (2 - mu); switch to the
# exact mu = 2 branch.
_MU2_TOL = 1e-6

# Radial quotient phi'(t)/t switches to its Taylor expansion below this.
_RADIAL_TOL = 1e-12


@dataclass(frozen=True)
class DensityParams:
    """Ellipticity exponent ``mu`` (> 1) and viscosity weight ``delta`` (>= 0).

    ``delta = 0`` selects the plain linear-growth density itself.
    """

    mu: float
    delta: float = 0.0

    def __post_init__(self):
        mu = float(self.mu)
        delta = float(self.delta)
        if not math.isfinite(mu) or mu <= 1.0:
            raise ValueError(f"mu must be a finite real > 1, got {self.mu!r}")
        if not math.isfinite(delta) or delta < 0.0:
            raise ValueError(f"delta must be a finite real >= 0, got {self.delta!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "delta", delta)

    @property
    def recession(self) -> float:
        """Slope of phi at infinity, ``1/(mu - 1)``."""
        return 1.0 / (self.mu - 1.0)

    def without_viscosity(self) -> "DensityParams":
        return self if self.delta == 0.0 else DensityParams(self.mu, 0.0)


def _check_nonneg(t, name="t"):
    t = np.asarray(t, dtype=float)
    if t.size and np.min(t) < 0.0:
        raise ValueError(f"{name} must be nonnegative")
    return t


def _maybe_scalar(x, scalar_in):
    return float(x) if scalar_in else x


def phi(params: DensityParams, t):
    """Value of the radial density at t >= 0.

    Closed forms: ``t - log(1 + t)`` at mu = 2, otherwise
    ``t/(mu-1) - ((1+t)**(2-mu) - 1)/((mu-1)(2-mu))``, evaluated via
    expm1/log1p so the mu -> 2 limit stays well conditioned.
    """
    scalar_in = np.isscalar(t) or np.ndim(t) == 0
    t = _check_nonneg(t)
    mu = params.mu
    if abs(mu - 2.0) < _MU2_TOL:
        out = t - np.log1p(t)
    else:
        out = t / (mu - 1.0) - np.expm1((2.0 - mu) * np.log1p(t)) / (
            (mu - 1.0) * (2.0 - mu)
        )
    return _maybe_scalar(out, scalar_in)


def phi_prime(params: DensityParams, t):
    """First derivative ``(1 - (1+t)**(1-mu))/(mu - 1)``; increases from 0 to cbar."""
    scalar_in = np.isscalar(t) or np.ndim(t) == 0
    t = _check_nonneg(t)
    mu = params.mu
    out = -np.expm1((1.0 - mu) * np.log1p(t)) / (mu - 1.0)
    return _maybe_scalar(out, scalar_in)


def phi_second(params: DensityParams, t):
    """Second derivative ``(1+t)**(-mu)``, strictly positive."""
    scalar_in = np.isscalar(t) or np.ndim(t) == 0
    t = _check_nonneg(t)
    out = np.exp(-params.mu * np.log1p(t))
    return _maybe_scalar(out, scalar_in)


def _frobenius(P):
    """Frobenius norm over the trailing (2, M) axes."""
    P = np.asarray(P, dtype=float)
    return np.sqrt(np.sum(P * P, axis=(-2, -1)))


def density_value(params: DensityParams, P):
    """``(delta/2)|P|^2 + phi(|P|)`` with |P| the Frobenius norm.

    P has shape (..., 2, M); the result drops the trailing two axes.
    """
    r = _frobenius(P)
    out = 0.5 * params.delta * r * r + phi(params, r)
    return out


def _radial_quotient(params: DensityParams, r):
    """phi'(r)/r, continuously extended by phi''(0) = 1 at r = 0."""
    small = r < _RADIAL_TOL
    safe = np.where(small, 1.0, r)
    q = phi_prime(params, safe) / safe
    # First-order Taylor of phi'(r)/r about 0.
    return np.where(small, 1.0 - 0.5 * params.mu * r, q)


def density_gradient(params: DensityParams, P):
    """Gradient ``delta*P + phi'(|P|) P/|P|`` with the value 0 at P = 0."""
    P = np.asarray(P, dtype=float)
    r = _frobenius(P)[..., None, None]
    q = _radial_quotient(params, r)
    return params.delta * P + q * P


def recession_constant(params: DensityParams) -> float:
    """Recession constant ``lim phi(t)/t = 1/(mu - 1)`` of the viscosity-free density."""
    return 1.0 / (params.mu - 1.0)


def _invert_phi_prime(params: DensityParams, s):
    """Solve phi'(t) = s elementwise for s in [0, cbar).

    Safeguarded Newton: phi' is increasing and concave, so Newton from below
    is monotone; a doubling bracket plus bisection guards the iteration.
    Terminates at s-residual <= 1e-12.
    """
    s = np.asarray(s, dtype=float)
    t = np.zeros_like(s)
    hi = np.ones_like(s)
    for _ in range(1200):
        low = phi_prime(params, hi) <= s
        if not low.any():
            break
        hi = np.where(low, np.minimum(2.0 * hi, 1e300), hi)
    else:
        raise ArithmeticError(
            "cannot bracket the conjugate inversion; argument is too close "
            "to the recession constant"
        )
    tol = 1e-12
    for _ in range(300):
        resid = phi_prime(params, t) - s
        if np.max(np.abs(resid)) <= tol:
            break
        newton = t - resid / phi_second(params, t)
        # Concavity keeps Newton-from-below inside [t, root]; bisect otherwise.
        bad = ~np.isfinite(newton) | (newton <= t - tol) | (newton > hi)
        t = np.where(bad, 0.5 * (t + hi), newton)
    else:
        raise ArithmeticError("conjugate inversion did not converge")
    return t


def phi_conjugate(params: DensityParams, s):
    """Fenchel conjugate ``sup_t [s t - phi(t)]`` of the viscosity-free density.

    Finite for s < cbar; at s = cbar it equals ``1/((mu-1)(mu-2))`` when
    mu > 2 and +inf otherwise; +inf beyond.  Requires delta = 0.
    """
    if params.delta != 0.0:
        raise ValueError("phi_conjugate is defined for the delta = 0 density only")
    scalar_in = np.isscalar(s) or np.ndim(s) == 0
    s = np.atleast_1d(_check_nonneg(s, name="s"))
    mu = params.mu
    cbar = recession_constant(params)

    out = np.full(s.shape, np.inf)
    finite = s < cbar
    if finite.any():
        t = _invert_phi_prime(params, s[finite])
        # Assembled as (s - cbar) t + (cbar t - phi(t)) so the two large
        # linear-growth terms never meet head on.
        if abs(mu - 2.0) < _MU2_TOL:
            tail = np.log1p(t)
        else:
            tail = np.expm1((2.0 - mu) * np.log1p(t)) / ((mu - 1.0) * (2.0 - mu))
        out[finite] = (s[finite] - cbar) * t + tail
    if mu > 2.0 + _MU2_TOL:
        out[s == cbar] = 1.0 / ((mu - 1.0) * (mu - 2.0))
    return _maybe_scalar(out[0], scalar_in) if scalar_in else out

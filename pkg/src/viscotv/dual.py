"""Dual variables, the dual functional, and the duality-gap certificate.

For a candidate restoration u the dual field ``tau = DF(grad u)`` (the
viscosity-free part of the density gradient) is always strictly inside the
ball of radius ``cbar`` where the conjugate density is finite.  Plugging tau
into the Lagrangian and taking the pointwise infimum over test images yields
a rigorous lower bound ``R_hat[tau]`` on the minimal energy:

* on known pixels the infimum of ``d . v + (lam/zeta)|v - f|^zeta`` over all
  v is available in closed form (``d = -div tau``);
* on damaged pixels there is no fidelity, so the infimum is taken over the
  ball ``|v| <= L`` instead -- legitimate because every minimizer obeys the
  maximum principle ``sup |u| <= L`` with L the largest known-pixel norm.

``certify`` packages the resulting bound as a duality-gap certificate: the
reported relative gap upper-bounds the true suboptimality of u.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .density import density_gradient, phi_conjugate, recession_constant
from .energy import ModelParams, _fsum, _shape_check, primal_energy
from .grid import channel_norms, divergence, gradient, pixel_norms

__all__ = [
    "DualCertificate",
    "dual_from_primal",
    "dual_value",
    "certify",
    "known_pixel_infimum",
    "damaged_pixel_infimum",
    "sup_known_norm",
]


@dataclass(frozen=True)
class DualCertificate:
    """Primal/dual pair with the relative gap and feasibility diagnostics.

    ``dual_value <= primal_value`` always (weak duality);
    ``relative_gap = (primal_value - dual_value)/max(1, |primal_value|)``.
    """

    primal_value: float
    dual_value: float
    relative_gap: float
    divergence_residual_on_D: float
    feasibility_margin: float


def sup_known_norm(f, mask) -> float:
    """Largest channel-Euclidean norm of f over known pixels."""
    f = np.asarray(f, dtype=float)
    mask = np.asarray(mask)
    return float(np.max(channel_norms(f)[~mask]))


def dual_from_primal(u, params: ModelParams):
    """Return ``(tau, sigma) = (DF(grad u), delta*grad u + tau)``."""
    g = gradient(u)
    tau = density_gradient(params.density.without_viscosity(), g)
    sigma = params.density.delta * g + tau
    return tau, sigma


def known_pixel_infimum(d, f_val, lam: float, zeta: float):
    """Exact infimum over v of ``d . v + (lam/zeta)|v - f|^zeta`` per pixel.

    d and f_val have a trailing channel axis; equality is attained at
    ``v = f - (|d|/lam)^(1/(zeta-1)) d/|d|``.
    """
    d = np.asarray(d, dtype=float)
    f_val = np.asarray(f_val, dtype=float)
    dnorm = channel_norms(d)
    dot = np.sum(d * f_val, axis=-1)
    coef = (zeta - 1.0) / zeta * lam ** (-1.0 / (zeta - 1.0))
    return dot - coef * dnorm ** (zeta / (zeta - 1.0))


def damaged_pixel_infimum(d, bound: float):
    """Exact infimum of ``d . v`` over the channel ball ``|v| <= bound``."""
    return -bound * channel_norms(d)


def dual_value(tau, f, mask, mparams: ModelParams, bound: float) -> float:
    """Certified lower bound on the minimal delta = 0 energy.

    Returns -inf when some |tau| leaves the domain of the conjugate
    (|tau| > cbar, or |tau| >= cbar when mu <= 2).
    """
    tau = np.asarray(tau, dtype=float)
    f = np.asarray(f, dtype=float)
    mask = np.asarray(mask)
    dparams = mparams.density.without_viscosity()
    sup_f = sup_known_norm(f, mask)
    if bound < sup_f * (1.0 - 1e-12):
        raise ValueError(f"bound {bound} is below the largest known-pixel norm {sup_f}")

    cbar = recession_constant(dparams)
    norms = pixel_norms(tau)
    if dparams.mu <= 2.0:
        infeasible = norms >= cbar
    else:
        infeasible = norms > cbar
    if infeasible.any():
        return -math.inf

    conj = phi_conjugate(dparams, norms)
    d = -divergence(tau)
    known = ~mask
    known_terms = known_pixel_infimum(d, f, mparams.lam, mparams.zeta)[known]
    damaged_terms = damaged_pixel_infimum(d, bound)[mask]
    return _fsum(-conj) + _fsum(known_terms) + _fsum(damaged_terms)


def certify(u, f, mask, mparams: ModelParams, bound: float) -> DualCertificate:
    """Build tau from u, evaluate both sides of the duality and the gap.

    The primal side is the delta = 0 energy even for iterates produced at
    delta > 0; it dominates the viscous energy, so the reported gap
    upper-bounds the true suboptimality for the target problem.
    """
    u, f, mask = _shape_check(u, f, mask)
    tau, _ = dual_from_primal(u, mparams)
    primal = primal_energy(u, f, mask, mparams.without_viscosity())
    dval = dual_value(tau, f, mask, mparams, bound)

    margin = recession_constant(mparams.density) - float(np.max(pixel_norms(tau)))
    if margin < 1e-12:
        warnings.warn(
            f"dual feasibility margin {margin:.3e} is tiny; gradients are enormous",
            RuntimeWarning,
            stacklevel=2,
        )
    div_tau = divergence(tau)
    if mask.any():
        div_residual = float(np.max(channel_norms(div_tau)[mask]))
    else:
        div_residual = 0.0

    if dval == -math.inf:
        gap = math.inf
    else:
        gap = (primal - dval) / max(1.0, abs(primal))
        if gap < 0.0:
            if gap < -1e-10:
                raise AssertionError(
                    f"weak duality violated: primal {primal} < dual {dval}"
                )
            gap = 0.0
    return DualCertificate(
        primal_value=primal,
        dual_value=dval,
        relative_gap=gap,
        divergence_residual_on_D=div_residual,
        feasibility_margin=margin,
    )

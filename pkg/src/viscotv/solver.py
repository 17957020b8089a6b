"""Smooth inner minimization and vanishing-viscosity continuation.

The viscous objective (delta > 0) is minimized by gradient descent with
Armijo backtracking, Barzilai-Borwein trial steps and Nesterov-style momentum
that restarts whenever an extrapolated step fails to keep the energy
monotone.  Plain Newton is ruled out globally because the fidelity term is
merely C^1 for zeta < 2; the contract is descent plus a residual tolerance,
not a step count.

``continuation`` drives delta down a geometric schedule with warm starts and
stops at the first certificate whose relative duality gap clears ``gap_tol``
(or when the schedule bottoms out at ``delta_min``).  It never returns
without a certificate.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .dual import certify, sup_known_norm
from .energy import ModelParams, euler_residual, primal_energy
from .grid import channel_norms, validate_image, validate_mask

__all__ = [
    "SolverConfig",
    "ConvergenceRecord",
    "InnerResult",
    "MaxPrincipleCheck",
    "LineSearchError",
    "minimize_smooth",
    "continuation",
    "check_max_principle",
    "default_initial",
]

_ARMIJO_C1 = 1e-4
_MAX_BACKTRACKS = 60
_STEP_CLIP = (1e-8, 1e4)


@dataclass(frozen=True)
class SolverConfig:
    delta0: float = 0.1
    delta_min: float = 1e-8
    delta_factor: float = 0.1
    inner_tol: float = 1e-8
    inner_max_iters: int = 5000
    gap_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.delta_min <= self.delta0):
            raise ValueError("need 0 < delta_min <= delta0")
        if not (0.0 < self.delta_factor < 1.0):
            raise ValueError("need 0 < delta_factor < 1")
        if self.inner_tol <= 0.0 or self.gap_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.inner_max_iters < 1:
            raise ValueError("inner_max_iters must be >= 1")


@dataclass(frozen=True)
class ConvergenceRecord:
    """One outer continuation step, for observability of the delta -> 0 limit."""

    delta: float
    inner_iterations: int
    I_delta_value: float
    I_value: float
    dual_value: float
    relative_gap: float
    residual_inf_norm: float
    max_abs_u: float
    wall_seconds: float


@dataclass
class InnerResult:
    u: np.ndarray
    iterations: int
    residual_inf: float
    converged: bool
    energy: float
    energy_history: list = field(default_factory=list)


@dataclass(frozen=True)
class MaxPrincipleCheck:
    passed: bool
    margin: float
    bound: float


class LineSearchError(RuntimeError):
    pass


def check_max_principle(u, f, mask) -> MaxPrincipleCheck:
    """Pass iff ``sup |u| <= L + 1e-8`` with L the largest known-pixel |f|."""
    bound = sup_known_norm(f, mask)
    sup_u = float(np.max(channel_norms(u)))
    margin = bound - sup_u
    return MaxPrincipleCheck(passed=margin >= -1e-8, margin=margin, bound=bound)


def default_initial(f, mask) -> np.ndarray:
    """f on known pixels, per-channel mean of the known values on damaged ones."""
    f = np.asarray(f, dtype=float)
    mask = np.asarray(mask)
    u0 = f.copy()
    if mask.any():
        u0[mask] = f[~mask].mean(axis=0)
    return u0


def _linf(g) -> float:
    return float(np.max(np.abs(g)))


def minimize_smooth(u0, delta, f, mask, params: ModelParams, cfg: SolverConfig) -> InnerResult:
    """Minimize the viscous energy at fixed delta > 0 from the start u0.

    Stops when the sup-norm of the residual falls below
    ``inner_tol * (1 + sup_known |f|)`` or after ``inner_max_iters``
    iterations (flagged through ``converged``).  Every accepted step
    strictly decreases the energy.
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be > 0, got {delta}")
    pd = params.with_delta(float(delta))
    tol = cfg.inner_tol * (1.0 + sup_known_norm(f, mask))

    u = np.array(u0, dtype=float, copy=True)
    e_u = primal_energy(u, f, mask, pd)
    g_u = euler_residual(u, f, mask, pd)
    res = _linf(g_u)
    history = [e_u]

    u_prev = u
    alpha = 1.0
    momentum_k = 1
    iters = 0

    stagnated = False
    while res > tol and iters < cfg.inner_max_iters and not stagnated:
        iters += 1
        accepted = False
        flat = False
        for use_momentum in (momentum_k > 1, False):
            if use_momentum:
                beta = (momentum_k - 1.0) / (momentum_k + 2.0)
                y = u + beta * (u - u_prev)
                g_y = euler_residual(y, f, mask, pd)
                e_y = primal_energy(y, f, mask, pd)
            else:
                y, g_y, e_y = u, g_u, e_u
            gg = float(np.vdot(g_y, g_y))
            if gg == 0.0:
                flat = True
                break
            step = min(max(alpha, _STEP_CLIP[0]), _STEP_CLIP[1])
            for _ in range(_MAX_BACKTRACKS + 1):
                cand = y - step * g_y
                e_cand = primal_energy(cand, f, mask, pd)
                if e_cand <= e_y - _ARMIJO_C1 * step * gg and e_cand < e_u:
                    accepted = True
                    break
                step *= 0.5
            if accepted:
                break
            momentum_k = 1  # momentum step failed; retry plain from u
            if not use_momentum:
                # At the final (tiny) step the energy change is below what
                # floating point can certify: converged to machine precision.
                if math.isfinite(e_cand) and abs(e_cand - e_u) <= 64.0 * np.finfo(
                    float
                ).eps * max(1.0, abs(e_u)):
                    stagnated = True
                    break
                raise LineSearchError(
                    f"no descent after {_MAX_BACKTRACKS} backtracks at iteration "
                    f"{iters} (delta={delta:g}, residual={res:.3e})"
                )
        if flat:  # gradient vanished at the extrapolated point
            u, e_u = y, e_y
            g_u = g_y
            res = _linf(g_u)
            history.append(e_u)
            break
        if stagnated:
            break

        g_new = euler_residual(cand, f, mask, pd)
        s = cand - u
        q = g_new - g_u
        sq = float(np.vdot(s, q))
        if sq > 0.0:
            alpha = float(np.vdot(s, s)) / sq  # Barzilai-Borwein trial step
        else:
            alpha = step * 2.0
        alpha = min(max(alpha, _STEP_CLIP[0]), _STEP_CLIP[1])

        u_prev, u = u, cand
        e_u, g_u = e_cand, g_new
        res = _linf(g_u)
        history.append(e_u)
        momentum_k += 1

    return InnerResult(
        u=u,
        iterations=iters,
        residual_inf=res,
        converged=res <= tol,
        energy=e_u,
        energy_history=history,
    )


def _constant_known_value(f, mask):
    """The common known-pixel value if f is constant there, else None."""
    known = np.asarray(f, dtype=float)[~np.asarray(mask)]
    if known.size and (known == known[0]).all():
        return known[0]
    return None


def continuation(f, mask, params: ModelParams, cfg: SolverConfig, u0=None):
    """Solve along delta = delta0, delta0*factor, ... >= delta_min with warm starts.

    Returns ``(u, certificate, records)``.  Stops early at the first relative
    gap <= ``cfg.gap_tol``.  ``u0`` overrides the deterministic initial guess
    (useful for multi-start uniqueness checks).
    """
    f = validate_image(f, name="f")
    mask = validate_mask(mask, image=f)
    bound = sup_known_norm(f, mask)

    const = _constant_known_value(f, mask)
    if const is not None and u0 is None:
        # The global minimizer (energy 0) is attained; no iterations needed.
        t0 = time.perf_counter()
        u = np.broadcast_to(const, f.shape).copy()
        cert = certify(u, f, mask, params, bound)
        rec = ConvergenceRecord(
            delta=cfg.delta0,
            inner_iterations=0,
            I_delta_value=cert.primal_value,
            I_value=cert.primal_value,
            dual_value=cert.dual_value,
            relative_gap=cert.relative_gap,
            residual_inf_norm=0.0,
            max_abs_u=float(np.max(channel_norms(u))),
            wall_seconds=time.perf_counter() - t0,
        )
        return u, cert, [rec]

    u = default_initial(f, mask) if u0 is None else validate_image(u0, name="u0")
    records = []
    delta = cfg.delta0
    while True:
        t0 = time.perf_counter()
        inner = minimize_smooth(u, delta, f, mask, params, cfg)
        u = inner.u
        cert = certify(u, f, mask, params, bound)
        records.append(
            ConvergenceRecord(
                delta=delta,
                inner_iterations=inner.iterations,
                I_delta_value=inner.energy,
                I_value=cert.primal_value,
                dual_value=cert.dual_value,
                relative_gap=cert.relative_gap,
                residual_inf_norm=inner.residual_inf,
                max_abs_u=float(np.max(channel_norms(u))),
                wall_seconds=time.perf_counter() - t0,
            )
        )
        if cert.relative_gap <= cfg.gap_tol:
            break
        next_delta = delta * cfg.delta_factor
        if next_delta < cfg.delta_min * (1.0 - 1e-12):
            break
        delta = next_delta
    return u, cert, records

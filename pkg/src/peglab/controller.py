"""Parallel position-force controller with learned parameters.

Each outer control step the agent supplies a 24-vector in [-1, 1] that is
affinely mapped to: position gains Kp_x (6), force gains Kp_f (6), the
selection diagonal S (6) trading position against force control per axis,
and a residual pose command a_x (6). Derivative and integral gains are
tied proportionally to their proportional counterparts. A separate gain
scheduler amplifies translational position gains (bounded by kn) once the
position error drops below a threshold, so the position branch is not
drowned out by sensor noise near the goal.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

ACTION_DIM = 24


@dataclass(frozen=True)
class ActionBounds:
    """Per-group parameter ranges for the 24-dim action affine map."""

    kpx_lo: float = 5.0
    kpx_hi: float = 100.0
    kpf_lo: float = 0.1e-3
    kpf_hi: float = 5.0e-3
    s_lo: float = 0.0
    s_hi: float = 1.0
    ax_max_lin: float = 2.0e-3          # m
    ax_max_rot: float = np.deg2rad(1.0)  # rad
    c_d: float = 0.1                     # Kd_x = c_d * Kp_x
    c_i: float = 0.5                     # Ki_f = c_i * Kp_f


@dataclass
class ControllerGains:
    kp_x: np.ndarray
    kd_x: np.ndarray
    kp_f: np.ndarray
    ki_f: np.ndarray
    s: np.ndarray
    a_x: np.ndarray


@dataclass
class ControllerState:
    force_integral: np.ndarray = field(default_factory=lambda: np.zeros(6))
    scheduling_active: bool = True


def _affine(u: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return lo + (u + 1.0) * 0.5 * (hi - lo)


def map_action(action: np.ndarray, bounds: ActionBounds = ActionBounds()) -> ControllerGains:
    """Map a [-1, 1]^24 action to controller parameters.

    Layout: [Kp_x(6) | Kp_f(6) | S(6) | a_x(6)].
    """
    action = np.asarray(action, dtype=float)
    if action.shape != (ACTION_DIM,):
        raise ValueError(f"expected action of shape ({ACTION_DIM},), got {action.shape}")
    if not np.all(np.isfinite(action)):
        raise ValueError("action contains non-finite values")
    kp_x = _affine(action[0:6], bounds.kpx_lo, bounds.kpx_hi)
    kp_f = _affine(action[6:12], bounds.kpf_lo, bounds.kpf_hi)
    s = _affine(action[12:18], bounds.s_lo, bounds.s_hi)
    a_x = np.concatenate([
        _affine(action[18:21], -bounds.ax_max_lin, bounds.ax_max_lin),
        _affine(action[21:24], -bounds.ax_max_rot, bounds.ax_max_rot),
    ])
    return ControllerGains(
        kp_x=kp_x,
        kd_x=bounds.c_d * kp_x,
        kp_f=kp_f,
        ki_f=bounds.c_i * kp_f,
        s=s,
        a_x=a_x,
    )


def schedule_gains(kp_x: np.ndarray, x_e: np.ndarray, threshold: float = 0.01,
                   kn: float = 10.0) -> np.ndarray:
    """Scale translational position gains up as the error shrinks.

    Per translation axis the multiplier is min(threshold / |e|, kn) once
    |e| < threshold, 1 otherwise; a zero error uses the full kn.
    """
    if not threshold > 0:
        raise ValueError("scheduling threshold must be positive")
    kp_x = np.asarray(kp_x, dtype=float)
    err = np.abs(np.asarray(x_e, dtype=float)[:3])
    with np.errstate(divide="ignore"):
        mult = np.where(err > 0.0, threshold / err, np.inf)
    mult = np.minimum(mult, kn)
    mult = np.where(err < threshold, mult, 1.0)
    out = kp_x.copy()
    out[:3] *= mult
    return out


def control_step(gains: ControllerGains, state: ControllerState, x_e: np.ndarray,
                 xdot_e: np.ndarray, f_e: np.ndarray, dt: float,
                 integral_max: float = 10.0):
    """One outer-loop evaluation of the parallel control law.

    Returns the commanded pose delta and the updated controller state.
    The force integral is clamped per axis to +-integral_max (anti-windup).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    integral = np.clip(state.force_integral + np.asarray(f_e, dtype=float) * dt,
                       -integral_max, integral_max)
    pos_branch = gains.kp_x * x_e + gains.kd_x * xdot_e + gains.a_x
    force_branch = gains.kp_f * f_e + gains.ki_f * integral
    x_c = gains.s * pos_branch + (1.0 - gains.s) * force_branch
    return x_c, replace(state, force_integral=integral)


def clamp_command(x_c: np.ndarray, limits: np.ndarray) -> np.ndarray:
    """Per-axis safety clamp so one bad action cannot teleport the peg."""
    limits = np.asarray(limits, dtype=float)
    if not np.all(limits > 0):
        raise ValueError("command limits must be positive")
    return np.clip(np.asarray(x_c, dtype=float), -limits, limits)

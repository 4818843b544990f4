"""Difficulty bookkeeping and domain randomization sampling.

A task instance is a set of physical parameters (start offset, peg shape,
hole clearance, insertion tolerance, friction, contact stiffness). Each
parameter has an easy and a hard extreme; the live difficulty level
L in [0, 1] exposes a growing slice of every range. Level evolution is
either linear in the episode count or adaptive: a +-1 success counter
bumps the level up/down when it crosses a threshold. Values are drawn
uniformly over the exposed slice (UDR) or via a truncated Gaussian
centered on the level (GDR), which occasionally serves easier tasks to
fight forgetting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .geometry import TRAIN_SHAPES, PegShape

UDR = "udr"
GDR = "gdr"
STRATEGIES = (UDR, GDR)

GDR_MAX_RESAMPLES = 64

# raw simulator-tuning values the stiffness range was carried over from,
# kept for provenance only (easy -> hard, note the inverted direction)
GAZEBO_KP_EASY = 5.0e-4
GAZEBO_KP_HARD = 1.0e-6


@dataclass(frozen=True)
class ParamSpec:
    """One randomized parameter with its easy->hard extremes."""

    name: str
    easy: float = 0.0
    hard: float = 0.0
    kind: str = "continuous"            # "continuous" | "discrete"
    values: tuple = ()                  # discrete options, easy -> hard
    note: str = ""

    def __post_init__(self):
        if self.kind == "continuous" and self.easy == self.hard:
            raise ValueError(f"{self.name}: easy and hard values must differ")
        if self.kind == "discrete" and not self.values:
            raise ValueError(f"{self.name}: discrete spec needs values")


@dataclass(frozen=True)
class CurriculumState:
    level: float = 0.1
    perf: int = 0
    level_step: float = 0.05
    thld_up: int = 4
    thld_down: int = -4

    def __post_init__(self):
        if not 0.0 <= self.level <= 1.0:
            raise ValueError("level must lie in [0, 1]")
        if not self.level_step > 0:
            raise ValueError("level_step must be positive")
        if not (self.thld_up > 0 > self.thld_down):
            raise ValueError("need thld_up > 0 > thld_down")


@dataclass(frozen=True)
class DomainParams:
    """One sampled task instance, in the units the ranges are stated in."""

    offset_pos_mm: np.ndarray
    offset_rot_deg: np.ndarray
    shape: PegShape
    clearance_mm: float
    tolerance_mm: float
    friction: float
    stiffness: float
    level_at_sample: float


def default_registry() -> list[ParamSpec]:
    """The randomized parameters with their maximum ranges."""
    return [
        ParamSpec("offset_pos_mm", 0.0, 50.0,
                  note="per-axis magnitude, sign drawn separately"),
        ParamSpec("offset_rot_deg", 0.0, 30.0,
                  note="per-axis magnitude, sign drawn separately"),
        ParamSpec("shape", kind="discrete", values=TRAIN_SHAPES),
        ParamSpec("clearance_mm", 3.0, 0.5),
        ParamSpec("tolerance_mm", 15.0, 1.0),
        ParamSpec("friction", 1.0, 5.0),
        ParamSpec("stiffness", 500.0, 10000.0,
                  note=f"mapped from simulator kp {GAZEBO_KP_EASY} -> {GAZEBO_KP_HARD}"),
    ]


def param_range_at_level(spec: ParamSpec, level: float, literal: bool = False):
    """Sub-range of a continuous spec exposed at difficulty `level`.

    The default interpolated form spans [easy, easy + (hard - easy) * L]
    so L=1 recovers the full stated range exactly. `literal=True` selects
    the uninterpolated variant [easy, easy + hard * L] for comparison.
    """
    if not 0.0 <= level <= 1.0:
        raise ValueError("level must lie in [0, 1]")
    if spec.kind != "continuous":
        raise ValueError("ranges are only defined for continuous specs")
    if literal:
        return spec.easy, spec.easy + spec.hard * level
    return spec.easy, spec.easy + (spec.hard - spec.easy) * level


def discrete_prefix(spec: ParamSpec, level: float) -> tuple:
    """First ceil(L * n) entries of a discrete spec, at least one."""
    if spec.kind != "discrete":
        raise ValueError("prefix unlock is only defined for discrete specs")
    n = len(spec.values)
    count = max(1, math.ceil(level * n))
    return spec.values[:min(count, n)]


def sample_udr(rng: np.random.Generator, lo: float, hi: float) -> float:
    """Uniform draw over the (possibly descending) interval."""
    a, b = (lo, hi) if lo <= hi else (hi, lo)
    return float(rng.uniform(a, b))


def sample_gdr(rng: np.random.Generator, level: float, sigma: float) -> float:
    """Difficulty draw ~ Normal(level, sigma^2) re-sampled into [0, 1].

    Falls back to clamping after GDR_MAX_RESAMPLES rejected draws.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not 0.0 <= level <= 1.0:
        raise ValueError("level must lie in [0, 1]")
    u = level
    for _ in range(GDR_MAX_RESAMPLES):
        u = level + sigma * rng.standard_normal()
        if 0.0 <= u <= 1.0:
            return float(u)
    return float(np.clip(u, 0.0, 1.0))


def _continuous_value(rng, spec, level, strategy, sigma, shared_u, literal):
    if strategy == GDR:
        u = shared_u if shared_u is not None else sample_gdr(rng, level, sigma)
        lo, hi = param_range_at_level(spec, 1.0, literal=literal)
        return lo + (hi - lo) * u
    lo, hi = param_range_at_level(spec, level, literal=literal)
    return sample_udr(rng, lo, hi)


def sample_domain(registry: Sequence[ParamSpec], level: float, strategy: str,
                  rng: np.random.Generator, sigma: float = 0.1,
                  shared_u: bool = False, literal: bool = False,
                  peg_radius: float = 0.01) -> DomainParams:
    """Draw one task instance at the given difficulty level.

    With `shared_u=True` a single Gaussian difficulty draw drives every
    parameter instead of independent per-parameter draws.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown sampling strategy: {strategy!r}")
    specs = {s.name: s for s in registry}
    u_all = sample_gdr(rng, level, sigma) if (strategy == GDR and shared_u) else None

    def draw(name):
        return _continuous_value(rng, specs[name], level, strategy, sigma, u_all, literal)

    pos = np.array([draw("offset_pos_mm") for _ in range(3)])
    pos_sign = np.where(rng.random(3) < 0.5, -1.0, 1.0)
    rot = np.array([draw("offset_rot_deg") for _ in range(3)])
    rot_sign = np.where(rng.random(3) < 0.5, -1.0, 1.0)

    shape_spec = specs["shape"]
    if strategy == GDR:
        u_shape = u_all if shared_u else sample_gdr(rng, level, sigma)
        unlocked = discrete_prefix(shape_spec, u_shape)
    else:
        unlocked = discrete_prefix(shape_spec, level)
    kind = unlocked[int(rng.integers(len(unlocked)))]

    return DomainParams(
        offset_pos_mm=pos * pos_sign,
        offset_rot_deg=rot * rot_sign,
        shape=PegShape(kind=kind, radius=peg_radius),
        clearance_mm=draw("clearance_mm"),
        tolerance_mm=draw("tolerance_mm"),
        friction=draw("friction"),
        stiffness=draw("stiffness"),
        level_at_sample=level,
    )


def linear_level(episode: int, episode_max: int) -> float:
    """Linearly rising difficulty, saturating at 1."""
    if episode < 0 or episode_max <= 0:
        raise ValueError("need episode >= 0 and episode_max > 0")
    return min(episode / episode_max, 1.0)


def adaptive_update(state: CurriculumState, success: bool) -> CurriculumState:
    """Counter-based level evolution: +-1 per episode outcome, bump the
    level by one step (and reset the counter) when a threshold is crossed."""
    perf = state.perf + (1 if success else -1)
    level = state.level
    if perf >= state.thld_up:
        level = min(1.0, level + state.level_step)
        perf = 0
    elif perf <= state.thld_down:
        level = max(0.0, level - state.level_step)
        perf = 0
    return replace(state, level=level, perf=perf)

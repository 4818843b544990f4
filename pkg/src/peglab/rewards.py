"""Dense reward for force-sensitive insertion.

Three weighted components: a position/velocity term that peaks when the
peg is at the goal and at rest, a contact-force discount shaped as a
sigmoid so small forces are cheap and large ones expensive, and a sparse
event term for completion / collision / every elapsed step. A dynamic
variant scales the whole signal by the curriculum difficulty so full
reward is only available at the hardest level.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

REWARD_COMPLETED = 500.0
REWARD_COLLISION = -200.0
REWARD_STEP = -1.0


class StepStatus(enum.Enum):
    COMPLETED = "completed"
    COLLISION = "collision"
    OTHERWISE = "otherwise"


@dataclass(frozen=True)
class RewardWeights:
    w1: float = 1.0
    w2: float = 1.0
    w3: float = 1.0

    def __post_init__(self):
        if min(self.w1, self.w2, self.w3) < 0:
            raise ValueError("reward weights must be non-negative")
        if self.w1 == self.w2 == self.w3 == 0:
            raise ValueError("at least one reward weight must be positive")


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or not math.isfinite(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def reward_position_velocity(x: float, v: float) -> float:
    """Reward for normalized distance x and speed v, both in [0, 1].

    Encourages moving fast while far and slow while close; maximal (1.0)
    at the goal at rest.
    """
    x = _check_unit("x", x)
    v = _check_unit("v", v)
    return (1.0 - math.tanh(5.0 * x)) * (1.0 - v) + (v / 2.0) ** 2


def reward_force(f: float) -> float:
    """Sigmoid force discount for normalized force error f in [0, 1].

    Always negative: near zero for small contact forces, saturating at -1
    for large ones.
    """
    f = _check_unit("f", f)
    return -1.0 / (1.0 + math.exp(-15.0 * f + 5.0))


def reward_event(status: StepStatus) -> float:
    if status is StepStatus.COMPLETED:
        return REWARD_COMPLETED
    if status is StepStatus.COLLISION:
        return REWARD_COLLISION
    return REWARD_STEP


def reward_total(x: float, v: float, f: float, status: StepStatus,
                 weights: RewardWeights = RewardWeights()) -> float:
    return (weights.w1 * reward_position_velocity(x, v)
            + weights.w2 * reward_force(f)
            + weights.w3 * reward_event(status))


def reward_dynamic(r: float, level: float) -> float:
    """Scale a per-step reward by the current difficulty level in [0, 1]."""
    level = _check_unit("level", level)
    return r * level

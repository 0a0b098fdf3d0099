"""Cosine-annealing learning-rate schedule with warm restarts (SGDR).

Cycle i runs for t0 * t_mult**i steps. Within a cycle the rate decays along a
cosine from eta_max to eta_min and resets to eta_max at every restart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ConfigError


@dataclass(frozen=True)
class LrSchedule:
    eta_max: float
    t0: int
    eta_min: float = 0.0
    t_mult: float = 1.0

    def __post_init__(self):
        if self.t0 <= 0:
            raise ConfigError(f"t0 must be a positive step count, got {self.t0}")
        if self.t_mult < 1.0:
            raise ConfigError(f"t_mult must be >= 1, got {self.t_mult}")
        if self.eta_min > self.eta_max:
            raise ConfigError(f"eta_min {self.eta_min} exceeds eta_max {self.eta_max}")


def lr_at(schedule: LrSchedule, step: int) -> float:
    """Learning rate at optimizer step `step` (0-based)."""
    if step < 0:
        raise ConfigError(f"step must be >= 0, got {step}")
    if schedule.t_mult == 1.0:
        t_cur = step % schedule.t0
        t_i = float(schedule.t0)
    else:
        start, t_i = 0.0, float(schedule.t0)
        while step >= start + t_i:
            start += t_i
            t_i *= schedule.t_mult
        t_cur = step - start
    span = schedule.eta_max - schedule.eta_min
    return schedule.eta_min + 0.5 * span * (1.0 + math.cos(math.pi * t_cur / t_i))

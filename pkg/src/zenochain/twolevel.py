"""Closed-form dynamics for a single chain site (N = 1).

Kept free of the propagator/channel code paths so it can check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TwoLevelParams:
    gamma: float
    epsilon: float
    tau: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")

    @property
    def omega(self) -> float:
        return math.sqrt(self.gamma**2 + self.epsilon**2 / 4)

    @property
    def t00(self) -> float:
        """Probability to find the particle back on the dot after one interval."""
        return 1.0 - (self.gamma / self.omega) ** 2 * math.sin(self.omega * self.tau) ** 2


def transition_matrix(p: TwoLevelParams) -> np.ndarray:
    t00 = p.t00
    return np.array([[t00, 1.0 - t00], [1.0 - t00, t00]])


def survival_closed_form(p: TwoLevelParams, m: int) -> float:
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return 0.5 * (1.0 + (2.0 * p.t00 - 1.0) ** m)


def survival_matrix_power(p: TwoLevelParams, m: int) -> float:
    """Dot element of T^M by repeated multiplication."""
    T = transition_matrix(p)
    acc = np.eye(2)
    for _ in range(m):
        acc = acc @ T
    return float(acc[0, 0])

"""Dot-chain tight-binding Hamiltonian.

Site 0 is the dot, sites 1..N form an open chain. Energies are in units of
the chain hopping ``gamma_c``; time in units of ``1/gamma_c`` with hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

# on-site disorder window used for the random-chain runs
EPSILON_WIDTH = 1.0


@dataclass(frozen=True)
class ModelSpec:
    n_chain: int
    gamma: float = 1.0
    gamma_c: float = 1.0
    epsilons: Optional[Sequence[float]] = None
    epsilon_seed: Optional[int] = field(default=None)

    def __post_init__(self):
        if int(self.n_chain) != self.n_chain or self.n_chain < 1:
            raise ValueError(f"n_chain must be a positive integer, got {self.n_chain!r}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.gamma_c <= 0:
            raise ValueError(f"gamma_c must be > 0, got {self.gamma_c}")
        eps = self.epsilons
        if eps is None:
            eps = np.zeros(self.n_chain)
        eps = tuple(float(e) for e in eps)
        if len(eps) != self.n_chain:
            raise ValueError(f"expected {self.n_chain} on-site energies, got {len(eps)}")
        object.__setattr__(self, "n_chain", int(self.n_chain))
        object.__setattr__(self, "epsilons", eps)

    @classmethod
    def with_random_epsilons(cls, n_chain: int, gamma: float, seed: int, gamma_c: float = 1.0) -> "ModelSpec":
        """Chain with on-site energies drawn once from uniform[-0.5, 0.5]."""
        rng = np.random.default_rng(seed)
        half = EPSILON_WIDTH / 2
        eps = rng.uniform(-half, half, size=n_chain)
        return cls(n_chain, gamma, gamma_c, tuple(eps), seed)

    @property
    def dim(self) -> int:
        return self.n_chain + 1


def build_hamiltonian(spec: ModelSpec) -> np.ndarray:
    """Real symmetric (N+1)x(N+1) matrix, basis ordered (dot, 1, ..., N)."""
    D = spec.dim
    h = np.zeros((D, D))
    h[0, 1] = h[1, 0] = -spec.gamma
    idx = np.arange(1, D - 1)
    h[idx, idx + 1] = -spec.gamma_c
    h[idx + 1, idx] = -spec.gamma_c
    h[np.arange(1, D), np.arange(1, D)] = spec.epsilons
    return h


def chain_dispersion(k):
    """Band energy -2 cos k of the uniform chain (gamma_c = 1)."""
    return -2.0 * np.cos(k)


def group_velocity(k):
    return 2.0 * np.sin(k)


def max_group_velocity() -> float:
    return 2.0

"""Spectral route to the stroboscopic propagator U(tau) = exp(-i H tau)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EigenSystem:
    energies: np.ndarray  # ascending
    vectors: np.ndarray  # columns are eigenvectors

    @property
    def dim(self) -> int:
        return len(self.energies)


@dataclass(frozen=True)
class Propagator:
    tau: float
    matrix: np.ndarray
    eig: EigenSystem

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _fix_signs(vectors: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    vectors = vectors.copy()
    for n in range(vectors.shape[1]):
        col = vectors[:, n]
        nz = np.flatnonzero(np.abs(col) > atol)
        if nz.size and col[nz[0]] < 0:
            vectors[:, n] = -col
    return vectors


def diagonalize(h: np.ndarray) -> EigenSystem:
    """Eigen-decompose a real symmetric Hamiltonian.

    Energies come out ascending. Each eigenvector is flipped so that its first
    non-negligible component is positive, which makes downstream results
    reproducible run to run.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
    if not np.allclose(h, h.T, atol=1e-14, rtol=0):
        raise ValueError("Hamiltonian must be symmetric")
    # LinAlgError on non-convergence is left to propagate
    energies, vectors = np.linalg.eigh(h)
    return EigenSystem(energies, _fix_signs(vectors))


def propagate(eig: EigenSystem, tau: float) -> Propagator:
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    V = eig.vectors
    u = (V * np.exp(-1j * eig.energies * tau)) @ V.T
    return Propagator(float(tau), u, eig)


def spectral_width(eig: EigenSystem) -> float:
    if eig.dim < 2:
        raise ValueError("spectral width undefined for a single level")
    return float(eig.energies[-1] - eig.energies[0])


def tau_star(eig: EigenSystem) -> float:
    """Fastest unitary time scale, 2 pi / (E_max - E_min)."""
    return 2 * np.pi / spectral_width(eig)

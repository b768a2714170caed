"""Superoperator of the measurement map and its spectrum.

Vectorization is row-stacking, ``vec(X)[i*D + j] = X[i, j]``, so that
``vec(A X B) = kron(A, B.T) @ vec(X)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from zenochain.model import ModelSpec, build_hamiltonian
from zenochain.propagator import Propagator, diagonalize, propagate, tau_star

UNIT_TOL = 1e-9
ZERO_TOL = 1e-12
PAIR_TOL = 1e-8
COND_LIMIT = 1e8


class DefectiveDecompositionError(RuntimeError):
    """Eigenbasis too ill-conditioned (or unpairable) for a modal expansion."""


class DegenerateStationaryError(RuntimeError):
    def __init__(self, dimension: int):
        super().__init__(f"eigenvalue 1 has a {dimension}-dimensional eigenspace; stationary state not unique")
        self.dimension = dimension


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    D = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape(D, D)


def _projectors(D: int) -> tuple[np.ndarray, np.ndarray]:
    pd = np.zeros((D, D))
    pd[0, 0] = 1.0
    return pd, np.eye(D) - pd


@dataclass(frozen=True)
class Superoperator:
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        """Hilbert-space dimension D (the matrix is D^2 x D^2)."""
        return int(round(np.sqrt(self.matrix.shape[0])))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho))

    def apply_dual(self, x: np.ndarray) -> np.ndarray:
        """Heisenberg-picture map, sum_a U^+ P_a x P_a U."""
        return unvec(self.matrix.conj().T @ vec(x))


def build_superoperator(u: Propagator) -> Superoperator:
    U = u.matrix if isinstance(u, Propagator) else np.asarray(u)
    s = sum(np.kron(p @ U, (p @ U).conj()) for p in _projectors(U.shape[0]))
    return Superoperator(s)


@dataclass
class SpectralDecomposition:
    eigenvalues: np.ndarray
    right_modes: np.ndarray  # (D^2, D, D)
    left_modes: np.ndarray  # (D^2, D, D), Tr(left[n] @ right[m]) = delta_nm
    condition_number: float
    biorthogonality_error: float
    flags: tuple[str, ...] = field(default_factory=tuple)

    @property
    def near_defective(self) -> bool:
        return "near_defective" in self.flags or "pairing_ambiguous" in self.flags

    @property
    def unit_eigenspace_dimension(self) -> int:
        return unit_eigenspace_dimension(self.eigenvalues)


def unit_eigenspace_dimension(eigenvalues: np.ndarray, tol: float = UNIT_TOL) -> int:
    return int(np.sum(np.abs(np.asarray(eigenvalues) - 1.0) <= tol))


def sort_order(eigenvalues: np.ndarray) -> np.ndarray:
    """Indices ordering by descending modulus, then real part, then imaginary part."""
    lam = np.asarray(eigenvalues)
    # quantize the modulus so round-off does not split genuine ties
    mod = np.round(np.abs(lam), 12)
    return np.lexsort((-lam.imag, -lam.real, -mod))


def _clusters(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group indices of (complex) values connected by distance <= tol."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = np.argsort(values.real)
    for a_pos, a in enumerate(order):
        for b in order[a_pos + 1:]:
            if values[b].real - values[a].real > tol:
                break
            if abs(values[a] - values[b]) <= tol:
                parent[find(b)] = find(a)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(sorted(g)) for g in groups.values()]


def decompose(s: Superoperator) -> SpectralDecomposition:
    """Biorthogonal eigensystem of the map and of its dual.

    Right modes come from the map, left modes from an independent
    eigendecomposition of the dual map. Left and right eigenvalues are paired
    within ``PAIR_TOL``; inside a cluster of (near-)equal eigenvalues the left
    modes are recombined so that Tr(left_n right_m) = delta_nm holds on the
    cluster. A cluster whose left and right multiplicities differ is flagged
    ``pairing_ambiguous``; a condition number above ``COND_LIMIT`` is flagged
    ``near_defective``.
    """
    S = s.matrix
    D = s.dim
    lam, R = np.linalg.eig(S)
    order = sort_order(lam)
    lam, R = lam[order], R[:, order]
    R = R / np.linalg.norm(R, axis=0)

    # dual map acts on vec(phi) through S^H; M+ phi = mu phi
    mu, W = np.linalg.eig(S.conj().T)
    # Tr(phi Phi) = vec(phi^T) . vec(Phi), no conjugation
    L = np.stack([vec(unvec(W[:, k]).T) for k in range(W.shape[1])])

    flags = []
    cond = float(np.linalg.cond(R))
    if cond > COND_LIMIT:
        flags.append("near_defective")

    L_paired = np.zeros_like(R.T)
    used = np.zeros(len(mu), dtype=bool)
    for cluster in _clusters(lam, PAIR_TOL):
        centre = lam[cluster].mean()
        width = np.max(np.abs(lam[cluster] - centre))
        cand = np.flatnonzero(~used & (np.abs(mu - centre) <= PAIR_TOL + width))
        if len(cand) != len(cluster):
            flags.append("pairing_ambiguous")
            # keep the closest candidates so the result is still usable for inspection
            rest = np.flatnonzero(~used)
            cand = rest[np.argsort(np.abs(mu[rest] - centre))[: len(cluster)]]
        used[cand] = True
        block_l = L[cand]
        gram = block_l @ R[:, cluster]
        try:
            L_paired[cluster] = np.linalg.solve(gram, block_l)
        except np.linalg.LinAlgError:
            flags.append("pairing_ambiguous")
            L_paired[cluster] = np.linalg.lstsq(gram, block_l, rcond=None)[0]

    # stationary mode: trace-one right mode, so its partner is the identity
    if abs(lam[0] - 1.0) <= UNIT_TOL:
        tr = np.trace(unvec(R[:, 0]))
        if abs(tr) > 1e-12:
            R[:, 0] /= tr
            L_paired[0] *= tr

    bio = float(np.max(np.abs(L_paired @ R - np.eye(len(lam)))))
    right = R.T.reshape(-1, D, D)
    # rows of L_paired hold vec(phi^T)
    left = L_paired.reshape(-1, D, D).transpose(0, 2, 1)
    return SpectralDecomposition(lam, right, left, cond, bio, tuple(dict.fromkeys(flags)))


def survival_spectral(dec: SpectralDecomposition, m_steps: int) -> np.ndarray:
    """Dot population p_M, M = 0..m_steps, from the modal expansion of rho_0 = |0><0|."""
    if dec.near_defective:
        raise DefectiveDecompositionError(
            f"decomposition flagged {dec.flags} (cond={dec.condition_number:.3g}); iterate the channel directly"
        )
    weights = dec.left_modes[:, 0, 0] * dec.right_modes[:, 0, 0]
    powers = dec.eigenvalues[None, :] ** np.arange(m_steps + 1)[:, None]
    return (powers @ weights).real


@dataclass(frozen=True)
class DecayRate:
    lambda1: complex
    lambda1_modulus: float
    raw_rate: float  # -ln|lambda1|
    gamma_rate: float  # raw_rate / gamma^2
    flags: tuple[str, ...] = ()


def decay_rate(dec: SpectralDecomposition, gamma: float) -> DecayRate:
    """Asymptotic decay rate set by the slowest non-stationary eigenvalue.

    lambda1 is the largest-modulus eigenvalue with |lambda| < 1 - UNIT_TOL.
    Eigenvalues below ``ZERO_TOL`` in modulus are exact zero modes (the map
    annihilates dot-chain coherences) and never count as lambda1. Rates are
    +inf when no other eigenvalue lies inside the unit circle, NaN when the
    stationary state is not unique or gamma == 0.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    lam = dec.eigenvalues
    mod = np.abs(lam)
    flags = []
    if dec.unit_eigenspace_dimension > 1:
        flags.append("degenerate_unit_eigenspace")
    if np.any((mod >= 1 - UNIT_TOL) & (np.abs(lam - 1) > UNIT_TOL)):
        flags.append("peripheral_nonunit")
    if gamma == 0:
        flags.append("zero_coupling")

    inside = np.flatnonzero((mod < 1 - UNIT_TOL) & (mod > ZERO_TOL))
    if inside.size == 0:
        flags.append("no_subunit_spectrum")
        lam1, raw = 0j, float("inf")
    else:
        lam1 = lam[inside[np.argmax(mod[inside])]]
        raw = float(-np.log(abs(lam1)))
    if "degenerate_unit_eigenspace" in flags:
        raw = float("nan")
    scaled = raw / gamma**2 if gamma > 0 else float("nan")
    return DecayRate(complex(lam1), float(abs(lam1)), raw, scaled, tuple(flags))


@dataclass(frozen=True)
class RateRow:
    tau: float
    tau_tilde: float
    lambda1_modulus: float
    gamma_rate: float
    raw_rate: float
    flags: tuple[str, ...]


def rate_scan(spec: ModelSpec, tau_grid: Sequence[float], workers: Optional[int] = None) -> list[RateRow]:
    """Decay rate on a grid of measurement intervals; rows follow grid order."""
    grid = [float(t) for t in tau_grid]
    if not grid:
        raise ValueError("empty tau grid")
    if any(t <= 0 for t in grid):
        raise ValueError("tau grid values must be > 0")
    eig = diagonalize(build_hamiltonian(spec))
    ts = tau_star(eig)

    def point(tau: float) -> RateRow:
        dec = decompose(build_superoperator(propagate(eig, tau)))
        r = decay_rate(dec, spec.gamma)
        flags = tuple(dict.fromkeys(dec.flags + r.flags))
        return RateRow(tau, tau / ts, r.lambda1_modulus, r.gamma_rate, r.raw_rate, flags)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(point, grid))
    return [point(t) for t in grid]


def stationary_state(dec: SpectralDecomposition) -> np.ndarray:
    dim = dec.unit_eigenspace_dimension
    if dim != 1:
        raise DegenerateStationaryError(dim)
    rho = dec.right_modes[0]
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class ChainInvariantReport:
    has_invariant_chain_state: bool
    top_chain_eigenvalue_modulus: float
    unit_eigenspace_dimension_of_full_map: int

    @property
    def consistent(self) -> bool:
        """Invariant chain state exists iff the fixed point is degenerate."""
        return self.has_invariant_chain_state == (self.unit_eigenspace_dimension_of_full_map > 1)


def chain_superoperator(u: Propagator) -> np.ndarray:
    """Matrix of z -> Pc U z U^+ Pc on chain-supported z (N^2 x N^2)."""
    U = u.matrix if isinstance(u, Propagator) else np.asarray(u)
    ucc = U[1:, 1:]
    return np.kron(ucc, ucc.conj())


def chain_invariant_check(u: Propagator, tol: float = UNIT_TOL) -> ChainInvariantReport:
    top = float(np.max(np.abs(np.linalg.eigvals(chain_superoperator(u)))))
    full = np.linalg.eigvals(build_superoperator(u).matrix)
    return ChainInvariantReport(top >= 1 - tol, top, unit_eigenspace_dimension(full, tol))

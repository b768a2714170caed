"""Repeated nonselective measurement of the dot occupancy.

One cycle is unitary evolution over ``tau`` followed by the reduction
rho -> Pd rho Pd + Pc rho Pc, which zeroes the dot-chain coherences
<0|rho|l>, l >= 1, and leaves everything else untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from zenochain.model import ModelSpec, build_hamiltonian
from zenochain.propagator import Propagator, diagonalize, propagate

TRACE_TOL = 1e-10


class NoFrontError(RuntimeError):
    """Too few chain sites crossed the population threshold to fit a front."""


@dataclass
class TrajectoryRecord:
    step_index: int
    time: float
    survival: float
    diag_profile: np.ndarray
    offdiag_avg: float
    rho: Optional[np.ndarray] = None
    # False for samples taken between two measurements
    measured: bool = True


def initial_state(dim: int) -> np.ndarray:
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def measure_reduce(rho: np.ndarray) -> np.ndarray:
    out = np.array(rho, dtype=complex, copy=True)
    out[0, 1:] = 0.0
    out[1:, 0] = 0.0
    return out


def _check_dims(rho: np.ndarray, u: np.ndarray):
    if rho.shape != u.shape:
        raise ValueError(f"state shape {rho.shape} does not match propagator shape {u.shape}")


def step(rho: np.ndarray, u: Propagator) -> np.ndarray:
    """One measurement cycle, Hermitian-symmetrized."""
    U = u.matrix if isinstance(u, Propagator) else np.asarray(u)
    _check_dims(rho, U)
    out = measure_reduce(U @ rho @ U.conj().T)
    return 0.5 * (out + out.conj().T)


def block_step(p: float, chi: np.ndarray, u: Propagator) -> tuple[float, np.ndarray]:
    """Same cycle written for the block form rho = p Pd + chi (chi on the chain).

    ``chi`` is the N x N chain block. Used to cross-check :func:`step`.
    """
    U = u.matrix if isinstance(u, Propagator) else np.asarray(u)
    u0 = U[:, 0]  # U |0>
    uc = U[:, 1:]  # U restricted to chain inputs
    evolved_chi = uc @ chi @ uc.conj().T
    p_next = p * abs(u0[0]) ** 2 + evolved_chi[0, 0].real
    chi_next = p * np.outer(u0[1:], u0[1:].conj()) + evolved_chi[1:, 1:]
    return p_next, chi_next


def offdiag_average(rho: np.ndarray) -> float:
    """Mean |rho_ij| over the D(D-1) = N(N+1) off-diagonal entries."""
    D = rho.shape[0]
    a = np.abs(rho)
    return float((a.sum() - np.trace(a)) / (D * (D - 1)))


def _record(m: int, t: float, rho: np.ndarray, keep: bool, measured: bool = True) -> TrajectoryRecord:
    diag = rho.diagonal().real.copy()
    return TrajectoryRecord(
        step_index=m,
        time=t,
        survival=float(diag[0]),
        diag_profile=diag,
        offdiag_avg=offdiag_average(rho),
        rho=rho.copy() if keep else None,
        measured=measured,
    )


def evolve(
    spec: ModelSpec,
    tau: float,
    n_steps: int,
    snapshots: Iterable[int] = (),
    substeps: int = 1,
) -> list[TrajectoryRecord]:
    """Iterate the measurement map from rho_0 = |0><0|.

    Returns ``n_steps + 1`` records, one per measurement including the initial
    state. With ``substeps > 1`` each cycle additionally contributes
    ``substeps - 1`` unmeasured samples at equally spaced times inside the
    interval; the measurement does not change diagonals, so these give a
    time-resolved population profile. Full density matrices are kept only for
    the step indices in ``snapshots``.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    snaps = set(int(s) for s in snapshots)

    eig = diagonalize(build_hamiltonian(spec))
    u = propagate(eig, tau)
    partial = [propagate(eig, tau * j / substeps).matrix for j in range(1, substeps)]

    rho = initial_state(spec.dim)
    records = [_record(0, 0.0, rho, 0 in snaps)]
    for m in range(n_steps):
        for j, us in enumerate(partial, start=1):
            mid = us @ rho @ us.conj().T
            records.append(_record(m, (m + j / substeps) * tau, mid, False, measured=False))
        rho = step(rho, u)
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise FloatingPointError(f"trace drifted to {tr!r} at step {m + 1}")
        records.append(_record(m + 1, (m + 1) * tau, rho, (m + 1) in snaps))
    return records


def front_velocity(
    records: Sequence[TrajectoryRecord],
    threshold: float = 1e-3,
    window: Optional[tuple[int, int]] = None,
    min_sites: int = 5,
) -> float:
    """Speed of the population front travelling into the chain.

    For every site in ``window`` (default ``[5, N // 2]``) the first recorded
    time at which its population reaches ``threshold`` is located; the slope
    of site index against that time is the front velocity.
    """
    times = np.array([r.time for r in records])
    prof = np.array([r.diag_profile for r in records])
    n_chain = prof.shape[1] - 1
    lo, hi = window if window is not None else (5, n_chain // 2)

    sites, crossings = [], []
    for site in range(lo, hi + 1):
        hit = np.flatnonzero(prof[:, site] >= threshold)
        if hit.size:
            sites.append(site)
            crossings.append(times[hit[0]])
    if len(sites) < min_sites:
        raise NoFrontError(f"only {len(sites)} sites in [{lo}, {hi}] reached population {threshold}")
    if np.ptp(crossings) == 0:
        raise NoFrontError("all crossings at one recorded time; sample more finely")
    slope, _ = np.polyfit(crossings, sites, 1)
    return float(slope)

"""Command line front end: ``zenochain <command> --config run.json [--out DIR]``.

Config files are flat JSON objects. Recognised keys (energies in units of
gamma_c, times in units of 1/gamma_c):

    n_chain       int, number of chain sites N
    gamma         dot-chain coupling
    gamma_c       chain hopping, default 1
    epsilons      list of N on-site energies, or "random" for uniform[-0.5, 0.5]
    epsilon_seed  seed for "random" epsilons (falls back to ``seed``)
    seed          int, default 0
    tau           time between measurements
    tau_grid      {"start", "stop", "count", "spacing": "linear"|"log",
                   "scaled": bool}  (scaled: start/stop are tau / tau*)
    n_steps       number of measurements
    snapshots     step indices whose full density matrix is written
    substeps      samples per interval in trajectory.csv, default 1
    workers       threads for rate-scan, default 1
    output_dir    default "out"

Exit status: 0 success, 1 invalid configuration, 3 (check-stationary only)
stationary state not unique.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from zenochain import __version__
from zenochain.channel import evolve
from zenochain.model import ModelSpec, build_hamiltonian
from zenochain.propagator import diagonalize, propagate, tau_star
from zenochain.spectral import (
    build_superoperator,
    chain_invariant_check,
    decay_rate,
    decompose,
    rate_scan,
    stationary_state,
)
from zenochain.twolevel import TwoLevelParams, survival_closed_form

COMMANDS = ("evolve", "tomography", "spectrum", "rate-scan", "two-level", "check-stationary")
EXIT_INVALID = 1
EXIT_NOT_UNIQUE = 3
FORMAT_VERSION = 1


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    return format(float(x), ".17g")


@dataclass
class TauGrid:
    start: float
    stop: float
    count: int
    spacing: str = "linear"
    scaled: bool = False

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass
class RunConfig:
    command: str
    n_chain: int
    gamma: float = 1.0
    gamma_c: float = 1.0
    epsilons: Optional[list] = None
    epsilon_seed: Optional[int] = None
    seed: int = 0
    tau: Optional[float] = None
    tau_grid: Optional[TauGrid] = None
    n_steps: Optional[int] = None
    snapshots: list = field(default_factory=list)
    substeps: int = 1
    workers: int = 1
    output_dir: str = "out"

    @classmethod
    def from_dict(cls, raw: dict, command: Optional[str] = None) -> "RunConfig":
        raw = dict(raw)
        raw.pop("version", None)
        raw.pop("format", None)
        cmd = command or raw.get("command")
        raw["command"] = cmd
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "n_chain" not in raw:
            raise ConfigError("n_chain is required")
        grid = raw.get("tau_grid")
        if grid is not None:
            if not isinstance(grid, dict):
                raise ConfigError("tau_grid must be an object")
            try:
                raw["tau_grid"] = TauGrid(**grid)
            except TypeError as exc:
                raise ConfigError(f"bad tau_grid: {exc}") from None
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}, got {self.command!r}")
        if not isinstance(self.n_chain, int) or self.n_chain < 1:
            raise ConfigError(f"n_chain must be a positive integer, got {self.n_chain!r}")
        if self.gamma < 0 or self.gamma_c <= 0:
            raise ConfigError("need gamma >= 0 and gamma_c > 0")
        if isinstance(self.epsilons, str) and self.epsilons != "random":
            raise ConfigError('epsilons must be a list of numbers or "random"')
        if isinstance(self.epsilons, list) and len(self.epsilons) != self.n_chain:
            raise ConfigError(f"expected {self.n_chain} epsilons, got {len(self.epsilons)}")

        wants_grid = self.command == "rate-scan"
        if (self.tau is None) == (self.tau_grid is None):
            raise ConfigError("give exactly one of tau and tau_grid")
        if wants_grid and self.tau_grid is None:
            raise ConfigError("rate-scan needs tau_grid")
        if not wants_grid and self.tau is None:
            raise ConfigError(f"{self.command} needs tau")
        if self.tau is not None and self.tau <= 0:
            raise ConfigError(f"tau must be > 0, got {self.tau}")
        if self.tau_grid is not None:
            g = self.tau_grid
            if g.count < 1:
                raise ConfigError("tau_grid.count must be >= 1")
            if g.spacing not in ("linear", "log"):
                raise ConfigError("tau_grid.spacing must be linear or log")
            if g.start <= 0 or g.stop <= 0:
                raise ConfigError("tau_grid bounds must be > 0")

        if self.command in ("evolve", "tomography", "two-level"):
            if not isinstance(self.n_steps, int) or self.n_steps < 1:
                raise ConfigError(f"n_steps must be an integer >= 1, got {self.n_steps!r}")
            bad = [s for s in self.snapshots if not 0 <= s <= self.n_steps]
            if bad:
                raise ConfigError(f"snapshot steps outside 0..{self.n_steps}: {bad}")
        if self.command == "tomography" and not self.snapshots:
            raise ConfigError("tomography needs at least one snapshot step")
        if self.command == "two-level":
            if self.n_chain != 1:
                raise ConfigError("two-level requires n_chain = 1")
            if self.gamma <= 0:
                raise ConfigError("two-level requires gamma > 0")
        if self.substeps < 1 or self.workers < 1:
            raise ConfigError("substeps and workers must be >= 1")

    def model(self) -> ModelSpec:
        if self.epsilons == "random":
            seed = self.seed if self.epsilon_seed is None else self.epsilon_seed
            return ModelSpec.with_random_epsilons(self.n_chain, self.gamma, seed, self.gamma_c)
        return ModelSpec(self.n_chain, self.gamma, self.gamma_c, self.epsilons, self.epsilon_seed)

    def resolved(self) -> dict:
        """Config with epsilons made explicit; feeding it back reproduces the run."""
        spec = self.model()
        out = asdict(self)
        out.pop("output_dir")
        out["epsilons"] = list(spec.epsilons)
        out["epsilon_seed"] = spec.epsilon_seed
        out["version"] = __version__
        out["format"] = FORMAT_VERSION
        return out


class Outputs:
    """Tracks written files so a failed run leaves nothing half-done behind."""

    def __init__(self, directory: Path):
        self.dir = directory
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / name
        self.written.append(p)
        return p

    def csv(self, name: str, header: list, rows):
        with open(self.path(name), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)

    def json(self, name: str, obj: dict):
        with open(self.path(name), "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def cleanup(self):
        for p in self.written:
            p.unlink(missing_ok=True)


def write_trajectory(out: Outputs, cfg: RunConfig):
    spec = cfg.model()
    records = evolve(spec, cfg.tau, cfg.n_steps, snapshots=cfg.snapshots, substeps=cfg.substeps)
    header = ["step", "time", "survival", "offdiag_avg"] + [f"diag_{i}" for i in range(spec.dim)]
    out.csv(
        "trajectory.csv",
        header,
        ([r.step_index, fmt(r.time), fmt(r.survival), fmt(r.offdiag_avg)] + [fmt(x) for x in r.diag_profile] for r in records),
    )
    for r in records:
        if r.rho is not None:
            with open(out.path(f"rho_snapshot_{r.step_index}.csv"), "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                for row in r.rho:
                    w.writerow([fmt(x) for x in row.real] + [fmt(x) for x in row.imag])


def run_evolve(cfg: RunConfig, out: Outputs) -> int:
    write_trajectory(out, cfg)
    return 0


def run_spectrum(cfg: RunConfig, out: Outputs) -> int:
    spec = cfg.model()
    u = propagate(diagonalize(build_hamiltonian(spec)), cfg.tau)
    dec = decompose(build_superoperator(u))
    out.csv(
        "spectrum.csv",
        ["index", "real", "imag", "modulus"],
        ([n, fmt(l.real), fmt(l.imag), fmt(abs(l))] for n, l in enumerate(dec.eigenvalues)),
    )
    rate = decay_rate(dec, spec.gamma)
    out.json(
        "spectrum.json",
        {
            "condition_number": dec.condition_number,
            "biorthogonality_error": dec.biorthogonality_error,
            "unit_eigenspace_dimension": dec.unit_eigenspace_dimension,
            "lambda1_real": rate.lambda1.real,
            "lambda1_imag": rate.lambda1.imag,
            "lambda1_modulus": rate.lambda1_modulus,
            "raw_rate": _json_float(rate.raw_rate),
            "gamma_rate": _json_float(rate.gamma_rate),
            "flags": list(dict.fromkeys(dec.flags + rate.flags)),
        },
    )
    return 0


def _json_float(x: float):
    # JSON has no inf/nan
    return x if np.isfinite(x) else str(x)


def run_rate_scan(cfg: RunConfig, out: Outputs) -> int:
    spec = cfg.model()
    grid = cfg.tau_grid.values()
    if cfg.tau_grid.scaled:
        grid = grid * tau_star(diagonalize(build_hamiltonian(spec)))
    rows = rate_scan(spec, grid, workers=cfg.workers)
    out.csv(
        "rates.csv",
        ["tau", "tau_tilde", "lambda1_modulus", "gamma_rate", "raw_rate", "flags"],
        ([fmt(r.tau), fmt(r.tau_tilde), fmt(r.lambda1_modulus), fmt(r.gamma_rate), fmt(r.raw_rate), ";".join(r.flags)] for r in rows),
    )
    return 0


def run_two_level(cfg: RunConfig, out: Outputs) -> int:
    spec = cfg.model()
    params = TwoLevelParams(spec.gamma, spec.epsilons[0], cfg.tau)
    records = evolve(spec, cfg.tau, cfg.n_steps)
    rows = []
    for r in records:
        closed = survival_closed_form(params, r.step_index)
        rows.append([r.step_index, fmt(r.time), fmt(closed), fmt(r.survival), fmt(abs(closed - r.survival))])
    out.csv("two_level.csv", ["step", "time", "closed_form", "pipeline", "abs_diff"], rows)
    return 0


def run_check_stationary(cfg: RunConfig, out: Outputs) -> int:
    spec = cfg.model()
    u = propagate(diagonalize(build_hamiltonian(spec)), cfg.tau)
    report = chain_invariant_check(u)
    unique = report.unit_eigenspace_dimension_of_full_map == 1
    deviation = None
    if unique:
        rho = stationary_state(decompose(build_superoperator(u)))
        deviation = float(np.max(np.abs(rho - np.eye(spec.dim) / spec.dim)))
    out.json(
        "stationarity.json",
        {
            "has_invariant_chain_state": report.has_invariant_chain_state,
            "top_chain_eigenvalue_modulus": report.top_chain_eigenvalue_modulus,
            "unit_eigenspace_dimension_of_full_map": report.unit_eigenspace_dimension_of_full_map,
            "unique": unique,
            "max_deviation_from_uniform": deviation,
        },
    )
    return 0 if unique else EXIT_NOT_UNIQUE


RUNNERS = {
    "evolve": run_evolve,
    "tomography": run_evolve,
    "spectrum": run_spectrum,
    "rate-scan": run_rate_scan,
    "two-level": run_two_level,
    "check-stationary": run_check_stationary,
}


def load_config(path: str, command: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        return RunConfig.from_dict(raw, command)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="zenochain", description="Dot-chain lattice under repeated dot-occupancy measurements.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="output directory (overrides output_dir)")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.command)
    except ConfigError as exc:
        print(f"zenochain: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Outputs(Path(args.out or cfg.output_dir))
    try:
        status = RUNNERS[cfg.command](cfg, out)
        out.json("meta.json", cfg.resolved())
    except Exception as exc:
        out.cleanup()
        print(f"zenochain: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return status


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: frequencies, orbit and field exports, fidelity and
the verification battery.

Usage::

    penning-ict frequencies --config trap.json
    penning-ict classical --t0 0 --t1 50 --samples 2001 --traj 1,0,0.5,0,0.5,0.3 --out orbit.csv
    penning-ict eigenstate --n 1 --l 2 --nz 0 --t 0.5 --out psi.csv
    penning-ict ict --n 0 --l 1 --nz 0 --traj 1,0,0,0,1,0 --t 2.0 --out ict.csv
    penning-ict superposition --traj 0,0,0,1.4,0,0.7 --summary
    penning-ict fidelity --traj 1,0,0,0,0,0 --traj2 0,0,0,0,1,0
    penning-ict verify all --out report.json

Exit codes: 0 on success, 1 when a verification check fails, 2 on bad
configuration (including an untrapped one).

A config file is either JSON or ``key = value`` lines.  Trap keys
(``mass``/``m``, ``charge``/``e``, ``B``, ``D``, ``hbar``) may sit at the top
level or under a ``trap`` section; the other recognised keys mirror the
command-line flags (``traj``, ``traj2``, ``n``, ``l``, ``nz``, ``t``, ``t0``,
``t1``, ``samples``, ``grid_points``, ``sigma_multiple``, ``tolerance_scale``,
``seed``).  Flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .classical import Trajectory, hamiltonian_value, write_trajectory_csv
from .ict import IctState
from .numverify import DEFAULT_POINTS, DEFAULT_SIGMA_MULTIPLE, auto_grid, sample, write_field_csv
from .specialfn import QuantumNumbers
from .stationary import StationaryState
from .superfid import (
    SpecialTrajectoryParams,
    SuperpositionState,
    centroid_prefactor_closed_form,
    fidelity_analytic,
    fidelity_numeric,
    measure_centroid_prefactor,
    superposition_central_moments,
    superposition_moments_closed_form,
    trajectory_distance,
)
from .trapcore import (
    PhaseSpacePoint,
    TrapParameters,
    UntrappedConfigurationError,
    characteristic_lengths,
    check_stability,
    derive_frequencies,
)
from .verify import SUITES, VerifySettings, run_suite

__all__ = ["ConfigError", "RunConfig", "load_config", "build_parser", "main"]

DEFAULT_TRAP = {"mass": 1.0, "charge": 1.0, "B": 2.0, "D": 0.5, "hbar": 1.0}
DEFAULT_TRAJ = (1.0, 0.0, 0.5, 0.0, 0.5, 0.3)
TRAP_ALIASES = {"m": "mass", "e": "charge", "q": "charge"}
RUN_KEYS = {
    "traj": "traj", "traj2": "traj2", "n": "n", "l": "l", "nz": "nz", "t": "t", "t0": "t0", "t1": "t1",
    "samples": "samples", "grid_points": "grid_points", "sigma_multiple": "sigma_multiple",
    "tolerance_scale": "tolerance_scale", "seed": "seed",
}

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    """Unreadable or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    trap: TrapParameters
    traj: tuple = DEFAULT_TRAJ
    traj2: tuple = (0.0,) * 6
    n: int = 0
    l: int = 0  # noqa: E741
    nz: int = 0
    t: float = 0.0
    t0: float = 0.0
    t1: float = 50.0
    samples: int = 1001
    grid_points: int = DEFAULT_POINTS
    sigma_multiple: float = DEFAULT_SIGMA_MULTIPLE
    tolerance_scale: float = 1.0
    seed: int = VerifySettings.seed

    def to_dict(self) -> dict:
        out = asdict(self)
        out["trap"] = self.trap.to_dict()
        out["traj"] = list(self.traj)
        out["traj2"] = list(self.traj2)
        return out


# --------------------------------------------------------------------- config


def _parse_vector(text, name: str) -> tuple:
    if isinstance(text, str):
        parts = [p for p in text.replace(" ", "").split(",") if p]
    else:
        parts = list(text)
    try:
        values = tuple(float(v) for v in parts)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: expected six comma-separated numbers, got {text!r}") from exc
    if len(values) != 6 or not all(np.isfinite(values)):
        raise ConfigError(f"{name}: expected six finite numbers x0,y0,z0,px0,py0,pz0, got {text!r}")
    return values


def _read_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return data
    data = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        data[key] = value
    return data


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Resolve defaults, then the config file, then ``overrides`` (flag values)."""
    raw = _read_config_file(path) if path else {}
    trap = dict(DEFAULT_TRAP)
    section = raw.pop("trap", {})
    if not isinstance(section, dict):
        raise ConfigError("'trap' section must be a mapping")
    run = {}
    for source in (raw, section):
        for key, value in source.items():
            name = TRAP_ALIASES.get(key, key)
            if name in DEFAULT_TRAP:
                trap[name] = value
            elif source is raw and key in RUN_KEYS:
                run[RUN_KEYS[key]] = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
    run.update({k: v for k, v in (overrides or {}).items() if v is not None})

    try:
        params = TrapParameters.from_mapping(trap)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid trap parameters: {exc}") from exc

    cast = {"n": int, "l": int, "nz": int, "samples": int, "grid_points": int, "seed": int,
            "t": float, "t0": float, "t1": float, "sigma_multiple": float, "tolerance_scale": float}
    resolved = {}
    for key, value in run.items():
        if key in ("traj", "traj2"):
            resolved[key] = _parse_vector(value, key)
            continue
        try:
            resolved[key] = cast[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: cannot interpret {value!r}") from exc
    config = RunConfig(trap=params, **resolved)
    if config.grid_points < 16:
        raise ConfigError("grid_points must be at least 16")
    if not config.sigma_multiple > 0 or not config.tolerance_scale > 0:
        raise ConfigError("sigma_multiple and tolerance_scale must be positive")
    return config


# ------------------------------------------------------------------- commands


def _emit_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _trajectory(values, params: TrapParameters) -> Trajectory:
    return Trajectory(PhaseSpacePoint(*values), params)


def cmd_frequencies(config: RunConfig, args) -> int:
    ok, message = check_stability(config.trap)
    if not ok:
        print(f"error: untrapped configuration: {message}", file=sys.stderr)
        return EXIT_CONFIG
    f = derive_frequencies(config.trap)
    a_perp, a_z = characteristic_lengths(config.trap, f)
    report = {
        "config": config.to_dict(),
        "omega_c": f.omega_c,
        "omega_perp": f.omega_perp,
        "omega_z": f.omega_z,
        "a_perp": a_perp,
        "a_z": a_z,
        "stable": ok,
        "verdict": message,
    }
    _emit_text(_json(report), args.out)
    return EXIT_OK


def cmd_classical(config: RunConfig, args) -> int:
    if not config.t1 > config.t0:
        raise ConfigError(f"need t1 > t0, got t0={config.t0}, t1={config.t1}")
    if config.samples < 2:
        raise ConfigError(f"need at least 2 samples, got {config.samples}")
    traj = _trajectory(config.traj, config.trap)
    times = np.linspace(config.t0, config.t1, config.samples)
    states = traj.phase_space(times)
    energies = hamiltonian_value(states, config.trap, traj.frequencies) if args.with_energy else None
    if args.out:
        write_trajectory_csv(args.out, times, states, energies)
    else:
        write_trajectory_csv(sys.stdout, times, states, energies)
    return EXIT_OK


def _export_field(state, config: RunConfig, args) -> int:
    grid = auto_grid(state, config.t, config.sigma_multiple, config.grid_points)
    field_ = sample(state, grid, config.t)
    write_field_csv(args.out if args.out else sys.stdout, field_)
    return EXIT_OK


def _stationary(config: RunConfig) -> StationaryState:
    try:
        qn = QuantumNumbers(config.n, config.l, config.nz)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid quantum numbers: {exc}") from exc
    return StationaryState(qn, config.trap)


def cmd_eigenstate(config: RunConfig, args) -> int:
    return _export_field(_stationary(config), config, args)


def cmd_ict(config: RunConfig, args) -> int:
    state = IctState(_stationary(config), _trajectory(config.traj, config.trap))
    return _export_field(state, config, args)


def _superposition_summary(state: SuperpositionState, config: RunConfig) -> dict:
    x0, y0, z0, px0, py0, pz0 = config.traj
    if any((x0, y0, z0, py0)):
        raise ConfigError("--summary needs an orbit started at the origin with momentum (p, 0, q)")
    stp = SpecialTrajectoryParams.from_kicks(px0, pz0, config.trap)
    times = np.linspace(config.t0, config.t1, config.samples)
    ratios = measure_centroid_prefactor(state, stp, times)
    finite = ratios[np.isfinite(ratios)]
    rows = []
    for t in times:
        grid = auto_grid(state, t, config.sigma_multiple, config.grid_points)
        numeric = superposition_central_moments(state, t, grid)
        closed = superposition_moments_closed_form(config.trap, stp, t)
        rows.append({"t": float(t), "quadrature": numeric.tolist(), "closed_form": closed.tolist()})
    return {
        "config": config.to_dict(),
        "lambda_perp": stp.lambda_perp,
        "lambda_z": stp.lambda_z,
        "C_measured": float(np.mean(finite)) if finite.size else None,
        "C_spread": float((finite.max() - finite.min()) / abs(np.mean(finite))) if finite.size else None,
        "C_closed_form": centroid_prefactor_closed_form(config.trap, stp),
        "moment_table": rows,
    }


def cmd_superposition(config: RunConfig, args) -> int:
    state = SuperpositionState.from_trajectory(_trajectory(config.traj, config.trap))
    if args.summary:
        _emit_text(_json(_superposition_summary(state, config)), args.out)
        return EXIT_OK
    return _export_field(state, config, args)


def cmd_fidelity(config: RunConfig, args) -> int:
    tr1 = _trajectory(config.traj, config.trap)
    tr2 = _trajectory(config.traj2, config.trap)
    f = tr1.frequencies
    report = {
        "config": config.to_dict(),
        "fidelity": fidelity_analytic(tr1, tr2, config.t, config.trap, f),
        "fidelity_quadrature": fidelity_numeric(tr1, tr2, config.t, sigma_multiple=config.sigma_multiple,
                                                points=config.grid_points),
        "distance": trajectory_distance(tr1, tr2, config.trap, f),
    }
    _emit_text(_json(report), args.out)
    return EXIT_OK


def cmd_verify(config: RunConfig, args) -> int:
    settings = VerifySettings(seed=config.seed, grid_points=config.grid_points,
                              sigma_multiple=config.sigma_multiple, tolerance_scale=config.tolerance_scale)
    checks = run_suite(config.trap, args.suite, settings)
    passed = all(c["pass"] for c in checks)
    report = {"config": config.to_dict(), "suite": args.suite, "all_pass": passed, "checks": checks}
    _emit_text(_json(report), args.out)
    return EXIT_OK if passed else EXIT_FAILED


# --------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or key=value config file")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--grid-points", type=int, dest="grid_points", help="minimum grid points per axis")
    common.add_argument("--sigma-multiple", type=float, dest="sigma_multiple", help="box half-width in state widths")
    common.add_argument("--tolerance-scale", type=float, dest="tolerance_scale", help="multiply every tolerance")

    def traj_flags(p, second=False):
        p.add_argument("--traj", help="initial state x0,y0,z0,px0,py0,pz0")
        if second:
            p.add_argument("--traj2", help="second initial state x0,y0,z0,px0,py0,pz0")

    def qn_flags(p):
        p.add_argument("--n", type=int)
        p.add_argument("--l", type=int)
        p.add_argument("--nz", type=int)

    def range_flags(p):
        p.add_argument("--t0", type=float)
        p.add_argument("--t1", type=float)
        p.add_argument("--samples", type=int)

    parser = argparse.ArgumentParser(prog="penning-ict", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("frequencies", parents=[common], help="derived frequencies and stability")

    p = sub.add_parser("classical", parents=[common], help="closed-form orbit as CSV")
    traj_flags(p)
    range_flags(p)
    p.add_argument("--with-energy", action="store_true", help="append the energy column")

    p = sub.add_parser("eigenstate", parents=[common], help="stationary state on a grid, CSV")
    qn_flags(p)
    p.add_argument("--t", type=float)

    p = sub.add_parser("ict", parents=[common], help="stationary state carried along an orbit, CSV")
    qn_flags(p)
    traj_flags(p)
    p.add_argument("--t", type=float)

    p = sub.add_parser("superposition", parents=[common], help="two-branch superposition, CSV or JSON summary")
    traj_flags(p)
    p.add_argument("--t", type=float)
    range_flags(p)
    p.add_argument("--summary", action="store_true", help="centroid prefactor and moment table as JSON")

    p = sub.add_parser("fidelity", parents=[common], help="fidelity and distance of two orbits, JSON")
    traj_flags(p, second=True)
    p.add_argument("--t", type=float)

    p = sub.add_parser("verify", parents=[common], help="run the verification battery, JSON report")
    p.add_argument("suite", nargs="?", default="all", choices=("all",) + SUITES)
    p.add_argument("--seed", type=int)
    return parser


COMMANDS = {
    "frequencies": cmd_frequencies,
    "classical": cmd_classical,
    "eigenstate": cmd_eigenstate,
    "ict": cmd_ict,
    "superposition": cmd_superposition,
    "fidelity": cmd_fidelity,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k, None) for k in RUN_KEYS}
    try:
        config = load_config(args.config, overrides)
        if args.command != "frequencies":
            derive_frequencies(config.trap)
        return COMMANDS[args.command](config, args)
    except (ConfigError, UntrappedConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

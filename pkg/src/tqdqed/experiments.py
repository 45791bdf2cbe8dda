"""Configuration, sweeps and file output behind the command-line tool.

Configs are nested mappings (YAML on disk). Frequencies in configs and in
output files are ordinary frequencies in Hz; they are converted to rad/s on
the way in.
"""

from __future__ import annotations

import copy
import hashlib
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np
import yaml

from . import __version__
from .coupling import CircuitGeometry, HybridSystem, effective_coupling, vacuum_rabi_g0
from .gates import GateRun, run_holonomic_protocol, run_iswap_protocol
from .lindblad import DecoherenceRates
from .tqd import (
    TqdParams,
    eigensystem_analytic,
    eigenstate_populations,
    omega_ge_exact,
    quadrupolar_slope,
    dipolar_slope,
    sweet_spot_derivatives,
)

TWO_PI = 2.0 * math.pi
COMMANDS = ("spectrum", "population", "coupling", "sweetspot", "gate-iswap", "gate-holonomic")


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


BASE_DEFAULTS: dict[str, Any] = {
    "tqd": {"t_p": 2.0e9, "eps_q": 20.0e9, "eps_d": 0.0, "t_m": 0.0, "d_eps_d": 0.0, "d_eps_q": 0.0},
    "geometry": {"omega_r": 1.7e9, "z0": 1000.0, "chi0": 0.28, "w": 50e-9, "s": 100e-9, "theta": 0.0},
    "system": {
        "g": 66e6,
        "omega_r": 1.7e9,
        "n_max_dispersive": 2,
        "n_max_holonomic": 3,
        "ladder": "unit",
        "rwa_dispersive": True,
        "rwa_holonomic": False,
        "pulse_shape": "square",
    },
    "rates": {
        "gamma_phi": 2.7e6,
        "gamma_ge": 0.0,
        "gamma_a_r": 0.028e6,
        "gamma_a_tr": 4.0e3,
        "gamma_phi_tr": 0.8e6,
    },
    "integrator": {"tol": 1e-9, "samples": 2000},
    "noise": {"sigma_eps_d": 0.0, "sigma_eps_q": 0.0, "samples": 0},
    "convergence": {"enabled": True, "threshold": 1e-4},
    "seed": 0,
    "workers": 1,
}

SWEEP_DEFAULTS: dict[str, dict[str, Any]] = {
    "spectrum": {"name": "eps_q_over_t_p", "start": 0.0, "stop": 20.0, "num": 201},
    "population": {"name": "eps_q_over_t_p", "start": 0.0, "stop": 20.0, "num": 201},
    "coupling": {"name": "omega_r", "start": 1.5e9, "stop": 6.5e9, "num": 11},
    "sweetspot": {
        "name": "eps_q_over_t_p",
        "start": 5.0,
        "stop": 100.0,
        "num": 20,
        "eps_d_over_t_p": [-0.2, -0.1, 0.0, 0.1, 0.2],
    },
    "gate-iswap": {"name": "delta_over_g", "grid": [2.0, 4.0, 6.0, 8.0, 10.0]},
    "gate-holonomic": {"name": "alpha_over_g", "start": 0.0, "stop": 12.0, "num": 13},
}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def default_config(command: str) -> dict:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    cfg = copy.deepcopy(BASE_DEFAULTS)
    cfg["scenario"] = command
    cfg["sweep"] = copy.deepcopy(SWEEP_DEFAULTS[command])
    return cfg


def apply_override(cfg: dict, assignment: str) -> dict:
    """Apply ``a.b.c=value``; the value is parsed as YAML (numbers, lists, bools)."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    key, raw = assignment.split("=", 1)
    path = key.strip().split(".")
    value = yaml.safe_load(raw)
    out = copy.deepcopy(cfg)
    node = out
    for part in path[:-1]:
        nxt = node.setdefault(part, {})
        if not isinstance(nxt, dict):
            raise ConfigError(f"cannot set {key}: {part} is not a section")
        node = nxt
    node[path[-1]] = value
    return out


def build_config(command: str, user: dict | None = None, overrides=(), seed: int | None = None) -> dict:
    cfg = default_config(command)
    if user:
        if not isinstance(user, dict):
            raise ConfigError("config file must hold a mapping")
        cfg = _merge(cfg, user)
    for item in overrides:
        cfg = apply_override(cfg, item)
    if seed is not None:
        cfg["seed"] = int(seed)
    cfg["scenario"] = command
    sweep_grid(cfg)
    return cfg


def load_config_file(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    return data or {}


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o).__name__}")


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()


def sweep_grid(cfg: dict) -> np.ndarray:
    sw = cfg.get("sweep", {})
    if "grid" in sw and sw["grid"] is not None:
        grid = np.asarray(sw["grid"], dtype=float)
    else:
        try:
            grid = np.linspace(float(sw["start"]), float(sw["stop"]), int(sw["num"]))
        except KeyError as exc:
            raise ConfigError(f"sweep needs either 'grid' or start/stop/num (missing {exc})") from None
    if grid.ndim != 1 or grid.size == 0:
        raise ConfigError("sweep grid must be a non-empty list")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ConfigError("sweep grid must be strictly increasing")
    return grid


# ---------------------------------------------------------------- output


def fmt(x: float) -> str:
    return f"{float(x):.11e}"


def render_csv(command: str, cfg: dict, columns: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# tqdqed {__version__}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# config_hash: {config_hash(cfg)}\n")
    buf.write(f"# config: {canonical_json(cfg)}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def render_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


# ---------------------------------------------------------------- builders


def tqd_params(cfg: dict) -> TqdParams:
    t = cfg["tqd"]
    return TqdParams.from_tp_tm(
        TWO_PI * float(t["t_p"]),
        TWO_PI * float(t["t_m"]),
        eps_d_mean=TWO_PI * float(t["eps_d"]),
        eps_q_mean=TWO_PI * float(t["eps_q"]),
        d_eps_d=TWO_PI * float(t["d_eps_d"]),
        d_eps_q=TWO_PI * float(t["d_eps_q"]),
    )


def geometry(cfg: dict, omega_r_hz: float | None = None) -> CircuitGeometry:
    g = cfg["geometry"]
    return CircuitGeometry(
        omega_r=TWO_PI * float(omega_r_hz if omega_r_hz is not None else g["omega_r"]),
        z0=float(g["z0"]),
        chi0=float(g["chi0"]),
        w=float(g["w"]),
        s=float(g["s"]),
    )


def resonator_rates(cfg: dict) -> DecoherenceRates:
    r = cfg["rates"]
    return DecoherenceRates(
        gamma_phi=(TWO_PI * float(r["gamma_phi"]),) * 2,
        gamma_ge=(TWO_PI * float(r["gamma_ge"]),) * 2,
        gamma_a=TWO_PI * float(r["gamma_a_r"]),
    )


def transmon_rates(cfg: dict) -> DecoherenceRates:
    r = cfg["rates"]
    return DecoherenceRates(
        gamma_phi=(TWO_PI * float(r["gamma_phi"]),) * 2,
        gamma_ge=(TWO_PI * float(r["gamma_ge"]),) * 2,
        gamma_a=TWO_PI * float(r["gamma_a_tr"]),
        gamma_phi_tr=TWO_PI * float(r["gamma_phi_tr"]),
    )


# ---------------------------------------------------------------- TQD sweeps


def _eps_q_values(cfg: dict, grid: np.ndarray) -> np.ndarray:
    name = cfg["sweep"]["name"]
    t_p = float(cfg["tqd"]["t_p"])
    if name == "eps_q_over_t_p":
        return grid * t_p
    if name == "eps_q":
        return grid
    raise ConfigError(f"unsupported sweep variable {name!r} for this command")


def cmd_spectrum(cfg: dict) -> dict[str, str]:
    grid = sweep_grid(cfg)
    eps_q = _eps_q_values(cfg, grid)
    t_p = TWO_PI * float(cfg["tqd"]["t_p"])
    table = eigenstate_populations(TWO_PI * eps_q, t_p)
    rows = []
    for i, eq in enumerate(eps_q):
        an = eigensystem_analytic(t_p, TWO_PI * eq)
        rows.append([
            eq,
            table["E_g"][i] / TWO_PI,
            table["E_e"][i] / TWO_PI,
            table["E_f"][i] / TWO_PI,
            an.E_g / TWO_PI,
            an.E_e / TWO_PI,
            an.E_f / TWO_PI,
        ])
    cols = ["eps_q", "E_g", "E_e", "E_f", "E_g_analytic", "E_e_analytic", "E_f_analytic"]
    return {"spectrum.csv": render_csv("spectrum", cfg, cols, rows)}


def cmd_population(cfg: dict) -> dict[str, str]:
    grid = sweep_grid(cfg)
    eps_q = _eps_q_values(cfg, grid)
    t_p = TWO_PI * float(cfg["tqd"]["t_p"])
    table = eigenstate_populations(TWO_PI * eps_q, t_p)
    cols = ["eps_q"] + [f"pop_{b}_{lvl}" for lvl in "gef" for b in "ECL"]
    rows = [[eps_q[i]] + [table[c][i] for c in cols[1:]] for i in range(eps_q.size)]
    return {"population.csv": render_csv("population", cfg, cols, rows)}


def cmd_coupling(cfg: dict) -> dict[str, str]:
    grid = sweep_grid(cfg)
    if cfg["sweep"]["name"] != "omega_r":
        raise ConfigError("coupling sweeps over omega_r")
    theta = float(cfg["geometry"].get("theta", 0.0))
    points = []
    for w in grid:
        g0 = vacuum_rabi_g0(geometry(cfg, w))
        points.append({
            "omega_r": float(w),
            "g0": g0 / TWO_PI,
            "g": effective_coupling(g0, theta) / TWO_PI,
        })
    ratios = [p["g0"] / p["omega_r"] for p in points]
    record = {
        "tool": f"tqdqed {__version__}",
        "command": "coupling",
        "config_hash": config_hash(cfg),
        "theta": theta,
        "points": points,
        "g0_over_omega_r": ratios[0],
        "g0_range": [min(p["g0"] for p in points), max(p["g0"] for p in points)],
    }
    return {"coupling.json": render_json(record)}


def cmd_sweetspot(cfg: dict) -> dict[str, str]:
    grid = sweep_grid(cfg)
    eps_q = _eps_q_values(cfg, grid)
    t = cfg["tqd"]
    t_p, t_m = float(t["t_p"]), float(t["t_m"])
    eps_d_rel = cfg["sweep"].get("eps_d_over_t_p", [0.0])
    rows = []
    for ed in eps_d_rel:
        for eq in eps_q:
            p = TqdParams.from_tp_tm(TWO_PI * t_p, TWO_PI * t_m, eps_d_mean=TWO_PI * ed * t_p, eps_q_mean=TWO_PI * eq)
            dd, dq = sweet_spot_derivatives(p)
            rows.append([
                ed * t_p,
                eq,
                omega_ge_exact(p) / TWO_PI,
                dd,
                dq,
                dipolar_slope(t_p, t_m, eq),
                quadrupolar_slope(t_p, t_m, eq),
            ])
    cols = ["eps_d", "eps_q", "omega_ge", "d_omega_d_eps_d", "d_omega_d_eps_q", "dipolar_slope_expansion", "quadrupolar_slope_expansion"]
    return {"sweetspot.csv": render_csv("sweetspot", cfg, cols, rows)}


# ---------------------------------------------------------------- gate sweeps


@dataclass
class ResultRecord:
    """Outcome of one gate sweep point."""

    command: str
    config_hash: str
    parameters: dict
    fidelity: float
    gate_time: float
    trace_drift: float
    min_eigenvalue: float
    convergence: dict = field(default_factory=dict)
    noise: dict = field(default_factory=dict)


def _iswap_system(cfg: dict, x: float, n_extra: int = 0) -> HybridSystem:
    s = cfg["system"]
    return HybridSystem.dispersive(
        TWO_PI * float(s["g"]),
        float(x),
        TWO_PI * float(s["omega_r"]),
        n_max=int(s["n_max_dispersive"]) + n_extra,
    )


def _holonomic_system(cfg: dict, x: float, n_extra: int = 0) -> HybridSystem:
    s = cfg["system"]
    g = TWO_PI * float(s["g"])
    return HybridSystem.resonant(
        g, g, TWO_PI * float(s["omega_r"]), float(x) * g,
        n_max=int(s["n_max_holonomic"]) + n_extra, ladder=str(s["ladder"]),
    )


def _run_one(kind: str, cfg: dict, x: float, n_extra: int, tol: float, offsets=None) -> GateRun:
    samples = int(cfg["integrator"]["samples"])
    s = cfg["system"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if kind == "gate-iswap":
            return run_iswap_protocol(
                _iswap_system(cfg, x, n_extra), resonator_rates(cfg),
                rwa=bool(s["rwa_dispersive"]), tol=tol, samples=samples, qubit_offsets=offsets,
            )
        return run_holonomic_protocol(
            _holonomic_system(cfg, x, n_extra), transmon_rates(cfg),
            rwa=bool(s["rwa_holonomic"]), tol=tol, samples=samples,
            pulse_shape=str(s["pulse_shape"]), qubit_offsets=offsets,
        )


def _noise_offsets(cfg: dict, n_points: int) -> list[list[tuple[float, float]]]:
    """Quasi-static qubit-frequency offsets, drawn once per sweep point from the seed."""
    nz = cfg["noise"]
    n = int(nz.get("samples", 0))
    if n <= 0:
        return [[] for _ in range(n_points)]
    rng = np.random.default_rng(int(cfg["seed"]))
    base = tqd_params(cfg)
    w0 = omega_ge_exact(base)
    sd, sq = TWO_PI * float(nz["sigma_eps_d"]), TWO_PI * float(nz["sigma_eps_q"])
    out = []
    for _ in range(n_points):
        draws = rng.normal(size=(n, 2, 2))
        offs = []
        for k in range(n):
            shift = []
            for q in range(2):
                p = base.replace(d_eps_d=sd * draws[k, q, 0], d_eps_q=sq * draws[k, q, 1])
                shift.append(omega_ge_exact(p) - w0)
            offs.append((shift[0], shift[1]))
        out.append(offs)
    return out


def _gate_point(args) -> tuple[ResultRecord, str]:
    kind, cfg, x, offsets = args
    tol = float(cfg["integrator"]["tol"])
    run = _run_one(kind, cfg, x, 0, tol)
    traj = run.trajectory
    noise = {}
    fidelity = run.fidelity
    if offsets:
        fids = [_run_one(kind, cfg, x, 0, tol, off).fidelity for off in offsets]
        noise = {"samples": len(fids), "fidelity_mean": float(np.mean(fids)), "fidelity_std": float(np.std(fids))}
        fidelity = noise["fidelity_mean"]
    conv = {}
    if cfg["convergence"]["enabled"]:
        f_n = _run_one(kind, cfg, x, 1, tol).fidelity
        f_t = _run_one(kind, cfg, x, 0, tol / 10.0).fidelity
        d_n, d_t = abs(f_n - run.fidelity), abs(f_t - run.fidelity)
        conv = {
            "delta_n_max": d_n,
            "delta_tol": d_t,
            "converged": bool(max(d_n, d_t) < float(cfg["convergence"]["threshold"])),
        }
    name = cfg["sweep"]["name"]
    record = ResultRecord(
        command=kind,
        config_hash=config_hash(cfg),
        parameters={name: float(x)},
        fidelity=float(fidelity),
        gate_time=float(run.spec.duration),
        trace_drift=traj.diagnostics.trace_drift,
        min_eigenvalue=traj.diagnostics.min_eigenvalue,
        convergence=conv,
        noise=noise,
    )
    cols = ["t"] + [f"pop_{lab}" for lab in traj.labels] + ["fidelity"]
    rows = np.column_stack([traj.times] + [traj.populations[lab] for lab in traj.labels] + [run.frame_fidelity])
    csv = render_csv(kind, cfg, cols, rows)
    return record, csv


def _gate_sweep(kind: str, cfg: dict, expected_sweep: str) -> dict[str, str]:
    grid = sweep_grid(cfg)
    if cfg["sweep"]["name"] != expected_sweep:
        raise ConfigError(f"{kind} sweeps over {expected_sweep}")
    offsets = _noise_offsets(cfg, grid.size)
    jobs = [(kind, cfg, float(x), offsets[i]) for i, x in enumerate(grid)]
    workers = int(cfg.get("workers", 1))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_gate_point, jobs))
    else:
        results = [_gate_point(j) for j in jobs]

    files = {}
    summary_rows = []
    records = []
    for i, (rec, csv) in enumerate(results):
        files[f"{kind}_trajectory_{i:03d}.csv"] = csv
        records.append(asdict(rec))
        conv = rec.convergence
        summary_rows.append([
            grid[i],
            rec.gate_time,
            rec.fidelity,
            conv.get("delta_n_max", float("nan")),
            conv.get("delta_tol", float("nan")),
            rec.trace_drift,
            rec.min_eigenvalue,
        ])
    cols = [expected_sweep, "gate_time", "fidelity", "delta_n_max", "delta_tol", "trace_drift", "min_eigenvalue"]
    files[f"{kind}_summary.csv"] = render_csv(kind, cfg, cols, summary_rows)
    files[f"{kind}_records.json"] = render_json({
        "tool": f"tqdqed {__version__}",
        "command": kind,
        "config_hash": config_hash(cfg),
        "config": cfg,
        "records": records,
    })
    return files


def cmd_gate_iswap(cfg: dict) -> dict[str, str]:
    return _gate_sweep("gate-iswap", cfg, "delta_over_g")


def cmd_gate_holonomic(cfg: dict) -> dict[str, str]:
    return _gate_sweep("gate-holonomic", cfg, "alpha_over_g")


HANDLERS: dict[str, Callable[[dict], dict[str, str]]] = {
    "spectrum": cmd_spectrum,
    "population": cmd_population,
    "coupling": cmd_coupling,
    "sweetspot": cmd_sweetspot,
    "gate-iswap": cmd_gate_iswap,
    "gate-holonomic": cmd_gate_holonomic,
}


def run_command(command: str, cfg: dict) -> dict[str, str]:
    return HANDLERS[command](cfg)

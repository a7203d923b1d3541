"""Experiment runner: declarative configs in, deterministic artifacts out.

Configs are INI-style sections of key = value lines with flat types only
(numbers, strings, comma-separated number lists). Every run writes a
summary.json (schema_version 1), CSV data files with a fixed header, and
two-column plot-data files for fitted laws; all of them are byte-identical
across reruns and worker-thread counts. Wall-clock metadata lives apart in
run_meta.json, which carries the only timestamp.

Exit codes: 0 success, 2 config error, 3 numerical-contract violation,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import experiments, holonomy, noise, paths, propagator

SUBCOMMANDS = ("gate", "holonomy", "noise-mc", "scaling", "timing", "convergence")
SCHEMA_VERSION = 1

_DEFAULT_CONVERGENCE_GRID = (0.2, 0.1, 0.05, 0.025, 0.0125)
_DEFAULT_T0_GRID = (100.0, 200.0, 400.0, 800.0)
#: Default pass tolerances per subcommand (see emit_report).
_DEFAULT_TOLERANCE = {"scaling": 0.15, "timing": 0.2, "convergence": 0.8}


class ConfigError(Exception):
    """Invalid run configuration; the message names the key and line."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    family: str
    theta0: float | None = None
    r0: float = 1.0
    dphi: float | None = None
    delta: float = 1e-3
    f_theta: paths.Harmonics | None = None
    f_phi: paths.Harmonics | None = None
    f_r: paths.Harmonics | None = None
    epsilon: float = 0.05
    steps_per_unit_time: int = 20
    frame: str = "lab"
    sigma: tuple[float, float, float] = (0.0, 0.0, 0.0)
    tau: tuple[float, float, float] = (1.0, 1.0, 1.0)
    pinning: str = "endpoint-ramp"
    n: int = 1000
    mode: str = "first_order"
    p: float = 0.5
    q: float = 0.5
    tau0: float = 1.0
    sigma0: float = 1.0
    epsilon_grid: tuple[float, ...] | None = None
    delta_t: float = 1.0
    t0_grid: tuple[float, ...] = _DEFAULT_T0_GRID
    tolerance: float | None = None
    seed: int = 0
    out_dir: str = "out"


def _parse_ini(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in sections[current]:
            raise ConfigError(f"line {lineno}: duplicate key '{key}' in [{current}]")
        sections[current][key] = (value.strip(), lineno)
    return sections


class _Section:
    """Typed, strict access to one config section."""

    def __init__(self, name: str, raw: dict[str, tuple[str, int]]):
        self.name = name
        self.raw = raw
        self.seen: set[str] = set()

    def _fetch(self, key: str):
        self.seen.add(key)
        return self.raw.get(key)

    def _fail(self, key: str, message: str):
        item = self.raw.get(key)
        where = f"line {item[1]}: " if item else ""
        raise ConfigError(f"{where}[{self.name}] {key}: {message}")

    def string(self, key: str, default=None, choices=None):
        item = self._fetch(key)
        if item is None:
            return default
        value = item[0]
        if choices is not None and value not in choices:
            self._fail(key, f"must be one of {', '.join(choices)}")
        return value

    def floating(self, key: str, default=None, minimum=None, maximum=None,
                 exclusive_min=False, exclusive_max=False):
        item = self._fetch(key)
        if item is None:
            return default
        try:
            value = float(item[0])
        except ValueError:
            self._fail(key, f"not a number: {item[0]!r}")
        if minimum is not None and (value <= minimum if exclusive_min else value < minimum):
            self._fail(key, f"must be {'>' if exclusive_min else '>='} {minimum}")
        if maximum is not None and (value >= maximum if exclusive_max else value > maximum):
            self._fail(key, f"must be {'<' if exclusive_max else '<='} {maximum}")
        return value

    def integer(self, key: str, default=None, minimum=None):
        item = self._fetch(key)
        if item is None:
            return default
        try:
            value = int(item[0])
        except ValueError:
            self._fail(key, f"not an integer: {item[0]!r}")
        if minimum is not None and value < minimum:
            self._fail(key, f"must be >= {minimum}")
        return value

    def floats(self, key: str, default=()):
        item = self._fetch(key)
        if item is None:
            return None if default is None else tuple(default)
        text = item[0].strip()
        if not text:
            return ()
        try:
            return tuple(float(part) for part in text.split(","))
        except ValueError:
            self._fail(key, f"not a comma-separated number list: {item[0]!r}")

    def reject_unknown(self):
        for key, (_, lineno) in self.raw.items():
            if key not in self.seen:
                raise ConfigError(f"line {lineno}: unknown key '{key}' in [{self.name}]")


def parse_config(text: str, subcommand: str | None = None) -> RunConfig:
    """Parse and fully validate a config document into a RunConfig.

    Unknown sections or keys are rejected. The subcommand may come from the
    command line, from the [experiment] section, or both if they agree.
    """
    raw = _parse_ini(text)
    known = {"path", "propagation", "noise", "experiment", "output"}
    for name in raw:
        if name not in known:
            raise ConfigError(f"unknown section [{name}]")
    secs = {name: _Section(name, raw.get(name, {})) for name in known}

    exp = secs["experiment"]
    config_sub = exp.string("subcommand", default=None, choices=SUBCOMMANDS)
    if subcommand is None and config_sub is None:
        raise ConfigError("no subcommand given on the command line or in [experiment]")
    if subcommand is not None and config_sub is not None and subcommand != config_sub:
        raise ConfigError(
            f"subcommand mismatch: '{subcommand}' on the command line, "
            f"'{config_sub}' in [experiment]"
        )
    sub = subcommand or config_sub

    pathsec = secs["path"]
    family = pathsec.string("family", default=None, choices=("latitude", "lune", "fourier"))
    if family is None:
        raise ConfigError("[path] family is required (latitude | lune | fourier)")
    theta0 = r0 = dphi = delta = None
    f_theta = f_phi = f_r = None
    if family == "latitude":
        theta0 = pathsec.floating("theta0", default=None, minimum=0.0, exclusive_min=True,
                                  maximum=float(np.pi), exclusive_max=True)
        if theta0 is None:
            raise ConfigError("[path] theta0 is required for the latitude family "
                              "(strictly between 0 and pi)")
        r0 = pathsec.floating("r0", default=1.0, minimum=0.0, exclusive_min=True)
    elif family == "lune":
        dphi = pathsec.floating("dphi", default=None, minimum=0.0, exclusive_min=True,
                                maximum=float(2.0 * np.pi), exclusive_max=True)
        if dphi is None:
            raise ConfigError("[path] dphi is required for the lune family "
                              "(strictly between 0 and 2 pi)")
        delta = pathsec.floating("delta", default=1e-3, minimum=0.0, exclusive_min=True)
    else:
        f_theta = paths.Harmonics(
            offset=pathsec.floating("theta_offset", default=None),
            sin=pathsec.floats("theta_sin"),
            cos=pathsec.floats("theta_cos"),
        )
        if f_theta.offset is None:
            raise ConfigError("[path] theta_offset is required for the fourier family")
        f_phi = paths.Harmonics(
            offset=pathsec.floating("phi_offset", default=0.0),
            slope=2.0 * np.pi * pathsec.integer("phi_winding", default=1),
            sin=pathsec.floats("phi_sin"),
            cos=pathsec.floats("phi_cos"),
        )
        f_r = paths.Harmonics(
            offset=pathsec.floating("r_offset", default=1.0),
            slope=pathsec.floating("r_slope", default=0.0),
            sin=pathsec.floats("r_sin"),
            cos=pathsec.floats("r_cos"),
        )
    pathsec.reject_unknown()

    prop = secs["propagation"]
    epsilon = prop.floating("epsilon", default=0.05, minimum=0.0, exclusive_min=True)
    spu = prop.integer("steps_per_unit_time", default=20, minimum=1)
    frame = prop.string("frame", default="lab", choices=("lab", "moving"))
    prop.reject_unknown()

    noisesec = secs["noise"]
    sigma = _triple(noisesec, "sigma", (0.0, 0.0, 0.0))
    if any(s < 0 for s in sigma):
        noisesec._fail("sigma", "components must be nonnegative")
    tau = _triple(noisesec, "tau", (1.0, 1.0, 1.0))
    if any(t <= 0 for t in tau):
        noisesec._fail("tau", "components must be positive")
    pinning = noisesec.string("pinning", default="endpoint-ramp",
                              choices=noise.PINNING_MODES)
    noisesec.reject_unknown()

    n = exp.integer("n", default=1000, minimum=100)
    mode = exp.string("mode", default="first_order", choices=experiments.MC_MODES)
    p = exp.floating("p", default=0.5, minimum=0.0, exclusive_min=True)
    q = exp.floating("q", default=0.5, minimum=0.0, exclusive_min=True)
    tau0 = exp.floating("tau0", default=1.0, minimum=0.0, exclusive_min=True)
    sigma0 = exp.floating("sigma0", default=1.0, minimum=0.0)
    eps_grid = exp.floats("epsilon_grid", default=None)
    eps_min = exp.floating("epsilon_min", default=None, minimum=0.0, exclusive_min=True)
    eps_max = exp.floating("epsilon_max", default=None, minimum=0.0, exclusive_min=True)
    ppd = exp.integer("points_per_decade", default=5, minimum=2)
    if eps_grid is not None and (eps_min is not None or eps_max is not None):
        raise ConfigError("[experiment] give either epsilon_grid or "
                          "epsilon_min/epsilon_max, not both")
    if (eps_min is None) != (eps_max is None):
        raise ConfigError("[experiment] epsilon_min and epsilon_max go together")
    if eps_min is not None:
        if eps_max <= eps_min:
            raise ConfigError("[experiment] epsilon_max must exceed epsilon_min")
        count = int(round(ppd * np.log10(eps_max / eps_min))) + 1
        eps_grid = tuple(float(e) for e in np.geomspace(eps_min, eps_max, count))
    if eps_grid is None:
        eps_grid = _DEFAULT_CONVERGENCE_GRID if sub == "convergence" else tuple(
            float(e) for e in np.geomspace(1e-3, 1e-1, 11))
    if any(e <= 0 for e in eps_grid):
        raise ConfigError("[experiment] epsilon_grid values must be positive")
    delta_t = exp.floating("delta_t", default=1.0)
    t0_grid = exp.floats("t0_grid", default=_DEFAULT_T0_GRID)
    if any(t <= 0 for t in t0_grid):
        raise ConfigError("[experiment] t0_grid values must be positive")
    tolerance = exp.floating("tolerance", default=None, minimum=0.0, exclusive_min=True)
    seed = exp.integer("seed", default=0, minimum=0)
    exp.reject_unknown()

    if sub == "timing" and delta_t == 0.0:
        raise ConfigError("[experiment] delta_t must be nonzero for the timing study")
    if sub == "scaling" and len(eps_grid) < 4:
        raise ConfigError("[experiment] the scaling study needs >= 4 epsilon points")
    if sub in ("scaling", "convergence") and len(eps_grid) < 3:
        raise ConfigError("[experiment] epsilon_grid needs >= 3 points")
    if sub == "timing" and len(t0_grid) < 3:
        raise ConfigError("[experiment] t0_grid needs >= 3 points")

    out = secs["output"]
    out_dir = out.string("dir", default="out")
    out.reject_unknown()

    return RunConfig(
        subcommand=sub, family=family, theta0=theta0,
        r0=r0 if r0 is not None else 1.0, dphi=dphi,
        delta=delta if delta is not None else 1e-3,
        f_theta=f_theta, f_phi=f_phi, f_r=f_r,
        epsilon=epsilon, steps_per_unit_time=spu, frame=frame,
        sigma=sigma, tau=tau, pinning=pinning,
        n=n, mode=mode, p=p, q=q, tau0=tau0, sigma0=sigma0,
        epsilon_grid=tuple(eps_grid), delta_t=delta_t, t0_grid=tuple(t0_grid),
        tolerance=tolerance, seed=seed, out_dir=out_dir,
    )


def _triple(sec: _Section, key: str, default):
    values = sec.floats(key, default=default)
    if len(values) == 1:
        values = values * 3
    if len(values) != 3:
        sec._fail(key, "needs one value or three comma-separated values")
    return values


def serialize_config(config: RunConfig) -> str:
    """Config text that parses back to an equal RunConfig."""
    lines = ["[path]", f"family = {config.family}"]
    if config.family == "latitude":
        lines += [f"theta0 = {config.theta0!r}", f"r0 = {config.r0!r}"]
    elif config.family == "lune":
        lines += [f"dphi = {config.dphi!r}", f"delta = {config.delta!r}"]
    else:
        h = config.f_theta
        lines += [f"theta_offset = {h.offset!r}",
                  "theta_sin = " + ", ".join(repr(v) for v in h.sin),
                  "theta_cos = " + ", ".join(repr(v) for v in h.cos)]
        h = config.f_phi
        lines += [f"phi_offset = {h.offset!r}",
                  f"phi_winding = {int(round(h.slope / (2.0 * np.pi)))}",
                  "phi_sin = " + ", ".join(repr(v) for v in h.sin),
                  "phi_cos = " + ", ".join(repr(v) for v in h.cos)]
        h = config.f_r
        lines += [f"r_offset = {h.offset!r}", f"r_slope = {h.slope!r}",
                  "r_sin = " + ", ".join(repr(v) for v in h.sin),
                  "r_cos = " + ", ".join(repr(v) for v in h.cos)]
    lines += [
        "",
        "[propagation]",
        f"epsilon = {config.epsilon!r}",
        f"steps_per_unit_time = {config.steps_per_unit_time}",
        f"frame = {config.frame}",
        "",
        "[noise]",
        "sigma = " + ", ".join(repr(v) for v in config.sigma),
        "tau = " + ", ".join(repr(v) for v in config.tau),
        f"pinning = {config.pinning}",
        "",
        "[experiment]",
        f"subcommand = {config.subcommand}",
        f"n = {config.n}",
        f"mode = {config.mode}",
        f"p = {config.p!r}",
        f"q = {config.q!r}",
        f"tau0 = {config.tau0!r}",
        f"sigma0 = {config.sigma0!r}",
        "epsilon_grid = " + ", ".join(repr(v) for v in config.epsilon_grid),
        f"delta_t = {config.delta_t!r}",
        "t0_grid = " + ", ".join(repr(v) for v in config.t0_grid),
        f"seed = {config.seed}",
        "",
        "[output]",
        f"dir = {config.out_dir}",
    ]
    if config.tolerance is not None:
        lines.insert(lines.index(f"seed = {config.seed}"),
                     f"tolerance = {config.tolerance!r}")
    return "\n".join(lines) + "\n"


def build_path(config: RunConfig) -> paths.ControlPath:
    if config.family == "latitude":
        return paths.latitude_loop(config.theta0, config.r0)
    if config.family == "lune":
        return paths.lune_path(config.dphi, config.delta)
    try:
        return paths.fourier_path(config.f_theta, config.f_phi, config.f_r)
    except ValueError as exc:
        raise ConfigError(f"[path] invalid fourier profiles: {exc}") from exc


def _workers_from_env() -> int | None:
    env = os.environ.get("THREADS")
    if env is None:
        return None
    try:
        value = int(env)
    except ValueError:
        raise ConfigError(f"THREADS must be an integer, got {env!r}") from None
    if value < 1:
        raise ConfigError("THREADS must be >= 1")
    return value


def _config_echo(config: RunConfig) -> dict:
    """Config fields relevant to the result (the output dir is environment,
    not experiment, and is excluded so reruns into fresh dirs stay identical)."""
    echo = {}
    for field in fields(RunConfig):
        if field.name == "out_dir":
            continue
        value = getattr(config, field.name)
        if isinstance(value, paths.Harmonics):
            value = {"offset": value.offset, "slope": value.slope,
                     "sin": list(value.sin), "cos": list(value.cos)}
        elif isinstance(value, tuple):
            value = list(value)
        echo[field.name] = value
    return echo


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_plotdata(path: Path, xlabel: str, ylabel: str, xs, ys) -> None:
    lines = [f"# {xlabel} {ylabel}"]
    for x, y in zip(xs, ys):
        lines.append(f"{_format_cell(x)} {_format_cell(y)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _complex_matrix(m: np.ndarray) -> list:
    return [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in m]


def run(config: RunConfig) -> int:
    """Execute the configured experiment; returns the exit status."""
    workers = _workers_from_env()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = build_path(config)
    summary: dict = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": config.subcommand,
        "config": _config_echo(config),
        "results": {},
    }
    results = summary["results"]
    checks: list[tuple[str, bool]] = []

    if config.subcommand in ("gate", "holonomy"):
        report = holonomy.solid_angle(path)
        ideal = holonomy.ideal_gate(report.omega_canonical)
        results["omega_cos"] = report.omega_cos
        results["omega_area"] = report.omega_area
        results["winding"] = report.winding
        results["omega_canonical"] = report.omega_canonical
        results["arc_length"] = holonomy.arc_length(path)
        results["ideal_gate"] = [[float(v) for v in row] for row in ideal.matrix]

    if config.subcommand == "gate":
        settings = propagator.PropagationSettings(
            epsilon=config.epsilon, steps_per_unit_time=config.steps_per_unit_time,
            frame=config.frame,
        )
        if config.frame == "moving":
            u = propagator.evolve_moving(path, settings)
        else:
            u = propagator.evolve_lab(path, settings)
        gate = propagator.extract_logical_gate(u, path)
        ideal = holonomy.ideal_gate(results["omega_canonical"])
        results["extracted_block"] = _complex_matrix(gate.block)
        results["extracted_angle"] = gate.angle_estimate
        results["leakage"] = gate.leakage
        results["adiabaticity_lost"] = gate.adiabaticity_lost
        results["distance_to_ideal"] = float(np.linalg.norm(gate.block - ideal.matrix))
        checks.append(("leakage below 0.1", not gate.adiabaticity_lost))
        samples = paths.sample(path, 256)
        _write_csv(out / "path_samples.csv",
                   ["s", "x1", "x2", "x3", "theta", "phi", "r"],
                   [(s, x[0], x[1], x[2], t, ph, float(np.linalg.norm(x)))
                    for s, x, t, ph in zip(samples.s, samples.x, samples.theta,
                                           samples.phi)])

    elif config.subcommand == "holonomy":
        s = np.linspace(0.0, 1.0, 513)
        costheta = np.cos(path.theta(s))
        phidot = path.phi.derivative(s)
        _write_csv(out / "integrand.csv",
                   ["s", "costheta", "phidot", "integrand_cos", "integrand_area"],
                   [(si, c, pd, c * pd, (1.0 - c) * pd)
                    for si, c, pd in zip(s, costheta, phidot)])

    elif config.subcommand == "noise-mc":
        spec = noise.NoiseSpec(sigma=config.sigma, tau=config.tau,
                               pinning=config.pinning, seed=config.seed)
        mc = experiments.mc_delta(path, spec, config.epsilon, config.n,
                                  config.mode, workers=workers)
        results["delta_mean"] = mc.delta_mean
        results["delta_std"] = mc.delta_std
        results["std_error"] = mc.std_error
        results["analytic_delta"] = (None if np.isnan(mc.analytic_delta)
                                     else mc.analytic_delta)
        results["n_excluded"] = mc.n_excluded
        if not np.isnan(mc.analytic_delta):
            ok = abs(mc.delta_std - mc.analytic_delta) <= 3.0 * mc.std_error
            checks.append(("Monte Carlo Delta within 3 standard errors "
                           "of the analytic value", ok))
        _write_csv(out / "realizations.csv",
                   ["index", "delta_omega", "leakage", "included"],
                   [(i, d, l, l <= experiments.LEAKAGE_LIMIT)
                    for i, (d, l) in enumerate(zip(mc.deltas, mc.leakages))])

    elif config.subcommand == "scaling":
        sr = experiments.scaling_study(
            path, config.p, config.q, config.tau0, config.sigma0,
            config.epsilon_grid, config.n, config.mode,
            pinning=config.pinning, base_seed=config.seed, workers=workers,
        )
        tol = config.tolerance if config.tolerance is not None else _DEFAULT_TOLERANCE["scaling"]
        ok = abs(sr.fit.exponent - sr.predicted_exponent) <= tol
        checks.append((f"fitted exponent within {tol} of predicted", ok))
        results["fit"] = _fit_block(sr.fit)
        results["predicted_exponent"] = sr.predicted_exponent
        results["tolerance"] = tol
        _write_csv(out / "scaling.csv",
                   ["epsilon", "delta", "std_error", "analytic_delta"],
                   zip(sr.epsilons, sr.deltas, sr.std_errors, sr.analytic))
        _write_plotdata(out / "scaling_fit.dat", "epsilon", "delta",
                        sr.epsilons, sr.deltas)

    elif config.subcommand == "timing":
        fit = experiments.timing_study(path, config.delta_t, config.t0_grid,
                                       steps_per_unit_time=config.steps_per_unit_time)
        tol = config.tolerance if config.tolerance is not None else _DEFAULT_TOLERANCE["timing"]
        ok = abs(fit.exponent - (-1.0)) <= tol
        checks.append((f"fitted slope within {tol} of -1", ok))
        results["fit"] = _fit_block(fit)
        results["delta_t"] = config.delta_t
        results["tolerance"] = tol
        _write_csv(out / "timing.csv", ["t0", "error"], zip(fit.xs, fit.ys))
        _write_plotdata(out / "timing_fit.dat", "t0", "error", fit.xs, fit.ys)

    elif config.subcommand == "convergence":
        fit = experiments.convergence_study(
            path, config.epsilon_grid,
            steps_per_unit_time=config.steps_per_unit_time)
        tol = config.tolerance if config.tolerance is not None else _DEFAULT_TOLERANCE["convergence"]
        ok = fit.exponent >= tol
        checks.append((f"fitted slope at least {tol}", ok))
        results["fit"] = _fit_block(fit)
        results["tolerance"] = tol
        _write_csv(out / "convergence.csv", ["epsilon", "distance"],
                   zip(fit.xs, fit.ys))
        _write_plotdata(out / "convergence_fit.dat", "epsilon", "distance",
                        fit.xs, fit.ys)

    results["checks"] = [{"name": name, "passed": bool(ok)} for name, ok in checks]
    _write_json(out / "summary.json", summary)
    _write_json(out / "run_meta.json", {
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "numpy_version": np.__version__,
    })
    for line in emit_report(summary):
        print(line)
    return 0 if all(ok for _, ok in checks) else 3


def _fit_block(fit: experiments.PowerLawFit) -> dict:
    return {
        "exponent": fit.exponent,
        "exponent_stderr": fit.exponent_stderr,
        "intercept": fit.intercept,
        "residual": fit.residual,
    }


def emit_report(summary: dict) -> list[str]:
    """Human-readable headline lines; the JSON stays the authoritative record."""
    sub = summary["subcommand"]
    results = summary["results"]
    lines = [f"subcommand: {sub}"]
    if "omega_canonical" in results:
        lines.append(
            "omega_cos: {:.6g}   omega_area: {:.6g}   winding: {}   canonical: {:.6g}"
            .format(results["omega_cos"], results["omega_area"],
                    results["winding"], results["omega_canonical"]))
    if "ideal_gate" in results:
        g = results["ideal_gate"]
        lines.append("ideal gate: [[{:.6g}, {:.6g}], [{:.6g}, {:.6g}]]".format(
            g[0][0], g[0][1], g[1][0], g[1][1]))
    if sub == "gate":
        lines.append("extracted angle: {:.6g}   leakage: {:.3g}   |gate - ideal|_F: {:.3g}"
                     .format(results["extracted_angle"], results["leakage"],
                             results["distance_to_ideal"]))
    if sub == "noise-mc":
        line = "delta_std: {:.6g} +- {:.2g}".format(results["delta_std"],
                                                    results["std_error"])
        if results.get("analytic_delta") is not None:
            line += "   analytic: {:.6g}".format(results["analytic_delta"])
        lines.append(line)
    if "fit" in results:
        fit = results["fit"]
        target = {"scaling": results.get("predicted_exponent"),
                  "timing": -1.0, "convergence": None}.get(sub)
        line = "exponent: {:.4g} +- {:.2g}".format(fit["exponent"],
                                                   fit["exponent_stderr"])
        if target is not None:
            line += " (predicted {:.4g})".format(target)
        lines.append(line)
    for check in results.get("checks", []):
        lines.append("{}: {}".format(check["name"],
                                     "PASS" if check["passed"] else "FAIL"))
    return lines


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tripodholo",
        description="Holonomic tripod-gate experiments: config in, CSV/JSON out.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="path to the INI config")
    parser.add_argument("--seed", type=int, default=None, help="override [experiment] seed")
    parser.add_argument("--out", default=None, help="override [output] dir")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 4
    try:
        config = parse_config(text, args.subcommand)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be nonnegative")
            config = _replace(config, seed=args.seed)
        if args.out is not None:
            config = _replace(config, out_dir=args.out)
        return run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


def _replace(config: RunConfig, **kw) -> RunConfig:
    return replace(config, **kw)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: parameter reports, figure datasets, sweeps,
classification, and the validation suite.

Subcommands: params, angular, peak, fig3, classify, sweep, validate.
Exit codes: 0 success, 1 validation failure, 2 usage/config error,
3 numerical non-convergence.

Configuration is line-oriented ``key = value`` text ('#' comments); unknown
keys are rejected.  Precedence: command-line flags > config file > defaults.
CSV outputs carry a header row and floats in scientific notation with 17
significant digits; a JSON sidecar records the full configuration, its
hash, the code version, and achieved error estimates.  All files are
written atomically (temp file + rename), so interrupted runs never leave
partial datasets.  Sweep rows are cached by configuration hash (including
the kernel backend) and reused bitwise.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import hashlib
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .correlations import (DetectorGeometry, NonConvergenceError,
                           UndefinedQError, rho2_and_Q)
from .entanglement import werner_decompose
from .model import EmitterParams, derive_params
from .peak import SweepSpec, delta_q_peak, threshold_map
from .quad import QuadSpec
from .validation import run_checks

USAGE_ERROR = 2
NONCONVERGENCE_ERROR = 3

_DEFAULTS = {
    "delta_over_mu": 2.997e-3,
    "ec_over_mu": 2.997e-3,
    "w_over_lambdaf": 1.0,
    "r_over_lambdaf": 100.0,
    "theta": math.pi,
    "theta_min": 0.0,
    "theta_max": math.pi,
    "theta_points": 25,
    "rel_tol": 1e-3,
    "workers": 1,
    "cache_dir": "",
    "sweep_param": "r",
    "sweep_min": 10.0,
    "sweep_max": 3.0e6,
    "sweep_points": 60,
    "sweep_log": True,
    "fig3_points": 60,
}

_INT_KEYS = {"theta_points", "workers", "sweep_points", "fig3_points"}
_BOOL_KEYS = {"sweep_log"}
_STR_KEYS = {"cache_dir", "sweep_param"}


@dataclasses.dataclass
class RunConfig:
    """Resolved run configuration (defaults < config file < flags)."""

    values: dict

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError as exc:
            raise AttributeError(name) from exc

    def params(self) -> EmitterParams:
        return EmitterParams(delta=self.delta_over_mu, ec=self.ec_over_mu,
                             w=self.w_over_lambdaf)

    def quad_spec(self) -> QuadSpec:
        return QuadSpec(rel_tol=self.rel_tol, abs_tol=1e-300, max_depth=40)

    def digest(self, extra: dict | None = None) -> str:
        # workers and cache location are execution details, not physics:
        # they must not change row identities
        values = {k: v for k, v in self.values.items()
                  if k not in ("workers", "cache_dir")}
        payload = {"config": values, "version": __version__,
                   "backend": kernels.BACKEND}
        if extra:
            payload.update(extra)
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


class ConfigError(ValueError):
    pass


def _coerce(key: str, raw: str):
    if key in _STR_KEYS:
        return raw
    if key in _BOOL_KEYS:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"bad boolean for {key}: {raw!r}")
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def load_config(path: str | None, overrides: dict) -> RunConfig:
    values = dict(_DEFAULTS)
    if path:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        for ln, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{ln}: expected 'key = value'")
            key, raw = (s.strip() for s in line.split("=", 1))
            if key not in _DEFAULTS:
                raise ConfigError(f"{path}:{ln}: unknown key {key!r}")
            values[key] = _coerce(key, raw)
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in _DEFAULTS:
            raise ConfigError(f"unknown override {key!r}")
        values[key] = val
    if not values["cache_dir"]:
        values["cache_dir"] = os.environ.get("PAIREMIT_CACHE_DIR", "")
    cfg = RunConfig(values)
    # basic invariants
    if cfg.delta_over_mu < 0 or cfg.ec_over_mu <= 0 or cfg.w_over_lambdaf <= 0:
        raise ConfigError("physical ratios must be positive (delta may be 0)")
    if cfg.theta_points < 1 or cfg.sweep_points < 1 or cfg.fig3_points < 2:
        raise ConfigError("grids need at least one point")
    if cfg.theta_max <= cfg.theta_min and cfg.theta_points > 1:
        raise ConfigError("theta grid must be strictly increasing")
    return cfg


# ---------------------------------------------------------------------------
# formatting / atomic IO / cache
# ---------------------------------------------------------------------------

def fmt(x: float) -> str:
    return format(float(x), ".16e")


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class RowCache:
    """Row-level result cache keyed by configuration hash."""

    def __init__(self, root: str):
        self.root = Path(root) if root else None
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)

    def get(self, key: str) -> str | None:
        if not self.root:
            return None
        p = self.root / f"{key}.row"
        try:
            return p.read_text()
        except OSError:
            return None

    def put(self, key: str, row: str) -> None:
        if not self.root:
            return
        atomic_write(self.root / f"{key}.row", row)


def _q_error(corr) -> float:
    """Propagated relative error estimate of Q from the component estimates."""
    g11, g22 = corr.gamma11, corr.gamma22
    e = corr.err_est
    rel = (e.get("gamma11", 0.0) / g11 + e.get("gamma22", 0.0) / g22)
    off = 2.0 * (abs(corr.gamma21) * e.get("gamma21", 0.0)
                 + abs(corr.chi21) * e.get("chi21", 0.0)) \
        / (corr.rho1_1 * corr.rho1_2)
    return abs(corr.Q) * rel + off


# ---------------------------------------------------------------------------
# row workers (top level: picklable for the process pool)
# ---------------------------------------------------------------------------

def _angular_row(task) -> str:
    theta, r, delta, ec, w, rel_tol = task
    spec = QuadSpec(rel_tol=rel_tol, abs_tol=1e-300, max_depth=40)
    geom = DetectorGeometry.from_r_theta(r, theta)
    q_n = rho2_and_Q(geom, EmitterParams(0.0, ec, w), spec)
    q_s = rho2_and_Q(geom, EmitterParams(delta, ec, w), spec)
    return ",".join([fmt(theta), fmt(q_n.Q), fmt(_q_error(q_n)),
                     fmt(q_s.Q), fmt(_q_error(q_s))])


def _run_rows(tasks, worker, n_workers: int, cache: RowCache,
              key_of) -> list[str]:
    """Compute formatted rows, cache-aware, assembled in grid order."""
    rows: list[str | None] = [None] * len(tasks)
    pending = []
    for i, task in enumerate(tasks):
        hit = cache.get(key_of(task))
        if hit is not None:
            rows[i] = hit
        else:
            pending.append(i)
    if pending:
        if n_workers > 1:
            with concurrent.futures.ProcessPoolExecutor(n_workers) as pool:
                done = list(pool.map(worker, [tasks[i] for i in pending]))
        else:
            done = [worker(tasks[i]) for i in pending]
        for i, row in zip(pending, done):
            rows[i] = row
            cache.put(key_of(tasks[i]), row)
    return rows  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_params(cfg: RunConfig, args) -> int:
    p = cfg.params()
    d = derive_params(p)
    report = {
        "delta_over_mu": abs(p.delta),
        "ec_over_mu": p.ec,
        "w_over_lambdaf": p.w,
        "xi_over_lambdaf": d.xi_over_lambda_f,
        "w_over_xi": d.w_over_xi,
        "delta_over_ec": d.delta_over_ec,
        "lambda_f_kf_units": d.lambda_f,
    }
    for k, v in report.items():
        print(f"{k:>22s} = {v}")
    if args.output:
        atomic_write(Path(args.output), json.dumps(report, indent=2,
                                                   sort_keys=True) + "\n")
    return 0


def _write_dataset(path: Path, header: str, rows: list[str], cfg: RunConfig,
                   meta_extra: dict) -> None:
    atomic_write(path, header + "\n" + "\n".join(rows) + "\n")
    meta = {
        "config": cfg.values,
        "config_hash": cfg.digest(),
        "version": __version__,
        "backend": kernels.BACKEND,
    }
    meta.update(meta_extra)
    atomic_write(path.with_suffix(".meta.json"),
                 json.dumps(meta, indent=2, sort_keys=True) + "\n")


def cmd_angular(cfg: RunConfig, args) -> int:
    """Q(theta) datasets for the normal and superconducting emitter."""
    kernels.warmup()
    thetas = np.linspace(cfg.theta_min, cfg.theta_max, cfg.theta_points)
    tasks = [(float(t), cfg.r_over_lambdaf, cfg.delta_over_mu,
              cfg.ec_over_mu, cfg.w_over_lambdaf, cfg.rel_tol)
             for t in thetas]
    cache = RowCache(cfg.cache_dir)

    def key_of(task):
        return cfg.digest({"cmd": "angular", "task": task})

    rows = _run_rows(tasks, _angular_row, cfg.workers, cache, key_of)
    path = Path(args.output or "angular.csv")
    _write_dataset(path, "theta_rad,Q_normal,err_normal,Q_super,err_super",
                   rows, cfg, {"command": "angular"})
    print(f"wrote {path}")
    return 0


def _sweep_grid(cfg: RunConfig):
    if cfg.sweep_log:
        if cfg.sweep_min <= 0:
            raise ConfigError("log grid needs positive sweep_min")
        return np.geomspace(cfg.sweep_min, cfg.sweep_max, cfg.sweep_points)
    return np.linspace(cfg.sweep_min, cfg.sweep_max, cfg.sweep_points)


def _classify_dq(dq: float) -> str:
    from .peak import DQ_BELL, DQ_ENTANGLEMENT
    if dq > DQ_BELL:
        return "bell_violating"
    if dq > DQ_ENTANGLEMENT:
        return "entangled"
    return "separable"


def _sweep_dataset(cfg: RunConfig, param: str, grid) -> tuple[list[str], dict]:
    spec = SweepSpec(base=cfg.params(), r=cfg.r_over_lambdaf, param=param,
                     grid=tuple(float(g) for g in grid))
    res = threshold_map(spec)
    hash12 = cfg.digest({"cmd": "threshold_map", "param": param})[:12]
    rows = []
    for v, dq, err, flags in zip(res.values, res.delta_q, res.delta_q_err,
                                 res.regime_ok):
        rows.append(",".join([
            fmt(v), fmt(1.0 + dq), fmt(err),
            "1" if all(flags.values()) else "0",
            _classify_dq(dq),
            hash12, __version__,
        ]))
    meta = {"crossings": {k: list(map(float, v))
                          for k, v in res.crossings.items()},
            "thresholds": {"Q_entanglement": 1.5,
                           "Q_bell": float(math.sqrt(2) / (math.sqrt(2) - 1))}}
    return rows, meta


_HEADER_SWEEP = ("param_value,Q_peak,err_est,regime_ok,classification,"
                 "config_hash,version")


def cmd_sweep(cfg: RunConfig, args) -> int:
    grid = _sweep_grid(cfg)
    rows, meta = _sweep_dataset(cfg, cfg.sweep_param, grid)
    path = Path(args.output or f"sweep_{cfg.sweep_param}.csv")
    _write_dataset(path, _HEADER_SWEEP, rows, cfg,
                   {"command": "sweep", "sweep_param": cfg.sweep_param, **meta})
    print(f"wrote {path}")
    return 0


def cmd_peak(cfg: RunConfig, args) -> int:
    """Peak height along an r sweep at the configured parameters."""
    grid = _sweep_grid(cfg) if cfg.sweep_param == "r" else \
        np.geomspace(10.0, 3.0e6, cfg.sweep_points)
    rows, meta = _sweep_dataset(cfg, "r", grid)
    path = Path(args.output or "peak_r.csv")
    _write_dataset(path, _HEADER_SWEEP, rows, cfg,
                   {"command": "peak", "sweep_param": "r", **meta})
    point = delta_q_peak(cfg.params(), cfg.r_over_lambdaf)
    print(f"dQ(r = {cfg.r_over_lambdaf} lambda_F) = {point.delta_q:.6g}  "
          f"regime {point.regime_ok}")
    print(f"wrote {path}")
    return 0


def cmd_fig3(cfg: RunConfig, args) -> int:
    """Four threshold-map panels (|Delta|, E_C, w, r)."""
    n = cfg.fig3_points
    xi_lf = derive_params(cfg.params()).xi / (2 * math.pi)
    panels = {
        "delta": np.geomspace(1e-4, 1e-2, n),
        "ec": np.geomspace(3e-4, 3e-2, n),
        "w": np.linspace(0.5, 4.0, n),
        "r": np.geomspace(10.0, 3.0e6, n),
    }
    stem = Path(args.output or "fig3")
    for param, grid in panels.items():
        rows, meta = _sweep_dataset(cfg, param, grid)
        path = stem.parent / f"{stem.name}_{param}.csv"
        _write_dataset(path, _HEADER_SWEEP, rows, cfg,
                       {"command": "fig3", "sweep_param": param,
                        "xi_over_lambdaf": xi_lf, **meta})
        print(f"wrote {path}")
    return 0


def cmd_classify(cfg: RunConfig, args) -> int:
    """Correlators and Werner report at one detector geometry (quadrature)."""
    kernels.warmup()
    geom = DetectorGeometry.from_r_theta(cfg.r_over_lambdaf, cfg.theta)
    corr = rho2_and_Q(geom, cfg.params(), cfg.quad_spec())
    rep = werner_decompose(corr)
    report = {
        "geometry": {"r_over_lambdaf": cfg.r_over_lambdaf,
                     "theta_rad": cfg.theta},
        "gamma11": corr.gamma11, "gamma22": corr.gamma22,
        "gamma21_abs": abs(corr.gamma21), "chi21_abs": abs(corr.chi21),
        "rho2": corr.rho2, "Q": corr.Q, "Q_err_est": _q_error(corr),
        "regime_flags": corr.regime_flags,
        "werner": {"a": rep.a, "b": rep.b, "p": rep.p,
                   "concurrence": rep.concurrence, "chsh": rep.chsh,
                   "classification": rep.classification},
    }
    print(f"Q = {corr.Q:.6f}   p = {rep.p:.6f}   "
          f"concurrence = {rep.concurrence:.6f}   CHSH = {rep.chsh:.6f}")
    print(f"classification: {rep.classification}")
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.output:
        atomic_write(Path(args.output),
                     json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_validate(cfg: RunConfig, args) -> int:
    results = run_checks(skip_slow=args.quick)
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'}  {res.name}: {res.detail}")
    summary = {
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
        "checks": [dataclasses.asdict(r) for r in results],
        "version": __version__,
        "backend": kernels.BACKEND,
    }
    print(json.dumps(summary, sort_keys=True))      # machine-readable line
    if args.output:
        atomic_write(Path(args.output),
                     json.dumps(summary, indent=2, sort_keys=True) + "\n")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"FAILED checks: {', '.join(failed)}")
        return 1
    print(f"all {len(results)} checks passed")
    return 0


# ---------------------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("--config", help="key = value configuration file")
    sub.add_argument("--output", help="output path (CSV/JSON per command)")
    sub.add_argument("--delta", type=float, dest="delta_over_mu",
                     help="|Delta|/mu")
    sub.add_argument("--ec", type=float, dest="ec_over_mu", help="E_C/mu")
    sub.add_argument("--w", type=float, dest="w_over_lambdaf",
                     help="w/lambda_F")
    sub.add_argument("--r", type=float, dest="r_over_lambdaf",
                     help="r/lambda_F")
    sub.add_argument("--theta", type=float, dest="theta",
                     help="detector angle (rad), classify only")
    sub.add_argument("--rel-tol", type=float, dest="rel_tol")
    sub.add_argument("--workers", type=int, dest="workers")
    sub.add_argument("--cache-dir", dest="cache_dir")
    sub.add_argument("--theta-points", type=int, dest="theta_points")
    sub.add_argument("--sweep-param", dest="sweep_param",
                     choices=("delta", "ec", "w", "r"))
    sub.add_argument("--sweep-min", type=float, dest="sweep_min")
    sub.add_argument("--sweep-max", type=float, dest="sweep_max")
    sub.add_argument("--sweep-points", type=int, dest="sweep_points")


_COMMANDS = {
    "params": cmd_params,
    "angular": cmd_angular,
    "peak": cmd_peak,
    "fig3": cmd_fig3,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}

_OVERRIDE_KEYS = ("delta_over_mu", "ec_over_mu", "w_over_lambdaf",
                  "r_over_lambdaf", "theta", "rel_tol", "workers",
                  "cache_dir", "theta_points", "sweep_param", "sweep_min",
                  "sweep_max", "sweep_points")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pairemit",
        description="Coincidence statistics and entanglement thresholds of "
                    "electron pairs field-emitted from a superconducting tip",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub = subs.add_parser(name)
        _add_common(sub)
        if name == "validate":
            sub.add_argument("--quick", action="store_true",
                             help="skip the slow quadrature-path checks")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except UndefinedQError as exc:
        print(f"undefined Q: {exc}", file=sys.stderr)
        return NONCONVERGENCE_ERROR
    except NonConvergenceError as exc:
        print(f"quadrature non-convergence: {exc}", file=sys.stderr)
        return NONCONVERGENCE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())

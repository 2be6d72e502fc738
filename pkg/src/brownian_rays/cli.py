"""Command-line front end.

    brownian-rays eval     --config run.json --out values.csv
    brownian-rays simulate --config run.json --out paths.csv [--full-paths] [--workers N]
    brownian-rays verify   --suite {core,queue,pinned,options,all} [--paths N] [--seed S]

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
The environment variable ``BROWNIAN_RAYS_SEED`` replaces the default seed.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import options, queue, sampler
from .core_process import (
    ConditionedState,
    RayComponent,
    RayParams,
    SuperposedCov,
    SuperpositionSpec,
    condition_superposition,
)

log = logging.getLogger("brownian_rays")

SCENARIOS = ("ray", "queue", "pinned-queue", "rbm", "rbb", "option", "embedded")
DEFAULT_SEED = 20110101
SEED_ENV = "BROWNIAN_RAYS_SEED"


class ConfigError(ValueError):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


@dataclass
class GridSpec:
    stop: float | None = None
    n: int | None = None
    start: float = 0.0
    points: list[float] | None = None

    def values(self) -> np.ndarray:
        if self.points is not None:
            return np.asarray(self.points, dtype=float)
        if self.stop is None or self.n is None:
            raise ConfigError("grid needs either 'points' or 'stop' and 'n'")
        if self.n < 1:
            raise ConfigError("grid 'n' must be >= 1")
        return np.linspace(self.start, self.stop, self.n)

    def time_grid(self) -> sampler.TimeGrid:
        pts = self.values()
        return sampler.TimeGrid(pts[pts > 0])


@dataclass
class McSpec:
    n_paths: int = 1000
    seed: int | None = None


@dataclass
class RunConfig:
    scenario: str
    params: dict[str, Any]
    grid: GridSpec = field(default_factory=GridSpec)
    mc: McSpec = field(default_factory=McSpec)
    output: str | None = None

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - {"scenario", "params", "grid", "mc", "output"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            cfg = cls(
                scenario=data["scenario"],
                params=dict(data.get("params", {})),
                grid=GridSpec(**data.get("grid", {})),
                mc=McSpec(**data.get("mc", {})),
                output=data.get("output"),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        cfg.validate()
        return cfg

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def seed(self) -> int:
        return default_seed() if self.mc.seed is None else int(self.mc.seed)

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.mc.n_paths < 1:
            raise ConfigError("mc.n_paths must be >= 1")
        # building the domain objects runs every type invariant
        try:
            build_model(self)
            self.grid.values()
        except ConfigError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"invalid {self.scenario} parameters: {exc}") from exc


# ---------------------------------------------------------------------------
# parameter blocks -> model objects


def _spec(p: dict[str, Any]) -> SuperpositionSpec:
    big_delta = float(p["big_delta"])
    comps = tuple(
        RayComponent(float(c.get("weight", 1.0)), RayParams(float(c["phi"]), float(c["delta"]), big_delta))
        for c in p["components"]
    )
    return SuperpositionSpec(comps, float(p.get("rho", 0.0)))


def _state(p: dict[str, Any], spec: SuperpositionSpec) -> ConditionedState:
    s = p.get("state", {})
    x = s.get("x", [0.0] * len(spec))
    return ConditionedState(float(s.get("u", 0.0)), tuple(x), float(s.get("v", 0.0)))


def build_model(cfg: RunConfig) -> dict[str, Any]:
    p = cfg.params
    kind = cfg.scenario
    if kind in ("ray", "queue", "pinned-queue"):
        spec = _spec(p)
        state = _state(p, spec)
        out: dict[str, Any] = {"spec": spec, "state": state}
        if kind == "ray":
            cov, rho_ux = condition_superposition(spec, state)
            out.update(cov=cov, rho=rho_ux)
        elif kind == "queue":
            out["query"] = queue.QueueQuery(spec, state, float(p["h"]))
        else:
            out["query"] = queue.PinnedQueueQuery(
                spec, state, float(p["h"]), float(p["w"]), float(p["z"])
            )
        return out
    if kind == "rbm":
        cov = SuperposedCov(float(p["theta"]), 0.0)
        t = float(p["t"])
        if t <= 0:
            raise ValueError("t must be > 0")
        return {"cov": cov, "rho": float(p.get("rho", 0.0)), "v": float(p.get("v", 0.0)), "t": t}
    if kind == "rbb":
        cov = SuperposedCov(float(p["theta"]), float(p["big_t"]))
        if cov.big_t <= 0:
            raise ValueError("big_t must be > 0 for a bridge")
        return {"cov": cov, "rho": float(p.get("rho", 0.0))}
    if kind == "option":
        ray = RayParams(float(p["phi"]), float(p["delta"]), float(p["big_delta"]))
        spec = options.GbrSpec(float(p["s0"]), float(p.get("rho", 0.0)), ray)
        u, x1 = float(p.get("u", 0.0)), float(p.get("x1", 0.0))
        contract = options.OptionContract(
            float(p["strike"]), float(p["rate"]), float(p["maturity"]), spec.spot_after(u, x1)
        )
        spec.conditioned(u, x1)
        if contract.maturity > ray.big_delta - u:
            raise ValueError("maturity exceeds big_delta - u")
        return {"gbr": spec, "u": u, "x1": x1, "contract": contract}
    if kind == "embedded":
        emb = sampler.EmbeddedSpec(float(p.get("motion_rate", 0.0)), tuple(map(tuple, p["bridges"])))
        big_delta = float(p["big_delta"])
        return {"embedded": emb, "ray": emb.matched_ray(big_delta)}
    raise ConfigError(f"unknown scenario {kind!r}")


# ---------------------------------------------------------------------------
# CSV


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(header: list[str], columns: list[np.ndarray]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def eval_to_csv(cfg: RunConfig) -> str:
    """Evaluate the scenario's closed form along the configured grid."""
    m = build_model(cfg)
    xs = cfg.grid.values()
    kind = cfg.scenario
    if kind == "ray":
        name, ys = "ray_variance", m["cov"].variance(xs)
        if np.any(xs > m["cov"].horizon):
            raise ConfigError("grid extends beyond big_delta - u")
        return write_csv(["t", name], [xs, ys])
    if kind == "queue":
        return write_csv(["q", "transient_cdf"], [xs, queue.transient_cdf(m["query"], xs)])
    if kind == "pinned-queue":
        return write_csv(["q", "pinned_transient_cdf"], [xs, queue.pinned_transient_cdf(m["query"], xs)])
    if kind == "rbm":
        ys = queue.rbm_transient_cdf(m["cov"].big_theta, m["rho"], m["v"], m["t"], xs)
        return write_csv(["q", "rbm_transient_cdf"], [xs, ys])
    if kind == "rbb":
        ys = queue.rbb_stationary_cdf(m["cov"].big_theta, m["cov"].big_t, m["rho"], xs)
        return write_csv(["q", "rbb_stationary_cdf"], [xs, ys])
    if kind == "option":
        c = m["contract"]
        theta = m["gbr"].ray.theta
        ys = options.bsm_call(xs, c.strike, c.rate, c.maturity, theta)
        ds = options.bsm_call_delta(xs, c.strike, c.rate, c.maturity, theta)
        return write_csv(["spot", "bsm_call_price", "bsm_call_delta"], [xs, ys, ds])
    # embedded: variance of increments over lag t, from the matched ray
    ray: RayParams = m["ray"]
    if np.any(xs > ray.big_delta) or np.any(xs < 0):
        raise ConfigError("lags must lie in [0, big_delta]")
    return write_csv(["lag", "increment_variance"], [xs, ray.as_cov().variance(xs)])


def simulate_paths(cfg: RunConfig, workers: int = 1) -> tuple[sampler.SamplePathBatch, float | None]:
    """Sample the scenario's paths; the second item is the reflection level, if any."""
    m = build_model(cfg)
    grid = cfg.grid.time_grid()
    n, seed = cfg.mc.n_paths, cfg.seed()
    kind = cfg.scenario
    if kind == "ray":
        state = m["state"]
        batch = sampler.sample_conditioned_net_input(m["spec"], state, grid, n, seed, workers)
        return batch, (state.v if cfg.params.get("reflect") else None)
    if kind == "queue":
        q = m["query"]
        grid.check_within(q.h)
        batch = sampler.sample_conditioned_net_input(q.spec, q.state, grid, n, seed, workers)
        return batch, q.state.v
    if kind == "pinned-queue":
        q = m["query"]
        batch = sampler.sample_pinned(q.spec, q.state, q.w, q.z, grid, n, seed, workers)
        return batch, q.state.v
    if kind in ("rbm", "rbb"):
        raw = sampler.sample_ray(m["cov"], grid, n, seed, workers)
        vals = raw.values + m["rho"] * grid.points
        return sampler.SamplePathBatch(grid, vals, seed, True), m.get("v", 0.0)
    if kind == "option":
        gbr, c = m["gbr"], m["contract"]
        cond, rho_u = gbr.conditioned(m["u"], m["x1"])
        raw = sampler.sample_ray(cond, grid, n, seed, workers)
        prices = c.spot * np.exp(raw.values + rho_u * grid.points)
        return sampler.SamplePathBatch(grid, prices, seed, True), None
    emb = m["embedded"]
    return sampler.sample_embedded(emb.kind, emb, grid, n, seed), None


def simulate_to_csv(cfg: RunConfig, full_paths: bool = False, workers: int = 1) -> str:
    batch, level = simulate_paths(cfg, workers)
    t = batch.grid.points
    vals = batch.values
    reg = sampler.reflect(vals, level) if level is not None else None
    if full_paths:
        n, k = vals.shape
        cols = [np.repeat(np.arange(n), k), np.tile(t, n), vals.ravel()]
        header = ["path", "t", "value"]
        if reg is not None:
            cols += [reg.q.ravel(), reg.l.ravel()]
            header += ["q", "l"]
        return write_csv(header, cols)
    ddof = 1 if vals.shape[0] > 1 else 0
    cols = [t, vals.mean(axis=0), vals.var(axis=0, ddof=ddof)]
    header = ["t", "mean", "var"]
    if reg is not None:
        cols += [reg.q.mean(axis=0), reg.q.var(axis=0, ddof=ddof), reg.q.min(axis=0), reg.l.mean(axis=0)]
        header += ["q_mean", "q_var", "q_min", "l_mean"]
    return write_csv(header, cols)


# ---------------------------------------------------------------------------
# entry point


def _load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return RunConfig.loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 as well; keep the message on stderr
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="brownian-rays", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_eval = sub.add_parser("eval", help="evaluate a closed form along a grid")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--out")

    p_sim = sub.add_parser("simulate", help="simulate paths and summarise them")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out")
    p_sim.add_argument("--full-paths", action="store_true")
    p_sim.add_argument("--workers", type=int, default=1)

    p_ver = sub.add_parser("verify", help="run Monte Carlo verification suites")
    p_ver.add_argument("--suite", required=True)
    p_ver.add_argument("--paths", type=int, default=None)
    p_ver.add_argument("--seed", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "eval":
            cfg = _load_config(args.config)
            _emit(eval_to_csv(cfg), args.out or cfg.output)
            return 0
        if args.command == "simulate":
            cfg = _load_config(args.config)
            _emit(simulate_to_csv(cfg, args.full_paths, args.workers), args.out or cfg.output)
            return 0
        from . import verification

        if args.suite not in verification.SUITES:
            print(f"unknown suite {args.suite!r}; expected one of {sorted(verification.SUITES)}", file=sys.stderr)
            return 2
        seed = default_seed() if args.seed is None else args.seed
        source = "--seed" if args.seed is not None else (SEED_ENV if SEED_ENV in os.environ else "default")
        print(f"seed = {seed} ({source})")
        results = verification.run_suite(args.suite, paths=args.paths, seed=seed)
        for r in results:
            print(r.line())
        failed = [r for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
        return 1 if failed else 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

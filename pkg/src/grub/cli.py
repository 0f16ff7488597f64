"""Command-line front end.

    grub run --graph G.txt --means mu.txt --policy cyclic --runs 20 --out trace.csv
    grub influence --graph G.txt --rho 1
    grub complexity --graph G.txt --means mu.txt --delta 0.001 --format table
    grub gamma-check --graph D.txt --other H.txt

A JSON file given with ``--config`` may set any long flag (dashes become
underscores), plus ``graph_spec`` / ``mean_config`` in place of files.
Relative paths inside a config file are resolved against the file's
directory. Flags on the command line win over the config file.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import complexity as cx
from .engine import RunConfig
from .estimator import ConfidenceParams
from .graph import IncompatibleGraphsError, InvalidGraphError, SimilarityGraph, gamma_closeness, load_edge_list, smoothness
from .influence import influence_table
from .policy import PolicyKind
from .simgen import GraphSpec, generate_graph, generate_means, read_means, run_batch

EXIT_INVALID = 1
EXIT_IO = 2

DEFAULTS = {
    "policy": "cyclic",
    "rho": 1.0,
    "epsilon": None,
    "delta": 0.05,
    "sigma": 1.0,
    "zeta": None,
    "seed": 0,
    "runs": 1,
    "max_steps": None,
    "out": None,
    "format": "csv",
    "graph": None,
    "means": None,
    "other": None,
    "graph_spec": None,
    "mean_config": None,
}

STEP_HEADER = "run,step,pulled_arm,reward,active_count,eliminated"
SUMMARY_HEADER = "run,winner,total_pulls,terminated_by"


class ConfigError(ValueError):
    pass


class InputError(OSError):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.9g}"


@dataclass
class ExperimentConfig:
    graph: SimilarityGraph
    mu: np.ndarray | None
    rho: float
    epsilon: float | None
    delta: float
    sigma: float
    zeta: float | None
    policy: PolicyKind
    seed: int
    runs: int
    max_steps: int | None
    out: str | None
    fmt: str


def _read_config(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    base = Path(path).parent
    out = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}: unknown key {key!r}")
        if key in ("graph", "means", "other", "out") and value is not None:
            value = str(base / value)
        out[key] = value
    return out


def _merged(args) -> dict:
    values = dict(DEFAULTS)
    if getattr(args, "config", None):
        values.update(_read_config(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return values


def _load_graph(path) -> SimilarityGraph:
    try:
        return load_edge_list(path)
    except OSError as exc:
        raise InputError(f"cannot read graph {path}: {exc.strerror}") from exc
    except InvalidGraphError as exc:
        raise ConfigError(str(exc)) from exc


def _graph_from(values) -> SimilarityGraph:
    if (values["graph"] is None) == (values["graph_spec"] is None):
        raise ConfigError("give exactly one graph source: --graph or graph_spec")
    if values["graph"] is not None:
        return _load_graph(values["graph"])
    spec = dict(values["graph_spec"])
    seed = int(spec.pop("seed", 0))
    try:
        return generate_graph(GraphSpec(**spec), seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"graph_spec: {exc}") from exc


def _means_from(values, g: SimilarityGraph) -> np.ndarray:
    if (values["means"] is None) == (values["mean_config"] is None):
        raise ConfigError("give exactly one means source: --means or mean_config")
    if values["means"] is not None:
        try:
            mu = read_means(values["means"])
        except OSError as exc:
            raise InputError(f"cannot read means {values['means']}: {exc.strerror}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        mc = dict(values["mean_config"])
        try:
            mu = generate_means(
                g,
                float(mc.get("target_epsilon", 0.0)),
                mc["levels"],
                int(mc.get("seed", 0)),
                float(mc.get("spread", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"mean_config: {exc}") from exc
    if mu.size != g.n:
        raise ConfigError(f"means file has {mu.size} values but graph has {g.n} nodes")
    return mu


def _experiment(values, need_means=True) -> ExperimentConfig:
    g = _graph_from(values)
    mu = _means_from(values, g) if need_means else None
    try:
        rho = float(values["rho"])
        delta = float(values["delta"])
        sigma = float(values["sigma"])
        eps = None if values["epsilon"] is None else float(values["epsilon"])
        zeta = None if values["zeta"] is None else float(values["zeta"])
        runs = int(values["runs"])
        seed = int(values["seed"])
        max_steps = None if values["max_steps"] is None else int(values["max_steps"])
        policy = PolicyKind.parse(values["policy"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    problems = []
    if not rho > 0:
        problems.append("rho must be positive")
    if not 0 < delta < 1:
        problems.append("delta must lie in (0, 1)")
    if not sigma > 0:
        problems.append("sigma must be positive")
    if eps is not None and eps < 0:
        problems.append("epsilon must be nonnegative")
    if zeta is not None and zeta < 0:
        problems.append("zeta must be nonnegative")
    if runs < 1:
        problems.append("runs must be at least 1")
    if max_steps is not None and max_steps < g.n:
        problems.append(f"max-steps must be at least n={g.n}")
    if values["format"] not in ("csv", "table"):
        problems.append("format must be csv or table")
    if problems:
        raise ConfigError("; ".join(problems))
    return ExperimentConfig(g, mu, rho, eps, delta, sigma, zeta, policy, seed, runs, max_steps, values["out"], values["format"])


def _epsilon(cfg: ExperimentConfig) -> float:
    # default to the smoothness the means actually have on this graph
    if cfg.epsilon is not None:
        return cfg.epsilon
    return math.sqrt(smoothness(cfg.mu, cfg.graph.laplacian))


def _table(rows, header) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc.strerror}") from exc


def cmd_run(values) -> str:
    from .simgen import BanditInstance

    cfg = _experiment(values)
    eps = _epsilon(cfg)
    instance = BanditInstance.certified(cfg.mu, cfg.sigma, cfg.graph)
    params = ConfidenceParams(cfg.sigma, cfg.delta, eps, cfg.graph.n)
    config = RunConfig(params, cfg.rho, cfg.zeta, cfg.policy, cfg.max_steps, cfg.seed)
    batch = run_batch(instance, cfg.graph, config, cfg.runs)
    buf = io.StringIO()
    buf.write(STEP_HEADER + "\n")
    for r, trace in enumerate(batch.traces):
        for s in trace.steps:
            gone = ";".join(str(a) for a in s.eliminated)
            buf.write(f"{r},{s.step},{s.arm},{fmt(s.reward)},{s.active_count},{gone}\n")
    buf.write(SUMMARY_HEADER + "\n")
    for r, trace in enumerate(batch.traces):
        buf.write(f"{r},{trace.winner},{trace.total_pulls},{trace.terminated_by}\n")
    return buf.getvalue()


def cmd_influence(values) -> str:
    cfg = _experiment(values, need_means=False)
    g = cfg.graph
    table = influence_table(g, cfg.rho)
    comp = g.component_index()
    rows = [(j, int(comp[j]), len(g.components[comp[j]]), fmt(table[j])) for j in range(g.n)]
    header = ["node", "component", "component_size", "influence"]
    if cfg.fmt == "table":
        return _table(rows, header)
    return ",".join(header) + "\n" + "".join(",".join(map(str, r)) + "\n" for r in rows)


def cmd_complexity(values) -> str:
    cfg = _experiment(values)
    g = cfg.graph
    eps = _epsilon(cfg)
    table = influence_table(g, cfg.rho)
    split = cx.classify_arms(cfg.mu, g, table, cfg.rho, eps, cfg.delta, cfg.sigma)
    report = cx.sample_complexity(split, g, table, cfg.sigma, cfg.delta, cfg.rho, eps)
    zreport = None
    if cfg.zeta is not None and cfg.zeta > 0:
        zreport = cx.zeta_complexity(split, g, table, cfg.sigma, cfg.delta, cfg.rho, eps, cfg.zeta)
    comp = g.component_index()
    arm_rows = [
        (j, int(comp[j]), fmt(split.gaps[j]), fmt(table[j]), split.label(j), fmt(report.h_terms.get(j, 0.0)))
        for j in range(g.n)
    ]
    comp_rows = [
        (c, len(m), sum(1 for j in m if j in split.W), fmt(report.w_terms.get(c, 0.0)))
        for c, m in enumerate(g.components)
    ]
    totals = [("T", fmt(report.T)), ("k", g.k), ("H", len(split.H)), ("W", len(split.W)), ("N", len(split.N)), ("epsilon", fmt(eps))]
    if zreport is not None:
        totals.append(("T_zeta", fmt(zreport.T)))
    arm_header = ["arm", "component", "gap", "influence", "class", "h_term"]
    comp_header = ["component", "size", "weak", "w_term"]
    tot_header = ["quantity", "value"]
    if cfg.fmt == "table":
        return _table(arm_rows, arm_header) + "\n" + _table(comp_rows, comp_header) + "\n" + _table(totals, tot_header)
    parts = []
    for header, rows in ((arm_header, arm_rows), (comp_header, comp_rows), (tot_header, totals)):
        parts.append(",".join(header) + "\n" + "".join(",".join(map(str, r)) + "\n" for r in rows))
    return "\n".join(parts)


def cmd_gamma_check(values) -> str:
    if values["graph"] is None or values["other"] is None:
        raise ConfigError("gamma-check needs --graph and --other")
    D = _load_graph(values["graph"])
    H = _load_graph(values["other"])
    if D.n != H.n:
        raise ConfigError(f"graphs have different sizes ({D.n} vs {H.n})")
    try:
        gamma = fmt(gamma_closeness(D.laplacian, H.laplacian))
    except IncompatibleGraphsError:
        gamma = "incompatible"
    return f"quantity,value\ngamma,{gamma}\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grub", description="Best-arm identification with graph side information")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, means=True):
        p.add_argument("--config", help="JSON file with default flag values")
        p.add_argument("--graph", help="edge-list file ('n <N>' then 'u v w' lines)")
        if means:
            p.add_argument("--means", help="mean vector file, one value per line")
        p.add_argument("--rho", type=float, help="Laplacian regularization weight")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "table"])

    def bandit(p):
        p.add_argument("--epsilon", type=float, help="smoothness bound (default: certificate of the means)")
        p.add_argument("--delta", type=float, help="failure probability")
        p.add_argument("--sigma", type=float, help="sub-Gaussian noise scale")
        p.add_argument("--zeta", type=float, help="zeta-best tolerance; omit for exact best arm")

    p_run = sub.add_parser("run", help="simulate GRUB runs and write step traces")
    common(p_run)
    bandit(p_run)
    p_run.add_argument("--policy", choices=[k.value for k in PolicyKind], type=str.lower)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--runs", type=int)
    p_run.add_argument("--max-steps", dest="max_steps", type=int)
    p_run.set_defaults(handler=cmd_run)

    p_inf = sub.add_parser("influence", help="per-node minimum influence factors")
    common(p_inf, means=False)
    p_inf.set_defaults(handler=cmd_influence)

    p_cx = sub.add_parser("complexity", help="arm classes and sample-complexity bound")
    common(p_cx)
    bandit(p_cx)
    p_cx.set_defaults(handler=cmd_complexity)

    p_gc = sub.add_parser("gamma-check", help="gamma-closeness of two graphs")
    p_gc.add_argument("--config")
    p_gc.add_argument("--graph", help="reference graph D")
    p_gc.add_argument("--other", help="candidate graph H")
    p_gc.add_argument("--out")
    p_gc.set_defaults(handler=cmd_gamma_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        values = _merged(args)
        text = args.handler(values)
        _emit(text, values["out"])
    except InputError as exc:
        print(f"grub: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, cx.MultipleOptimaError, ValueError) as exc:
        print(f"grub: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return 0


if __name__ == "__main__":
    sys.exit(main())

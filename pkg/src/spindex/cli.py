"""Command-line interface.

Subcommands::

    spindex mean X Y ALPHA               scalar Stolarsky mean
    spindex index FILE --index LABEL ... indices of an edge-list graph
    spindex sweep   [options]            ensemble means over a parameter grid
    spindex scaling [options]            normalized means vs <d> for several n
    spindex check   [options]            run the verification suites

Exit codes: 0 success, 1 I/O or data error, 2 usage error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import analysis
from .ensemble import (
    EnsembleSpec,
    default_replicates,
    dense_prediction,
    log_degree_grid,
    run_ensemble,
    scaling_transform,
)
from .graph import GraphError, load_edge_list, parse_index
from .means import DomainError, ParameterError, stolarsky_mean
from .random_models import SQRT2, make_params

log = logging.getLogger("spindex")

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3

DEFAULT_SEED = 42
DEFAULT_INDICES = ("sp:-inf", "sp:lim0", "sp:lim1", "sp:+inf")
CHAINS = ("ineq", "ineq22", "ineq21av", "ineq3", "limits", "g_of_r")
IDLOG_ALPHAS = ("sp:-inf", "sp:-1", "sp:lim0", "sp:0.5", "sp:2", "sp:+inf")


class UsageError(Exception):
    pass


def fmt(v: float) -> str:
    """12 significant digits, locale independent."""
    return f"{v:.12g}"


# --- configuration ---------------------------------------------------------------


@dataclass
class RunConfig:
    """Settings shared by the ensemble subcommands.

    Serialized as ``key = value`` lines (``#`` comments allowed); list fields
    are comma separated. ``grid`` is either an explicit list ``0.1,0.2``,
    ``lin:START:STOP:COUNT``, ``log:START:STOP:COUNT`` or
    ``deg:DMIN:DMAX:COUNT`` (parameters whose analytic mean degree is
    log-spaced between DMIN and DMAX). ``replicates = 0`` means ceil(1e7/n).
    """

    command: str = "sweep"
    model: str = "er"
    sizes: list[int] = field(default_factory=lambda: [125])
    grid: str = "lin:0.05:1:20"
    replicates: int = 0
    seed: int = DEFAULT_SEED
    indices: list[str] = field(default_factory=lambda: list(DEFAULT_INDICES))
    output: str = "-"
    format: str = "csv"
    workers: int = 0
    chains: list[str] = field(default_factory=lambda: list(CHAINS))
    threshold: float = 10.0

    _LISTS = {"sizes": int, "indices": str, "chains": str}

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = ",".join(str(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        types = {f.name: f.type for f in fields(cls)}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line {lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise UsageError(f"config line {lineno}: unknown key {key!r}")
            setattr(cfg, key, cfg._coerce(key, val))
        cfg.validate()
        return cfg

    def _coerce(self, key: str, val: str):
        if key in self._LISTS:
            conv = self._LISTS[key]
            return [conv(v.strip()) for v in val.split(",") if v.strip()]
        current = getattr(type(self)(), key)
        try:
            return type(current)(val)
        except ValueError:
            raise UsageError(f"bad value for {key}: {val!r}") from None

    def validate(self) -> None:
        if self.model not in ("er", "rg"):
            raise UsageError(f"model must be er or rg, got {self.model!r}")
        if not self.sizes or min(self.sizes) < 2:
            raise UsageError("sizes must be integers >= 2")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.replicates < 0 or self.replicates == 1:
            raise UsageError("replicates must be 0 (default) or >= 2")
        for lab in self.indices:
            try:
                parse_index(lab)
            except ParameterError as exc:
                raise UsageError(str(exc)) from None
        bad = [c for c in self.chains if c not in CHAINS]
        if bad:
            raise UsageError(f"unknown chains {bad}; choose from {CHAINS}")
        parse_grid(self.grid, self.model, self.sizes[0])

    def replicates_for(self, n: int) -> int:
        return self.replicates or default_replicates(n)


def parse_grid(spec: str, model: str, n: int) -> tuple[float, ...]:
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    try:
        if head in ("lin", "log", "deg"):
            a, b, k = rest.split(":")
            a, b, k = float(a), float(b), int(k)
            if k < 1:
                raise ValueError("count must be positive")
            if head == "lin":
                vals = np.linspace(a, b, k)
            elif head == "log":
                vals = np.geomspace(a, b, k)
            else:
                return log_degree_grid(model, n, a, b, k)
            grid = tuple(float(v) for v in vals)
        else:
            grid = tuple(float(v) for v in spec.split(",") if v.strip())
    except ValueError as exc:
        raise UsageError(f"bad grid spec {spec!r}: {exc}") from None
    if not grid:
        raise UsageError("empty grid")
    try:
        for v in grid:
            make_params(model, n, v)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return grid


# --- output helpers ------------------------------------------------------------------


def _open_out(path: str):
    if path == "-":
        return _StdoutBox()
    return open(path, "w", newline="", encoding="ascii")


class _StdoutBox:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()
        return False


def _write_rows(cfg: RunConfig, header: list[str], rows: list[list], extra=None) -> None:
    with _open_out(cfg.output) as fh:
        if cfg.format == "json":
            doc = {"config": asdict(cfg), "rows": [dict(zip(header, r)) for r in rows]}
            if extra:
                doc.update(extra)
            json.dump(doc, fh, indent=1, allow_nan=True)
            fh.write("\n")
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([fmt(v) if isinstance(v, float) else v for v in r])


def _workers(cfg: RunConfig) -> int:
    return cfg.workers or os.cpu_count() or 1


# --- subcommands ----------------------------------------------------------------------


def cmd_mean(args) -> int:
    try:
        v = stolarsky_mean(float(args.x), float(args.y), args.alpha)
    except (ParameterError, DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    print(f"{v:#.12g}")
    return EXIT_OK


def cmd_index(args) -> int:
    labels = args.index or ["sp:-1", "sp:lim0", "sp:lim1", "sp:2", "m1", "rr"]
    try:
        kinds = [parse_index(lab) for lab in labels]
    except ParameterError as exc:
        raise UsageError(str(exc)) from None
    with open(args.path, encoding="ascii") as fh:
        g = load_edge_list(fh)
    print("index,value")
    for k in kinds:
        print(f"{k.label},{k.evaluate(g):#.12g}")
    return EXIT_OK


SWEEP_HEADER = ["model", "n", "param", "mean_degree", "index", "mean", "std_err",
                "replicates", "seed", "prediction"]
SCALING_HEADER = ["model", "n", "mean_degree", "index", "normalized_mean", "prediction"]


def _run(cfg: RunConfig, n: int, indices=None):
    spec = EnsembleSpec(
        cfg.model, n, parse_grid(cfg.grid, cfg.model, n),
        tuple(indices or cfg.indices), cfg.replicates_for(n), cfg.seed,
    )
    return spec, run_ensemble(spec, workers=_workers(cfg))


def cmd_sweep(cfg: RunConfig) -> int:
    rows = []
    for n in cfg.sizes:
        spec, stats = _run(cfg, n)
        for s in stats:
            pred = dense_prediction(make_params(cfg.model, n, s.param))
            for k in spec.indices:
                st = s.stats[k.label]
                rows.append([cfg.model, n, s.param, s.mean_degree, k.label, st.mean,
                             st.std_err, s.replicates, cfg.seed, pred])
    _write_rows(cfg, SWEEP_HEADER, rows)
    return EXIT_OK


def cmd_scaling(cfg: RunConfig) -> int:
    rows = []
    curves: dict[str, dict[int, list]] = {}
    for n in cfg.sizes:
        spec, stats = _run(cfg, n)
        for k in spec.indices:
            pts = scaling_transform(stats, n, k)
            curves.setdefault(k.label, {})[n] = pts
            for p in pts:
                rows.append([cfg.model, n, p.mean_degree, k.label, p.normalized_mean, p.prediction])
    extra = None
    if len(cfg.sizes) >= 2:
        extra = {"collapse": [analysis.collapse_metric(c, lab, cfg.threshold).to_dict()
                              for lab, c in curves.items()]}
        for rep in extra["collapse"]:
            log.info("collapse %s: max deviation %.4g, max cross-n spread %.4g",
                     rep["index"], rep["max_deviation"], rep["max_spread"])
    _write_rows(cfg, SCALING_HEADER, rows, extra)
    return EXIT_OK


def _graph_sample(seed: int, count: int = 1000):
    """Random ER and RG graphs for the per-graph chain check."""
    from .random_models import ErParams, RgParams, SeededStream, generate

    rng = np.random.default_rng(seed)
    for j in range(count):
        n = int(rng.integers(2, 201))
        if j % 2 == 0:
            params = ErParams(n, float(rng.choice([0.05, 0.2, 0.8])))
        else:
            params = RgParams(n, float(rng.uniform(0.05, 0.6)))
        yield params, generate(params, SeededStream(seed, j))


def run_checks(cfg: RunConfig, inject_fault: bool = False) -> dict:
    """Run the selected verification suites; returns a JSON-ready report."""
    out: dict = {"passed": True, "suites": {}}

    def record(name, passed, **payload):
        out["suites"][name] = {"passed": bool(passed), **payload}
        out["passed"] &= bool(passed)

    chains = cfg.chains
    if "ineq" in chains:
        logmean = None
        if inject_fault:
            from .means import LIM0, stolarsky_values
            logmean = lambda x, y: stolarsky_values(x, y, LIM0) * (1 + 1e-3)  # noqa: E731
        bad = analysis.scalar_chain_grid(1000, logmean)
        record("ineq", not bad, pairs=499500, violations=[r.to_dict() for r in bad[:50]])
    if "ineq22" in chains:
        bad = []
        for params, g in _graph_sample(cfg.seed):
            rep = analysis.check_graph_chain(g, model=params.model, n=params.n, param=params.param)
            if not rep.holds:
                bad.append(rep.to_dict())
        record("ineq22", not bad, graphs=1000, violations=bad[:50])
    if "ineq21av" in chains or "ineq3" in chains:
        labels = sorted(set(analysis.AVERAGE_CHAIN) | {analysis.SP_LIM1} | set(IDLOG_ALPHAS))
        for n in cfg.sizes:
            _, stats = _run(cfg, n, labels)
            if "ineq21av" in chains:
                reps = analysis.check_average_chain(stats)
                record(f"ineq21av[{cfg.model},n={n}]", all(r.holds for r in reps),
                       rows=[r.to_dict() for r in reps])
            if "ineq3" in chains:
                reps = analysis.check_idlog_bound(stats, IDLOG_ALPHAS)
                record(f"ineq3[{cfg.model},n={n}]", all(r.holds for r in reps),
                       rows=[r.to_dict() for r in reps])
    if "limits" in chains:
        rep = analysis.limit_consistency_suite(1000)
        record("limits", rep.passed, checked=rep.checked, failures=rep.failures)
    if "g_of_r" in chains:
        exact = analysis.g_of_r_analytic_checks()
        rows = analysis.g_of_r_oracle(seed=cfg.seed)
        ok = all(v <= 1e-12 for v in exact.values()) and all(r.ok for r in rows)
        record("g_of_r", ok, analytic=exact,
               oracle=[{**asdict(r), "z": r.z, "ok": r.ok} for r in rows])
    return out


def cmd_check(cfg: RunConfig, inject_fault: bool = False) -> int:
    report = run_checks(cfg, inject_fault)
    text = json.dumps(report, indent=1, default=float)
    if cfg.output == "-":
        print(text)
    else:
        with open(cfg.output, "w", encoding="ascii", newline="") as fh:
            fh.write(text + "\n")
    for name, suite in report["suites"].items():
        log.info("%-28s %s", name, "PASS" if suite["passed"] else "FAIL")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


# --- argument parsing ---------------------------------------------------------------


def _add_run_options(p: argparse.ArgumentParser, command: str) -> None:
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--model", choices=("er", "rg"))
    p.add_argument("--n", type=int, action="append", dest="sizes",
                   help="network size (repeat for several sizes)")
    p.add_argument("--grid", help="0.1,0.2 | lin:A:B:K | log:A:B:K | deg:DMIN:DMAX:K")
    p.add_argument("--replicates", type=int, help="graphs per grid point (default ceil(1e7/n))")
    p.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--workers", type=int, help="worker processes (default: all CPUs)")
    p.add_argument("--output", "-o", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"))
    if command == "scaling":
        p.add_argument("--threshold", type=float, help="collapse threshold on <d> (default 10)")
    if command == "check":
        p.add_argument("--chain", action="append", dest="chains", choices=CHAINS)
        p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    else:
        p.add_argument("--index", action="append", dest="indices",
                       help="index label, e.g. sp:-inf, sp:lim0, mso:1, m1, rr, ka:0.5:2")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spindex", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mean", help="Stolarsky mean of two positive numbers")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("alpha", help="exponent: number, lim0, lim1, +inf, or -inf (after --)")

    p = sub.add_parser("index", help="indices of a graph in edge-list format")
    p.add_argument("path")
    p.add_argument("--index", action="append")

    for name in ("sweep", "scaling", "check"):
        _add_run_options(sub.add_parser(name), name)
    return ap


def config_from_args(args) -> RunConfig:
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            cfg = RunConfig.from_text(fh.read())
    else:
        cfg = RunConfig()
    cfg.command = args.command
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name != "command":
            setattr(cfg, f.name, v)
    if cfg.command == "check" and not getattr(args, "config", None):
        # Desk-scale defaults for the average chains.
        if args.grid is None:
            cfg.grid = "lin:0.05:1:20" if cfg.model == "er" else f"lin:0.05:{SQRT2!r}:20"
        if args.replicates is None:
            cfg.replicates = 200
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        if args.command == "mean":
            return cmd_mean(args)
        if args.command == "index":
            return cmd_index(args)
        cfg = config_from_args(args)
        if cfg.command == "sweep":
            return cmd_sweep(cfg)
        if cfg.command == "scaling":
            return cmd_scaling(cfg)
        return cmd_check(cfg, inject_fault=args.inject_fault)
    except UsageError as exc:
        print(f"spindex: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphError, UnicodeDecodeError) as exc:
        print(f"spindex: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

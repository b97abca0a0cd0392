"""Command-line interface: ``tnest {refine,sample,measure,compare,verify}``.

Exit codes: 0 success, 1 usage error, 2 input or data error, 3 property
failure.  Every file written embeds the run configuration and the tool
version, except sampled edge lists which hold the graph only (their
configuration is in ``stats.json``).  Output is byte-identical for
identical configurations; timings go to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, checks, experiments, measures
from .graph import GraphError, format_edge_list, read_edge_list
from .refinement import refine_active
from .sampler import METHODS, SamplingError

logger = logging.getLogger("tnest")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PROPERTY = 0, 1, 2, 3
OUTPUT_ENV = "TNEST_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    directed: bool = True
    method: str | None = None
    depth: str | None = None
    rewirings: int | None = None
    samples: int | None = None
    seed: int = 0
    alpha: float = measures.DEFAULT_ALPHA
    beta: float = measures.DEFAULT_BETA
    sae_floor: float = measures.SAE_FLOOR
    out: str = "."
    format: str = "csv"
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        return {"version": __version__, **asdict(self)}

    @property
    def params(self):
        return measures.CentralityParams(self.alpha, self.beta, self.sae_floor)


# -- output helpers -----------------------------------------------------------

def _fmt(x):
    """Shortest round-trip text for numbers; empty for undefined values."""
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _write_json(path, obj):
    text = json.dumps(_finite(obj), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n")


def _write_csv(path, cfg, header, rows):
    lines = [f"# tnest {__version__}",
             "# config: " + json.dumps(cfg.as_dict(), sort_keys=True),
             ",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _out_dir(cfg):
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load(cfg):
    return read_edge_list(cfg.input, cfg.directed)


# -- commands -----------------------------------------------------------------

def cmd_refine(cfg):
    g = _load(cfg)
    depth = experiments.parse_depth(cfg.depth)
    t0 = time.perf_counter()
    a = refine_active(g, depth, seed=cfg.seed)
    elapsed = time.perf_counter() - t0
    out = _out_dir(cfg)
    labels = g.labels
    stamps = g.timestamps
    rows = [(v, labels[v], int(stamps[t]), c) for v, t, c in
            zip(a.nodes.tolist(), a.times.tolist(), a.colors.tolist())]
    summary = {"config": cfg.as_dict(), "depth": a.depth, "converged": a.converged,
               "class_count_history": list(a.class_count_history),
               "n_classes": a.n_classes, "n_active": len(rows)}
    if cfg.format == "json":
        summary["colors"] = [{"node": n, "label": lab, "time": t, "color": c}
                             for n, lab, t, c in rows]
    else:
        _write_csv(out / "colors.csv", cfg, ("node", "label", "time", "color"), rows)
    _write_json(out / "refine_summary.json", summary)
    print(f"depth {a.depth} ({'stable' if a.converged else 'not converged'}); "
          f"classes per round {list(a.class_count_history)}")
    print(f"refined {len(rows)} active temporal nodes in {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_sample(cfg):
    g = _load(cfg)
    depth = None if cfg.depth is None else experiments.parse_depth(cfg.depth)
    if cfg.samples == 0:
        return EXIT_OK
    out = _out_dir(cfg)
    records = []
    width = max(3, len(str(cfg.samples - 1)))
    for k, sk, sg, stats in experiments.draw_samples(g, cfg.method, depth, cfg.samples,
                                                     cfg.seed, cfg.rewirings):
        name = f"sample_{k:0{width}d}.txt"
        (out / name).write_text(format_edge_list(sg, cfg.extra.get("collapse", False)))
        records.append({"index": k, "seed": sk, "file": name, "stats": stats})
    _write_json(out / "stats.json", {"config": cfg.as_dict(), "samples": records,
                                     "seed_derivation": "SeedSequence([seed, k])"})
    print(f"wrote {cfg.samples} samples to {out}")
    return EXIT_OK


def _report(g, cfg):
    return measures.measure_report(g, cfg.params)


def cmd_measure(cfg):
    g = _load(cfg)
    rep = _report(g, cfg)
    out = _out_dir(cfg)
    if cfg.format == "json":
        _write_json(out / "measures.json", {"config": cfg.as_dict(), "report": rep.to_dict()})
    else:
        scalars = [("persistence", rep.persistence),
                   ("triangles", rep.triangles_per_tnode),
                   ("causal_triangles", rep.causal_triangles_per_tnode)]
        scalars += [(f"burstiness_{k}", v) for k, v in rep.burstiness.items()]
        _write_csv(out / "measures.csv", cfg, ("measure", "value"), scalars)
        _write_csv(out / "centrality.csv", cfg, ("node", "katz", "communicability"),
                   zip(g.labels, rep.katz, rep.communicability))
    return EXIT_OK


def _rounded(x, digits=3):
    return "-" if x is None else f"{x:.{digits}g}"


def cmd_compare(cfg):
    out = _out_dir(cfg)
    extra = cfg.extra
    if extra["depth_sweep"]:
        if cfg.input:
            graphs = [_load(cfg)]
        else:
            graphs = experiments.sweep_graphs(extra["graphs"], extra["nodes"], extra["times"],
                                              extra["density"], cfg.directed, cfg.seed)
        depths = extra["depths"]
        if depths is not None:
            depths = [experiments.parse_depth(d) for d in depths.split(",")]
        rows = experiments.depth_sweep(graphs, depths, cfg.samples, cfg.seed, cfg.params,
                                       cfg.rewirings)
        keys = ("depth", "katz_sae_mean", "katz_sae_std", "communicability_sae_mean",
                "communicability_sae_std", "n")
        if cfg.format == "json":
            _write_json(out / "sae_depth.json", {"config": cfg.as_dict(), "rows": rows})
        else:
            _write_csv(out / "sae_depth.csv", cfg, keys, [[r[k] for k in keys] for r in rows])
        for r in rows:
            print(f"depth {r['depth']:>4}: katz SAE {_rounded(r['katz_sae_mean'])}  "
                  f"communicability SAE {_rounded(r['communicability_sae_mean'])}")
        return EXIT_OK

    g = _load(cfg)
    methods = [m.strip() for m in extra["methods"].split(",") if m.strip()]
    res = experiments.compare_methods(g, methods, cfg.samples, cfg.seed, cfg.params,
                                      cfg.rewirings)
    labels = list(res["methods"])
    if cfg.format == "json":
        _write_json(out / "compare.json", {"config": cfg.as_dict(), **res})
    else:
        header = ["measure", "origin"]
        for lab in labels:
            header += [f"{lab}_mean", f"{lab}_std"]
        rows = []
        for name in res["measures"]:
            row = [name, res["origin"][name]]
            for lab in labels:
                row += list(res["methods"][lab][name])
            rows.append(row)
        _write_csv(out / "compare.csv", cfg, header, rows)
    if extra["rounded"]:
        print("measure".ljust(22) + "origin".rjust(10) + "".join(lab.rjust(18) for lab in labels))
        for name in res["measures"]:
            cells = [f"{_rounded(m)}({_rounded(s, 1)})" if m is not None else "-"
                     for m, s in (res["methods"][lab][name] for lab in labels)]
            print(name.ljust(22) + _rounded(res["origin"][name]).rjust(10)
                  + "".join(c.rjust(18) for c in cells))
    return EXIT_OK


def cmd_verify(cfg):
    only = cfg.extra.get("only")
    only = set(only.split(",")) if only else None
    if only and not only <= set(checks.FULL):
        raise UsageError(f"unknown checks: {sorted(only - set(checks.FULL))}; "
                         f"choose from {', '.join(checks.FULL)}")
    failed = 0
    for res in checks.run_suite(quick=cfg.extra["quick"], seed=cfg.extra["seed_given"],
                                only=only):
        print(res.line(), flush=True)
        failed += not res.passed
    print(f"{failed} of {len(only or checks.FULL)} properties failed" if failed
          else "all properties passed")
    return EXIT_PROPERTY if failed else EXIT_OK


COMMANDS = {"refine": cmd_refine, "sample": cmd_sample, "measure": cmd_measure,
            "compare": cmd_compare, "verify": cmd_verify}


# -- argument parsing ---------------------------------------------------------

def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _depth_arg(text):
    try:
        experiments.parse_depth(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer or 'inf', got {text!r}")
    return text


def build_parser():
    p = _Parser(prog="tnest", description="Temporal color refinement and t-NeSt sampling.")
    p.add_argument("--version", action="version", version=f"tnest {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, needs_input=True, measures_opts=False):
        if needs_input:
            sp.add_argument("input", help="edge list with one 'u v t' contact per line")
        dirgroup = sp.add_mutually_exclusive_group()
        dirgroup.add_argument("--directed", dest="directed", action="store_true", default=True)
        dirgroup.add_argument("--undirected", dest="directed", action="store_false")
        sp.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        sp.add_argument("--out", default=None,
                        help=f"output directory (default ${OUTPUT_ENV} or the current directory)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if measures_opts:
            sp.add_argument("--alpha", type=float, default=measures.DEFAULT_ALPHA)
            sp.add_argument("--beta", type=float, default=measures.DEFAULT_BETA)
            sp.add_argument("--sae-floor", type=float, default=measures.SAE_FLOOR)

    sp = sub.add_parser("refine", help="temporal color refinement of the active nodes")
    common(sp)
    sp.add_argument("--depth", type=_depth_arg, default="inf",
                    help="rounds to run, or 'inf' for the stable coloring")

    sp = sub.add_parser("sample", help="draw null-model samples")
    common(sp)
    sp.add_argument("--method", choices=METHODS, default="tnest")
    sp.add_argument("--depth", type=_depth_arg, default="1",
                    help="t-NeSt depth d (integer or 'inf')")
    sp.add_argument("--rewirings", type=_nonneg_int, default=None,
                    help="attempts per slice (total for re); default 20 per edge record")
    sp.add_argument("--samples", type=_nonneg_int, default=1)
    sp.add_argument("--collapse-undirected", action="store_true",
                    help="write each undirected contact once instead of in both directions")

    sp = sub.add_parser("measure", help="evaluate all measures on a graph")
    common(sp, measures_opts=True)

    sp = sub.add_parser("compare", help="measure table across null models, or SAE vs depth")
    common(sp, needs_input=False, measures_opts=True)
    sp.add_argument("input", nargs="?", default=None,
                    help="edge list (optional with --depth-sweep: random graphs are used)")
    sp.add_argument("--methods", default=",".join(experiments.DEFAULT_METHODS),
                    help="comma-separated methods, e.g. tnest:inf,tnest:1,dss,re,rt,rc")
    sp.add_argument("--samples", type=_nonneg_int, default=10)
    sp.add_argument("--rewirings", type=_nonneg_int, default=None)
    sp.add_argument("--rounded", action="store_true",
                    help="also print a rounded table to stdout")
    sp.add_argument("--depth-sweep", action="store_true",
                    help="write t-NeSt(d) centrality SAE against depth")
    sp.add_argument("--depths", default=None, help="comma-separated depths for the sweep")
    sp.add_argument("--graphs", type=_nonneg_int, default=3)
    sp.add_argument("--nodes", type=_nonneg_int, default=80)
    sp.add_argument("--times", type=_nonneg_int, default=240)
    sp.add_argument("--density", type=float, default=50.0,
                    help="contact probability is density / (nodes * times)")

    sp = sub.add_parser("verify", help="run the oracle property suite")
    sp.add_argument("--quick", action="store_true", help="smaller instances")
    sp.add_argument("--seed", type=int, default=None, help="reseed every check")
    sp.add_argument("--only", default=None, help=f"comma list from: {', '.join(checks.FULL)}")
    return p


def _config(ns):
    env_out = os.environ.get(OUTPUT_ENV) or "."
    cfg = RunConfig(command=ns.command,
                    input=getattr(ns, "input", None),
                    directed=getattr(ns, "directed", True),
                    seed=ns.seed if ns.seed is not None else 0,
                    out=getattr(ns, "out", None) or env_out,
                    format=getattr(ns, "format", "csv"))
    for name in ("method", "depth", "rewirings", "samples", "alpha", "beta", "sae_floor"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if ns.command == "compare":
        cfg.extra = {k: getattr(ns, k) for k in ("methods", "rounded", "depth_sweep", "depths",
                                                 "graphs", "nodes", "times", "density")}
        if not ns.depth_sweep and ns.input is None:
            raise UsageError("compare: an input file is required unless --depth-sweep is given")
        if ns.depth_sweep:
            cfg.method = "tnest"
        else:
            for m in ns.methods.split(","):
                experiments.parse_method(m)
    elif ns.command == "verify":
        cfg.extra = {"quick": ns.quick, "only": ns.only, "seed_given": ns.seed}
    elif ns.command == "sample":
        cfg.extra = {"collapse": ns.collapse_undirected}
        if ns.method != "tnest":
            cfg.depth = "0" if ns.method == "dss" else None
    return cfg


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = _config(ns)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"tnest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help and --version
        return exc.code or 0
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphError, SamplingError, measures.SingularSliceError) as exc:
        print(f"tnest: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

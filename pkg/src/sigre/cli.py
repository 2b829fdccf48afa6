"""Command-line experiment runner.

Every subcommand reads a path (``--path file.json`` in the ``[t, x1, ..., xm]``
record format, or ``--generator NAME``), runs one part of the pipeline and
writes JSON (or CSV for ``reconstruct``) to stdout. A JSON config file given
with ``--config`` supplies defaults; explicit flags override it. The seed
comes from ``--seed``, then the config, then the ``SIGRE_SEED`` environment
variable, then 0.

Errors are reported as a JSON object ``{"error": ..., "message": ...}`` on
stderr with exit status 2; ``demo`` exits with status 1 when one of its
checks fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from . import generators
from .degree_select import DEFAULT_DELTAS, prop61_check, projection_stabilized_degree
from .geometry import CubeScheme, extract_route, label_to_z
from .lifted_path import LiftedPath
from .path_model import (PiecewiseLinearPath, load_path_json, p_variation, path_to_records)
from .reconstruct import (build_scheme_stack, naive_reconstruct, reconstruct_polygonal)
from .signature_core import path_signature
from .tensor_algebra import words

__all__ = ["ExperimentConfig", "main", "dumps", "load_config"]

CSV_COLUMNS = "eps, D, delta_1..delta_D, L, sup_error, bound, within_bound, d_metric, max_step"


class CLIError(Exception):
    pass


@dataclass
class ExperimentConfig:
    """Options shared by all subcommands; fields mirror the long flags."""

    path: str | None = None
    generator: str | None = None
    eps_list: list = field(default_factory=lambda: [0.25, 0.125, 0.0625])
    deltas: list = field(default_factory=lambda: list(DEFAULT_DELTAS))
    n_max: int = 6
    lift: int = 0
    chords: int = 2
    tol: float = 1e-9
    samples: int = 500
    out: str | None = None
    jobs: int = 1
    seed: int | None = None

    def validate(self) -> None:
        if any(not (0 < e < 1) for e in self.eps_list):
            raise CLIError("eps values must lie in (0, 1)")
        if any(not (0 < d < 0.25) for d in self.deltas):
            raise CLIError("deltas must lie in (0, 1/4)")
        for name in ("n_max", "chords", "samples", "jobs"):
            if getattr(self, name) < 1:
                raise CLIError(f"{name} must be positive")
        if self.tol <= 0:
            raise CLIError("tol must be positive")
        if self.lift < 0:
            raise CLIError("lift must be non-negative")


def load_config(fname: str | None) -> ExperimentConfig:
    if fname is None:
        return ExperimentConfig()
    with open(fname) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise CLIError("config must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise CLIError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**raw)


# ---------------------------------------------------------------------------
# output


def _fmt(v: float) -> str:
    if not math.isfinite(v):
        return json.dumps(str(v))
    return format(v, ".17g")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj) -> str:
    """JSON with every float written at 17 significant digits."""
    def enc(o):
        if isinstance(o, dict):
            return "{" + ", ".join(f"{json.dumps(k)}: {enc(v)}" for k, v in o.items()) + "}"
        if isinstance(o, list):
            return "[" + ", ".join(enc(v) for v in o) + "]"
        if isinstance(o, float):
            return _fmt(o)
        return json.dumps(o)
    return enc(_plain(obj))


def _write_atomic(fname: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(fname))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, fname)


# ---------------------------------------------------------------------------
# path sources


def _seed(cfg: ExperimentConfig) -> int:
    if cfg.seed is not None:
        return int(cfg.seed)
    env = os.environ.get("SIGRE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CLIError(f"SIGRE_SEED must be an integer, got {env!r}") from None
    return 0


def _load_path(cfg: ExperimentConfig) -> PiecewiseLinearPath:
    if cfg.path and cfg.generator:
        raise CLIError("give either --path or --generator, not both")
    if cfg.path:
        return load_path_json(cfg.path)
    name = cfg.generator or "l-path"
    if name == "random":
        return generators.random_pl_path(np.random.default_rng(_seed(cfg)))
    if name not in generators.NAMED_PATHS:
        raise CLIError(f"unknown generator {name!r}; choose from "
                       f"{sorted(generators.NAMED_PATHS) + ['random']}")
    return generators.NAMED_PATHS[name]()


def _ambient(x: PiecewiseLinearPath, lift: int, chords: int):
    """Curve used for schemes, reference curve and origin."""
    if lift == 0:
        return x, x, x.points[0]
    y = LiftedPath(x, lift)
    if lift == 1:
        pl = y.as_pl()
        return pl, pl, pl.points[0]
    return y.curve.chordal(chords), y.curve, y.curve(0.0)


# ---------------------------------------------------------------------------
# subcommands


def cmd_signature(cfg, args) -> int:
    x = _load_path(cfg)
    res = path_signature(x, args.degree)
    flat = res.tensor.flat()
    coeffs = [{"word": list(w), "value": float(v)} for w, v in zip(words(x.dim, args.degree), flat)]
    print(dumps({"d": x.dim, "N": args.degree, "omega": res.omega,
                 "group_like": res.is_group_like(cfg.tol), "coefficients": coeffs}))
    return 0


def _route_alternatives(route, scheme_dim: int) -> list:
    labs = list(route.labels)
    out = []
    if len(labs) >= 3:
        sw = labs.copy()
        sw[1], sw[2] = sw[2], sw[1]
        out.append(tuple(sw))
    far = tuple(k + 20 if i == 1 else k for i, k in enumerate(labs[-1]))
    out.append(tuple(labs[:2]) + (far,))
    if len(labs) >= 2:
        out.append(tuple(labs) + (labs[-2],))
    return out


def cmd_route(cfg, args) -> int:
    x = _load_path(cfg)
    lift = cfg.lift if not args.verify else max(cfg.lift, 1)
    curve, _, origin = _ambient(x, lift, cfg.chords)
    if lift >= 2:
        curve = LiftedPath(x, lift).curve
    delta = args.delta if args.delta is not None else args.eps / 4
    if not 0 < delta < args.eps:
        raise CLIError("need 0 < delta < eps")
    scheme = CubeScheme(args.eps, delta, curve.dim, origin)
    route = extract_route(curve, scheme)
    out = {"eps": args.eps, "delta": delta, "D": curve.dim, **route.to_json()}
    if args.verify:
        from .one_forms import RouteVerifier

        ver = RouteVerifier(LiftedPath(x, lift), scheme, route, seed=_seed(cfg), tol=cfg.tol)
        cands = [route.labels] + _route_alternatives(route, curve.dim)
        table = []
        for c, v in zip(cands, ver.verdicts(cands)):
            table.append({"candidate": [list(label_to_z(l)) for l in c], "chi": v.chi,
                          "witness": v.witness, "magnitude": v.magnitude})
        out["verdicts"] = table
    print(dumps(out))
    return 0


def cmd_stable_delta(cfg, args) -> int:
    x = _load_path(cfg)
    curve, _, origin = _ambient(x, cfg.lift, cfg.chords)
    stack = build_scheme_stack(curve, args.eps, origin, certificate=True)
    rows = [{"level": s.level, "delta": s.delta, "s_value": s.s_value, "supremum": s.supremum,
             "thresholds": list(s.thresholds)} for s in stack.selections]
    print(dumps({"eps": args.eps, "D": stack.D, "levels": rows, "disjoint": stack.disjoint.ok}))
    return 0


def _reconstruct_job(job):
    x, eps, lift, chords, samples = job
    curve, ref, origin = _ambient(x, lift, chords)
    res = reconstruct_polygonal(curve, eps, origin, reference=ref, samples=samples)
    return res


def cmd_reconstruct(cfg, args) -> int:
    x = _load_path(cfg)
    jobs = [(x, e, cfg.lift, cfg.chords, cfg.samples) for e in cfg.eps_list]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_reconstruct_job, jobs))
    else:
        results = [_reconstruct_job(j) for j in jobs]
    D = results[0].D
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "D"] + [f"delta_{i + 1}" for i in range(D)]
               + ["L", "sup_error", "bound", "within_bound", "d_metric", "max_step"])
    for r in results:
        w.writerow([_fmt(r.eps), r.D] + [_fmt(d) for d in r.deltas]
                   + [r.L, _fmt(r.sup_error), _fmt(r.bound), int(r.within_bound), _fmt(r.d_metric),
                      _fmt(r.max_step())])
        if cfg.out:
            tag = format(r.eps, ".17g")
            _write_atomic(os.path.join(cfg.out, f"route_eps{tag}.json"), dumps(r.route.to_json()) + "\n")
            _write_atomic(os.path.join(cfg.out, f"polygon_eps{tag}.json"),
                          dumps(path_to_records(r.polygon)) + "\n")
    sys.stdout.write(buf.getvalue())
    if cfg.out:
        _write_atomic(os.path.join(cfg.out, "reconstruct.csv"), buf.getvalue())
    return 0 if all(r.within_bound for r in results) else 1


def cmd_degree_select(cfg, args) -> int:
    x = _load_path(cfg)
    sel = projection_stabilized_degree(x, tuple(cfg.deltas), N_max=cfg.n_max)
    out = sel.to_json()
    out["prop61_check"] = prop61_check(x, sel.N_g)
    print(dumps(out))
    return 0


def cmd_pvar(cfg, args) -> int:
    x = _load_path(cfg)
    r = p_variation(x, args.p, args.samples)
    print(dumps({"p": r.p, "value": r.value, "partition": list(r.partition)}))
    return 0


def _demo_2_1(args) -> dict:
    theta0, spike = 0.2, 1e-3
    x, y = generators.example_2_1(theta0, spike, n=1024)
    target = 2 * math.sin(theta0 / 2)
    px = p_variation(x, 1.5, 2000).value
    py = p_variation(y, 1.5, 2000).value
    gx, gy = path_signature(x, 4).tensor, path_signature(y, 4).tensor
    sig_gap = float(np.abs(gx.flat() - gy.flat()).max())
    checks = {"pvar_x": abs(px - target) <= 1e-3, "pvar_y": abs(py - target) <= 1e-3,
              "same_signature": sig_gap <= 1e-12}
    return {"demo": "example-2-1", "p": 1.5, "theta0": theta0, "spike": spike, "target": target,
            "pvar_x": px, "pvar_y": py, "signature_gap": sig_gap, "checks": checks}


def _demo_3_1(args) -> dict:
    x, eps = generators.example_3_1(args.n)
    naive = naive_reconstruct(x, eps, eps / 8)
    full = reconstruct_polygonal(x, eps)
    collapsed = all(label_to_z(l)[1] == 0 for l in naive.route.labels)
    checks = {"naive_collapse": collapsed, "naive_error_ge_half": naive.sup_error >= 0.5,
              "pipeline_within_bound": full.within_bound}
    return {"demo": "example-3-1", "n": args.n, "eps": eps,
            "naive": {"route": naive.route.to_json()["labels"], "sup_error": naive.sup_error},
            "pipeline": {"deltas": list(full.deltas), "route": full.route.to_json()["labels"],
                         "sup_error": full.sup_error, "bound": full.bound},
            "checks": checks}


def cmd_demo(cfg, args) -> int:
    out = _demo_2_1(args) if args.name == "example-2-1" else _demo_3_1(args)
    out["ok"] = all(out["checks"].values())
    print(dumps(out))
    return 0 if out["ok"] else 1


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its fields")
    common.add_argument("--path", help="path JSON: array of [t, x1, ..., xm] records")
    common.add_argument("--generator", help="named path: " + ", ".join(sorted(generators.NAMED_PATHS))
                        + ", random")
    common.add_argument("--seed", type=int, help="seed (fallback: SIGRE_SEED, then 0)")
    common.add_argument("--tol", type=float)
    common.add_argument("--lift", type=int, help="lift to the degree-N signature path first (0: none)")
    common.add_argument("--chords", type=int, help="chords per segment for lifts of degree >= 2")

    p = _Parser(prog="sigre", description="Signature-based path reconstruction experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("signature", parents=[common], help="signature coefficient table")
    s.add_argument("--degree", type=int, default=3)

    s = sub.add_parser("route", parents=[common], help="discrete route through top-level cubes")
    s.add_argument("--eps", type=float, default=0.25)
    s.add_argument("--delta", type=float)
    s.add_argument("--verify", action="store_true", help="evaluate route indicators on candidates")

    s = sub.add_parser("stable-delta", parents=[common], help="per-level tunnel widths")
    s.add_argument("--eps", type=float, default=0.25)

    s = sub.add_parser("reconstruct", parents=[common], help="polygonal reconstruction table",
                       description=f"CSV columns: {CSV_COLUMNS}. Exit status 1 if a bound fails.")
    s.add_argument("--eps-list", help="comma-separated scales, e.g. 0.25,0.125")
    s.add_argument("--samples", type=int)
    s.add_argument("--out", help="directory for route/polygon JSON dumps and the CSV")
    s.add_argument("--jobs", type=int)

    s = sub.add_parser("degree-select", parents=[common], help="projection-stabilised degree N(g)")
    s.add_argument("--n-max", type=int)
    s.add_argument("--deltas", help="comma-separated delta grid")

    s = sub.add_parser("pvar", parents=[common], help="p-variation by dynamic programming")
    s.add_argument("--p", type=float, default=1.0)
    s.add_argument("--samples", type=int, default=2000)

    s = sub.add_parser("demo", parents=[common], help="reproduce the two counterexamples")
    s.add_argument("name", choices=["example-2-1", "example-3-1"])
    s.add_argument("--n", type=int, default=3)
    return p


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CLIError(f"not a comma-separated list of numbers: {text!r}") from None


def _merge(cfg: ExperimentConfig, args) -> ExperimentConfig:
    for name in ("path", "generator", "seed", "tol", "lift", "chords", "out", "jobs"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "n_max", None) is not None:
        cfg.n_max = args.n_max
    if getattr(args, "eps_list", None):
        cfg.eps_list = _floats(args.eps_list)
    if getattr(args, "deltas", None):
        cfg.deltas = _floats(args.deltas)
    if args.command == "reconstruct" and args.samples is not None:
        cfg.samples = args.samples
    return cfg


_HANDLERS = {
    "signature": cmd_signature,
    "route": cmd_route,
    "stable-delta": cmd_stable_delta,
    "reconstruct": cmd_reconstruct,
    "degree-select": cmd_degree_select,
    "pvar": cmd_pvar,
    "demo": cmd_demo,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _merge(load_config(args.config), args)
        cfg.validate()
        return _HANDLERS[args.command](cfg, args)
    except (CLIError, ValueError, OSError, RuntimeError, NotImplementedError, TypeError) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""``snr-lab`` command line.

Exit codes: 0 success, 1 usage or configuration error, 2 a reported check failed.
Every report is JSON with top-level keys ``manifest``, ``results`` and ``pass``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import scipy

from .algebra import AlgebraSpec, PreconditionError, SpecificationError, parse_complex
from .duality import norming_functionals
from .engine import PointCloud, estimate_snr, numerical_radius, radius_bound_holds
from .geometry import Region, convexity_defect, hull_hausdorff, region_from_json, region_sample
from .hunt import HuntConfig, hunt_nonconvex
from .oracles import compatible_ps, lp_pointwise_oracle, table_algebra, table_oracle
from .sampling import SphereSampler
from . import witnesses as wt

VERSION = "0.1.0"
SOUND_TOL = 1e-6
HAUSDORFF_TOL = 0.05
CONVEXITY_TOL = 0.02


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# parsing helpers


def parse_element(text: str) -> np.ndarray:
    try:
        return np.array([parse_complex(part) for part in text.split(",")], dtype=complex)
    except ValueError as exc:
        raise UsageError(f"bad element {text!r}: {exc}") from exc


def parse_p(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"bad exponent {text!r}") from exc


def parse_rows(text: str) -> list[int]:
    """``"1..35"``, ``"1,4,7..9"``."""
    rows: list[int] = []
    try:
        for part in text.split(","):
            if ".." in part:
                lo, hi = part.split("..")
                rows.extend(range(int(lo), int(hi) + 1))
            else:
                rows.append(int(part))
    except ValueError as exc:
        raise UsageError(f"bad row list {text!r}") from exc
    return rows


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _algebra(args) -> AlgebraSpec:
    if args.algebra and args.table_row:
        raise UsageError("give either --algebra or --table-row, not both")
    if args.algebra:
        data = load_json(args.algebra)
        if not isinstance(data, dict):
            raise UsageError(f"{args.algebra}: expected a JSON object")
        return AlgebraSpec.from_json(data)
    if args.table_row:
        return table_algebra(args.table_row, parse_p(args.p))
    raise UsageError("need --algebra FILE or --table-row R --p P")


def _cj(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------------------
# manifest and report


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest(args, outputs: Sequence[Path]) -> dict[str, Any]:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("handler", "json")}
    return {
        "subcommand": args.command,
        "config": config,
        "seed": args.seed,
        "versions": {
            "snrlab": VERSION,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "outputs": {str(p): _digest(p) for p in outputs if p.is_file()},
    }


def _emit(args, results: list, passed: bool, outputs: Sequence[Path] = (), report_path: str | None = None) -> int:
    report = {"manifest": _manifest(args, outputs), "results": results, "pass": bool(passed)}
    text = json.dumps(report, indent=2, sort_keys=True, default=_jsonable)
    if report_path:
        Path(report_path).parent.mkdir(parents=True, exist_ok=True)
        Path(report_path).write_text(text + "\n")
    if args.json or not report_path:
        print(text)
    return 0 if passed else 2


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    raise TypeError(f"not serializable: {type(v).__name__}")


def _clean(obj):
    """Replace infinities so that output stays strict JSON."""
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


# ---------------------------------------------------------------------------
# subcommands


def cmd_estimate(args) -> int:
    A = _algebra(args)
    a = parse_element(args.element)
    sampler = SphereSampler(args.strategy, args.seed)
    cloud = estimate_snr(A, a, args.samples, args.k, sampler, fill_levels=args.fill_levels, threads=args.threads)
    outputs = []
    if args.out:
        cloud.save(args.out)
        outputs.append(Path(args.out))
    if args.dump_functionals:
        X = sampler.sample(A.norm, min(args.samples, 16))
        dump = [
            {"x": [_cj(v) for v in x], "functionals": [[_cj(v) for v in h] for h in norming_functionals(A.norm, x, args.k).samples()]}
            for x in X
        ]
        Path(args.dump_functionals).write_text(json.dumps(dump, sort_keys=True))
        outputs.append(Path(args.dump_functionals))
    radius = numerical_radius(cloud)
    ok = radius_bound_holds(cloud, A.norm(a))
    result = {
        "points": len(cloud),
        "numerical_radius": radius,
        "element_norm": A.norm(a),
        "radius_bound": ok,
        "meta": cloud.meta,
    }
    return _emit(args, [result], ok, outputs, args.report)


def _oracle_region(args) -> Region:
    a = parse_element(args.element)
    if args.table_row:
        if len(a) != 2:
            raise UsageError("table rows need a two-coordinate element")
        return table_oracle(args.table_row, parse_p(args.p), a)
    if args.algebra:
        return lp_pointwise_oracle(a, _algebra(args))
    raise UsageError("need --table-row R --p P or a pointwise --algebra FILE")


def cmd_oracle(args) -> int:
    region = _oracle_region(args)
    doc = region.to_json()
    outputs = []
    if args.out:
        Path(args.out).write_text(json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n")
        outputs.append(Path(args.out))
    return _emit(args, [{"region": _clean(doc)}], True, outputs, args.report)


def compare_cloud(points: np.ndarray, region: Region, density: int, tol: float, hausdorff_tol: float) -> dict[str, Any]:
    if len(points) == 0:
        raise SpecificationError("cloud is empty")
    dist = region.distance(points)
    samples = region_sample(region, density)
    hh = hull_hausdorff(points, samples)
    worst = int(np.argmax(dist))
    sound = bool(dist[worst] <= tol)
    return {
        "max_outside_distance": float(dist[worst]),
        "worst_point": _cj(points[worst]),
        "outside_count": int(np.sum(dist > tol)),
        "sound": sound,
        "hull_hausdorff": hh,
        "complete": bool(hh <= hausdorff_tol),
        "pass": bool(sound and hh <= hausdorff_tol),
    }


def cmd_compare(args) -> int:
    try:
        cloud = PointCloud.load(args.cloud)
    except OSError as exc:
        raise UsageError(f"cannot read {args.cloud}: {exc.strerror}") from exc
    region = region_from_json(load_json(args.region))
    result = compare_cloud(cloud.points, region, args.density, args.tol, args.hausdorff)
    return _emit(args, [result], result["pass"], [], args.report or args.out)


def table_sweep(rows, ps, a, samples, k, seed, density=200, probes=4000, threads=None) -> list[dict[str, Any]]:
    results = []
    for row in rows:
        for p in compatible_ps(row, ps):
            A = table_algebra(row, p)
            region = table_oracle(row, p, a)
            cloud = estimate_snr(A, a, samples, k, SphereSampler(seed=seed), threads=threads)
            cmp = compare_cloud(cloud.points, region, density, SOUND_TOL, HAUSDORFF_TOL)
            defect = convexity_defect(region_sample(region, density), probes, seed)
            radius_ok = radius_bound_holds(cloud, A.norm(a))
            results.append(
                {
                    "row": row,
                    "p": "inf" if math.isinf(p) else p,
                    "points": len(cloud),
                    **{k_: v for k_, v in cmp.items() if k_ != "pass"},
                    "oracle_convexity_defect": defect,
                    "oracle_convex": bool(defect <= CONVEXITY_TOL),
                    "radius_bound": radius_ok,
                    "pass": bool(cmp["pass"] and defect <= CONVEXITY_TOL and radius_ok),
                }
            )
    return results


def cmd_table(args) -> int:
    rows = parse_rows(args.rows)
    ps = [parse_p(t) for t in args.p.split(",")]
    a = parse_element(args.element)
    if len(a) != 2:
        raise UsageError("table rows need a two-coordinate element")
    results = table_sweep(rows, ps, a, args.samples, args.k, args.seed, args.density, threads=args.threads)
    return _emit(args, results, all(r["pass"] for r in results), [], args.report or args.out)


def _value(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return parse_complex(v)
    return complex(v)


def _pieces(cfg) -> wt.StepFunction:
    try:
        return wt.StepFunction.from_pieces([(float(lo), float(hi), float(v)) for lo, hi, v in cfg["pieces"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecificationError(f"field 'pieces': {exc}") from exc


DEFAULT_CASES = {
    "semigroup": {"semigroup": "naturals", "size": 40, "f": {"2": 1, "3": 1}, "t": 1},
    "volterra-discrete": {"f": {"1/4": 1, "1/2": 1}},
    "l1-line": {"pieces": [[1, 2, 1]], "a": 1},
    "volterra-l1": {"pieces": [[0.3, 0.5, 1]], "delta": 0.3},
}


def witness_case(case: str, cfg: dict[str, Any], angles: int, rings: int) -> tuple[list[dict], bool]:
    """Run one witness over a polar grid of targets; returns per-target results and pass."""
    quad = cfg.get("quad", "exact")
    tol = 1e-9 if quad == "exact" else 1e-6
    if case == "semigroup":
        kinds = {"naturals": wt.DiscreteSemigroup.naturals, "nonnegative": wt.DiscreteSemigroup.nonnegative, "right_zero": wt.DiscreteSemigroup.right_zero}
        try:
            S = kinds[cfg.get("semigroup", "naturals")](int(cfg.get("size", 40)))
            f = {int(s): _value(v) for s, v in cfg["f"].items()}
            weights = {int(s): float(v) for s, v in cfg.get("weights", {}).items()}
            t = int(cfg["t"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecificationError(f"semigroup case config: {exc!r}") from exc
        radius = wt.l1_norm(f, weights)
        run = lambda z: wt.semigroup_witness(S, weights, f, t, z, cfg.get("require_unit_weight", True))  # noqa: E731
        closed = True
    elif case == "volterra-discrete":
        try:
            f = {Fraction(s): _value(v) for s, v in cfg["f"].items()}
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SpecificationError(f"volterra-discrete case config: {exc!r}") from exc
        radius = sum(abs(v) for v in f.values())
        run = lambda z: wt.volterra_discrete_witness(f, z)  # noqa: E731
        closed = False
    elif case == "l1-line":
        f = _pieces(cfg)
        radius = 1.0
        run = lambda z: wt.l1_line_witness(f, z, cfg.get("a"), quad)  # noqa: E731
        closed = True
    elif case == "volterra-l1":
        f = _pieces(cfg)
        radius = 1.0
        run = lambda z: wt.volterra_l1_witness(f, z, cfg.get("delta"), quad)  # noqa: E731
        closed = True
    else:
        raise UsageError(f"unknown witness case {case!r}")
    targets = np.concatenate([[0j], wt.polar_grid(radius, angles, rings, closed)])
    out, ok = [], True
    for z in targets:
        w = run(z)
        passed = w.error <= tol * max(1.0, abs(w.target)) and w.functional_ok
        ok &= passed
        out.append({"z": _cj(z), **w.to_json(), "pass": bool(passed)})
    return out, bool(ok)


def _grid_shape(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError as exc:
        raise UsageError(f"bad --z-grid {text!r}, expected e.g. 16x8") from exc


def cmd_witness(args) -> int:
    cfg = load_json(args.config) if args.config else DEFAULT_CASES.get(args.case, {})
    if not isinstance(cfg, dict):
        raise UsageError("witness config must be a JSON object")
    angles, rings = _grid_shape(args.z_grid)
    results, ok = witness_case(args.case, cfg, angles, rings)
    return _emit(args, results, ok, [], args.report or args.out)


def cmd_hunt(args) -> int:
    data = load_json(args.config) if args.config else {}
    if not isinstance(data, dict):
        raise UsageError("hunt config must be a JSON object")
    config = HuntConfig.from_json(data)
    if args.seed_given:
        config.seed = args.seed
    if args.threads:
        config.threads = args.threads
    result = hunt_nonconvex(config)
    outputs: list[Path] = []
    results = []
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for rank, rep in enumerate(result.reports):
        doc = rep.to_json()
        if out:
            cloud_path = out / f"survivor_{rank:03d}_cloud.csv"
            rep.cloud.to_csv(cloud_path)
            doc["cloud_file"] = cloud_path.name
            path = out / f"survivor_{rank:03d}.json"
            path.write_text(json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n")
            outputs += [cloud_path, path]
        results.append(doc)
    summary = {
        "config": config.to_json(),
        "candidates": result.candidates,
        "associative": result.associative,
        "survivors": len(result.reports),
        "artifacts_rejected": result.artifacts,
        "defect_histogram": result.histogram(),
    }
    if out:
        path = out / "summary.json"
        path.write_text(json.dumps(_clean(summary), indent=2, sort_keys=True) + "\n")
        outputs.append(path)
    # survivors are findings, not failures
    return _emit(args, _clean([summary] + results), True, outputs, str(out / "report.json") if out else None)


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, algebra: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true", help="also print the report to stdout")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--report")
    if algebra:
        p.add_argument("--algebra")
        p.add_argument("--table-row", type=int)
        p.add_argument("--p", default="1")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="snr-lab", description="Spatial numerical range laboratory.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("estimate", help="sample the range of an element")
    _common(p)
    p.add_argument("--element", required=True)
    p.add_argument("--samples", type=int, default=50_000)
    p.add_argument("--k", type=int, default=64)
    p.add_argument("--strategy", default="mixed", choices=["mixed", "gaussian", "structured"])
    p.add_argument("--fill-levels", type=int, default=0)
    p.add_argument("--dump-functionals")
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("oracle", help="emit the exact region")
    _common(p)
    p.add_argument("--element", required=True)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("compare", help="check a cloud against a region")
    _common(p, algebra=False)
    p.add_argument("--cloud", required=True)
    p.add_argument("--region", required=True)
    p.add_argument("--density", type=int, default=200)
    p.add_argument("--tol", type=float, default=SOUND_TOL)
    p.add_argument("--hausdorff", type=float, default=HAUSDORFF_TOL)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("table", help="sweep table rows against their oracles")
    _common(p)
    p.add_argument("--rows", default="1..35")
    p.add_argument("--element", default="1+1i,2")
    p.add_argument("--samples", type=int, default=50_000)
    p.add_argument("--k", type=int, default=64)
    p.add_argument("--density", type=int, default=200)
    p.set_defaults(handler=cmd_table, p="1,2,inf")

    p = sub.add_parser("witness", help="re-run an explicit witness construction")
    _common(p)
    p.add_argument("--case", required=True, choices=sorted(DEFAULT_CASES))
    p.add_argument("--config")
    p.add_argument("--z-grid", default="16x8")
    p.set_defaults(handler=cmd_witness)

    p = sub.add_parser("hunt", help="search for a non-convex range")
    _common(p)
    p.add_argument("--config")
    p.set_defaults(handler=cmd_hunt)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        args.seed_given = "--seed" in argv or any(a.startswith("--seed=") for a in argv)
        return args.handler(args)
    except UsageError as exc:
        print(f"snr-lab: error: {exc}", file=sys.stderr)
        return 1
    except (SpecificationError, PreconditionError) as exc:
        print(f"snr-lab: error: {exc}", file=sys.stderr)
        return 1


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

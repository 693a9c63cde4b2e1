"""Command-line front end.

Every command reads a TOML problem description, writes a JSON report (to
--out, or to stdout when --out is omitted), and prints a short text summary
(to stderr when the JSON goes to stdout).  Reports embed the field
characteristic, the truncation bound, the seed where sampling is involved,
and the tool version, so reruns are byte-for-byte reproducible.

Exit codes: 0 success, 1 computation error (structured error JSON), 2 input
error.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .algebra import AlgebraError, NotAModuleError, WindowExhaustedError
from .graded import GradedDims
from .mcmtools import (
    bounds_ledger,
    classify_rigid,
    find_gap_and_split,
    module_stats,
    sum_point_source,
)
from .mfgen import MFError, ade_algebra, ade_catalog, catalog_modules, sample_mf_modules
from .problem import Problem, ProblemError, dump_problem_toml, parse_problem
from .repscheme import generate_equations
from .resolve import default_ext_window, dualize, ext1_window
from .tangent import OffVarietyError, four_term_report

COMPUTE_ERRORS = (
    AlgebraError,
    MFError,
    NotAModuleError,
    OffVarietyError,
    WindowExhaustedError,
    ValueError,
    AssertionError,
)


def _report(problem: Problem | None, command: str, payload: dict, seed=None, p=None, D=None) -> dict:
    return {
        "tool": "mcmrep",
        "version": __version__,
        "command": command,
        "field": problem.p if problem else p,
        "truncation": problem.algebra.D if problem else D,
        "isolated_singularity": problem.algebra.isolated_singularity if problem else None,
        "seed": seed,
        "payload": payload,
    }


def _emit(args, report: dict, summary_lines: list[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        for line in summary_lines:
            print(line)
        print(f"report written to {args.out}")
    else:
        for line in summary_lines:
            print(line, file=sys.stderr)
        print(text)


def cmd_equations(args) -> int:
    prob = parse_problem(args.problem)
    V = prob.framing(args.framing)
    E = generate_equations(prob.algebra, V)
    payload = E.to_json_dict()
    payload["framing"] = args.framing
    summary = [
        f"equation system for framing {args.framing!r}:",
        f"  coordinates: {E.space.total_dim}",
        f"  equations:   {E.num_equations()}"
        + (
            f" ({sum(1 for q in E.equations if q.label.startswith('W'))} linear relation equations)"
            if any(q.label.startswith("W") for q in E.equations)
            else ""
        ),
    ]
    _emit(args, _report(prob, "equations", payload), summary)
    return 0


def cmd_tangent(args) -> int:
    prob = parse_problem(args.problem)
    M = prob.module(args.module)
    E = generate_equations(prob.algebra, M.V)
    rep = four_term_report(E, M, with_resolution_crosscheck=args.crosscheck)
    payload = rep.to_json_dict()
    summary = [
        f"tangent report at {args.module!r}:",
        f"  (end_A_0, end_R_0, tangent, ext1_0) = "
        f"({rep.dim_end_A_0}, {rep.dim_end_R_0}, {rep.dim_tangent}, "
        f"{rep.dim_ext1_0_via_sequence})",
        f"  rigid in degree 0: {rep.rigid_degree_zero}; "
        f"exactness verified: {rep.exactness_verified}",
    ]
    if args.crosscheck:
        summary.append(f"  resolution cross-check: {rep.dim_ext1_0_via_resolution}")
    _emit(args, _report(prob, "tangent", payload), summary)
    return 0


def _parse_window(spec: str) -> tuple[int, int]:
    lo, _, hi = spec.partition(":")
    try:
        window = (int(lo), int(hi))
    except ValueError as exc:
        raise ProblemError(f"window must be LO:HI, got {spec!r}") from exc
    if window[0] > window[1]:
        raise ProblemError(f"empty window {spec!r}")
    return window


def cmd_ext(args) -> int:
    prob = parse_problem(args.problem)
    M = prob.module(args.source)
    N = prob.module(args.target)
    window = _parse_window(args.window) if args.window else default_ext_window(M, N)
    w = ext1_window(M, N, window)
    payload = w.to_json_dict()
    support = w.support()
    summary = [
        f"Ext^1({args.source}, {args.target}) on window [{w.lo},{w.hi}]:",
        f"  nonzero degrees: {support if support else 'none'}",
        f"  dims: {w.dims}",
    ]
    _emit(args, _report(prob, "ext", payload), summary)
    return 0


def cmd_stats(args) -> int:
    prob = parse_problem(args.problem)
    M = prob.module(args.module)
    st = module_stats(M)
    payload = {"module": args.module, **st.to_json_dict()}
    summary = [
        f"stats for {args.module!r}: g_min={st.g_min} g_max={st.g_max} "
        f"width={st.width} rank={st.rank}",
        f"  hilbert series: {st.hilbert}",
    ]
    if prob.algebra.commutative:
        std = module_stats(dualize(M))
        payload["dual"] = std.to_json_dict()
        summary.append(
            f"  dual: g_min={std.g_min} g_max={std.g_max} (duality: "
            f"g_max(dual) = -g_min)"
        )
    _emit(args, _report(prob, "stats", payload), summary)
    return 0


def cmd_split(args) -> int:
    prob = parse_problem(args.problem)
    M = prob.module(args.module)
    result = find_gap_and_split(M)
    if result is None:
        payload = {"module": args.module, "gap_found": False}
        summary = [f"no degree gap of length alpha={prob.algebra.alpha} in {args.module!r}"]
    else:
        payload = {"module": args.module, "gap_found": True, **result.to_json_dict()}
        summary = [
            f"gap at position {result.gap_position}: "
            f"submodule type {dict(result.submodule.V.dims)}, "
            f"quotient type {dict(result.quotient.V.dims)}",
            f"  ext obstruction in degree 0: {result.ext_obstruction_dim}; "
            f"splitting {'found and verified' if result.split_verified else 'not found'}",
        ]
    _emit(args, _report(prob, "split", payload), summary)
    return 0


def _classify_points(prob: Problem, V: GradedDims, samples: int, rng):
    points = sum_point_source(list(prob.modules.values()), V, rng)
    if prob.qctx is not None:
        mf_pts = sample_mf_modules(prob.algebra, prob.qctx, rng, samples)
        points.extend(m for m in mf_pts if m.V == V)
    return points


def cmd_classify(args) -> int:
    prob = parse_problem(args.problem)
    V = prob.framing(args.framing)
    rng = np.random.default_rng(args.seed)
    points = _classify_points(prob, V, args.samples, rng)
    classes = classify_rigid(prob.algebra, V, points, rng=rng)
    payload = {
        "framing": args.framing,
        "points_examined": len(points),
        "classes": [
            {
                "name": c.representative.name,
                "count_seen": c.count_seen,
                "rigid_degree_zero": c.rigid_degree_zero,
                "rigid_all_window": c.rigid_all_window,
                "indecomposable": c.indecomposable,
                "field_caveats": c.field_caveats,
                "stats": module_stats(c.representative).to_json_dict(),
                "action": _action_json(c.representative),
            }
            for c in classes
        ],
    }
    summary = [
        f"classify on framing {args.framing!r}: {len(classes)} rigid classes "
        f"from {len(points)} sampled points (seed {args.seed})",
    ]
    for c in classes:
        summary.append(
            f"  - {c.representative.name or '<unnamed>'}: seen {c.count_seen}x, "
            f"indecomposable={c.indecomposable}, rigid_all={c.rigid_all_window}"
        )
    _emit(args, _report(prob, "classify", payload, seed=args.seed), summary)
    return 0


def _action_json(M) -> dict:
    from .polys import poly_str

    out = {}
    for i in sorted(M.actions):
        out[str(i + 1)] = [
            [poly_str(f, M.algebra.ring) for f in row] for row in M.actions[i]
        ]
    return out


def cmd_bounds(args) -> int:
    prob = parse_problem(args.problem)
    rng = np.random.default_rng(args.seed)
    modules = [M for M in prob.modules.values() if M.V.rank() <= args.max_rank]
    if prob.qctx is not None and args.samples:
        extra = sample_mf_modules(prob.algebra, prob.qctx, rng, args.samples)
        modules.extend(m for m in extra if m.V.rank() <= args.max_rank)
    ledger = bounds_ledger(prob.algebra, modules, args.max_rank)
    payload = {"modules_used": len(modules), **ledger.to_json_dict()}
    summary = [
        f"bounds over {len(modules)} modules up to rank {args.max_rank} "
        f"(alpha = {ledger.alpha}):",
        f"  delta (simple width bounds): {ledger.delta}",
        f"  beta_hat (empirical):        "
        f"{ {f'{a},{b}': v for (a, b), v in ledger.beta_hat.items()} }",
        f"  alpha_r_hat (empirical):     {ledger.alpha_r_hat}",
    ]
    _emit(args, _report(prob, "bounds", payload, seed=args.seed), summary)
    return 0


def cmd_ade(args) -> int:
    name = args.name.upper()
    n = args.n
    p = args.prime
    A, qctx = ade_algebra(name, n, p)
    mods = catalog_modules(name, n, A, qctx)
    framings: dict[str, GradedDims] = {}
    named = {}
    for M in mods:
        fr_name = None
        for known, V in framings.items():
            if V == M.V:
                fr_name = known
                break
        if fr_name is None:
            fr_name = f"type{len(framings)}"
            framings[fr_name] = M.V
        safe = (M.name or f"mod{len(named)}").replace(".", "_").replace("-", "_").replace("+", "p")
        named[safe] = M
    label = f"{name}{n}" if name in ("A", "D") else name
    text = dump_problem_toml(
        p,
        A,
        framings,
        named,
        qctx=qctx,
        header=f"{label} curve catalog (generated by mcmrep {__version__})",
    )
    with open(args.emit, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"catalog for {label} over F_{p}: {len(named)} modules, written to {args.emit}")
    catalog_size = len(ade_catalog(name, n, p))
    print(f"  ({catalog_size} raw factorizations deduplicated to {len(named)} classes)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mcmrep",
        description="exact computations on representation spaces of graded "
        "maximal Cohen-Macaulay modules",
    )
    ap.add_argument("--version", action="version", version=f"mcmrep {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("problem", help="path to a TOML problem file")
        sp.add_argument("--out", help="write the JSON report to this path")

    sp = sub.add_parser("equations", help="dump the defining equation system")
    common(sp)
    sp.add_argument("--framing", required=True)
    sp.set_defaults(fn=cmd_equations)

    sp = sub.add_parser("tangent", help="four-term tangent report at a module")
    common(sp)
    sp.add_argument("--module", required=True)
    sp.add_argument("--crosscheck", action="store_true",
                    help="also compute Ext^1 from a truncated resolution")
    sp.set_defaults(fn=cmd_tangent)

    sp = sub.add_parser("ext", help="graded Ext^1 window between two modules")
    common(sp)
    sp.add_argument("--source", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--window", help="LO:HI (default: the finite-support band)")
    sp.set_defaults(fn=cmd_ext)

    sp = sub.add_parser("stats", help="generator statistics of a module")
    common(sp)
    sp.add_argument("--module", required=True)
    sp.set_defaults(fn=cmd_stats)

    sp = sub.add_parser("split", help="degree-gap splitting of a module")
    common(sp)
    sp.add_argument("--module", required=True)
    sp.set_defaults(fn=cmd_split)

    sp = sub.add_parser("classify", help="rigid isomorphism classes for a framing")
    common(sp)
    sp.add_argument("--framing", required=True)
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("bounds", help="width-bound tables and extension-gap estimates")
    common(sp)
    sp.add_argument("--max-rank", type=int, required=True, dest="max_rank")
    sp.add_argument("--samples", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_bounds)

    sp = sub.add_parser("ade", help="emit an ADE curve catalog as a problem file")
    sp.add_argument("name", help="A, D, E6, E7, or E8")
    sp.add_argument("n", type=int, nargs="?", default=0)
    sp.add_argument("--emit", required=True, help="output problem file path")
    sp.add_argument("--prime", type=int, default=32003)
    sp.set_defaults(fn=cmd_ade)

    return ap


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    # join "--window -5:5" so argparse does not read the value as a flag
    argv = list(argv)
    for k in range(len(argv) - 1):
        if argv[k] == "--window" and argv[k + 1].startswith("-"):
            argv[k] = f"--window={argv.pop(k + 1)}"
            break
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ProblemError as exc:
        print(json.dumps({"error": str(exc), "type": "input"}), file=sys.stderr)
        return 2
    except COMPUTE_ERRORS as exc:
        print(
            json.dumps({"error": str(exc), "type": type(exc).__name__}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end.

Exit codes: 0 ok, 2 usage error, 3 validation failure, 4 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, designs, frames, planner, recovery

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_COMPUTE = 0, 2, 3, 4

_ERROR_MODULES = {
    designs.DesignError: "designs",
    frames.FrameError: "frames",
    analysis.AnalysisError: "analysis",
    planner.PlanError: "planner",
    recovery.RecoveryError: "recovery",
}
# input problems rather than failures of a computation
_INPUT_CODES = {"MALFORMED", "OUT_OF_RANGE", "DUPLICATE_POINT", "INVALID_DESIGN"}


class Failure(Exception):
    def __init__(self, exit_code: int, diagnostics: list[str], payload=None):
        super().__init__("; ".join(diagnostics))
        self.exit_code = exit_code
        self.diagnostics = diagnostics
        self.payload = payload


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}") from None


def _make_design(args) -> designs.Design:
    fam = args.family
    if fam in ("sts", "search") and args.v is None:
        raise Failure(EXIT_USAGE, [f"--family {fam} needs --v"])
    if fam in ("pg2", "ag2") and args.q is None:
        raise Failure(EXIT_USAGE, [f"--family {fam} needs --q"])
    if fam == "sts":
        return designs.gen_sts_bose(args.v)
    if fam == "pg2":
        return designs.gen_projective_plane(args.q)
    if fam == "ag2":
        return designs.gen_affine_plane(args.q)
    if not args.k_set:
        raise Failure(EXIT_USAGE, ["--family search needs --k-set"])
    found = designs.gen_pbd_exact_cover(args.v, args.k_set, args.force_block or ())
    if found is None:
        raise Failure(EXIT_COMPUTE, ["designs.NOT_FOUND: exact-cover search exhausted"],
                      {"result": "NOT_FOUND"})
    return found


def _design_payload(design: designs.Design) -> dict:
    rep = designs.validate(design)
    return {
        "v": design.v,
        "kind": design.kind,
        "valid": rep.ok,
        "violations": [list(p) for p in rep.violations],
        "stats": designs.stats(design).to_json(),
    }


def _build_frame(design, construction, hadamard, mub_e, normalize):
    if construction == "con0":
        fr = frames.build_con0(design, hadamard)
    elif construction == "con1":
        fr = frames.build_con1(design, hadamard)
    else:
        fr = frames.build_mub_extended(design, mub_e)
    if normalize is not None:
        fr = frames.normalize_rows(fr, normalize)
    return fr


def _analysis_payload(fr, design=None) -> dict:
    out = {"report": analysis.analyze(fr).to_json(), "tag": fr.tag}
    if design is not None and fr.tag in (frames.CON0, frames.CON1) and design.kind == designs.PBD:
        out["bounds"] = analysis.theoretical_bounds(design, fr.tag).to_json()
    return out


def cmd_designs_gen(args) -> dict:
    design = _make_design(args)
    designs.write_design(design, args.output)
    return {"path": str(args.output), **_design_payload(design)}


def cmd_designs_validate(args) -> dict:
    design = designs.read_design(args.path)
    payload = _design_payload(design)
    if not payload["valid"]:
        raise Failure(EXIT_INVALID, ["designs.INVALID: pair coverage condition fails"], payload)
    return payload


def cmd_frame_build(args) -> dict:
    design = designs.read_design(args.design)
    fr = _build_frame(design, args.construction, args.hadamard, args.mub_e, args.normalize)
    frames.write_frame(fr, args.output)
    return {"path": str(args.output), "n": fr.n, "N": fr.N, "tag": fr.tag}


def cmd_frame_analyze(args) -> dict:
    fr = frames.read_frame(args.path)
    design = designs.read_design(args.design) if args.design else None
    return _analysis_payload(fr, design)


def cmd_plan(args) -> dict:
    if args.k is not None:
        res = planner.plan_integer(args.n, args.k)
    else:
        res = planner.plan_rational(args.n, args.h)
    if res is None:
        return {"result": "NOT_FOUND", "n": args.n}
    return {"result": "FOUND", **res.to_json()}


def _recover(fr, args) -> dict:
    stats = recovery.run_trials(fr, args.sparsity, args.trials, args.seed, args.solver,
                                args.success_tol)
    if args.csv:
        Path(args.csv).write_text("\n".join(stats.csv_rows()) + "\n")
    return stats.to_json()


def cmd_recover(args) -> dict:
    return _recover(frames.read_frame(args.frame), args)


def cmd_pipeline(args) -> dict:
    design = _make_design(args)
    fr = _build_frame(design, args.construction, args.hadamard, args.mub_e, args.normalize)
    return {
        "design": _design_payload(design),
        "frame": {"n": fr.n, "N": fr.N, "tag": fr.tag},
        "analysis": _analysis_payload(fr, design),
        "recovery": _recover(fr, args),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbdcs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def family_flags(p):
        p.add_argument("--family", choices=["sts", "pg2", "ag2", "search"], required=True)
        p.add_argument("--v", type=int)
        p.add_argument("--q", type=int)
        p.add_argument("--k-set", type=_int_list, help="block sizes for --family search, e.g. 3,5")
        p.add_argument("--force-block", type=_int_list, action="append",
                       help="block to force into the search (repeatable)")

    def frame_flags(p):
        p.add_argument("--construction", choices=["con0", "con1", "mub"], required=True)
        p.add_argument("--hadamard", choices=list(frames.HADAMARD_POLICIES), default="dft")
        p.add_argument("--mub-e", type=int, default=1)
        p.add_argument("--normalize", type=float, metavar="C")

    def recover_flags(p):
        p.add_argument("--sparsity", type=int, required=True)
        p.add_argument("--trials", type=int, required=True)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--solver", choices=["bp", "omp", "l0", "lp"], default="bp")
        p.add_argument("--success-tol", type=float, default=recovery.SUCCESS_TOL)
        p.add_argument("--csv", help="write per-trial rows to this path")

    p_designs = sub.add_parser("designs", help="generate or validate designs")
    dsub = p_designs.add_subparsers(dest="action", required=True)
    p = dsub.add_parser("gen")
    family_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_designs_gen)
    p = dsub.add_parser("validate")
    p.add_argument("path")
    p.set_defaults(func=cmd_designs_validate)

    p_frame = sub.add_parser("frame", help="build or analyze frames")
    fsub = p_frame.add_subparsers(dest="action", required=True)
    p = fsub.add_parser("build")
    p.add_argument("--design", required=True)
    frame_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_frame_build)
    p = fsub.add_parser("analyze")
    p.add_argument("path")
    p.add_argument("--design")
    p.set_defaults(func=cmd_frame_analyze)

    p = sub.add_parser("plan", help="block-type planner")
    p.add_argument("--n", type=int, required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--k", type=int)
    grp.add_argument("--h", type=_rational)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("recover", help="sparse recovery trials")
    p.add_argument("--frame", required=True)
    recover_flags(p)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("pipeline", help="design -> frame -> analyze -> recover")
    family_flags(p)
    frame_flags(p)
    recover_flags(p)
    p.set_defaults(func=cmd_pipeline)

    leaves = [sub.choices[c] for c in ("plan", "recover", "pipeline")]
    leaves += list(dsub.choices.values()) + list(fsub.choices.values())
    for leaf in leaves:
        leaf.add_argument("--json", action="store_true", help="emit the JSON envelope")
    return parser


def _emit(result: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(result, sort_keys=True))
        return
    print(f"status: {result['status']}")
    for line in result["diagnostics"]:
        print(f"diagnostic: {line}")
    for key, val in (result["payload"] or {}).items():
        print(f"{key}: {json.dumps(val, sort_keys=True)}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    as_json = getattr(args, "json", False)
    try:
        payload = args.func(args)
        result = {"status": "OK", "payload": payload, "diagnostics": []}
        code = EXIT_OK
    except Failure as exc:
        if exc.exit_code == EXIT_USAGE:
            parser.error("; ".join(exc.diagnostics))
        result = {"status": "ERROR", "payload": exc.payload, "diagnostics": exc.diagnostics}
        code = exc.exit_code
    except tuple(_ERROR_MODULES) as exc:
        mod = next(m for cls, m in _ERROR_MODULES.items() if isinstance(exc, cls))
        code = EXIT_INVALID if exc.code in _INPUT_CODES else EXIT_COMPUTE
        result = {"status": "ERROR", "payload": None, "diagnostics": [f"{mod}.{exc}"]}
    except OSError as exc:
        result = {"status": "ERROR", "payload": None, "diagnostics": [f"io.{exc}"]}
        code = EXIT_COMPUTE
    _emit(result, as_json)
    return code


if __name__ == "__main__":
    sys.exit(main())

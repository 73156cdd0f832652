"""Command line batch checks.

Exit status: 0 when the verdict is pass, 1 on fail (with witnesses),
2 on unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from . import cofinite
from .algebra import atoms_of, complex_algebra, is_ckl_algebra, is_mh_algebra
from .formula import AgentSet, FormulaError, expand, parse, to_text
from .kripke import (
    CapExceeded, Frame, closure_diff, enumerate_frames, evaluate, is_ckl_frame,
    load, model_to_dict, valid_in_frame,
)
from .proof import Accepted, check_script

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class Report:
    command: str
    verdict: str
    witnesses: list = field(default_factory=list)
    timing: float = 0.0
    details: dict = field(default_factory=dict)
    text: str = ""

    def __post_init__(self):
        if self.verdict == "fail" and not self.witnesses:
            raise ValueError("a failing report needs witnesses")

    def to_dict(self):
        return {"command": self.command, "verdict": self.verdict,
                "witnesses": self.witnesses, "timing": round(self.timing, 3),
                **self.details}


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def frame_schemas(agents: AgentSet):
    return {
        "C1": parse("C p -> p", agents),
        "C2": parse("C p -> E C p", agents),
        "C3": parse("C (p -> E p) -> (p -> C p)", agents),
    }


def classify_frame(frame: Frame) -> dict:
    """The four predicates that must agree on every finite frame."""
    alg = complex_algebra(frame)
    schemas = frame_schemas(frame.agents)
    mh, ckl = is_mh_algebra(alg), is_ckl_algebra(alg)
    failing = [name for name, s in schemas.items() if not valid_in_frame(frame, s)]
    return {
        "ckl_frame": is_ckl_frame(frame),
        "schemas_valid": not failing,
        "failing_schemas": failing,
        "ckl_algebra": bool(ckl),
        "mh_algebra": bool(mh),
        "ckl_check": ckl,
        "mh_check": mh,
    }


def _agree(c: dict) -> bool:
    return c["ckl_frame"] == c["schemas_valid"] == c["ckl_algebra"] == c["mh_algebra"]


def _load_model(path):
    try:
        return load(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read model {path}: {exc}") from exc


def cmd_check_frame(path) -> Report:
    model = _load_model(path)
    c = classify_frame(model.frame)
    witnesses = []
    if not _agree(c):
        witnesses.append({"kind": "disagreement", **{k: c[k] for k in ("ckl_frame", "schemas_valid", "ckl_algebra", "mh_algebra")}})
    if not c["ckl_frame"]:
        witnesses.append({"kind": "closure_diff", **closure_diff(model.frame)})
        for name in c["failing_schemas"]:
            witnesses.append({"kind": "schema", "schema": name})
        for key in ("mh_check", "ckl_check"):
            chk = c[key]
            if not chk:
                witnesses.append({"kind": "axiom", "axiom": chk.axiom, "witness": atoms_of(chk.witness)})
    details = {k: c[k] for k in ("ckl_frame", "schemas_valid", "ckl_algebra", "mh_algebra")}
    return Report("check-frame", _verdict(not witnesses), witnesses, details=details)


def cmd_model_check(path, formula_text: str) -> Report:
    """Pass iff the formula holds at every world; the extension is always reported."""
    model = _load_model(path)
    try:
        f = parse(formula_text, model.frame.agents)
    except FormulaError as exc:
        raise InputError(str(exc)) from exc
    worlds = sorted(evaluate(model, f))
    refuting = [w for w in range(model.frame.world_count) if w not in worlds]
    witnesses = [{"kind": "refuting_world", "world": w} for w in refuting]
    return Report("model-check", _verdict(not refuting), witnesses,
                  details={"formula": to_text(f), "worlds": worlds})


def cmd_sweep(n: int, agents: AgentSet, seed: int | None = None, samples: int | None = None) -> Report:
    if n < 1:
        raise InputError("world count must be at least 1")
    try:
        frames = list(enumerate_frames(n, agents, samples=samples, seed=seed))
    except CapExceeded as exc:
        raise InputError(f"{exc}; use --samples") from exc
    witnesses = []
    ckl_count = 0
    for index, frame in enumerate(frames):
        c = classify_frame(frame)
        ckl_count += c["ckl_frame"]
        if not _agree(c):
            witnesses.append({"kind": "disagreement", "index": index, "frame": model_to_dict(frame)})
    details = {"worlds": n, "agents": list(agents), "frames": len(frames),
               "agree": len(frames) - len(witnesses), "ckl_frames": ckl_count,
               "mode": "exhaustive" if samples is None else "sampled", "seed": seed}
    text = f"{details['agree']}/{len(frames)} frames agree ({ckl_count} CKL-frames, {details['mode']})"
    return Report("sweep", _verdict(not witnesses), witnesses, details=details, text=text)


def cmd_counterexample(bound: int, agents: int = 2, seed: int = 0,
                       samples: int = 100_000) -> Report:
    if bound < 1:
        raise InputError("bound must be at least 1")
    results = cofinite.run_suite(bound, samples=samples, seed=seed)
    witnesses = [r.to_dict() for r in results if not r.ok]
    alg = cofinite.SAlgebra(agents)
    columns = bound // 2 + 2
    fig = cofinite.format_table(
        list(range(0, 2 * columns, 2)), cofinite.figure_rows(alg, cofinite.A, columns))
    upto = min(bound, 8)
    powers = cofinite.e_power_rows(alg, upto, 2 * upto + 4)
    table = cofinite.format_table(list(range(2 * upto + 4)), powers)
    summary = "\n".join(f"{'ok  ' if r.ok else 'FAIL'} {r.name}: {r.checked} checked" for r in results)
    e_powers = {f"E^{n} a": str(alg.e_power(cofinite.A, n)) for n in range(upto + 1)}
    listing = "\n".join(f"{k} = {v}" for k, v in e_powers.items())
    text = "\n\n".join([summary, f"a = {cofinite.A}, N = {agents}; even positions:\n" + fig,
                        "E^n a by position:\n" + table, listing])
    details = {"checks": [r.to_dict() for r in results], "e_powers": e_powers}
    return Report("counterexample", _verdict(not witnesses), witnesses, details=details, text=text)


def cmd_check_proof(path, agents: AgentSet) -> Report:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read proof {path}: {exc}") from exc
    result = check_script(text, agents)
    if isinstance(result, Accepted):
        return Report("check-proof", "pass", details={"conclusion": to_text(result.conclusion)})
    return Report("check-proof", "fail", [{"line": result.line, "reason": result.reason}])


def cmd_parse(formula_text: str, agents: AgentSet) -> Report:
    try:
        f = parse(formula_text, agents)
    except FormulaError as exc:
        raise InputError(str(exc)) from exc
    return Report("parse", "pass", details={"formula": to_text(f), "expanded": to_text(expand(f, agents))})


def _render(report: Report, as_json: bool) -> str:
    if as_json:
        return json.dumps(report.to_dict(), indent=2)
    lines = [f"{report.command}: {report.verdict.upper()}"]
    if report.text:
        lines.append(report.text)
    for key, val in report.details.items():
        if key not in ("checks", "e_powers"):
            lines.append(f"  {key}: {val}")
    for w in report.witnesses:
        lines.append(f"  witness: {json.dumps(w)}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--agents", type=int, default=2, help="number of agents (default 2)")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--samples", type=int, default=None)

    parser = argparse.ArgumentParser(prog="ckl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check-frame", parents=[common], help="is this a CKL-frame? all routes must agree")
    p.add_argument("path")
    p = sub.add_parser("model-check", parents=[common], help="evaluate a formula in a model")
    p.add_argument("path")
    p.add_argument("formula")
    p = sub.add_parser("sweep", parents=[common], help="enumerate or sample frames and compare predicates")
    p.add_argument("worlds", type=int)
    p = sub.add_parser("counterexample", parents=[common], help="check the finite/cofinite algebra")
    p.add_argument("bound", type=int, nargs="?", default=12)
    p = sub.add_parser("check-proof", parents=[common], help="check a proof script")
    p.add_argument("path")
    p = sub.add_parser("parse", parents=[common], help="parse and pretty-print a formula")
    p.add_argument("formula")
    return parser


def run(argv=None) -> tuple[int, str]:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        agents = AgentSet.of_size(args.agents)
        if args.command == "check-frame":
            report = cmd_check_frame(args.path)
        elif args.command == "model-check":
            report = cmd_model_check(args.path, args.formula)
        elif args.command == "sweep":
            report = cmd_sweep(args.worlds, agents, seed=args.seed, samples=args.samples)
        elif args.command == "counterexample":
            report = cmd_counterexample(args.bound, agents=args.agents, seed=args.seed or 0,
                                        samples=args.samples if args.samples is not None else 100_000)
        elif args.command == "check-proof":
            report = cmd_check_proof(args.path, agents)
        else:
            report = cmd_parse(args.formula, agents)
    except (InputError, ValueError) as exc:
        if args.json:
            return EXIT_INPUT, json.dumps({"command": args.command, "error": str(exc)})
        return EXIT_INPUT, f"error: {exc}"
    report.timing = (time.perf_counter() - start) * 1000
    code = EXIT_PASS if report.verdict == "pass" else EXIT_FAIL
    return code, _render(report, args.json)


def main(argv=None) -> int:
    code, out = run(argv)
    print(out, file=sys.stdout if code != EXIT_INPUT else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver.

Commands: check (replay a proof script), fuzz (soundness trials for one
rule), countermodel (bounded model search against a sequent), eval
(evaluate a construction in a model).  Exit status: 0 all verified / no
violation, 1 logical failure (failed step, violation, countermodel found),
2 input or engine error.

Defaults can be overridden by PARTIALTT_* environment variables (SEED,
TRIALS, MAX_I, MAX_W, CAP, ENABLE_A_IMP_BOT, FORMAT).  The json format is
byte-deterministic for a fixed seed and configuration; wall-clock timing
appears only in text output.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

from .derived import replay_proof
from .fuzz import (
    FuzzConfig,
    SEMANTIC_DERIVED_RULES,
    UNGATED_RULES,
    fuzz_rule,
    fuzz_signature,
)
from .kernel import GatedRuleError, Kernel, KernelConfig, RuleId
from .search import SearchBounds, find_countermodel
from .semantics import (
    DEFAULT_CAP,
    EngineError,
    Model,
    evaluate,
    sequent_valid,
)
from .syntax import (
    ParseError,
    parse_construction,
    parse_model,
    parse_proof,
    parse_sequent_file,
    parse_theory,
    print_construction,
    print_model,
    print_sequent,
    print_value,
)
from .typecheck import TypecheckError, TypingContext, infer_type

EXIT_OK = 0
EXIT_LOGICAL = 1
EXIT_ERROR = 2

_ENV_PREFIX = "PARTIALTT_"


def _env(name: str, default):
    raw = os.environ.get(_ENV_PREFIX + name)
    if raw is None:
        return default
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    return raw


def corpus_path(name: str) -> Path:
    """Path of a bundled corpus file."""
    return Path(str(resources.files("partialtt").joinpath("corpus", name)))


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    if not p.is_absolute():
        parts = p.parts
        candidate = corpus_path(parts[-1] if parts[0] == "corpus" else path)
        if candidate.exists():
            return candidate
    return p


def _emit(report: dict, fmt: str, text_lines: list[str], elapsed: float) -> None:
    if fmt.startswith("json"):
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        for line in text_lines:
            print(line)
        print(f"elapsed: {elapsed:.2f}s")


def _load_theory(path: str):
    return parse_theory(_resolve(path).read_text())


def cmd_check(args) -> int:
    sig = _load_theory(args.theory)
    kernel = Kernel(sig, KernelConfig(allow_a_imp_bot=args.enable_a_imp_bot))
    script = parse_proof(_resolve(args.proof).read_text(), sig)
    t0 = time.perf_counter()
    report = replay_proof(script, kernel)
    elapsed = time.perf_counter() - t0
    lines = [f"proof {report.name}"]
    for v in report.verdicts:
        mark = "ok " if v.ok else "FAIL"
        suffix = f"  {v.message}" if v.message else ""
        lines.append(f"  step {v.index:>3} {v.rule:<22} {mark}{suffix}")
    if report.ok:
        lines.append(
            f"verified: {print_sequent(report.theorem.sequent)} "
            f"({report.primitive_steps} primitive steps)"
        )
    else:
        lines.append("proof FAILED")
    payload = {
        "command": "check",
        "proof": report.name,
        "ok": report.ok,
        "primitive_steps": report.primitive_steps,
        "steps": [
            {
                "index": v.index,
                "rule": v.rule,
                "ok": v.ok,
                "message": v.message,
            }
            for v in report.verdicts
        ],
        "theorem": print_sequent(report.theorem.sequent) if report.ok else None,
    }
    _emit(payload, args.format, lines, elapsed)
    return EXIT_OK if report.ok else EXIT_LOGICAL


def cmd_fuzz(args) -> int:
    cfg = FuzzConfig(
        seed=args.seed,
        trials=args.trials,
        max_i=args.max_i,
        max_w=args.max_w,
        cap=args.cap,
    )
    rule = args.rule
    derived = rule in SEMANTIC_DERIVED_RULES
    if rule == RuleId.A_IMP_BOT.value:
        print("refused: a-imp-bot is gated and excluded from soundness fuzzing")
        return EXIT_ERROR
    if not derived and rule not in UNGATED_RULES:
        print(f"unknown rule {rule!r}")
        return EXIT_ERROR
    t0 = time.perf_counter()
    report = fuzz_rule(rule, cfg, derived=derived)
    elapsed = time.perf_counter() - t0
    lines = [
        f"fuzz {rule}: trials={report.trials} premise-valid={report.checked} "
        f"skipped={report.skipped} violations={len(report.violations)}"
    ]
    for v in report.violations:
        lines.append(f"  trial {v.trial}: conclusion fails: {v.conclusion}")
        lines.append(f"    witness: {v.witness}")
    payload = {
        "command": "fuzz",
        "rule": rule,
        "seed": cfg.seed,
        "trials": report.trials,
        "checked": report.checked,
        "skipped": report.skipped,
        "violations": [
            {
                "trial": v.trial,
                "premises": v.premises,
                "conclusion": v.conclusion,
                "model": v.model,
                "witness": v.witness,
            }
            for v in report.violations
        ],
    }
    _emit(payload, args.format, lines, elapsed)
    return EXIT_OK if report.ok else EXIT_LOGICAL


def cmd_countermodel(args) -> int:
    sig = _load_theory(args.theory)
    s = parse_sequent_file(_resolve(args.sequent).read_text(), sig)
    bounds = SearchBounds(max_i=args.max_i, max_w=args.max_w, cap=args.cap)
    t0 = time.perf_counter()
    result = find_countermodel(sig, s, bounds)
    elapsed = time.perf_counter() - t0
    if result.found:
        witness = {
            v.name: print_value(val) for v, val in result.witness.items()
        }
        lines = [
            f"countermodel found after {result.models_checked} models:",
            print_model(result.model).rstrip(),
            "falsifying assignment: "
            + ", ".join(f"{k} = {v}" for k, v in sorted(witness.items())),
        ]
        payload = {
            "command": "countermodel",
            "found": True,
            "models_checked": result.models_checked,
            "model": print_model(result.model),
            "witness": witness,
        }
        _emit(payload, args.format, lines, elapsed)
        return EXIT_LOGICAL
    lines = [
        f"no countermodel within bounds (|i| <= {args.max_i}, "
        f"|w| <= {args.max_w}); {result.models_checked} models checked"
    ]
    payload = {
        "command": "countermodel",
        "found": False,
        "models_checked": result.models_checked,
        "model": None,
        "witness": None,
    }
    _emit(payload, args.format, lines, elapsed)
    return EXIT_OK


def cmd_eval(args) -> int:
    sig = _load_theory(args.theory)
    model = parse_model(_resolve(args.model).read_text(), sig, cap=args.cap)
    ctx = TypingContext.from_signature(sig)
    c = parse_construction(args.construction, ctx)
    judgment = infer_type(c, ctx)
    from .terms import free_variables
    from .types import type_text

    t0 = time.perf_counter()
    assignment = {}
    for v in sorted(free_variables(c), key=lambda v: v.name):
        assignment[v] = model.domain_values(v.type)[0]
    value = evaluate(c, model, assignment)
    elapsed = time.perf_counter() - t0
    rendered = "improper" if value is None else print_value(value)
    lines = [
        f"construction: {print_construction(c)} : {type_text(judgment.type)}"
    ]
    if assignment:
        lines.append(
            "assignment: "
            + ", ".join(
                f"{v.name} = {print_value(val)}"
                for v, val in sorted(assignment.items(), key=lambda kv: kv[0].name)
            )
        )
    lines.append(f"value: {rendered}")
    payload = {
        "command": "eval",
        "construction": print_construction(c),
        "type": type_text(judgment.type),
        "assignment": {
            v.name: print_value(val) for v, val in assignment.items()
        },
        "value": rendered,
    }
    _emit(payload, args.format, lines, elapsed)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="partialtt",
        description=(
            "proof checking, rule fuzzing, countermodel search and "
            "evaluation for a partial type theory"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_bounds=True, with_trials=False):
        p.add_argument("--format", default=_env("FORMAT", "text"),
                       choices=["text", "json", "json-like"])
        if with_bounds:
            p.add_argument("--max-i", type=int, default=_env("MAX_I", 3))
            p.add_argument("--max-w", type=int, default=_env("MAX_W", 2))
            p.add_argument("--cap", type=int, default=_env("CAP", DEFAULT_CAP))
        if with_trials:
            p.add_argument("--seed", type=int, default=_env("SEED", 0))
            p.add_argument("--trials", type=int, default=_env("TRIALS", 200))

    p_check = sub.add_parser("check", help="replay a proof script")
    p_check.add_argument("theory")
    p_check.add_argument("proof")
    p_check.add_argument(
        "--enable-a-imp-bot",
        action="store_true",
        default=_env("ENABLE_A_IMP_BOT", False),
    )
    common(p_check, with_bounds=False)
    p_check.set_defaults(func=cmd_check)

    p_fuzz = sub.add_parser("fuzz", help="soundness trials for one rule")
    p_fuzz.add_argument("rule")
    common(p_fuzz, with_trials=True)
    p_fuzz.set_defaults(func=cmd_fuzz)

    p_cm = sub.add_parser(
        "countermodel", help="search for a model falsifying a sequent"
    )
    p_cm.add_argument("theory")
    p_cm.add_argument("sequent")
    common(p_cm)
    p_cm.set_defaults(func=cmd_countermodel)

    p_eval = sub.add_parser("eval", help="evaluate a construction in a model")
    p_eval.add_argument("theory")
    p_eval.add_argument("model")
    p_eval.add_argument("construction")
    common(p_eval)
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GatedRuleError as e:
        print(f"gated-rule failure: {e}", file=sys.stderr)
        return EXIT_LOGICAL
    except (ParseError, TypecheckError, EngineError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 success, 1 a verdict or expectation failed, 2 unknown resource
(diagram key, node), 3 invalid input (bad flags, files or configs).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import graph
from .conditions import UnknownDiagram, catalog, catalog_keys
from .dsep import OverlappingSets, SeparationQuery, d_separated, run_claims
from .graph import DiagramError, UnknownNode, realizations
from .scm import (
    EmptyStratum,
    UnboundNode,
    WorldSpec,
    instantiate,
    load_world,
    sample,
    soundness_check,
    random_world,
)
from .study import ConfigError, StudyConfig, expectations_met, load_config, report, run_study

OK, FAILED, UNKNOWN, INVALID = 0, 1, 2, 3
OUTPUT_ENV = "CAUSAL_UNDERSTANDING_OUTPUT"
RANDOM_WORLDS = 20

VERDICT_SCHEMA = {
    "type": "object",
    "required": ["verdict"],
    "properties": {
        "verdict": {"enum": ["separated", "connected", "ambiguous"]},
        "realizations": {"type": "object",
                         "additionalProperties": {"enum": ["separated", "connected"]}},
        "context": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

VERIFY_SCHEMA = {
    "type": "object",
    "required": ["passed"],
    "properties": {
        "passed": {"type": "boolean"},
        "claims": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["diagram", "query", "expected", "verdict", "passed", "statement"],
                "properties": {
                    "diagram": {"type": "string"},
                    "query": {"type": "string"},
                    "expected": {"enum": ["separated", "connected", "ambiguous"]},
                    "verdict": {"enum": ["separated", "connected", "ambiguous"]},
                    "passed": {"type": "boolean"},
                    "statement": {"type": "string"},
                },
            },
        },
        "soundness": {
            "type": "object",
            "required": ["tested", "failures", "alpha", "n", "seed"],
            "properties": {
                "tested": {"type": "integer", "minimum": 0},
                "failures": {"type": "array", "items": {"type": "string"}},
                "alpha": {"type": "number"},
                "n": {"type": "integer"},
                "seed": {"type": "integer"},
            },
        },
    },
}

STUDY_SCHEMA = {
    "type": "object",
    "required": ["seed", "config_hash", "config", "agreement", "arm_means", "tests", "verdicts", "records"],
    "properties": {
        "seed": {"type": "integer"},
        "config_hash": {"type": "string"},
        "agreement": {"type": "object", "additionalProperties": {
            "type": "object", "additionalProperties": {"type": "number", "minimum": 0, "maximum": 1}}},
        "tests": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["statistic", "df", "p", "kind"],
            "properties": {"p": {"type": "number", "minimum": 0, "maximum": 1}}}},
        "verdicts": {"type": "object", "additionalProperties": {
            "enum": ["supported", "direction", "not_supported", "reversed"]}},
        "records": {"type": "array"},
    },
}

SCHEMAS = {"verdict": VERDICT_SCHEMA, "verify": VERIFY_SCHEMA, "study": STUDY_SCHEMA}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default; 2 means unknown resource here
        self.print_usage(sys.stderr)
        self.exit(INVALID, f"{self.prog}: error: {message}\n")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _out_path(args, name: str) -> Path | None:
    base = args.output or os.environ.get(OUTPUT_ENV)
    if name and Path(name).is_absolute():
        return Path(name)
    if base:
        Path(base).mkdir(parents=True, exist_ok=True)
        return Path(base) / name
    return Path(name) if name else None


def _emit(args, text: str, default_name: str | None = None, explicit: str | None = None) -> None:
    """Write to an explicit file, to the output directory, or to stdout."""
    target = None
    if explicit:
        target = _out_path(args, explicit)
    elif default_name and (args.output or os.environ.get(OUTPUT_ENV)):
        target = _out_path(args, default_name)
    if target is None:
        sys.stdout.write(text)
    else:
        target.write_text(text)


def _load_diagram(ref: str, overrides: dict | None = None) -> graph.Diagram:
    if overrides and ref in overrides:
        return overrides[ref]
    if ref in catalog_keys():
        return catalog(ref)
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise CliError(UNKNOWN, f"no such diagram file: {ref}")
        try:
            return graph.from_json(path.read_text())
        except (ValueError, KeyError, TypeError) as err:
            raise CliError(INVALID, f"invalid diagram file {ref}: {err}") from err
    raise CliError(UNKNOWN, f"unknown diagram {ref!r}; known: {', '.join(catalog_keys())}")


def _split(text: str | None) -> list[str]:
    return [t.strip() for t in (text or "").split(",") if t.strip()]


# -- subcommands -------------------------------------------------------------


def cmd_diagram(args) -> int:
    d = _load_diagram(args.diagram)
    if args.format == "json":
        _emit(args, graph.to_json(d) + "\n", f"{Path(args.diagram).stem}.json", args.json)
    else:
        _emit(args, graph.to_dot(d, Path(args.diagram).stem), f"{Path(args.diagram).stem}.dot", args.dot)
    return OK


def cmd_dsep(args) -> int:
    d = _load_diagram(args.diagram)
    q = SeparationQuery.of(_split(args.a), _split(args.b), _split(args.given))
    try:
        v = d_separated(d, q)
    except UnknownNode as err:
        raise CliError(UNKNOWN, f"unknown node {err}") from err
    except (OverlappingSets, ValueError) as err:
        raise CliError(INVALID, str(err)) from err
    if args.format == "json":
        _emit(args, json.dumps(v.to_dict(), sort_keys=True) + "\n", "dsep.json")
    else:
        lines = [f"{q}: {v.kind.value}"]
        for label, kind in sorted((v.realizations or {}).items()):
            lines.append(f"  {label}: {kind.value}")
        _emit(args, "\n".join(lines) + "\n", "dsep.txt")
    return OK


def _catalog_overrides(path: str | None) -> dict:
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
        return {k: graph.from_dict(v) for k, v in doc.items()}
    except (OSError, ValueError, KeyError, TypeError) as err:
        raise CliError(INVALID, f"invalid catalog file {path}: {err}") from err


def _soundness(overrides: dict, n: int, seed: int, alpha: float):
    reports = []
    for i, key in enumerate(catalog_keys()):
        d = overrides.get(key) or catalog(key)
        rs = sorted(realizations(d), key=lambda r: sorted(r.edges)) if not d.is_realized else [d]
        pick = rs[(seed + i) % len(rs)]
        reports.append(soundness_check(pick, WorldSpec(), n=n, seed=seed, alpha=alpha, name=key))
    for i in range(RANDOM_WORLDS):
        d, w = random_world(seed * 1000 + i)
        reports.append(soundness_check(d, w, n=min(n, 20_000), seed=seed + i, alpha=alpha,
                                       name=f"random{i}"))
    total = reports[0]
    for r in reports[1:]:
        total = total + r
    return total


def cmd_verify(args) -> int:
    overrides = _catalog_overrides(args.catalog_file)
    doc: dict = {}
    lines: list[str] = []
    passed = True
    if args.suite in ("claims", "all"):
        results = run_claims(overrides)
        doc["claims"] = []
        for r in results:
            c = r.claim
            status = "PASS" if r.passed else "FAIL"
            passed &= r.passed
            lines.append(f"{status} {c.key}: {c.query} -> {r.verdict.kind.value} "
                         f"(expected {c.expected.value}); {c.statement}")
            doc["claims"].append({"diagram": c.key, "query": str(c.query),
                                  "expected": c.expected.value, "verdict": r.verdict.kind.value,
                                  "passed": r.passed, "statement": c.statement})
    if args.suite in ("soundness", "all"):
        seed = 0 if args.seed is None else args.seed
        rep = _soundness(overrides, args.n, seed, args.alpha)
        tested = sum(e.result is not None for e in rep.entries)
        fails = [f"{e.world}: {e.query}" for e in rep.failures]
        passed &= rep.passed
        status = "PASS" if rep.passed else "FAIL"
        lines.append(f"{status} soundness: {tested} separated queries tested over "
                     f"{len({e.world for e in rep.entries})} worlds, n={args.n}, seed={seed}, "
                     f"alpha={args.alpha} (Bonferroni per world), {len(fails)} separated-but-dependent")
        lines += [f"  FAIL {f}" for f in fails]
        doc["soundness"] = {"tested": tested, "failures": fails, "alpha": args.alpha,
                            "n": args.n, "seed": seed}
    doc["passed"] = passed
    if args.format == "json":
        _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n", "verify.json")
    else:
        _emit(args, "\n".join(lines) + "\n", "verify.txt")
    return OK if passed else FAILED


def cmd_simulate(args) -> int:
    d = _load_diagram(args.diagram)
    world = WorldSpec()
    if args.config:
        try:
            world, _ = load_world(args.config)
        except (OSError, ValueError, TypeError) as err:
            raise CliError(INVALID, f"invalid world config: {err}") from err
    rs = [d] if d.is_realized else sorted(realizations(d), key=lambda r: sorted(r.edges))
    if not 0 <= args.realization < len(rs):
        raise CliError(INVALID, f"realization index must be in [0, {len(rs)})")
    try:
        data = sample(instantiate(rs[args.realization], world, args.seed), args.n, args.seed)
    except UnboundNode as err:
        raise CliError(INVALID, f"no structural rule for node {err}") from err
    target = _out_path(args, args.csv or "samples.csv")
    if args.csv or args.output or os.environ.get(OUTPUT_ENV):
        data.to_csv(target)
    means = {k: float(v.mean()) for k, v in data.columns.items()}
    if args.format == "json":
        sys.stdout.write(json.dumps({"n": len(data), "means": means}, sort_keys=True) + "\n")
    else:
        sys.stdout.write(f"{len(data)} samples from {args.diagram} "
                         f"({graph.realization_label(d, rs[args.realization])})\n")
        for k, m in means.items():
            sys.stdout.write(f"  mean {k} = {m:.4f}\n")
    return OK


def cmd_study(args) -> int:
    try:
        cfg = load_config(args.config) if args.config else StudyConfig()
    except ConfigError as err:
        raise CliError(INVALID, str(err)) from err
    result = run_study(cfg, args.seed)
    fmt = args.format if args.format in ("json", "csv") else "text"
    ext = {"json": "json", "csv": "csv", "text": "txt"}[fmt]
    _emit(args, report(result, fmt), f"study.{ext}", args.report)
    if args.records:
        _out_path(args, args.records).write_text(report(result, "records"))
    return OK if all(expectations_met(result).values()) else FAILED


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--output", help=f"output directory (default ${OUTPUT_ENV})")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = _Parser(prog="causal-understanding", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("diagram", parents=[common], help="export a catalog diagram or diagram file")
    s.add_argument("diagram", help="catalog key or diagram JSON file")
    s.add_argument("--dot", help="DOT output file")
    s.add_argument("--json", help="JSON output file (with --format json)")
    s.set_defaults(run=cmd_diagram)

    s = sub.add_parser("dsep", parents=[common], help="d-separation query")
    s.add_argument("--diagram", required=True)
    s.add_argument("--a", required=True, help="comma-separated nodes")
    s.add_argument("--b", required=True, help="comma-separated nodes")
    s.add_argument("--given", default="", help="comma-separated nodes or controller tags")
    s.set_defaults(run=cmd_dsep)

    s = sub.add_parser("verify", parents=[common], help="run the claim suite and/or soundness check")
    s.add_argument("--suite", choices=("claims", "soundness", "all"), default="claims")
    s.add_argument("--n", type=int, default=50_000)
    s.add_argument("--alpha", type=float, default=0.01)
    s.add_argument("--catalog-file", help="JSON object mapping catalog keys to replacement diagrams")
    s.set_defaults(run=cmd_verify)

    s = sub.add_parser("simulate", parents=[common], help="sample a structural model")
    s.add_argument("--diagram", required=True)
    s.add_argument("--realization", type=int, default=0)
    s.add_argument("--n", type=int, default=10_000)
    s.add_argument("--config", help="world config (TOML or JSON)")
    s.add_argument("--csv", help="CSV output file")
    s.set_defaults(run=cmd_simulate, needs_seed=True)

    s = sub.add_parser("study", parents=[common], help="run the agreement study")
    s.add_argument("--config", help="study config (TOML or JSON)")
    s.add_argument("--report", help="report output file")
    s.add_argument("--records", help="CSV file for the per-trial records")
    s.set_defaults(run=cmd_study, needs_seed=True)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "needs_seed", False) and args.seed is None:
            parser.error(f"{args.command} requires --seed")
        if getattr(args, "n", 1) is not None and getattr(args, "n", 1) < 1:
            parser.error("--n must be positive")
    except SystemExit as exc:  # usage errors and --help report through the return code
        return exc.code if isinstance(exc.code, int) else INVALID
    try:
        return args.run(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except UnknownDiagram as err:
        print(f"error: unknown diagram {err}", file=sys.stderr)
        return UNKNOWN
    except (DiagramError, EmptyStratum, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command line driver for the whole pipeline.

Subcommands:
  gen     write the problem corpus (bitmaps plus metadata) to disk
  solve   run one problem end to end and persist its artifacts
  report  run every configured problem, write the batch report
  oracle  run the self-check oracles

A run is a pure function of its RunConfig: two runs with equal configs
produce byte-identical solution, fact, theory, and report files.  Wall
clock readings therefore live in a separate timings file that no
determinism check should ever include.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import problems
from .dsl import print_term
from .ilp import ILPBounds, covers, induce, parse_theory, render_theory
from .oracles import run_oracles
from .synth import SearchConfig, Solution, Task, save_solutions, wake_sleep
from .transduce import emit_facts, parse_facts, trace_program

# Panels that exhausted their expansion budget while matching this badly
# vote for a representation failure rather than a search failure.
SUSPECT_F1 = 0.8
SUSPECT_VOTES = 3

OUTCOME_ERROR = "error"


class ConfigError(ValueError):
    """Malformed run configuration: unknown key, bad value, bad problem id."""


# ==================== run configuration ====================

@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    out_dir: str = "out"
    problems: Tuple[int, ...] = problems.ALL_IDS
    workers: int = 4
    search: SearchConfig = field(default_factory=SearchConfig)
    bounds: ILPBounds = field(default_factory=ILPBounds)


# config-file key -> (section, attribute, parser)
_KEY_TABLE = {
    "seed": ("run", "seed", int),
    "out": ("run", "out_dir", str),
    "problems": ("run", "problems", None),  # parsed separately
    "workers": ("run", "workers", int),
    "budget": ("search", "max_expansions", int),
    "max_cost_bits": ("search", "max_cost_bits", float),
    "timeout": ("search", "timeout_seconds", float),
    "threshold": ("search", "match_threshold", float),
    "cycles": ("search", "cycles", int),
    "min_fragment_gain": ("search", "min_fragment_gain", float),
    "max_clause_len": ("bounds", "max_clause_len", int),
    "max_nodes": ("bounds", "max_nodes", int),
    "var_depth": ("bounds", "var_depth", int),
    "noise": ("bounds", "noise", int),
    "min_pos": ("bounds", "min_pos", int),
}

_KEY_ORDER = list(_KEY_TABLE)


def _parse_problems(value: str) -> Tuple[int, ...]:
    ids = []
    for chunk in value.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            ids.append(int(chunk))
        except ValueError:
            raise ConfigError("bad problem id %r" % chunk) from None
    return tuple(sorted(set(ids)))


def _config_value(config: RunConfig, key: str) -> str:
    section, attr, _ = _KEY_TABLE[key]
    holder = {"run": config, "search": config.search, "bounds": config.bounds}[section]
    value = getattr(holder, attr)
    if key == "problems":
        return ",".join(str(i) for i in value)
    return str(value)


def config_text(config: RunConfig) -> str:
    """Flat key=value rendering, one key per line, fixed order."""
    return "".join("%s=%s\n" % (key, _config_value(config, key))
                   for key in _KEY_ORDER)


def parse_config(text: str, base: Optional[RunConfig] = None) -> RunConfig:
    """Parse key=value lines over a base config.  Blank lines and lines
    starting with '#' are skipped; unknown or repeated keys are errors."""
    config = base if base is not None else RunConfig()
    seen = set()
    updates: Dict[str, Dict[str, object]] = {"run": {}, "search": {}, "bounds": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key=value, got %r" % (lineno, raw))
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEY_TABLE:
            raise ConfigError("line %d: unknown key %r" % (lineno, key))
        if key in seen:
            raise ConfigError("line %d: repeated key %r" % (lineno, key))
        seen.add(key)
        section, attr, cast = _KEY_TABLE[key]
        if key == "problems":
            updates[section][attr] = _parse_problems(value)
            continue
        try:
            updates[section][attr] = cast(value)
        except ValueError:
            raise ConfigError("line %d: bad value %r for %s" % (lineno, value, key)) from None
    if updates["search"]:
        config = replace(config, search=replace(config.search, **updates["search"]))
    if updates["bounds"]:
        config = replace(config, bounds=replace(config.bounds, **updates["bounds"]))
    if updates["run"]:
        config = replace(config, **updates["run"])
    return config


def validate_config(config: RunConfig) -> RunConfig:
    if config.seed < 0:
        raise ConfigError("seed must be >= 0")
    if config.workers < 1:
        raise ConfigError("workers must be >= 1")
    if not config.problems:
        raise ConfigError("empty problem set")
    for bp_id in config.problems:
        if bp_id not in problems.ALL_IDS:
            raise ConfigError("unknown problem id %d" % bp_id)
    s = config.search
    if s.max_expansions < 1 or s.cycles < 1:
        raise ConfigError("budget and cycles must be >= 1")
    if s.timeout_seconds <= 0 or s.max_cost_bits <= 0:
        raise ConfigError("timeout and max_cost_bits must be positive")
    if not 0.0 < s.match_threshold <= 1.0:
        raise ConfigError("threshold must be in (0, 1]")
    b = config.bounds
    if b.max_clause_len < 1 or b.max_nodes < 1 or b.var_depth < 0:
        raise ConfigError("clause length, node cap, and var depth must be positive")
    if b.noise < 0 or b.min_pos < 1:
        raise ConfigError("noise must be >= 0 and min_pos >= 1")
    return config


# ==================== per-problem pipeline ====================

@dataclass(frozen=True)
class ProblemReport:
    bp_id: int
    expected: str
    outcome: str
    solved_panels: int
    total_panels: int
    per_cycle: Tuple[int, ...]
    inventions: Tuple[str, ...]
    theory_text: Optional[str]
    unsolved: Tuple[Tuple[str, str, float], ...]  # (panel, reason, best F1)
    dl_per_cycle: Tuple[Tuple[float, float, int], ...]
    error: Optional[str]
    wall_seconds: float

    @property
    def matched(self) -> bool:
        return self.outcome == self.expected


def _error_report(bp_id: int, expected: str, stage: str, exc: Exception,
                  start: float) -> ProblemReport:
    return ProblemReport(
        bp_id=bp_id, expected=expected, outcome="%s(%s)" % (OUTCOME_ERROR, stage),
        solved_panels=0, total_panels=0, per_cycle=(), inventions=(),
        theory_text=None, unsolved=(), dl_per_cycle=(),
        error="%s: %s" % (type(exc).__name__, exc),
        wall_seconds=time.monotonic() - start)


def problem_dir(config: RunConfig, bp_id: int) -> Path:
    return Path(config.out_dir) / ("bp%d" % bp_id)


def attribute_failure(unsolved: Sequence[Tuple[str, str, float]]) -> str:
    """Blame the language or the budget for a partly unsolved problem.

    A panel votes for a representation failure when the search ran its
    whole expansion budget and still never came close; enough votes tip
    the outcome.  Timed-out panels never vote: a clock cut short says
    nothing about what the language can express.
    """
    votes = sum(1 for _tid, reason, best in unsolved
                if reason == "budget" and best < SUSPECT_F1)
    return (problems.OUTCOME_REPRESENTATION if votes >= SUSPECT_VOTES
            else problems.OUTCOME_SEARCH)


def solve_problem(config: RunConfig, bp_id: int) -> ProblemReport:
    """Run one problem through synthesis, transduction, and induction.

    Artifacts land in <out>/bp<id>/: solutions.tsv and library.txt
    always, facts.pl and theory.pl only when all panels were redrawn.
    Stage failures come back as error outcomes, never exceptions.
    """
    start = time.monotonic()
    expected = problems.expected_outcome(bp_id)
    try:
        problem = problems.build_problem(bp_id, config.seed)
    except Exception as exc:
        return _error_report(bp_id, expected, "generation", exc, start)

    tasks = [Task("p%d" % p.index, p.bitmap, p.polarity) for p in problem.panels]
    order = [t.task_id for t in tasks]
    out = problem_dir(config, bp_id)
    out.mkdir(parents=True, exist_ok=True)

    try:
        ws = wake_sleep(tasks, config.search)
    except Exception as exc:
        return _error_report(bp_id, expected, "synthesis", exc, start)
    save_solutions(out / "solutions.tsv", ws.results, order)
    ws.library.save(out / "library.txt")
    inventions = tuple(
        "%s/%d = %s" % (inv.name, inv.arity, print_term(inv.body))
        for inv in ws.library.inventions)

    unsolved = tuple(
        (tid, res.reason, res.best_f1)
        for tid in order
        for res in [ws.results[tid]] if not isinstance(res, Solution))
    solved_panels = len(order) - len(unsolved)

    if unsolved:
        outcome = attribute_failure(unsolved)
        return ProblemReport(
            bp_id=bp_id, expected=expected, outcome=outcome,
            solved_panels=solved_panels, total_panels=len(order),
            per_cycle=tuple(ws.solved_per_cycle), inventions=inventions,
            theory_text=None, unsolved=unsolved,
            dl_per_cycle=tuple(ws.dl_per_cycle), error=None,
            wall_seconds=time.monotonic() - start)

    try:
        records = [trace_program(tid, ws.results[tid].term, ws.library)
                   for tid in order]
        facts_text = emit_facts(records)
        (out / "facts.pl").write_text(facts_text, encoding="ascii")
    except Exception as exc:
        return _error_report(bp_id, expected, "transduction", exc, start)

    try:
        facts = parse_facts(facts_text)
        pos = [t.task_id for t in tasks if t.polarity == "pos"]
        neg = [t.task_id for t in tasks if t.polarity == "neg"]
        theory = induce(pos, neg, facts, config.bounds)
        theory_text = render_theory(theory)
        bad = (any(not covers(theory, pid, facts) for pid in pos)
               or any(covers(theory, pid, facts) for pid in neg))
        if bad:
            raise ValueError("induced theory failed the label check")
        (out / "theory.pl").write_text(theory_text, encoding="ascii")
    except Exception as exc:
        return _error_report(bp_id, expected, "induction", exc, start)

    return ProblemReport(
        bp_id=bp_id, expected=expected, outcome=problems.OUTCOME_SOLVED,
        solved_panels=solved_panels, total_panels=len(order),
        per_cycle=tuple(ws.solved_per_cycle), inventions=inventions,
        theory_text=theory_text, unsolved=(),
        dl_per_cycle=tuple(ws.dl_per_cycle), error=None,
        wall_seconds=time.monotonic() - start)


def verify_solved(config: RunConfig, report: ProblemReport) -> Optional[bool]:
    """Re-check a solved problem's theory against its persisted fact file.

    Only the panel labels are regenerated (they are part of the problem
    statement); the evidence and the theory both come straight from disk.
    Returns None for problems that produced no theory.
    """
    if report.outcome != problems.OUTCOME_SOLVED:
        return None
    out = problem_dir(config, report.bp_id)
    try:
        facts = parse_facts((out / "facts.pl").read_text(encoding="ascii"))
        theory = parse_theory((out / "theory.pl").read_text(encoding="ascii"))
    except (OSError, ValueError):
        return False
    problem = problems.build_problem(report.bp_id, config.seed)
    pos = ["p%d" % p.index for p in problem.panels if p.polarity == "pos"]
    neg = ["p%d" % p.index for p in problem.panels if p.polarity == "neg"]
    return (all(covers(theory, pid, facts) for pid in pos)
            and not any(covers(theory, pid, facts) for pid in neg))


# ==================== batch runs and reporting ====================

def run_batch(config: RunConfig) -> List[ProblemReport]:
    """Solve every configured problem, fanned out across worker processes.

    Problems are independent, so the worker count changes wall time only,
    never any artifact byte.  Reports come back in ascending problem order.
    """
    ids = list(config.problems)
    if config.workers > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(solve_problem, config, bp_id) for bp_id in ids]
            reports = [f.result() for f in futures]
    else:
        reports = [solve_problem(config, bp_id) for bp_id in ids]
    return sorted(reports, key=lambda r: r.bp_id)


def _table(rows: List[List[str]]) -> str:
    widths = [max(len(row[col]) for row in rows) for col in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in rows]
    return "\n".join(lines) + "\n"


def _verdict(flag: Optional[bool]) -> str:
    return "-" if flag is None else ("yes" if flag else "NO")


def render_report(config: RunConfig, reports: Sequence[ProblemReport],
                  verified: Dict[int, Optional[bool]]) -> str:
    """The human-readable batch report.  Contains no timing data."""
    rows = [["bp", "expected", "outcome", "panels", "cycles", "verified", "match"]]
    for rep in reports:
        rows.append([
            str(rep.bp_id), rep.expected, rep.outcome,
            "%d/%d" % (rep.solved_panels, rep.total_panels),
            ",".join(str(n) for n in rep.per_cycle) or "-",
            _verdict(verified[rep.bp_id]),
            "yes" if rep.matched else "NO",
        ])
    parts = [
        "batch report",
        "seed=%d problems=%d" % (config.seed, len(reports)),
        "",
        _table(rows).rstrip("\n"),
    ]
    for rep in reports:
        detail = ["", "BP#%d" % rep.bp_id]
        if rep.error:
            detail.append("  error: %s" % rep.error)
        if rep.inventions:
            detail.append("  inventions:")
            detail.extend("    %s" % line for line in rep.inventions)
        if rep.dl_per_cycle and rep.inventions:
            detail.append("  compression:")
            detail.extend(
                "    cycle %d: %.6f -> %.6f bits (%d adopted)" % (
                    i, before, after, adopted)
                for i, (before, after, adopted) in enumerate(rep.dl_per_cycle, 1))
        if rep.theory_text:
            detail.append("  theory:")
            detail.extend("    %s" % line
                          for line in rep.theory_text.rstrip("\n").split("\n"))
        if rep.unsolved:
            detail.append("  unsolved panels:")
            detail.extend("    %-4s %-8s best=%.6f" % entry for entry in rep.unsolved)
        if len(detail) > 2:
            parts.extend(detail)
    return "\n".join(parts) + "\n"


def render_summary(reports: Sequence[ProblemReport],
                   verified: Dict[int, Optional[bool]]) -> str:
    """Machine-readable companion to the report: one TSV row per problem."""
    lines = ["bp\texpected\toutcome\tsolved\ttotal\tverified\tmatch"]
    for rep in reports:
        lines.append("%d\t%s\t%s\t%d\t%d\t%s\t%s" % (
            rep.bp_id, rep.expected, rep.outcome, rep.solved_panels,
            rep.total_panels, _verdict(verified[rep.bp_id]),
            "yes" if rep.matched else "no"))
    return "\n".join(lines) + "\n"


def write_report(config: RunConfig, reports: Sequence[ProblemReport]) -> bool:
    """Write report.txt, summary.tsv, timings.txt, and the figures.

    Returns True when every outcome matches its expectation and every
    solved theory re-verifies from its persisted artifacts.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    verified = {rep.bp_id: verify_solved(config, rep) for rep in reports}
    (out / "report.txt").write_text(render_report(config, reports, verified),
                                    encoding="ascii")
    (out / "summary.tsv").write_text(render_summary(reports, verified),
                                     encoding="ascii")
    timing_lines = ["%d\t%.1f" % (rep.bp_id, rep.wall_seconds) for rep in reports]
    (out / "timings.txt").write_text("\n".join(timing_lines) + "\n",
                                     encoding="ascii")
    from . import figures  # deferred: workers never need the plotting stack

    figures.render_figures(reports, out / "figures")
    return (all(rep.matched for rep in reports)
            and all(flag is not False for flag in verified.values()))


# ==================== subcommands ====================

def cmd_gen(config: RunConfig, _args) -> int:
    corpus = [problems.build_problem(bp_id, config.seed)
              for bp_id in config.problems]
    corpus_dir = Path(config.out_dir) / "corpus"
    problems.write_corpus(corpus, corpus_dir)
    print("wrote %d problems to %s" % (len(corpus), corpus_dir))
    return 0


def cmd_solve(config: RunConfig, args) -> int:
    if args.bp not in problems.ALL_IDS:
        print("config error: unknown problem id %d" % args.bp, file=sys.stderr)
        return 2
    rep = solve_problem(config, args.bp)
    verified = verify_solved(config, rep)
    print("BP#%d: %s (expected %s), %d/%d panels" % (
        rep.bp_id, rep.outcome, rep.expected, rep.solved_panels, rep.total_panels))
    if rep.error:
        print("error: %s" % rep.error)
    if rep.theory_text:
        print(rep.theory_text, end="")
        print("verified from artifacts: %s" % _verdict(verified))
    print("artifacts in %s" % problem_dir(config, args.bp))
    return 0 if rep.matched and verified is not False else 1


def cmd_report(config: RunConfig, _args) -> int:
    reports = run_batch(config)
    ok = write_report(config, reports)
    out = Path(config.out_dir)
    sys.stdout.write((out / "report.txt").read_text(encoding="ascii"))
    print("\nreport written to %s" % (out / "report.txt"))
    return 0 if ok else 1


def cmd_oracle(_config: RunConfig, args) -> int:
    names = args.names or None
    failures = 0
    for name, ok, detail in run_oracles(names):
        print("%s %s: %s" % ("ok  " if ok else "FAIL", name, detail))
        failures += 0 if ok else 1
    return 1 if failures else 0


# ==================== argument parsing ====================

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--seed", type=int, help="corpus seed")
    parser.add_argument("--budget", type=int, help="expansions per task per cycle")
    parser.add_argument("--timeout", type=float, help="seconds per task per cycle")
    parser.add_argument("--cycles", type=int, help="wake/sleep cycles")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--problems", help="comma-separated problem ids")
    parser.add_argument("--workers", type=int, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bongard",
        description="solve synthetic Bongard problems end to end")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="write the problem corpus")
    p_gen.set_defaults(func=cmd_gen)

    p_solve = sub.add_parser("solve", help="run one problem end to end")
    p_solve.add_argument("--bp", type=int, required=True, help="problem id")
    p_solve.set_defaults(func=cmd_solve)

    p_report = sub.add_parser("report", help="run the full batch and report")
    p_report.set_defaults(func=cmd_report)

    p_oracle = sub.add_parser("oracle", help="run self-check oracles")
    p_oracle.add_argument("names", nargs="*", help="oracle names (default: all)")
    p_oracle.set_defaults(func=cmd_oracle)

    for p in (p_gen, p_solve, p_report, p_oracle):
        _add_common(p)
    return parser


def config_from_args(args) -> RunConfig:
    config = RunConfig()
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError("no such config file: %s" % path)
        config = parse_config(path.read_text(), config)
    overrides = []
    for flag in ("seed", "budget", "timeout", "cycles", "out", "problems", "workers"):
        value = getattr(args, flag, None)
        if value is not None:
            overrides.append("%s=%s" % (flag, value))
    if overrides:
        config = parse_config("\n".join(overrides), config)
    return validate_config(config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    return args.func(config, args)


if __name__ == "__main__":
    sys.exit(main())

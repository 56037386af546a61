"""Turtle program traces rendered as ground logic facts.

Evaluating a program yields a sequence of top-level calls (base
primitives flattened out of control structure, invented primitives kept
atomic).  Each call is one transition between numbered states, and a
program's transitions are encoded as two kinds of ground atoms:

    trace(p1,[s0,s1,s2]).
    has_info(p1,s0,rtfwint,[4,2],[0.0,2.0,90.0]).

has_info is keyed by the transition's source state and carries the call
name, its evaluated integer arguments, and the pose reached after the
call.  State ids restart at s0 for every program.
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .dsl import Library, Step, evaluate

__all__ = [
    "TraceRecord", "HasInfo", "FactSet",
    "trace_program", "emit_facts", "parse_facts",
    "format_number", "format_angle",
]


# ==================== numeric rendering ====================

def format_number(value: float) -> str:
    """Fixed-point with up to 4 decimals, trailing zeros stripped, >= 1 kept."""
    text = "%.4f" % value
    if text.lstrip("-").strip("0") == ".":
        text = "0.0000"  # negative zero and sub-tolerance negatives
    whole, frac = text.split(".")
    return whole + "." + (frac.rstrip("0") or "0")


def format_angle(value: float) -> str:
    """Degrees in [0, 360); values rounding up to 360 wrap back to 0."""
    text = format_number(value % 360.0)
    return "0.0" if text == "360.0" else text


# ==================== traces ====================

@dataclass(frozen=True)
class TraceRecord:
    """One program's transition sequence; state i is the pose before call i."""
    program_id: str
    steps: Tuple[Step, ...]

    @property
    def states(self) -> List[str]:
        return ["s%d" % i for i in range(len(self.steps) + 1)]


def trace_program(program_id: str, term, library: Library) -> TraceRecord:
    return TraceRecord(program_id, tuple(evaluate(term, library).steps))


# ==================== fact sets ====================

@dataclass(frozen=True)
class HasInfo:
    """One ground has_info/5 atom; pose fields hold the rendered text."""
    state: str
    prim: str
    args: Tuple[int, ...]
    pose: Tuple[str, str, str]

    def render(self, program_id: str) -> str:
        return "has_info(%s,%s,%s,[%s],[%s])." % (
            program_id, self.state, self.prim,
            ",".join(str(a) for a in self.args), ",".join(self.pose))


def _natural_key(program_id: str):
    return tuple(int(p) if p.isdigit() else p
                 for p in re.split(r"(\d+)", program_id) if p)


@dataclass
class FactSet:
    """Ground atoms for a batch of programs, in stable emission order."""
    programs: List[str]
    trace: Dict[str, List[str]]
    infos: Dict[str, List[HasInfo]]

    @classmethod
    def from_traces(cls, traces: Sequence[TraceRecord]) -> "FactSet":
        seen = set()
        for t in traces:
            if t.program_id in seen:
                raise ValueError("duplicate program id %r" % t.program_id)
            seen.add(t.program_id)
        out = cls([], {}, {})
        for t in sorted(traces, key=lambda t: _natural_key(t.program_id)):
            out.programs.append(t.program_id)
            out.trace[t.program_id] = t.states
            out.infos[t.program_id] = [
                HasInfo("s%d" % i, step.name, tuple(step.args),
                        (format_number(step.post.x), format_number(step.post.y),
                         format_angle(step.post.heading)))
                for i, step in enumerate(t.steps)]
        return out

    def render(self) -> str:
        lines = []
        for pid in self.programs:
            lines.append("trace(%s,[%s])." % (pid, ",".join(self.trace[pid])))
            for info in self.infos[pid]:
                lines.append(info.render(pid))
        return "".join(line + "\n" for line in lines)


def emit_facts(traces: Sequence[TraceRecord]) -> str:
    """Facts for the whole batch, atoms sorted by (program, state index)."""
    return FactSet.from_traces(traces).render()


# ==================== parsing ====================

_TRACE_RE = re.compile(r"trace\(([a-z][a-z0-9_]*),\[((?:s\d+)(?:,s\d+)*)\]\)\.")
_INFO_RE = re.compile(
    r"has_info\(([a-z][a-z0-9_]*),(s\d+),([a-z][a-z0-9_]*),"
    r"\[((?:-?\d+(?:,-?\d+)*)?)\],"
    r"\[(-?\d+\.\d+),(-?\d+\.\d+),(-?\d+\.\d+)\]\)\.")


def parse_facts(text: str) -> FactSet:
    out = FactSet([], {}, {})
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = _TRACE_RE.fullmatch(line)
        if m:
            pid, states = m.group(1), m.group(2).split(",")
            if pid in out.trace:
                raise ValueError("line %d: second trace/2 atom for %s" % (lineno, pid))
            out.programs.append(pid)
            out.trace[pid] = states
            out.infos[pid] = []
            continue
        m = _INFO_RE.fullmatch(line)
        if m:
            pid = m.group(1)
            if pid not in out.trace:
                raise ValueError("line %d: has_info before trace for %s" % (lineno, pid))
            args = tuple(int(a) for a in m.group(4).split(",")) if m.group(4) else ()
            out.infos[pid].append(
                HasInfo(m.group(2), m.group(3), args,
                        (m.group(5), m.group(6), m.group(7))))
            continue
        raise ValueError("line %d: unparseable fact %r" % (lineno, line))
    return out

"""Mode-directed induction of definite clauses over trace facts.

The learner follows the classic saturate/search/cover loop: build a
bottom clause from one positive example by closing its ground facts
under mode declarations, best-first search the subsets of that bottom
clause for the highest-scoring consistent clause, then greedily repeat
on uncovered positives until the theory covers them all.

Hypothesis language: trace/2 and has_info/5 literals plus comparison,
list and angle builtins.  Variable equality is expressed by sharing
variables across literals (one variable per distinct ground value
during saturation), never by an eq literal; neq is a real builtin.
"""

import heapq
import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .transduce import FactSet

__all__ = [
    "Var", "Literal", "Clause", "Theory", "ModeDecl", "ILPBounds",
    "MODES", "BUILTINS", "InduceFailure",
    "saturate", "search_clause", "induce", "covers",
    "render_theory", "parse_clause", "parse_theory",
]


# ==================== clause terms ====================

@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Literal:
    """pred(args); an arg is a Var, a constant, or a tuple of args."""
    pred: str
    args: Tuple


@dataclass(frozen=True)
class Clause:
    """pos(A) :- body, with A the head variable (always Var(0))."""
    body: Tuple[Literal, ...]


@dataclass(frozen=True)
class Theory:
    clauses: Tuple[Clause, ...]


class InduceFailure(Exception):
    def __init__(self, seed_id: str):
        super().__init__("no consistent clause covers %s" % seed_id)
        self.seed_id = seed_id


@dataclass(frozen=True)
class ILPBounds:
    max_clause_len: int = 6
    max_nodes: int = 50_000
    var_depth: int = 3
    noise: int = 0
    min_pos: int = 1


# ==================== modes ====================

@dataclass(frozen=True)
class ModeDecl:
    """Argument markers: (+,cls) input, (-,cls) output, (#,cls) constant;
    a nested tuple of markers stands for an inline list pattern."""
    kind: str
    predicate: str
    markers: Tuple


MODES: Tuple[ModeDecl, ...] = (
    ModeDecl("head", "pos", (("+", "prog"),)),
    ModeDecl("body", "trace", (("+", "prog"), ("-", "list"))),
    ModeDecl("body", "has_info", (("+", "prog"), ("-", "state"),
                                  ("#", "prim"), ("-", "list"),
                                  ((("-", "num"), ("-", "num"), ("-", "angle")),))),
    ModeDecl("body", "decons", (("+", "list"), ("-", "elem"), ("-", "list"))),
    ModeDecl("body", "nil", (("+", "list"),)),
    ModeDecl("body", "gt", (("+", "num"), ("+", "num"))),
    ModeDecl("body", "lt", (("+", "num"), ("+", "num"))),
    ModeDecl("body", "neq", (("+", "num"), ("+", "num"))),
    ModeDecl("body", "neq", (("+", "angle"), ("+", "angle"))),
    ModeDecl("body", "neq", (("+", "state"), ("+", "state"))),
    ModeDecl("body", "bw_90_270", (("+", "angle"),)),
    ModeDecl("body", "bw_270_90", (("+", "angle"),)),
    ModeDecl("body", "lt_90", (("+", "angle"),)),
)


def _in_90_270(deg) -> bool:
    return 90.0 <= float(deg) < 270.0


BUILTINS = {
    "gt": lambda a, b: float(a) > float(b),
    "lt": lambda a, b: float(a) < float(b),
    "eq": lambda a, b: a == b,
    "neq": lambda a, b: a != b,
    "bw_90_270": lambda d: _in_90_270(d),
    "bw_270_90": lambda d: not _in_90_270(d),
    "lt_90": lambda d: float(d) < 90.0,
}


# ==================== fact indexing ====================

class _Index:
    """Per-program ground values: state list and has_info rows."""

    def __init__(self, facts: FactSet):
        self.trace = {pid: tuple(facts.trace[pid]) for pid in facts.programs}
        self.infos = {}
        for pid in facts.programs:
            rows = []
            for info in facts.infos[pid]:
                rows.append((info.state, info.prim, tuple(info.args),
                             (float(info.pose[0]), float(info.pose[1]),
                              float(info.pose[2]))))
            self.infos[pid] = tuple(rows)


# ==================== coverage ====================

def _unify(arg, value, env):
    """Extend env so arg matches value, or return None."""
    if isinstance(arg, Var):
        if arg.index in env:
            return env if _values_eq(env[arg.index], value) else None
        out = dict(env)
        out[arg.index] = value
        return out
    if isinstance(arg, tuple):
        if not isinstance(value, tuple) or len(arg) != len(value):
            return None
        for a, v in zip(arg, value):
            env = _unify(a, v, env)
            if env is None:
                return None
        return env
    return env if _values_eq(arg, value) else None


def _values_eq(a, b) -> bool:
    if isinstance(a, tuple) or isinstance(b, tuple):
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return float(a) == float(b)
    return a == b


def _resolve(arg, env):
    if isinstance(arg, Var):
        if arg.index not in env:
            raise ValueError("unbound builtin input %s" % _render_arg(arg, {}))
        return env[arg.index]
    if isinstance(arg, tuple):
        return tuple(_resolve(a, env) for a in arg)
    return arg


def _solve(body: Sequence[Literal], i: int, env, index: _Index) -> bool:
    if i == len(body):
        return True
    lit = body[i]
    if lit.pred == "trace":
        pid = _resolve(lit.args[0], env)
        states = index.trace.get(pid)
        if states is None:
            return False
        out = _unify(lit.args[1], states, env)
        return out is not None and _solve(body, i + 1, out, index)
    if lit.pred == "has_info":
        pid = _resolve(lit.args[0], env)
        for row in index.infos.get(pid, ()):
            out = env
            for arg, value in zip(lit.args[1:], row):
                out = _unify(arg, value, out)
                if out is None:
                    break
            if out is not None and _solve(body, i + 1, out, index):
                return True
        return False
    if lit.pred == "decons":
        value = _resolve(lit.args[0], env)
        if not isinstance(value, tuple) or not value:
            return False
        out = _unify(lit.args[1], value[0], env)
        if out is None:
            return False
        out = _unify(lit.args[2], value[1:], out)
        return out is not None and _solve(body, i + 1, out, index)
    if lit.pred == "nil":
        return _resolve(lit.args[0], env) == () and _solve(body, i + 1, env, index)
    fn = BUILTINS.get(lit.pred)
    if fn is None:
        raise ValueError("unknown predicate %s" % lit.pred)
    return fn(*(_resolve(a, env) for a in lit.args)) and _solve(body, i + 1, env, index)


def covers(obj, program_id: str, facts: FactSet) -> bool:
    """Does the clause (or any clause of the theory) cover the program?"""
    index = facts if isinstance(facts, _Index) else _Index(facts)
    if isinstance(obj, Theory):
        return any(covers(c, program_id, index) for c in obj.clauses)
    return _solve(obj.body, 0, {0: program_id}, index)


# ==================== saturation ====================

class _Registry:
    """One variable per distinct (class, ground value); tracks depths."""

    def __init__(self):
        self.vars: Dict[Tuple, int] = {}
        self.value: List = []
        self.depth: List[int] = []
        self.cls: List[str] = []

    def get(self, cls: str, value, depth: int) -> int:
        key = (cls, _canon(value))
        idx = self.vars.get(key)
        if idx is None:
            idx = len(self.value)
            self.vars[key] = idx
            self.value.append(value)
            self.depth.append(depth)
            self.cls.append(cls)
        else:
            self.depth[idx] = min(self.depth[idx], depth)
        return idx


def _canon(value) -> str:
    if isinstance(value, tuple):
        return "[%s]" % ",".join(_canon(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class BottomLiteral:
    pred: str
    args: Tuple
    inputs: FrozenSet[int]
    outputs: FrozenSet[int]


@dataclass
class BottomClause:
    literals: List[BottomLiteral]
    var_count: int
    var_keys: Tuple[Tuple[str, str], ...] = ()  # (class, canonical value) per var


def saturate(seed_id: str, facts: FactSet, var_depth: int = 3) -> BottomClause:
    """Close the seed's ground facts under MODES into a bottom clause.

    A literal enters the bottom clause when every input variable sits at
    chaining depth <= var_depth and the literal is true of the seed's
    ground values; its fresh output variables sit one layer deeper.
    Builtins never bind anything, so they contribute only when true.
    """
    if seed_id not in facts.trace:
        raise ValueError("seed %s absent from facts" % seed_id)
    index = _Index(facts)
    reg = _Registry()
    head = reg.get("prog", seed_id, 0)
    assert head == 0
    lits: List[BottomLiteral] = []

    def emit(pred, args, inputs, outputs):
        lits.append(BottomLiteral(pred, tuple(args),
                                  frozenset(inputs), frozenset(outputs)))

    states = index.trace[seed_id]
    lv = reg.get("list", states, 1)
    emit("trace", (Var(0), Var(lv)), [0], [lv])
    for state, prim, args, pose in index.infos[seed_id]:
        sv = reg.get("state", state, 1)
        av = reg.get("list", args, 1)
        xv = reg.get("num", pose[0], 1)
        yv = reg.get("num", pose[1], 1)
        dv = reg.get("angle", pose[2], 1)
        emit("has_info", (Var(0), Var(sv), prim, Var(av),
                          (Var(xv), Var(yv), Var(dv))),
             [0], [sv, av, xv, yv, dv])

    # decons/nil closure over list-valued variables, to a fixpoint so a
    # variable skipped for depth gets retried if a merge lowers its depth
    expanded = set()
    changed = True
    while changed:
        changed = False
        for idx in range(len(reg.value)):
            if (idx in expanded or reg.cls[idx] != "list"
                    or reg.depth[idx] > var_depth):
                continue
            expanded.add(idx)
            changed = True
            value = reg.value[idx]
            if value == ():
                emit("nil", (Var(idx),), [idx], [])
                continue
            d = reg.depth[idx] + 1
            ecls = "state" if isinstance(value[0], str) else "num"
            hv = reg.get(ecls, value[0], d)
            tv = reg.get("list", value[1:], d)
            emit("decons", (Var(idx), Var(hv), Var(tv)), [idx], [hv, tv])

    def ok(i):
        return reg.depth[i] <= var_depth

    nums = [i for i in range(len(reg.value)) if reg.cls[i] == "num" and ok(i)]
    angles = [i for i in range(len(reg.value)) if reg.cls[i] == "angle" and ok(i)]
    stv = [i for i in range(len(reg.value)) if reg.cls[i] == "state" and ok(i)]
    for a in nums:
        for b in nums:
            if a != b and float(reg.value[a]) > float(reg.value[b]):
                emit("gt", (Var(a), Var(b)), [a, b], [])
                emit("lt", (Var(b), Var(a)), [b, a], [])
    for group in (nums, angles, stv):
        for ai, a in enumerate(group):
            for b in group[ai + 1:]:
                if not _values_eq(reg.value[a], reg.value[b]):
                    emit("neq", (Var(a), Var(b)), [a, b], [])
    for d in angles:
        deg = reg.value[d]
        emit("bw_90_270" if _in_90_270(deg) else "bw_270_90", (Var(d),), [d], [])
        if float(deg) < 90.0:
            emit("lt_90", (Var(d),), [d], [])

    lits.sort(key=lambda l: (l.pred, tuple(_render_arg(a, {}) for a in l.args)))
    keys = tuple((reg.cls[i], _canon(reg.value[i])) for i in range(len(reg.value)))
    return BottomClause(lits, len(reg.value), keys)


# ==================== clause search ====================

def search_clause(bottom: BottomClause, pos: Sequence[str], neg: Sequence[str],
                  facts: FactSet, bounds: ILPBounds = ILPBounds()) -> Optional[Clause]:
    """Best-first search over mode-legal subsets of the bottom clause.

    Nodes carry their literal set (in binding order), bound variables,
    and surviving coverage; children re-test only the parent's covered
    examples since adding a literal never widens coverage.  Score is
    posCovered - negCovered; only zero-negative clauses are returnable,
    best taken by score, then fewer literals, then lexicographic order.
    """
    if not bottom.literals:
        return None
    index = facts if isinstance(facts, _Index) else _Index(facts)
    n = len(bottom.literals)

    def clause_of(order: Tuple[int, ...]) -> Clause:
        return Clause(tuple(
            Literal(bottom.literals[i].pred, bottom.literals[i].args)
            for i in order))

    best: Optional[Tuple[int, int, Tuple[int, ...]]] = None  # (-pos, len, order)
    visited = {frozenset()}
    heap = [(0, 0, (), frozenset([0]), tuple(pos), tuple(neg))]
    nodes = 0
    while heap and nodes < bounds.max_nodes:
        _, _, order, bound, cpos, cneg = heapq.heappop(heap)
        if len(order) >= bounds.max_clause_len:
            continue
        for i in range(n):
            lit = bottom.literals[i]
            if i in order or not lit.inputs <= bound:
                continue
            chosen = frozenset(order) | {i}
            if chosen in visited:
                continue
            visited.add(chosen)
            nodes += 1
            corder = order + (i,)
            clause = clause_of(corder)
            npos = tuple(p for p in cpos if _solve(clause.body, 0, {0: p}, index))
            nneg = tuple(p for p in cneg if _solve(clause.body, 0, {0: p}, index))
            key = (-len(npos), len(corder), corder)
            if not nneg and len(npos) >= bounds.min_pos:
                if best is None or key < best:
                    best = key
            # children can cover at most npos positives
            if best is not None and (-len(npos), len(corder) + 1) > best[:2]:
                continue
            if len(corder) < bounds.max_clause_len:
                heapq.heappush(heap, (key[0], key[1], corder,
                                      bound | lit.outputs, npos, nneg))
            if nodes >= bounds.max_nodes:
                break
    return clause_of(best[2]) if best else None


def induce(pos: Sequence[str], neg: Sequence[str], facts: FactSet,
           bounds: ILPBounds = ILPBounds()) -> Theory:
    """Greedy cover: saturate the first uncovered positive, add the best
    consistent clause, repeat.  Raises InduceFailure on an uncoverable seed."""
    index = _Index(facts)
    remaining = list(pos)
    clauses: List[Clause] = []
    while remaining:
        seed = remaining[0]
        bottom = saturate(seed, facts, bounds.var_depth)
        clause = search_clause(bottom, remaining, neg, index, bounds)
        if clause is None:
            raise InduceFailure(seed)
        clauses.append(clause)
        remaining = [p for p in remaining
                     if not _solve(clause.body, 0, {0: p}, index)]
    return Theory(tuple(clauses))


# ==================== rendering and parsing ====================

def _names_for(clause: Clause) -> Dict[int, str]:
    names: Dict[int, str] = {}

    def visit(arg):
        if isinstance(arg, Var) and arg.index not in names:
            if len(names) >= 26:
                raise ValueError("clause needs more than 26 variables")
            names[arg.index] = chr(ord("A") + len(names))
        elif isinstance(arg, tuple):
            for a in arg:
                visit(a)

    visit(Var(0))
    for lit in clause.body:
        for a in lit.args:
            visit(a)
    return names


def _render_arg(arg, names: Dict[int, str]) -> str:
    if isinstance(arg, Var):
        return names.get(arg.index, "_%d" % arg.index)
    if isinstance(arg, tuple):
        return "[%s]" % ",".join(_render_arg(a, names) for a in arg)
    return str(arg)


def render_clause(clause: Clause) -> str:
    names = _names_for(clause)
    body = ",".join("%s(%s)" % (l.pred, ",".join(_render_arg(a, names)
                                                 for a in l.args))
                    for l in clause.body)
    return "pos(%s):-%s." % (names[0], body)


def render_theory(theory: Theory) -> str:
    return "".join(render_clause(c) + "\n" for c in theory.clauses)


_TOKEN_RE = re.compile(r"[A-Z]|[a-z][a-z0-9_]*|-?\d+(?:\.\d+)?|[()\[\],]|:-|\.")


def parse_clause(text: str) -> Clause:
    toks = _TOKEN_RE.findall(text.strip())
    if "".join(toks) != text.strip().replace(" ", ""):
        raise ValueError("unparseable clause %r" % text)
    pos = 0
    names: Dict[str, int] = {}

    def peek():
        return toks[pos] if pos < len(toks) else ""

    def take(expect=None):
        nonlocal pos
        if pos >= len(toks):
            raise ValueError("truncated clause %r" % text)
        tok = toks[pos]
        pos += 1
        if expect is not None and tok != expect:
            raise ValueError("expected %r, got %r in %r" % (expect, tok, text))
        return tok

    def arg():
        tok = take()
        if tok == "[":
            items = []
            if peek() != "]":
                items.append(arg())
                while peek() == ",":
                    take(",")
                    items.append(arg())
            take("]")
            return tuple(items)
        if re.fullmatch(r"[A-Z]", tok):
            if tok not in names:
                names[tok] = len(names)
            return Var(names[tok])
        if re.fullmatch(r"-?\d+", tok):
            return int(tok)
        if re.fullmatch(r"-?\d+\.\d+", tok):
            return float(tok)
        return tok

    def literal() -> Literal:
        pred = take()
        take("(")
        args = [arg()]
        while peek() == ",":
            take(",")
            args.append(arg())
        take(")")
        return Literal(pred, tuple(args))

    head = literal()
    if head.pred != "pos" or head.args != (Var(0),):
        raise ValueError("clause head must be pos(Var): %r" % text)
    take(":-")
    body = [literal()]
    while peek() == ",":
        take(",")
        body.append(literal())
    take(".")
    if pos != len(toks):
        raise ValueError("trailing tokens in %r" % text)
    return Clause(tuple(body))


def parse_theory(text: str) -> Theory:
    clauses = [parse_clause(line) for line in text.splitlines() if line.strip()]
    return Theory(tuple(clauses))

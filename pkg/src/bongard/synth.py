"""Program synthesis: cost-ordered enumeration plus library learning.

Search enumerates closed, well-typed programs in order of description
length under the library's production weights, lazily (at most two heap
pushes per expansion).  Costs are summed in integer micro-bits so equal
derivation multisets compare exactly equal regardless of summation
order, and ties fall through to the production-rank path of the partial
derivation.  Because productions are ranked by their print prefix, the
rank path orders equal-cost emissions by their canonical printed form.

Library learning alternates three phases per cycle: solve every open
task against a shared enumeration stream, compress the solution corpus
by adopting repeated fragments (anti-unification with integer holes),
and re-estimate production weights from solution derivations.
"""

from __future__ import annotations

import heapq
import math
import time
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from . import render
from .dsl import (
    ACTION,
    INT,
    Abs,
    App,
    DslCostError,
    DslError,
    DslEvalError,
    IntConst,
    Inv,
    Library,
    Prim,
    TArrow,
    Var,
    apply_spine,
    arg_types,
    evaluate,
    parse,
    print_term,
    spine,
    term_size,
)

__all__ = [
    "Task",
    "Solution",
    "Unsolved",
    "SearchConfig",
    "Enumerator",
    "enumerate_terms",
    "solve_task",
    "solve_tasks",
    "production_counts",
    "reweight",
    "corpus_dl",
    "mine_candidates",
    "abstraction_step",
    "wake_sleep",
    "WakeSleepResult",
    "save_solutions",
    "load_solutions",
]

Result = Union["Solution", "Unsolved"]


@dataclass(frozen=True)
class Task:
    task_id: str
    target: int
    polarity: str = "pos"
    problem_id: str = ""


@dataclass(frozen=True)
class Solution:
    task_id: str
    term: object
    cost_bits: float
    match_f1: float


@dataclass(frozen=True)
class Unsolved:
    task_id: str
    reason: str  # "budget" or "timeout"
    best_f1: float


@dataclass(frozen=True)
class SearchConfig:
    max_expansions: int = 200_000
    max_cost_bits: float = 100.0
    timeout_seconds: float = 60.0
    match_threshold: float = 0.95
    cycles: int = 3
    min_fragment_gain: float = 1.0


# ==================== cost-ordered enumeration ====================

_MICRO = 1 << 24


def _micro(bits: float) -> int:
    return round(bits * _MICRO)


class Enumerator:
    """Best-first enumeration of closed terms for one request type.

    A frontier state is (choices, pending, rank): `choices` is the
    pre-order production sequence fixed so far, `pending` a linked list
    of open requests, and `rank` the next untried production for the
    head request.  Popping a state applies production `rank` (pushing a
    child, or an exact-cost completion entry when nothing stays open)
    and then pushes the sibling at rank+1.  State keys take the minimum
    completion over ranks >= rank, so the bound stays admissible even
    though print-ranked productions are not sorted by weight; emissions
    only ever happen at completion entries, whose key is the exact cost.
    """

    def __init__(self, library: Library, request=ACTION, max_cost_bits: float = 100.0):
        self.library = library
        self.limit = _micro(max_cost_bits)
        self.pops = 0
        self.emitted = 0
        self._heap = []

        acts = []
        for key, head, params in library.action_productions():
            spec = []
            for p in params:
                if p == INT:
                    spec.append("int")
                elif p == ACTION:
                    spec.append("act")
                elif isinstance(p, TArrow) and p.arg == INT and p.res == ACTION:
                    spec.append("lam")
                else:
                    raise DslCostError("unsupported parameter type %r" % (p,))
            acts.append((head, tuple(spec), _micro(library.weight(key))))
        self._acts = acts
        self._consts = [
            (term, _micro(library.weight(key)))
            for key, term, _ in library.int_constant_productions()
        ]
        self._w_var = _micro(library.weight(("var",)))
        self._log2_cache: Dict[int, int] = {}
        self._ints_cache: Dict[int, list] = {}
        self._minc_int_cache: Dict[int, int] = {}
        self._minc_act_cache: Dict[int, int] = {}
        self._act_suffix_cache: Dict[int, list] = {}
        self._int_suffix_cache: Dict[int, list] = {}

        if request == ACTION:
            self._start = ("act", 0)
        elif request == INT:
            self._start = ("int", 0)
        else:
            raise DslCostError("enumeration supports int and turtle -> turtle only")
        kind, depth = self._start
        pending = (kind, depth, None, self._minc(kind, depth))
        self._push(0, (0,), None, pending, 0)

    # ----- per-scope production tables and bounds -----

    def _log2(self, d: int) -> int:
        got = self._log2_cache.get(d)
        if got is None:
            got = self._log2_cache[d] = _micro(math.log2(d))
        return got

    def _ints(self, depth: int) -> list:
        """Int-typed leaves at a scope, variables first then constants."""
        got = self._ints_cache.get(depth)
        if got is None:
            got = []
            if depth > 0:
                w = self._w_var + self._log2(depth)
                got.extend((Var(i), w) for i in range(depth))
            got.extend(self._consts)
            self._ints_cache[depth] = got
        return got

    def _minc(self, kind: str, depth: int) -> int:
        if kind == "lam":
            return self._minc("act", depth + 1)
        if kind == "int":
            got = self._minc_int_cache.get(depth)
            if got is None:
                got = min(w for _, w in self._ints(depth))
                self._minc_int_cache[depth] = got
            return got
        got = self._minc_act_cache.get(depth)
        if got is None:
            # Min completion cost never decreases with depth (variables
            # only get dearer, productions stay the same), so evaluating
            # deeper-scope arguments at this depth keeps a lower bound.
            # Descend from above; leaf productions pin the first pass.
            cur = self.limit + 1
            for _ in range(64):
                best = cur
                for _, spec, w in self._acts:
                    total = w
                    for s in spec:
                        total += self._minc("int", depth) if s == "int" else cur
                        if total > best:
                            break
                    if total < best:
                        best = total
                if best >= cur:
                    break
                cur = best
            self._minc_act_cache[depth] = cur
            got = cur
        return got

    def _suffix(self, kind: str, depth: int) -> list:
        """suffix[r] = min over ranks >= r of production + argument bound."""
        if kind == "int":
            got = self._int_suffix_cache.get(depth)
            if got is None:
                rows = [w for _, w in self._ints(depth)]
                got = self._suffix_min(rows)
                self._int_suffix_cache[depth] = got
            return got
        eff = depth + 1 if kind == "lam" else depth
        got = self._act_suffix_cache.get(eff)
        if got is None:
            rows = []
            for _, spec, w in self._acts:
                total = w
                for s in spec:
                    d = eff + 1 if s == "lam" else eff
                    total += self._minc("int" if s == "int" else "act", d)
                rows.append(total)
            got = self._suffix_min(rows)
            self._act_suffix_cache[eff] = got
        return got

    @staticmethod
    def _suffix_min(rows: list) -> list:
        out = list(rows)
        for i in range(len(out) - 2, -1, -1):
            if out[i + 1] < out[i]:
                out[i] = out[i + 1]
        return out

    # ----- frontier -----

    def _push(self, cost, ranks, choices, pending, rank):
        kind, depth, rest, _ = pending
        suffix = self._suffix(kind, depth)
        if rank >= len(suffix):
            return
        key = cost + suffix[rank] + (rest[3] if rest is not None else 0)
        if key <= self.limit:
            heapq.heappush(self._heap, (key, ranks, cost, choices, pending, rank))

    def _rebuild(self, choices):
        seq = []
        node = choices
        while node is not None:
            seq.append(node[0])
            node = node[1]
        seq.reverse()
        pos = 0

        def go(kind, depth):
            nonlocal pos
            if kind == "lam":
                return Abs(go("act", depth + 1))
            item = seq[pos]
            pos += 1
            if kind == "int":
                return item
            head, spec = item
            args = [go(s, depth) for s in spec]
            return apply_spine(head, args)

        return go(self._start[0], self._start[1])

    def emissions(self, max_pops: Optional[int] = None,
                  deadline: Optional[float] = None) -> Iterator[Tuple[object, float]]:
        """Yield (term, costBits) in nondecreasing cost until exhausted.

        `max_pops` bounds further expansions; the pop counter persists
        across calls so a pooled caller can resume the same stream.
        """
        stop_at = None if max_pops is None else self.pops + max_pops
        heap = self._heap
        while heap:
            if stop_at is not None and self.pops >= stop_at:
                return
            if deadline is not None and (self.pops & 0xFFF) == 0:
                if time.monotonic() > deadline:
                    return
            self.pops += 1
            key, ranks, cost, choices, pending, rank = heapq.heappop(heap)
            if pending is None:
                self.emitted += 1
                yield self._rebuild(choices), cost / _MICRO
                continue
            kind, depth, rest, _ = pending
            self._push(cost, ranks[:-1] + (rank + 1,), choices, pending, rank + 1)
            if kind == "int":
                leaf, w = self._ints(depth)[rank]
                child_choices = (leaf, choices)
                child_pending = rest
            else:
                eff = depth + 1 if kind == "lam" else depth
                head, spec, w = self._acts[rank]
                child_choices = ((head, spec), choices)
                child_pending = rest
                for s in reversed(spec):
                    bound = self._minc(s, eff)
                    if child_pending is not None:
                        bound += child_pending[3]
                    child_pending = (s, eff, child_pending, bound)
            child_cost = cost + w
            if child_pending is None:
                if child_cost <= self.limit:
                    heapq.heappush(
                        heap, (child_cost, ranks, child_cost, child_choices, None, 0))
            else:
                self._push(child_cost, ranks + (0,), child_choices, child_pending, 0)

    def __iter__(self) -> Iterator[Tuple[object, float]]:
        return self.emissions()


def enumerate_terms(library: Library, request=ACTION,
                    max_cost_bits: float = 30.0) -> Iterator[Tuple[object, float]]:
    """Lazy cost-ordered stream of all closed terms within the bound."""
    return iter(Enumerator(library, request, max_cost_bits))


# ==================== task solving ====================

def _bitmap_for(term, library: Library) -> Optional[int]:
    try:
        result = evaluate(term, library)
    except DslEvalError:
        return None
    return render.rasterize(result.strokes)


def solve_tasks(tasks: Sequence[Task], library: Library,
                config: SearchConfig = SearchConfig()) -> Dict[str, Result]:
    """Solve a batch of tasks against one shared enumeration stream.

    Every enumerated program is rendered once and scored against every
    still-open target, and the expansion budget is pooled: the stream
    may spend up to max_expansions * len(tasks) pops before the
    remaining tasks are reported unsolved.
    """
    open_tasks = list(tasks)
    results: Dict[str, Result] = {}
    best = {t.task_id: 0.0 for t in tasks}
    enum = Enumerator(library, ACTION, config.max_cost_bits)
    budget = config.max_expansions * len(tasks)
    deadline = time.monotonic() + config.timeout_seconds * len(tasks)
    for term, _cost in enum.emissions(max_pops=budget, deadline=deadline):
        bitmap = _bitmap_for(term, library)
        if bitmap is None:
            continue
        still_open = []
        for task in open_tasks:
            score = render.f1(bitmap, task.target)
            if score > best[task.task_id]:
                best[task.task_id] = score
            if score >= config.match_threshold:
                results[task.task_id] = Solution(
                    task.task_id, term, library.cost(term), score)
            else:
                still_open.append(task)
        open_tasks = still_open
        if not open_tasks:
            break
    reason = "timeout" if open_tasks and time.monotonic() > deadline else "budget"
    for task in open_tasks:
        results[task.task_id] = Unsolved(task.task_id, reason, best[task.task_id])
    return results


def solve_task(task: Task, library: Library,
               config: SearchConfig = SearchConfig()) -> Result:
    """Solve a single task (budget = max_expansions, no pooling)."""
    return solve_tasks([task], library, config)[task.task_id]


# ==================== derivation statistics ====================

def _head_key(head) -> tuple:
    if isinstance(head, Prim):
        return ("prim", head.name)
    if isinstance(head, Inv):
        return ("inv", head.index)
    raise DslCostError("term is not in eta-long production form")


def _count_into(term, request, scope: int, counts: Counter, library: Library):
    if request == INT:
        if isinstance(term, Var):
            counts[("var",)] += 1
        elif isinstance(term, IntConst):
            counts[("const", term.value)] += 1
        else:
            raise DslCostError("int request filled by a non-leaf term")
        return
    if isinstance(request, TArrow) and request != ACTION:
        if not isinstance(term, Abs):
            raise DslCostError("arrow request filled by a non-lambda term")
        inner = scope + 1 if request.arg == INT else scope
        _count_into(term.body, request.res, inner, counts, library)
        return
    head, args = spine(term)
    key = _head_key(head)
    counts[key] += 1
    params, _ = arg_types(library.key_type(key))
    if len(params) != len(args):
        raise DslCostError("partially applied head %r" % (key,))
    for p, a in zip(params, args):
        _count_into(a, p, scope, counts, library)


def production_counts(terms: Sequence[object], library: Library) -> Counter:
    """How often each production is chosen across the given derivations."""
    counts: Counter = Counter()
    for t in terms:
        _count_into(t, ACTION, 0, counts, library)
    return counts


def reweight(library: Library, solutions: Sequence[Solution]) -> Library:
    """Refit production weights to the solution corpus (add-one smoothed)."""
    return library.reweighted(production_counts([s.term for s in solutions], library))


def corpus_dl(terms: Sequence[object], library: Library) -> float:
    """Corpus description length: solutions plus one tagged body per invention."""
    total = sum(library.cost(t) for t in terms)
    for inv in library.inventions:
        total += library.cost(inv.body, request=inv.type) + 1.0
    return total


# ==================== fragment mining ====================

@dataclass(frozen=True)
class _Hole:
    index: int


def _action_nodes(term, library: Library) -> List[Tuple[object, int]]:
    """Action-typed spine nodes with their enclosing binder counts."""
    out = []

    def walk(t, request, scope):
        if request == INT:
            return
        if isinstance(request, TArrow) and request != ACTION:
            walk(t.body, request.res, scope + 1)
            return
        out.append((t, scope))
        head, args = spine(t)
        params, _ = arg_types(library.key_type(_head_key(head)))
        for p, a in zip(params, args):
            walk(a, p, scope)

    walk(term, ACTION, 0)
    return out


def _lift_leaf(leaf, depth: int):
    """Move an int leaf out of `depth` fragment binders; None on capture."""
    if isinstance(leaf, IntConst):
        return leaf
    return Var(leaf.index - depth) if leaf.index >= depth else None


def _anti_unify(a, b, library: Library):
    """Least general template covering both terms, or None.

    Mismatching or fragment-escaping int leaves become holes; the same
    (left, right) leaf pair always maps to the same hole, so repeated
    parameters stay linked.  Any structural mismatch at action level,
    or a leaf that a hole argument cannot be lifted over, kills the
    candidate.  Returns (template, number of holes).
    """
    holes: dict = {}

    def go_int(x, y, depth):
        if x == y and (isinstance(x, IntConst) or x.index < depth):
            return x
        lx = _lift_leaf(x, depth)
        ly = _lift_leaf(y, depth)
        if lx is None or ly is None:
            return None
        key = (lx, ly)
        hole = holes.get(key)
        if hole is None:
            hole = holes[key] = _Hole(len(holes))
        return hole

    def go_action(x, y, depth):
        hx, ax = spine(x)
        hy, ay = spine(y)
        if hx != hy or len(ax) != len(ay):
            return None
        params, _ = arg_types(library.key_type(_head_key(hx)))
        new_args = []
        for p, xa, ya in zip(params, ax, ay):
            if p == INT:
                r = go_int(xa, ya, depth)
            elif isinstance(p, TArrow) and p != ACTION:
                if not (isinstance(xa, Abs) and isinstance(ya, Abs)):
                    return None
                inner = go_action(xa.body, ya.body, depth + 1)
                r = None if inner is None else Abs(inner)
            else:
                r = go_action(xa, ya, depth)
            if r is None:
                return None
            new_args.append(r)
        return apply_spine(hx, new_args)

    template = go_action(a, b, 0)
    return None if template is None else (template, len(holes))


def _production_choices(template) -> int:
    """Action productions a template commits to (holes aside)."""
    head, args = spine(template)
    n = 1 if isinstance(head, (Prim, Inv)) else 0
    for a in args:
        while isinstance(a, Abs):
            a = a.body
        if isinstance(a, (App, Prim, Inv)):
            n += _production_choices(a)
    return n


def _template_body(template, arity: int):
    """Close a template into an invention body: holes become parameters.

    Parameters bind outermost-first in hole discovery order, which is
    the template's left-to-right print order.
    """
    def sub(t, depth):
        if isinstance(t, _Hole):
            return Var(depth + arity - 1 - t.index)
        if isinstance(t, Abs):
            return Abs(sub(t.body, depth + 1))
        if isinstance(t, App):
            return App(sub(t.fn, depth), sub(t.arg, depth))
        return t

    body = sub(template, 0)
    for _ in range(arity):
        body = Abs(body)
    return body


def _match(node, template, depth: int, binding: dict):
    """Structural match binding holes to lifted int leaves, or None."""
    if isinstance(template, _Hole):
        if not isinstance(node, (Var, IntConst)):
            return None
        lifted = _lift_leaf(node, depth)
        if lifted is None:
            return None
        prev = binding.get(template.index)
        if prev is None:
            binding[template.index] = lifted
            return binding
        return binding if prev == lifted else None
    if isinstance(template, Abs):
        if not isinstance(node, Abs):
            return None
        return _match(node.body, template.body, depth + 1, binding)
    if isinstance(template, App):
        if not isinstance(node, App):
            return None
        if _match(node.fn, template.fn, depth, binding) is None:
            return None
        return _match(node.arg, template.arg, depth, binding)
    return binding if node == template else None


def _occurrences(term, template, arity: int, scope: int = 0) -> List[Tuple[object, list, int]]:
    """Leftmost-outermost non-overlapping matches: (node, args, scope)."""
    found = []

    def go(t, scope):
        binding: dict = {}
        if _match(t, template, 0, binding) is not None:
            found.append((t, [binding[i] for i in range(arity)], scope))
            return
        if isinstance(t, Abs):
            go(t.body, scope + 1)
        elif isinstance(t, App):
            go(t.fn, scope)
            go(t.arg, scope)

    go(term, scope)
    return found


def _rewrite(term, template, arity: int, inv_index: int):
    def go(t):
        binding: dict = {}
        if _match(t, template, 0, binding) is not None:
            return apply_spine(Inv(inv_index), [binding[i] for i in range(arity)])
        if isinstance(t, Abs):
            return Abs(go(t.body))
        if isinstance(t, App):
            return App(go(t.fn), go(t.arg))
        return t

    return go(term)


@dataclass(frozen=True)
class Candidate:
    gain_estimate: float  # negative = corpus shrinks by that many bits
    body_print: str
    template: object
    arity: int
    body: object
    uses: int


def mine_candidates(terms: Sequence[object], library: Library) -> List[Candidate]:
    """Rank repeated fragments by estimated description-length change.

    Candidates come from anti-unifying every pair of closed action
    subterms of size >= 3.  Templates must compose at least two action
    productions: a fragment that merely curries one existing production
    is frequency information (the reweight phase's job), and naming it
    would bury its arguments where the downstream fact traces cannot
    see them.  The estimate prices each occurrence at its current cost
    minus the invention call that would replace it, and charges the
    body (plus one tag bit) once; exact verification is the caller's
    job because adopting a fragment also rebalances weights.
    """
    nodes: List[Tuple[object, int]] = []
    for t in terms:
        nodes.extend(n for n in _action_nodes(t, library) if term_size(n[0]) >= 3)

    seen: dict = {}
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            got = _anti_unify(nodes[i][0], nodes[j][0], library)
            if got is None:
                continue
            template, arity = got
            if _production_choices(template) < 2:
                continue
            body = _template_body(template, arity)
            key = print_term(body)
            if key not in seen:
                seen[key] = (template, arity, body)

    n_after = len(library.action_keys()) + 1
    call_head_bits = math.log2(n_after)
    out = []
    for body_print, (template, arity, body) in seen.items():
        try:
            probe = library.with_invention(body)
        except DslError:
            continue
        occs = []
        for t in terms:
            occs.extend(_occurrences(t, template, arity))
        if len(occs) < 2:
            continue
        saved = 0.0
        for node, args, scope in occs:
            call = call_head_bits + sum(library.cost(a, INT, scope) for a in args)
            saved += library.cost(node, ACTION, scope) - call
        body_bits = library.cost(body, request=probe.inventions[-1].type)
        out.append(Candidate(body_bits + 1.0 - saved, body_print,
                             template, arity, body, len(occs)))
    out.sort(key=lambda c: (c.gain_estimate, c.body_print))
    return out


def abstraction_step(solutions: Sequence[Solution], library: Library,
                     min_gain: float = 1.0) -> Tuple[Library, List[Solution]]:
    """Compress the corpus by adopting fragments while that verifiably pays.

    Each round takes the estimated-best candidate whose exact corpus
    description length (recomputed under the grown library after
    rewriting) drops by at least `min_gain` bits, then mines again.
    Rewrites preserve semantics, so solutions stay solutions.
    """
    sols = list(solutions)
    lib = library
    while True:
        terms = [s.term for s in sols]
        base_dl = corpus_dl(terms, lib)
        adopted = None
        for cand in mine_candidates(terms, lib):
            if cand.gain_estimate > -min_gain:
                break
            try:
                grown = lib.with_invention(cand.body)
            except DslError:
                continue
            inv_index = len(lib.inventions)
            new_terms = [_rewrite(t, cand.template, cand.arity, inv_index)
                         for t in terms]
            if corpus_dl(new_terms, grown) <= base_dl - min_gain:
                adopted = (grown, new_terms)
                break
        if adopted is None:
            break
        lib, new_terms = adopted
        sols = [replace(s, term=t) for s, t in zip(sols, new_terms)]
    sols = [replace(s, cost_bits=lib.cost(s.term)) for s in sols]
    return lib, sols


# ==================== the full learning loop ====================

@dataclass
class WakeSleepResult:
    library: Library
    results: Dict[str, Result]
    solved_per_cycle: List[int]
    # (before, after, adopted) per executed sleep step: corpus+library
    # description length around it, on that cycle's solved set, plus
    # how many inventions the step adopted
    dl_per_cycle: List[Tuple[float, float, int]]


def wake_sleep(tasks: Sequence[Task], config: SearchConfig = SearchConfig(),
               library: Optional[Library] = None) -> WakeSleepResult:
    """Alternate solving, fragment adoption, and reweighting for N cycles.

    Tasks solved in an earlier cycle are never re-searched; their terms
    are only rewritten by adopted fragments, which preserves semantics,
    so the per-cycle solved tally never decreases.
    """
    lib = library if library is not None else Library.uniform()
    solved: Dict[str, Solution] = {}
    failed: Dict[str, Unsolved] = {}
    per_cycle: List[int] = []
    dl_per_cycle: List[Tuple[float, float, int]] = []
    for _ in range(config.cycles):
        todo = [t for t in tasks if t.task_id not in solved]
        solved_before = len(solved)
        if todo:
            for task_id, res in solve_tasks(todo, lib, config).items():
                if isinstance(res, Solution):
                    solved[task_id] = res
                else:
                    failed[task_id] = res
        ordered = [solved[t.task_id] for t in tasks if t.task_id in solved]
        inventions_before = len(lib.inventions)
        dl_before = corpus_dl([s.term for s in ordered], lib)
        lib, ordered = abstraction_step(ordered, lib, config.min_fragment_gain)
        lib = reweight(lib, ordered)
        dl_after = corpus_dl([s.term for s in ordered], lib)
        dl_per_cycle.append((dl_before, dl_after,
                             len(lib.inventions) - inventions_before))
        solved = {s.task_id: s for s in ordered}
        per_cycle.append(len(solved))
        # A cycle that solved nothing new and adopted nothing leaves the
        # grammar fixed, so the remaining cycles would replay identically.
        if len(solved) == solved_before and len(lib.inventions) == inventions_before:
            per_cycle.extend([len(solved)] * (config.cycles - len(per_cycle)))
            break
    results: Dict[str, Result] = {}
    for t in tasks:
        if t.task_id in solved:
            sol = solved[t.task_id]
            results[t.task_id] = replace(sol, cost_bits=lib.cost(sol.term))
        elif t.task_id in failed:
            results[t.task_id] = failed[t.task_id]
    return WakeSleepResult(lib, results, per_cycle, dl_per_cycle)


# ==================== solution persistence ====================

def save_solutions(path, results: Dict[str, Result],
                   order: Optional[Sequence[str]] = None) -> None:
    """Tab-separated, one task per line, in the given (or insertion) order."""
    ids = list(order) if order is not None else list(results)
    lines = []
    for task_id in ids:
        res = results[task_id]
        if isinstance(res, Solution):
            lines.append("%s\t%.6f\t%.6f\t%s" % (
                task_id, res.cost_bits, res.match_f1, print_term(res.term)))
        else:
            lines.append("%s\tUNSOLVED\t%s\t%.6f" % (
                task_id, res.reason, res.best_f1))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_solutions(path, library: Library) -> Dict[str, Result]:
    results: Dict[str, Result] = {}
    for line in Path(path).read_text(encoding="ascii").splitlines():
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise ValueError("malformed solutions line: %r" % line)
        task_id = cols[0]
        if cols[1] == "UNSOLVED":
            results[task_id] = Unsolved(task_id, cols[2], float(cols[3]))
        else:
            results[task_id] = Solution(
                task_id, parse(cols[3], library), float(cols[1]), float(cols[2]))
    return results

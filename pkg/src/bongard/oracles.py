"""Independent cross-checks for the pipeline's derived quantities.

Each oracle recomputes something the library computes, by a different
route: costs from printed text instead of term structure, raster cells
from box clipping instead of crossing sweeps, enumeration sets from
brute-force generation instead of best-first search.  Tests call the
helpers directly; the command line runs the whole registry.
"""

from __future__ import annotations

import itertools
import math
import random
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from . import ilp, render
from .dsl import (
    ACTION, INT, IntConst, Inv, Library, Prim, TurtleState,
    apply_spine, evaluate, parse, print_term, subterms,
)
from .transduce import FactSet, parse_facts

ORACLES: Dict[str, Callable[[], Tuple[bool, str]]] = {}


def oracle(name: str):
    def register(fn):
        ORACLES[name] = fn
        return fn
    return register


def run_oracles(names: Optional[Iterable[str]] = None) -> List[Tuple[str, bool, str]]:
    picked = list(names) if names is not None else sorted(ORACLES)
    out = []
    for name in picked:
        if name not in ORACLES:
            out.append((name, False, "unknown oracle"))
            continue
        ok, detail = ORACLES[name]()
        out.append((name, ok, detail))
    return out


# ==================== cost walk over printed text ====================

def walk_cost(text: str, library: Library) -> float:
    """Price a printed program by walking its tokens with a scope counter.

    Shares nothing with the cost method: no Term values, no type
    inference, just the grammar of prints (heads decide argument kinds)
    and the weight table.
    """
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    arity = {"rtfwint": "ii", "penup": "l", "embed": "l", "loop": "il", "seq": "aa"}
    pos = 0

    def take(expect=None):
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if expect is not None and tok != expect:
            raise ValueError("expected %r, got %r" % (expect, tok))
        return tok

    def action(depth: int) -> float:
        take("(")
        head = take()
        if head.startswith("f") and head[1:].isdigit():
            bits = library.weight(("inv", int(head[1:])))
            spec = "i" * library.inventions[int(head[1:])].arity
        else:
            bits = library.weight(("prim", head))
            spec = arity.get(head, "")
        for kind in spec:
            if kind == "i":
                tok = take()
                if tok.startswith("$"):
                    bits += library.weight(("var",)) + math.log2(depth)
                else:
                    bits += library.weight(("const", int(tok)))
            elif kind == "l":
                take("(")
                take("lam")
                bits += action(depth + 1)
                take(")")
            else:
                bits += action(depth)
        take(")")
        return bits

    total = action(0)
    if pos != len(toks):
        raise ValueError("trailing tokens in %r" % text)
    return total


# ==================== box-clip rasterization ====================

def _interval_hits_box(x0, y0, x1, y1, lo_u, lo_v, hi_u, hi_v) -> bool:
    """Liang-Barsky: does the segment meet the axis box at any parameter?"""
    du = x1 - x0
    dv = y1 - y0
    t_lo, t_hi = 0.0, 1.0
    for delta, lo, hi, start in ((du, lo_u, hi_u, x0), (dv, lo_v, hi_v, y0)):
        if delta == 0.0:
            if start < lo or start > hi:
                return False
            continue
        ta = (lo - start) / delta
        tb = (hi - start) / delta
        if ta > tb:
            ta, tb = tb, ta
        t_lo = max(t_lo, ta)
        t_hi = min(t_hi, tb)
        if t_lo > t_hi:
            return False
    return True


def box_clip_cells(p0, p1, slack: float) -> frozenset:
    """Grid cells whose (slack-inflated) box the world segment touches."""
    u0, v0 = render.world_to_raster(*p0)
    u1, v1 = render.world_to_raster(*p1)
    cells = set()
    c_lo = max(0, int(math.floor(min(u0, u1))) - 1)
    c_hi = min(render.GRID - 1, int(math.floor(max(u0, u1))) + 1)
    r_lo = max(0, int(math.floor(min(v0, v1))) - 1)
    r_hi = min(render.GRID - 1, int(math.floor(max(v0, v1))) + 1)
    for r in range(r_lo, r_hi + 1):
        for c in range(c_lo, c_hi + 1):
            if _interval_hits_box(u0, v0, u1, v1,
                                  c - slack, r - slack,
                                  c + 1 + slack, r + 1 + slack):
                cells.add((c, r))
    return frozenset(cells)


# ==================== brute-force enumeration ====================

def brute_force_terms(library: Library, max_cost_bits: float,
                      max_depth: int = 4) -> Dict[str, float]:
    """Every action term within the cost bound, by exhaustive generation.

    Generates the grammar tree directly (productions nested up to
    max_depth action levels), prices each tree by summing weights, and
    keeps those within the bound.  Exponential; meant for tiny grammars.
    """
    out: Dict[str, float] = {}

    def int_choices(depth):
        for i in range(depth):
            yield "$%d" % i, library.weight(("var",)) + math.log2(depth)
        for c in library.constants:
            yield str(c), library.weight(("const", c))

    def actions(depth, levels, budget):
        if levels == 0:
            return
        for key, head, params in library.action_productions():
            w = library.weight(key)
            if w > budget + 1e-9:
                continue
            arg_lists = []
            ok = True
            for p in params:
                if p == INT:
                    choices = list(int_choices(depth))
                elif p == ACTION:
                    choices = list(actions(depth, levels - 1, budget - w))
                else:
                    choices = [("(lam %s)" % s, b)
                               for s, b in actions(depth + 1, levels - 1, budget - w)]
                if not choices:
                    ok = False
                    break
                arg_lists.append(choices)
            if not ok:
                continue
            for combo in itertools.product(*arg_lists):
                bits = w + sum(b for _, b in combo)
                if bits <= max_cost_bits + 1e-9:
                    if combo:
                        yield "(%s %s)" % (head.name, " ".join(s for s, _ in combo)), bits
                    else:
                        yield head.name, bits

    for text, bits in actions(0, max_depth, max_cost_bits):
        out[text] = bits
    return out


# ==================== trace pose re-simulation ====================

def resimulate_poses(term, library: Library) -> List[TurtleState]:
    """Recompute every recorded step's pose from its source state.

    Chains the recorded steps independently of the evaluator's own
    threading: step i starts from step i-1's recomputed pose, with
    rtfwint transitions redone by direct trigonometry and invention
    transitions by evaluating the lone call from the source state.
    embed is rejected because it restores the saved pose, so its steps
    do not chain source to post.
    """
    for sub in subterms(term):
        if isinstance(sub, Prim) and sub.name == "embed":
            raise ValueError("embed programs do not chain source to post")
    state = TurtleState()
    poses = []
    for step in evaluate(term, library).steps:
        if step.name == "rtfwint":
            k, m = step.args
            h = (state.heading + (360.0 / k if k else 0.0)) % 360.0
            x, y = state.x, state.y
            if m != 0:
                x += m * math.cos(math.radians(h))
                y += m * math.sin(math.radians(h))
            state = TurtleState(x, y, h, state.pen)
        else:
            call = apply_spine(Inv(int(step.name[1:])),
                               [IntConst(a) for a in step.args])
            state = evaluate(call, library, initial=state).final
        poses.append(state)
    return poses


# ==================== induction cross-checks ====================

def ilp_toy_fact_sets():
    """Small labeled fact sets, each named for the separator it rewards.

    Returns {name: (facts, positive ids, negative ids)}.  presence: only
    positives hold an f0 call.  gtpose: positives have an x > y pose.
    angle: positives have a heading in [90, 270).  length: negatives carry
    one extra step past an identical first step.  pairshare: positives'
    two calls land on the same x.  noneg: presence without negatives.
    """
    def prog(pid, atoms):
        states = ",".join("s%d" % i for i in range(len(atoms) + 1))
        lines = ["trace(%s,[%s])." % (pid, states)]
        for i, (prim, args, pose) in enumerate(atoms):
            lines.append("has_info(%s,s%d,%s,[%s],[%s])." % (
                pid, i, prim, ",".join(str(a) for a in args), ",".join(pose)))
        return lines

    toys = {}

    def build(name, pos, neg):
        lines = []
        for pid, atoms in pos + neg:
            lines.extend(prog(pid, atoms))
        facts = parse_facts("".join(line + "\n" for line in lines))
        toys[name] = (facts, [pid for pid, _ in pos], [pid for pid, _ in neg])

    build("presence", [
        ("p1", [("f0", (2,), ("1.0", "2.0", "45.0"))]),
        ("p2", [("f0", (3,), ("3.0", "1.5", "80.0"))]),
        ("p3", [("f1", (4, 1), ("2.5", "0.5", "30.0")),
                ("f0", (2,), ("1.0", "4.0", "60.0"))]),
    ], [
        ("n1", [("f1", (4, 2), ("2.0", "2.0", "89.0"))]),
        ("n2", [("f1", (3, 2), ("1.0", "3.0", "300.0"))]),
        ("n3", [("f1", (5, 2), ("4.0", "1.0", "72.0")),
                ("rtfwint", (4, 2), ("4.0", "3.0", "162.0"))]),
    ])
    build("gtpose", [
        ("p1", [("f1", (3,), ("4.0", "1.0", "10.0"))]),
        ("p2", [("f1", (4,), ("5.0", "2.0", "20.0"))]),
        ("p3", [("f1", (3,), ("1.0", "2.0", "30.0")),
                ("f1", (5,), ("6.0", "3.0", "40.0"))]),
    ], [
        ("n1", [("f1", (3,), ("1.0", "2.0", "15.0"))]),
        ("n2", [("f1", (4,), ("2.0", "5.0", "25.0"))]),
        ("n3", [("f1", (5,), ("0.5", "3.0", "35.0"))]),
    ])
    build("angle", [
        ("p1", [("f1", (3,), ("1.0", "2.0", "120.0"))]),
        ("p2", [("f1", (4,), ("2.0", "3.0", "90.0"))]),
        ("p3", [("f1", (5,), ("1.5", "4.0", "269.0"))]),
    ], [
        ("n1", [("f1", (3,), ("1.0", "3.0", "89.0"))]),
        ("n2", [("f1", (4,), ("2.0", "4.0", "270.0"))]),
        ("n3", [("f1", (5,), ("0.5", "1.0", "0.0"))]),
    ])
    extra = ("f1", (6,), ("4.0", "5.0", "80.0"))
    build("length", [
        ("p1", [("f1", (3,), ("1.0", "2.0", "50.0"))]),
        ("p2", [("f1", (4,), ("2.0", "3.0", "60.0"))]),
        ("p3", [("f1", (5,), ("3.0", "4.0", "70.0"))]),
    ], [
        ("n1", [("f1", (3,), ("1.0", "2.0", "50.0")), extra]),
        ("n2", [("f1", (4,), ("2.0", "3.0", "60.0")), extra]),
        ("n3", [("f1", (5,), ("3.0", "4.0", "70.0")), extra]),
    ])
    build("pairshare", [
        ("p1", [("rtfwint", (4, 2), ("2.0", "1.0", "10.0")),
                ("f0", (3,), ("2.0", "5.0", "20.0"))]),
        ("p2", [("rtfwint", (3, 1), ("3.0", "2.0", "30.0")),
                ("f0", (4,), ("3.0", "6.0", "40.0"))]),
        ("p3", [("rtfwint", (5, 2), ("5.0", "1.0", "50.0")),
                ("f0", (2,), ("5.0", "2.0", "60.0"))]),
    ], [
        ("n1", [("rtfwint", (4, 2), ("1.0", "2.0", "15.0")),
                ("f0", (3,), ("4.0", "5.0", "25.0"))]),
        ("n2", [("rtfwint", (3, 1), ("2.0", "3.0", "35.0")),
                ("f0", (4,), ("6.0", "1.0", "45.0"))]),
        ("n3", [("rtfwint", (5, 2), ("4.0", "0.5", "55.0")),
                ("f0", (2,), ("1.0", "3.0", "65.0"))]),
    ])
    facts, pos, _ = toys["presence"]
    toys["noneg"] = (facts, pos, [])
    return toys


def bottom_literal_forms(bottom) -> frozenset:
    """Canonical (pred, args) forms of a bottom clause's literals.

    Variables are rendered as ("v", class, value) so two saturations of
    the same seed compare equal regardless of variable numbering; neq's
    arguments are sorted because the literal is symmetric.
    """
    def form(arg):
        if isinstance(arg, ilp.Var):
            return ("v",) + bottom.var_keys[arg.index]
        if isinstance(arg, tuple):
            return tuple(form(a) for a in arg)
        return ("c", str(arg))

    out = set()
    for lit in bottom.literals:
        args = tuple(form(a) for a in lit.args)
        if lit.pred == "neq":
            args = tuple(sorted(args))
        out.add((lit.pred, args))
    return frozenset(out)


def mode_closure_bottom(seed_id: str, facts: FactSet,
                        var_depth: int = 3) -> frozenset:
    """Bottom-clause literal forms by generic fixpoint over the mode table.

    Shares nothing with saturate's staged construction: every pass
    re-scans each body mode against the current variable table, adds any
    ground-true literal whose inputs all sit within var_depth, and keys
    output variables by (class, value) at the smallest depth seen, until
    nothing changes.  Returns the same forms as bottom_literal_forms.
    """
    if seed_id not in facts.trace:
        raise ValueError("seed %s absent from facts" % seed_id)
    trace_rows = {pid: tuple(facts.trace[pid]) for pid in facts.programs}
    info_rows = {pid: [(i.state, i.prim, tuple(i.args),
                        (float(i.pose[0]), float(i.pose[1]), float(i.pose[2])))
                       for i in facts.infos[pid]]
                 for pid in facts.programs}

    table: Dict[Tuple[str, str], Tuple] = {}

    def getvar(cls, value, depth):
        key = (cls, ilp._canon(value))
        old = table.get(key)
        if old is None or depth < old[1]:
            table[key] = (value, depth)
            return key, True
        return key, False

    def vkey(key):
        return ("v",) + key

    lits = set()

    def add(form):
        if form in lits:
            return False
        lits.add(form)
        return True

    getvar("prog", seed_id, 0)
    changed = True
    while changed:
        changed = False

        def byclass(cls):
            return sorted((key, value, depth)
                          for key, (value, depth) in table.items()
                          if key[0] == cls and depth <= var_depth)

        for mode in ilp.MODES:
            if mode.kind != "body":
                continue
            pred = mode.predicate
            if pred == "trace":
                for pk, pv, pd in byclass("prog"):
                    lk, ch = getvar("list", trace_rows[pv], pd + 1)
                    changed |= ch | add((pred, (vkey(pk), vkey(lk))))
            elif pred == "has_info":
                for pk, pv, pd in byclass("prog"):
                    for st, prim, args, pose in info_rows[pv]:
                        sk, c1 = getvar("state", st, pd + 1)
                        ak, c2 = getvar("list", args, pd + 1)
                        xk, c3 = getvar("num", pose[0], pd + 1)
                        yk, c4 = getvar("num", pose[1], pd + 1)
                        dk, c5 = getvar("angle", pose[2], pd + 1)
                        changed |= c1 | c2 | c3 | c4 | c5
                        changed |= add((pred, (vkey(pk), vkey(sk), ("c", prim),
                                               vkey(ak),
                                               (vkey(xk), vkey(yk), vkey(dk)))))
            elif pred == "decons":
                for lk, lv, ld in byclass("list"):
                    if not lv:
                        continue
                    ecls = "state" if isinstance(lv[0], str) else "num"
                    hk, c1 = getvar(ecls, lv[0], ld + 1)
                    tk, c2 = getvar("list", lv[1:], ld + 1)
                    changed |= c1 | c2
                    changed |= add((pred, (vkey(lk), vkey(hk), vkey(tk))))
            elif pred == "nil":
                for lk, lv, _ in byclass("list"):
                    if lv == ():
                        changed |= add((pred, (vkey(lk),)))
            elif pred in ("gt", "lt"):
                for ak, av, _ in byclass("num"):
                    for bk, bv, _ in byclass("num"):
                        if ak != bk and ilp.BUILTINS[pred](av, bv):
                            changed |= add((pred, (vkey(ak), vkey(bk))))
            elif pred == "neq":
                rows = byclass(mode.markers[0][1])
                for i, (ak, av, _) in enumerate(rows):
                    for bk, bv, _ in rows[i + 1:]:
                        if not ilp._values_eq(av, bv):
                            args = tuple(sorted((vkey(ak), vkey(bk))))
                            changed |= add((pred, args))
            else:
                for dk, dv, _ in byclass("angle"):
                    if ilp.BUILTINS[pred](dv):
                        changed |= add((pred, (vkey(dk),)))
    return frozenset(lits)


def exhaustive_best_clauses(bottom, pos, neg, facts,
                            max_len: int = 2, min_pos: int = 1):
    """Optimal short clauses by direct enumeration.

    Scores every mode-legal ordering of at most max_len bottom literals
    with covers.  Returns (best positive count, best length, winners)
    where winners holds the index frozenset of every clause attaining
    the optimum; (None, None, empty) when nothing consistent reaches
    min_pos positives.
    """
    index = ilp._Index(facts) if isinstance(facts, FactSet) else facts
    lits = bottom.literals
    seqs = [(i,) for i, li in enumerate(lits) if li.inputs <= {0}]
    if max_len >= 2:
        for i, li in enumerate(lits):
            if not li.inputs <= {0}:
                continue
            bound = {0} | set(li.outputs)
            for j, lj in enumerate(lits):
                if j != i and lj.inputs <= bound:
                    seqs.append((i, j))
    best = None
    winners = set()
    for seq in seqs:
        clause = ilp.Clause(tuple(ilp.Literal(lits[k].pred, lits[k].args)
                                  for k in seq))
        n = sum(1 for e in neg if ilp.covers(clause, e, index))
        if n:
            continue
        p = sum(1 for e in pos if ilp.covers(clause, e, index))
        if p < min_pos:
            continue
        key = (-p, len(seq))
        if best is None or key < best:
            best, winners = key, {frozenset(seq)}
        elif key == best:
            winners.add(frozenset(seq))
    if best is None:
        return None, None, winners
    return -best[0], best[1], winners


def covers_by_enumeration(clause, program_id: str, facts: FactSet) -> bool:
    """Decide coverage by joining ground rows, without a solver.

    Each relational literal enumerates its satisfying rows from the fact
    set; every row combination is merged into one candidate binding and
    the builtins are then checked on ground values.  Raises on a builtin
    input no relational literal bound, as covers does once the
    relational part of a clause succeeds.
    """
    lists = set()
    for pid in facts.programs:
        lists.add(tuple(facts.trace[pid]))
        for info in facts.infos[pid]:
            lists.add(tuple(info.args))
    pending = list(lists)
    while pending:
        value = pending.pop()
        if value and value[1:] not in lists:
            lists.add(value[1:])
            pending.append(value[1:])
    lists.add(())
    rows = {
        "trace": [(pid, tuple(facts.trace[pid])) for pid in facts.programs],
        "has_info": [(pid, i.state, i.prim, tuple(i.args),
                      (float(i.pose[0]), float(i.pose[1]), float(i.pose[2])))
                     for pid in facts.programs for i in facts.infos[pid]],
        "decons": [(v, v[0], v[1:]) for v in sorted(lists, key=ilp._canon) if v],
        "nil": [((),)],
    }

    def bind(arg, value, binding):
        if isinstance(arg, ilp.Var):
            held = binding.get(arg.index)
            if held is not None:
                return binding if ilp._values_eq(held, value) else None
            binding = dict(binding)
            binding[arg.index] = value
            return binding
        if isinstance(arg, tuple):
            if not isinstance(value, tuple) or len(arg) != len(value):
                return None
            for a, v in zip(arg, value):
                binding = bind(a, v, binding)
                if binding is None:
                    return None
            return binding
        return binding if ilp._values_eq(arg, value) else None

    def resolve(arg, binding):
        if isinstance(arg, ilp.Var):
            if arg.index not in binding:
                raise ValueError("unbound builtin input")
            return binding[arg.index]
        if isinstance(arg, tuple):
            return tuple(resolve(a, binding) for a in arg)
        return arg

    rel, builtins = [], []
    for lit in clause.body:
        if lit.pred in rows:
            rel.append(lit)
        elif lit.pred in ilp.BUILTINS:
            builtins.append(lit)
        else:
            raise ValueError("unknown predicate %s" % lit.pred)
    rel.sort(key=lambda l: (l.pred, str(l.args)))
    for combo in itertools.product(*[rows[l.pred] for l in rel]):
        binding = {0: program_id}
        for lit, row in zip(rel, combo):
            binding = bind(tuple(lit.args), tuple(row), binding)
            if binding is None:
                break
        if binding is None:
            continue
        ok = True
        for lit in builtins:
            if not ilp.BUILTINS[lit.pred](*(resolve(a, binding)
                                            for a in lit.args)):
                ok = False
                break
        if ok:
            return True
    return False


# ==================== registered checks ====================

_COST_SAMPLES = [
    ("(rtfwint 4 2)", 10.965784),
    ("(loop 4 (lam (rtfwint 4 2)))", 17.609640),
    ("(seq (rtfwint 4 2) (rtfwint 4 2))", 24.253496),
    ("(penup (lam (rtfwint 0 $0)))", 13.287712),
    ("(embed (lam (loop $0 (lam (rtfwint 2 $0)))))", 20.931569),
]


@oracle("cost-walk")
def _check_cost_walk() -> Tuple[bool, str]:
    """library cost() vs an independent walk over the printed program."""
    lib = Library.uniform()
    details = []
    ok = True
    for text, frozen in _COST_SAMPLES:
        got = lib.cost(parse(text, lib))
        walked = walk_cost(text, lib)
        good = abs(got - walked) < 1e-9 and abs(got - frozen) < 1e-5
        ok &= good
        details.append("%s cost=%.6f walk=%.6f frozen=%.6f" % (text, got, walked, frozen))
    two = lib.with_invention(parse("(lam (lam (loop $1 (lam (rtfwint $1 $0)))))", lib))
    for text in ["(f0 5 2)", "(seq (f0 3 1) (loop 2 (lam (rtfwint $0 4))))"]:
        got = two.cost(parse(text, two))
        walked = walk_cost(text, two)
        good = abs(got - walked) < 1e-9
        ok &= good
        details.append("%s cost=%.6f walk=%.6f" % (text, got, walked))
    return ok, "; ".join(details)


@oracle("raster-boxes")
def _check_raster_boxes() -> Tuple[bool, str]:
    """Crossing-sweep cells sandwiched by box-clip sets on random segments."""
    rng = random.Random(20_08)
    bad = 0
    trials = 400
    for _ in range(trials):
        p0 = (rng.uniform(-7.9, 7.9), rng.uniform(-7.9, 7.9))
        p1 = (rng.uniform(-7.9, 7.9), rng.uniform(-7.9, 7.9))
        mine = render.segment_cells(p0, p1)
        wide = box_clip_cells(p0, p1, 1e-6)
        tight = box_clip_cells(p0, p1, -1e-6)
        if not (tight <= mine <= wide):
            bad += 1
    return bad == 0, "%d/%d random segments outside the box-clip sandwich" % (bad, trials)


@oracle("enumeration-census")
def _check_enumeration_census() -> Tuple[bool, str]:
    """Best-first emission set equals brute force on a truncated grammar."""
    from .synth import Enumerator

    lib = Library.uniform(constants=(1, 2, 3))
    bound = 14.0
    expected = brute_force_terms(lib, bound, max_depth=4)
    got = {}
    for term, cost in Enumerator(lib, ACTION, bound).emissions():
        got[print_term(term)] = cost
    if set(got) != set(expected):
        missing = sorted(set(expected) - set(got))[:3]
        extra = sorted(set(got) - set(expected))[:3]
        return False, "set mismatch; missing=%r extra=%r" % (missing, extra)
    worst = max(abs(got[k] - expected[k]) for k in got)
    return worst < 1e-6, "%d terms within %.1f bits, max cost gap %.2e" % (
        len(got), bound, worst)


@oracle("trace-poses")
def _check_trace_poses() -> Tuple[bool, str]:
    """Recorded step poses vs chained independent re-simulation."""
    lib = Library.uniform()
    inv = lib.with_invention(parse("(lam (lam (loop $1 (lam (rtfwint $2 $1)))))", lib))
    probes = [
        (lib, "(loop 6 (lam (rtfwint 6 2)))"),
        (lib, "(seq (rtfwint 4 2) (loop 3 (lam (rtfwint -3 $0))))"),
        (lib, "(seq (penup (lam (rtfwint 4 3))) (rtfwint 0 2))"),
        (inv, "(seq (f0 5 2) (f0 3 1))"),
    ]
    worst, fields = 0.0, 0
    for library, text in probes:
        term = parse(text, library)
        steps = evaluate(term, library).steps
        redone = resimulate_poses(term, library)
        if len(steps) != len(redone):
            return False, "step count mismatch on %s" % text
        for step, pose in zip(steps, redone):
            for a, b in ((step.post.x, pose.x), (step.post.y, pose.y),
                         (step.post.heading, pose.heading)):
                worst = max(worst, abs(a - b))
                fields += 1
    return worst <= 1e-9, "%d pose fields, worst gap %.2e" % (fields, worst)


@oracle("grammar-constants")
def _check_grammar_constants() -> Tuple[bool, str]:
    """Frozen per-choice costs for the default and a 10-production grammar."""
    lib = Library.uniform()
    checks = [
        (lib.weight(("prim", "rtfwint")), math.log2(5), "action choice"),
        (lib.weight(("const", 0)), math.log2(20), "int choice"),
    ]
    toy = Library.uniform(extra_action_prims=("alpha", "beta", "gamma", "delta", "eps"))
    checks.append((toy.weight(("prim", "seq")), 3.321928, "10-production action"))
    checks.append((toy.cost(parse("(seq alpha beta)", toy)), 9.965784,
                   "three action choices"))
    ok = all(abs(a - b) < 1e-5 for a, b, _ in checks)
    return ok, "; ".join("%s %.6f~%.6f" % (label, a, b) for a, b, label in checks)


_MINI_FACTS = (
    "trace(p1,[s0,s1,s2]).\n"
    "has_info(p1,s0,rtfwint,[4,2],[0.0,2.0,90.0]).\n"
    "has_info(p1,s1,f0,[3],[2.0,2.0,210.0]).\n"
    "trace(p2,[s0,s1]).\n"
    "has_info(p2,s0,rtfwint,[0,-1],[-1.0,0.0,0.0]).\n"
)


@oracle("ilp-saturation")
def _check_ilp_saturation() -> Tuple[bool, str]:
    """saturate vs a generic mode-table fixpoint, across variable depths."""
    mini = parse_facts(_MINI_FACTS)
    toys = ilp_toy_fact_sets()
    cases = [("mini", mini, "p1", 0), ("mini", mini, "p1", 1),
             ("mini", mini, "p1", 2), ("mini", mini, "p1", 3),
             ("mini", mini, "p1", 4), ("mini", mini, "p2", 3)]
    for name, seed in [("presence", "p1"), ("gtpose", "p3"), ("angle", "n2"),
                       ("length", "n1"), ("pairshare", "p1")]:
        cases.append((name, toys[name][0], seed, 3))
    sizes = []
    for name, facts, seed, depth in cases:
        bottom = ilp.saturate(seed, facts, depth)
        mine = bottom_literal_forms(bottom)
        theirs = mode_closure_bottom(seed, facts, depth)
        if mine != theirs:
            gap = sorted(mine ^ theirs)[:3]
            return False, "%s/%s depth %d differs: %r" % (name, seed, depth, gap)
        sizes.append(len(mine))
    return True, "%d saturations matched, bottoms of %d..%d literals" % (
        len(cases), min(sizes), max(sizes))


@oracle("ilp-search")
def _check_ilp_search() -> Tuple[bool, str]:
    """search_clause vs exhaustive <=2-literal enumeration on the toys."""
    details = []
    for name, (facts, pos, neg) in sorted(ilp_toy_fact_sets().items()):
        bounds = ilp.ILPBounds(max_clause_len=2)
        bottom = ilp.saturate(pos[0], facts, bounds.var_depth)
        got = ilp.search_clause(bottom, pos, neg, facts, bounds)
        p, ln, winners = exhaustive_best_clauses(bottom, pos, neg, facts,
                                                 2, bounds.min_pos)
        if p is None:
            if got is not None:
                return False, "%s: search found %s where none is consistent" % (
                    name, ilp.render_clause(got))
            details.append("%s none" % name)
            continue
        if got is None:
            return False, "%s: search missed a %d-positive clause" % (name, p)
        where = {(l.pred, l.args): i for i, l in enumerate(bottom.literals)}
        chosen = frozenset(where[(l.pred, l.args)] for l in got.body)
        covered = sum(1 for e in pos if ilp.covers(got, e, facts))
        leaked = sum(1 for e in neg if ilp.covers(got, e, facts))
        if chosen not in winners or covered != p or leaked or len(got.body) != ln:
            return False, "%s: search returned %s, optimum %d/%d literals=%d" % (
                name, ilp.render_clause(got), p, leaked, ln)
        details.append("%s %d pos in %d literal(s), %d tie(s)" % (
            name, p, ln, len(winners)))
    return True, "; ".join(details)


_COVERAGE_PROBES = [
    "pos(A):-trace(A,B).",
    "pos(A):-trace(A,B),decons(B,C,D),decons(D,E,F),nil(F).",
    "pos(A):-trace(A,B),decons(B,C,D),decons(D,E,F),neq(C,E).",
    "pos(A):-has_info(A,B,f0,C,[D,E,F]).",
    "pos(A):-has_info(A,B,rtfwint,C,[D,E,F]),has_info(A,G,f0,H,[D,I,J]).",
    "pos(A):-has_info(A,B,f1,C,[D,E,F]),gt(D,E).",
    "pos(A):-has_info(A,B,f1,C,[D,E,F]),bw_90_270(F).",
    "pos(A):-has_info(A,B,f1,C,[D,E,F]),lt_90(F).",
    "pos(A):-has_info(A,B,f1,C,[D,E,F]),has_info(A,G,f1,H,[I,J,K]),neq(B,G).",
    "pos(A):-has_info(A,B,f1,C,[D,E,F]),has_info(A,B,f1,C,[D,E,F]).",
    "pos(A):-has_info(A,B,f1,C,[D,E,F]),decons(C,G,H),nil(H).",
    "pos(A):-gt(B,C).",
]


@oracle("ilp-coverage")
def _check_ilp_coverage() -> Tuple[bool, str]:
    """covers vs ground row-join enumeration over probe and learned clauses."""
    probes = [ilp.parse_clause(text) for text in _COVERAGE_PROBES]
    checks, mismatches = 0, []
    for name, (facts, pos, neg) in sorted(ilp_toy_fact_sets().items()):
        clauses = list(probes)
        try:
            clauses.extend(ilp.induce(pos, neg, facts).clauses)
        except ilp.InduceFailure:
            pass
        for clause in clauses:
            for pid in facts.programs:
                try:
                    a = ilp.covers(clause, pid, facts)
                except ValueError:
                    a = "error"
                try:
                    b = covers_by_enumeration(clause, pid, facts)
                except ValueError:
                    b = "error"
                checks += 1
                if a is not b and a != b:
                    mismatches.append((name, pid, ilp.render_clause(clause)))
    if mismatches:
        return False, "%d/%d disagree, first %r" % (
            len(mismatches), checks, mismatches[0])
    return True, "%d coverage decisions agree" % checks

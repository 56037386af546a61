"""Fourteen synthetic Bongard problems with known outcomes.

Each problem carries twelve 64x64 panels (six positive, six negative),
a concept summary, and the outcome the batch pipeline is expected to
reach on it: eight problems solve end to end, three fail because their
panels cannot be drawn by any turtle program (solid fills, freehand
scrawls), and three fail because the drawings, while expressible, sit
far beyond the enumeration budget.

Solvable problems also carry a reference library and a reference
theory: hand-written inventions under which every panel's generator
program is a one- or two-call composition, plus a definite clause over
the generator traces that accepts all six positives and rejects all
six negatives.  `reference_check` verifies that property.
"""

import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import ilp, render
from .dsl import Abs, App, IntConst, Inv, Library, Prim, Var
from .render import render_term
from .transduce import FactSet, trace_program

RT = Prim("rtfwint")
LOOP = Prim("loop")
SEQ = Prim("seq")
PENUP = Prim("penup")

SOLVED_IDS = (16, 21, 23, 24, 36, 53, 60, 75)
REPRESENTATION_IDS = (4, 14, 94)
SEARCH_IDS = (40, 85, 96)
ALL_IDS = tuple(sorted(SOLVED_IDS + REPRESENTATION_IDS + SEARCH_IDS))

OUTCOME_SOLVED = "solved"
OUTCOME_REPRESENTATION = "unsolved(representation-suspected)"
OUTCOME_SEARCH = "unsolved(search)"


def expected_outcome(bp_id: int) -> str:
    """Outcome the pipeline should reach on problem `bp_id`."""
    if bp_id in SOLVED_IDS:
        return OUTCOME_SOLVED
    if bp_id in REPRESENTATION_IDS:
        return OUTCOME_REPRESENTATION
    if bp_id in SEARCH_IDS:
        return OUTCOME_SEARCH
    raise ValueError("unknown problem id %r" % (bp_id,))


# ---------- term builders ----------

def _ap(head, *args):
    t = head
    for a in args:
        t = App(t, IntConst(a) if isinstance(a, int) else a)
    return t


def _poly(count: int, divisor: int, m: int):
    return _ap(LOOP, count, Abs(_ap(RT, divisor, m)))


def _spiral(n: int, k: int):
    return _ap(LOOP, n, Abs(_ap(RT, k, Var(0))))


def _seq(a, b):
    return _ap(SEQ, a, b)


def _chain(parts):
    t = parts[-1]
    for p in reversed(parts[:-1]):
        t = _seq(p, t)
    return t


def _jump(k: int, m: int):
    # Pen-up reposition: turn by 360/k then move m without drawing.
    return App(PENUP, Abs(_ap(RT, k, m)))


def _turn(k: int):
    # Zero-length move: changes heading only, draws nothing.
    return _ap(RT, k, 0)


# ---------- reference invention bodies ----------

def _spiral_body(k: int):
    # f(n): n-armed spiral, arm i has length i, turning 360/k per arm.
    return Abs(_ap(LOOP, Var(0), Abs(_ap(RT, k, Var(0)))))


# f(count, m): closed count-gon with side length m.
_POLY2_BODY = Abs(Abs(_ap(LOOP, Var(1), Abs(_ap(RT, Var(2), Var(1))))))


def _poly1_body(m: int):
    # f(count): closed count-gon with the side length baked in.
    return Abs(_ap(LOOP, Var(0), Abs(_ap(RT, Var(1), m))))


def _sized_body(count: int, divisor: int):
    # f(m): fixed shape (count strokes turning 360/divisor), side m.
    return Abs(_ap(LOOP, count, Abs(_ap(RT, divisor, Var(1)))))


# f(divisor, m): three strokes turning 360/divisor each; an open angle
# for divisor 4, a closed triangle for divisor 3.
_TRIPLE_BODY = Abs(Abs(_ap(LOOP, 3, Abs(_ap(RT, Var(2), Var(1))))))


def _reference_library(*bodies) -> Library:
    lib = Library.uniform()
    for body in bodies:
        lib = lib.with_invention(body)
    return lib


def _f(index: int, *args):
    return _ap(Inv(index), *args)


# ---------- painters (outside the turtle language) ----------

def _paint_segment(bits: int, p, q) -> int:
    for c, r in render.segment_cells(p, q):
        bits |= 1 << (r * render.GRID + c)
    return bits


def fill_polygon(vertices: Sequence[Tuple[float, float]]) -> int:
    """Solid polygon bitmap: supercover outline plus even-odd interior."""
    bits = 0
    n = len(vertices)
    for i in range(n):
        bits = _paint_segment(bits, vertices[i], vertices[(i + 1) % n])
    for r in range(render.GRID):
        y = render.WORLD_MAX - (r + 0.5) / render.SCALE
        xs = []
        for i in range(n):
            x0, y0 = vertices[i]
            x1, y1 = vertices[(i + 1) % n]
            if (y0 <= y) != (y1 <= y):
                t = (y - y0) / (y1 - y0)
                xs.append(x0 + t * (x1 - x0))
        xs.sort()
        for j in range(0, len(xs) - 1, 2):
            u0 = (xs[j] - render.WORLD_MIN) * render.SCALE
            u1 = (xs[j + 1] - render.WORLD_MIN) * render.SCALE
            c0 = max(0, int(math.ceil(u0 - 0.5)))
            c1 = min(render.GRID - 1, int(math.floor(u1 - 0.5)))
            for c in range(c0, c1 + 1):
                bits |= 1 << (r * render.GRID + c)
    return bits


def freehand_scrawl(rng: random.Random, start: Tuple[float, float],
                    heading: float, steps: int, step: float = 0.38) -> int:
    """Wobbly hand-drawn curve: a dense polyline with jittered heading."""
    bits = 0
    x, y = start
    h = heading
    for _ in range(steps):
        h += rng.uniform(-38.0, 38.0)
        nx = x + step * math.cos(math.radians(h))
        ny = y + step * math.sin(math.radians(h))
        if abs(nx) > 7.0:
            h = 180.0 - h
            nx = max(-7.0, min(7.0, nx))
        if abs(ny) > 7.0:
            h = -h
            ny = max(-7.0, min(7.0, ny))
        bits = _paint_segment(bits, (x, y), (nx, ny))
        x, y = nx, ny
    return bits


# ---------- problem containers ----------

@dataclass(frozen=True)
class Panel:
    index: int                 # 1..12 inside the problem
    polarity: str              # "pos" | "neg"
    bitmap: int
    program: Optional[object]  # generator term, None for painted panels


@dataclass(frozen=True)
class BongardProblem:
    id: int
    concept: str
    expected: str
    panels: Tuple[Panel, ...]
    library: Library               # evaluates every stored generator
    theory_text: Optional[str]     # reference theory, solvable ids only

    @property
    def positives(self) -> Tuple[Panel, ...]:
        return tuple(p for p in self.panels if p.polarity == "pos")

    @property
    def negatives(self) -> Tuple[Panel, ...]:
        return tuple(p for p in self.panels if p.polarity == "neg")


def _assemble(bp_id, concept, library, pos_entries, neg_entries, theory_text):
    """Build the Panel tuple and sanity-check the corpus invariants."""
    panels = []
    bitmaps = []
    for i, (bitmap, program) in enumerate(pos_entries + neg_entries):
        polarity = "pos" if i < 6 else "neg"
        panels.append(Panel(i + 1, polarity, bitmap, program))
        bitmaps.append(bitmap)
    if len(pos_entries) != 6 or len(neg_entries) != 6:
        raise RuntimeError("problem %d: need 6+6 panels" % bp_id)
    if len(set(bitmaps)) != 12:
        raise RuntimeError("problem %d: duplicate panels" % bp_id)
    if any(render.ink(b) == 0 for b in bitmaps):
        raise RuntimeError("problem %d: blank panel" % bp_id)
    return BongardProblem(bp_id, concept, expected_outcome(bp_id),
                          tuple(panels), library, theory_text)


def _rendered(terms, library, rng) -> List[Tuple[int, object]]:
    """Render terms and shuffle their panel order."""
    entries = [(render_term(t, library), t) for t in terms]
    rng.shuffle(entries)
    return entries


# ---------- the eight solvable problems ----------

def _problem_16(rng):
    lib = _reference_library(_spiral_body(4), _spiral_body(-4))
    pos = [_f(0, n) for n in (3, 4, 5, 6, 7, 8)]
    neg = [_f(1, n) for n in (3, 4, 5, 6, 7, 8)]
    theory = "pos(A):-has_info(A,B,f0,C,D)."
    return _assemble(16, "anticlockwise spiral versus clockwise spiral",
                     lib, _rendered(pos, lib, rng), _rendered(neg, lib, rng),
                     theory)


def _problem_21(rng):
    lib = _reference_library(_POLY2_BODY)
    pos = [_f(0, 4, 1), _f(0, 5, 1), _f(0, 6, 2), _f(0, 5, 2),
           _seq(_f(0, 3, 4), _f(0, 6, 1)),
           _seq(_f(0, 4, 4), _f(0, 5, 1))]
    neg = [_f(0, 3, 3), _f(0, 4, 4), _f(0, 3, 4), _f(0, 4, 5), _f(0, 3, 5),
           _seq(_f(0, 3, 4), _f(0, 4, 4))]
    theory = ("pos(A):-has_info(A,B,f0,C,D),decons(C,E,F),"
              "decons(F,G,H),gt(E,G).")
    return _assemble(21, "a polygon with more sides than its side length",
                     lib, _rendered(pos, lib, rng), _rendered(neg, lib, rng),
                     theory)


def _problem_23(rng):
    lib = _reference_library(_poly1_body(2))
    pos = [_f(0, k) for k in (3, 4, 5, 6, 7, 8)]
    neg = [_seq(_f(0, a), _f(0, b))
           for a, b in ((3, 4), (3, 5), (4, 5), (4, 6), (5, 6), (5, 7))]
    theory = "pos(A):-trace(A,B),decons(B,C,D),decons(D,E,F),nil(F)."
    return _assemble(23, "one closed shape versus two closed shapes",
                     lib, _rendered(pos, lib, rng), _rendered(neg, lib, rng),
                     theory)


def _problem_24(rng):
    lib = _reference_library(_sized_body(8, 8), _spiral_body(4))
    pos = [_f(0, 1), _f(0, 2), _f(0, 3),
           _seq(_f(1, 3), _f(0, 1)),
           _seq(_f(1, 4), _f(0, 2)),
           _seq(_f(1, 5), _f(0, 1))]
    neg = [_f(1, n) for n in (3, 4, 5, 6, 7, 8)]
    theory = "pos(A):-has_info(A,B,f0,C,D)."
    return _assemble(24, "a circle is present versus spirals only",
                     lib, _rendered(pos, lib, rng), _rendered(neg, lib, rng),
                     theory)


def _problem_36(rng):
    lib = _reference_library(_sized_body(3, 3), _sized_body(4, -4))
    pos = [_seq(_f(0, b), _f(1, a))
           for b, a in ((2, 2), (3, 2), (2, 3), (3, 3), (4, 3), (3, 4))]
    neg = [_f(0, 2), _f(0, 3), _f(0, 4), _f(1, 2), _f(1, 3), _f(1, 4)]
    theory = "pos(A):-has_info(A,B,f0,C,D),has_info(A,E,f1,F,G)."
    return _assemble(36, "a triangle above a square versus a lone shape",
                     lib, _rendered(pos, lib, rng), _rendered(neg, lib, rng),
                     theory)


def _problem_53(rng):
    lib = _reference_library(_POLY2_BODY)
    pos = [_seq(_f(0, kout, 2), _f(0, kin, 1))
           for kout, kin in ((5, 3), (6, 3), (5, 4), (6, 4), (6, 5), (7, 3))]
    neg = [_f(0, 3, 2), _f(0, 3, 3), _f(0, 4, 2), _f(0, 4, 3),
           _seq(_f(0, 4, 2), _f(0, 4, 1)),
           _seq(_f(0, 3, 3), _f(0, 3, 1))]
    theory = ("pos(A):-has_info(A,B,f0,C,D),has_info(A,E,f0,F,G),"
              "decons(C,H,I),decons(F,J,K),gt(H,J).")
    return _assemble(53, "the outer polygon has more sides than the inner",
                     lib, _rendered(pos, lib, rng), _rendered(neg, lib, rng),
                     theory)


def _problem_60(rng):
    lib = _reference_library(_POLY2_BODY)
    pos = [_seq(_f(0, k, 3), _f(0, k, 2)) for k in (3, 4, 5, 6, 7, 8)]
    neg = [_f(0, 3, 3), _f(0, 4, 3), _f(0, 5, 3),
           _f(0, 4, 2), _f(0, 5, 2), _f(0, 6, 2)]
    theory = ("pos(A):-has_info(A,B,C,D,E),has_info(A,F,C,G,H),"
              "neq(B,F).")
    return _assemble(60, "the same polygon at two sizes versus one polygon",
                     lib, _rendered(pos, lib, rng), _rendered(neg, lib, rng),
                     theory)


def _problem_75(rng):
    lib = _reference_library(_TRIPLE_BODY)
    pos = [_seq(_f(0, 4, m), _f(0, 3, b))
           for m, b in ((2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (4, 4))]
    neg = [_f(0, 4, 2), _f(0, 4, 3), _f(0, 4, 4),
           _f(0, 3, 2), _f(0, 3, 3), _f(0, 3, 4)]
    theory = ("pos(A):-has_info(A,B,f0,C,D),has_info(A,E,f0,F,G),"
              "decons(C,H,I),decons(F,J,K),gt(H,J).")
    return _assemble(75, "a triangle beside an open angle versus either alone",
                     lib, _rendered(pos, lib, rng), _rendered(neg, lib, rng),
                     theory)


# ---------- the three representation failures (painted panels) ----------

def _regular_vertices(n, radius, rotation, cx, cy):
    return [(cx + radius * math.cos(math.radians(rotation + 360.0 * i / n)),
             cy + radius * math.sin(math.radians(rotation + 360.0 * i / n)))
            for i in range(n)]


def _paint_until(rng, draw, seen, min_ink, tries=300):
    """Redraw with fresh rng draws until the panel is inky and unseen."""
    for _ in range(tries):
        bitmap = draw()
        if render.ink(bitmap) >= min_ink and bitmap not in seen:
            seen.add(bitmap)
            return bitmap
    raise RuntimeError("painter failed to produce a fresh panel")


def _problem_4(rng):
    lib = Library.uniform()
    seen = set()

    def convex():
        n = rng.choice((5, 6, 7, 8))
        verts = _regular_vertices(n, rng.uniform(3.9, 5.0),
                                  rng.uniform(0.0, 360.0),
                                  rng.uniform(-1.0, 1.0),
                                  rng.uniform(-1.0, 1.0))
        return fill_polygon(verts)

    def dented():
        n = rng.choice((5, 6, 7, 8))
        cx, cy = rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)
        verts = _regular_vertices(n, rng.uniform(4.2, 5.2),
                                  rng.uniform(0.0, 360.0), cx, cy)
        j = rng.randrange(n)
        vx, vy = verts[j]
        verts[j] = (cx + 0.22 * (vx - cx), cy + 0.22 * (vy - cy))
        return fill_polygon(verts)

    pos = [(_paint_until(rng, convex, seen, 430), None) for _ in range(6)]
    neg = [(_paint_until(rng, dented, seen, 380), None) for _ in range(6)]
    return _assemble(4, "a solid convex figure versus a solid dented figure",
                     lib, pos, neg, None)


def _problem_94(rng):
    lib = Library.uniform()
    seen = set()

    def filled_ngon(n):
        def draw():
            cx, cy = rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)
            angles = sorted(rng.uniform(0.0, 360.0) for _ in range(n))
            if min((b - a) for a, b in zip(angles, angles[1:])) < 360.0 / (2 * n):
                return 0
            verts = [(cx + rng.uniform(4.0, 5.5) * math.cos(math.radians(a)),
                      cy + rng.uniform(4.0, 5.5) * math.sin(math.radians(a)))
                     for a in angles]
            return fill_polygon(verts)
        return draw

    pos = [(_paint_until(rng, filled_ngon(3), seen, 400), None)
           for _ in range(6)]
    neg = [(_paint_until(rng, filled_ngon(4), seen, 400), None)
           for _ in range(6)]
    return _assemble(94, "a filled triangle versus a filled quadrilateral",
                     lib, pos, neg, None)


def _problem_14(rng):
    lib = Library.uniform()
    seen = set()

    def one_scrawl():
        return freehand_scrawl(rng, (rng.uniform(-4.5, -1.5),
                                     rng.uniform(-2.5, 2.5)),
                               rng.uniform(0.0, 360.0), 70)

    def two_scrawls():
        a = freehand_scrawl(rng, (rng.uniform(-5.5, -3.5),
                                  rng.uniform(-2.0, 2.0)),
                            rng.uniform(60.0, 120.0), 32)
        b = freehand_scrawl(rng, (rng.uniform(3.5, 5.5),
                                  rng.uniform(-2.0, 2.0)),
                            rng.uniform(240.0, 300.0), 32)
        return a | b

    pos = [(_paint_until(rng, one_scrawl, seen, 60), None) for _ in range(6)]
    neg = [(_paint_until(rng, two_scrawls, seen, 120), None) for _ in range(6)]
    return _assemble(14, "a single freehand scrawl versus two scrawls",
                     lib, pos, neg, None)


# ---------- the three search failures (cheap core, costly garnish) ----------

# A partial drawing scoring F1 in this window flags the failure as a
# budget problem rather than a representation problem.
_CORE_WINDOW = (0.81, 0.935)


def _garnished(rng, lib, core, core_bitmap, garnish, seen, tries=300):
    """Core plus garnish strokes, re-rolled until the core's overlap
    with the full panel lands inside _CORE_WINDOW."""
    for _ in range(tries):
        term = _chain([core] + garnish())
        bitmap = render_term(term, lib)
        score = render.f1(core_bitmap, bitmap)
        if _CORE_WINDOW[0] <= score <= _CORE_WINDOW[1] and bitmap not in seen:
            seen.add(bitmap)
            return bitmap, term
    raise RuntimeError("garnish failed to land in the overlap window")


def _problem_40(rng):
    lib = Library.uniform()
    core = _spiral(9, 3)
    core_bitmap = render_term(core, lib)
    seen = set()
    turns = (3, 4, 5, 6, -3, -4, -5, -6)

    def dashes(count):
        def garnish():
            parts = []
            for _ in range(count):
                parts.append(_jump(rng.choice(turns), rng.choice((2, 3))))
                parts.append(_ap(RT, rng.choice(turns), 1))
            return parts
        return garnish

    pos = [_garnished(rng, lib, core, core_bitmap, dashes(c), seen)
           for c in (14, 15, 16, 17, 16, 15)]
    neg = [_garnished(rng, lib, core, core_bitmap, dashes(c), seen)
           for c in (6, 7, 8, 9, 8, 7)]
    return _assemble(40, "a spiral under a swarm of dashes versus a few",
                     lib, [(b, t) for b, t in pos], [(b, t) for b, t in neg],
                     None)


def _problem_85(rng):
    lib = Library.uniform()
    seen = set()

    def lined(count_turns, m, d, ext):
        # count_turns strokes turning 360/(d*k) each, then one straight
        # continuation: the last line comes out longer than the rest.
        k = 5 if count_turns == 5 else 4
        core = _ap(LOOP, count_turns, Abs(_ap(RT, d * k, m)))
        term = _seq(core, _ap(RT, 0, ext))
        bitmap = render_term(term, lib)
        score = render.f1(render_term(core, lib), bitmap)
        if not (_CORE_WINDOW[0] <= score <= _CORE_WINDOW[1]):
            return None
        return bitmap, term

    def take(combos, count_turns, want):
        combos = list(combos)
        rng.shuffle(combos)
        out = []
        for m, d, ext in combos:
            made = lined(count_turns, m, d, ext)
            if made is not None and made[0] not in seen:
                seen.add(made[0])
                out.append(made)
                if len(out) == want:
                    return out
        raise RuntimeError("problem 85: not enough distinct panels")

    pos = take([(m, d, m + e) for m in (2, 3) for d in (1, -1)
                for e in (0, 1)], 5, 6)
    neg = take([(m, d, m + e) for m in (2, 3, 4) for d in (1, -1)
                for e in (0, 1)], 3, 6)
    return _assemble(85, "five irregular lines versus three irregular lines",
                     lib, pos, neg, None)


def _problem_96(rng):
    lib = Library.uniform()
    seen = set()

    def comb(rows):
        # Dense hatching: short parallel strokes one unit apart laid
        # down by a stair-stepping pen-up walk.
        step = _seq(_jump(4, 1), _ap(RT, -4, 1))
        return _ap(LOOP, rows, Abs(step))

    def hatched(sides, size, rows):
        frame = _poly(sides, -sides, size)
        term = _chain([frame, _turn(2), comb(rows)])
        bitmap = render_term(term, lib)
        score = render.f1(render_term(frame, lib), bitmap)
        if not (_CORE_WINDOW[0] <= score <= _CORE_WINDOW[1]):
            return None
        return bitmap, term

    def take(sides, pool, want):
        pool = list(pool)
        rng.shuffle(pool)
        out = []
        for size, rows in pool:
            made = hatched(sides, size, rows)
            if made is not None and made[0] not in seen:
                seen.add(made[0])
                out.append(made)
                if len(out) == want:
                    return out
        raise RuntimeError("problem 96: not enough distinct panels")

    pos = take(4, [(s, h) for s in (5, 6, 7) for h in (3, 4, 5)], 6)
    neg = take(5, [(s, h) for s in (4, 5, 6) for h in (3, 4, 5)], 6)
    return _assemble(96, "a hatched square versus a hatched pentagon",
                     lib, pos, neg, None)


# ---------- corpus assembly ----------

_BUILDERS = {
    4: _problem_4,
    14: _problem_14,
    16: _problem_16,
    21: _problem_21,
    23: _problem_23,
    24: _problem_24,
    36: _problem_36,
    40: _problem_40,
    53: _problem_53,
    60: _problem_60,
    75: _problem_75,
    85: _problem_85,
    94: _problem_94,
    96: _problem_96,
}


def build_problem(bp_id: int, seed: int) -> BongardProblem:
    """One problem, fully determined by (bp_id, seed)."""
    if bp_id not in _BUILDERS:
        raise ValueError("unknown problem id %r" % (bp_id,))
    rng = random.Random("bongard:%d:%d" % (seed, bp_id))
    return _BUILDERS[bp_id](rng)


def build_corpus(seed: int) -> List[BongardProblem]:
    """All fourteen problems in ascending id order."""
    return [build_problem(bp_id, seed) for bp_id in ALL_IDS]


def reference_check(problem: BongardProblem) -> Tuple[int, int]:
    """Coverage of the reference theory over the generator traces.

    Returns (positives covered, negatives covered); a sound reference
    pair gives (6, 0).
    """
    if problem.theory_text is None:
        raise ValueError("problem %d has no reference theory" % problem.id)
    theory = ilp.parse_theory(problem.theory_text)
    records = [trace_program("p%d" % p.index, p.program, problem.library)
               for p in problem.panels]
    facts = FactSet.from_traces(records)
    pos_hits = sum(ilp.covers(theory, "p%d" % p.index, facts)
                   for p in problem.positives)
    neg_hits = sum(ilp.covers(theory, "p%d" % p.index, facts)
                   for p in problem.negatives)
    return pos_hits, neg_hits


# ---------- corpus files ----------

def write_corpus(corpus: Sequence[BongardProblem], out_dir) -> None:
    """Write bp<id>/p<k>.pbm panels plus a meta file per problem."""
    root = Path(out_dir)
    for problem in corpus:
        pdir = root / ("bp%d" % problem.id)
        pdir.mkdir(parents=True, exist_ok=True)
        for panel in problem.panels:
            path = pdir / ("p%d.pbm" % panel.index)
            path.write_text(render.bitmap_to_pbm(panel.bitmap))
        meta = ["concept: %s" % problem.concept,
                "polarity: %s" % " ".join(p.polarity for p in problem.panels),
                "expected: %s" % problem.expected]
        (pdir / "meta").write_text("\n".join(meta) + "\n")


def read_meta(path) -> dict:
    """Parse a problem meta file into its three fields."""
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(":")
        out[key.strip()] = value.strip()
    if set(out) != {"concept", "polarity", "expected"}:
        raise ValueError("bad meta file %s" % path)
    out["polarity"] = tuple(out["polarity"].split())
    return out


def read_corpus_problem(corpus_dir, bp_id: int) -> Tuple[List[int], dict]:
    """Load one problem's panel bitmaps and meta from a corpus tree."""
    pdir = Path(corpus_dir) / ("bp%d" % bp_id)
    meta = read_meta(pdir / "meta")
    bitmaps = []
    for k in range(1, len(meta["polarity"]) + 1):
        bitmaps.append(render.pbm_to_bitmap((pdir / ("p%d.pbm" % k)).read_text()))
    return bitmaps, meta

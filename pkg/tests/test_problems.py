"""Corpus construction: determinism, panel invariants, reference pairs."""

import math

import pytest

from bongard import ilp, problems, render
from bongard.dsl import evaluate
from bongard.problems import (
    ALL_IDS,
    REPRESENTATION_IDS,
    SEARCH_IDS,
    SOLVED_IDS,
    BongardProblem,
    build_corpus,
    build_problem,
    expected_outcome,
    fill_polygon,
    read_corpus_problem,
    reference_check,
    write_corpus,
)


def test_id_partition():
    assert len(ALL_IDS) == 14
    assert set(SOLVED_IDS) == {16, 21, 23, 24, 36, 53, 60, 75}
    assert set(REPRESENTATION_IDS) == {4, 14, 94}
    assert set(SEARCH_IDS) == {40, 85, 96}
    assert not (set(SOLVED_IDS) & set(REPRESENTATION_IDS) & set(SEARCH_IDS))


def test_expected_outcome_table():
    assert expected_outcome(16) == "solved"
    assert expected_outcome(4) == "unsolved(representation-suspected)"
    assert expected_outcome(96) == "unsolved(search)"
    with pytest.raises(ValueError):
        expected_outcome(17)
    with pytest.raises(ValueError):
        expected_outcome(0)


def test_corpus_is_deterministic_in_seed():
    a = build_corpus(3)
    b = build_corpus(3)
    assert [p.id for p in a] == list(ALL_IDS)
    for pa, pb in zip(a, b):
        assert [x.bitmap for x in pa.panels] == [x.bitmap for x in pb.panels]
        assert pa.concept == pb.concept


def test_different_seeds_vary_some_panels():
    a = build_corpus(0)
    b = build_corpus(1)
    changed = sum(
        1
        for pa, pb in zip(a, b)
        if [x.bitmap for x in pa.panels] != [x.bitmap for x in pb.panels]
    )
    assert changed >= 10


@pytest.mark.parametrize("seed", [0, 1, 2, 17])
def test_panels_distinct_and_inky_under_any_seed(seed):
    for problem in build_corpus(seed):
        bitmaps = [p.bitmap for p in problem.panels]
        assert len(bitmaps) == 12
        assert len(set(bitmaps)) == 12
        assert all(render.ink(b) > 0 for b in bitmaps)
        assert [p.polarity for p in problem.panels] == ["pos"] * 6 + ["neg"] * 6


def test_generator_programs_reproduce_panels():
    for problem in build_corpus(0):
        for panel in problem.panels:
            if panel.program is None:
                assert problem.id in REPRESENTATION_IDS
            else:
                again = render.render_term(panel.program, problem.library)
                assert again == panel.bitmap


def test_painted_problems_have_no_programs():
    for bp_id in REPRESENTATION_IDS:
        problem = build_problem(bp_id, 0)
        assert all(p.program is None for p in problem.panels)


def test_reference_theories_separate_all_generator_traces():
    for bp_id in SOLVED_IDS:
        problem = build_problem(bp_id, 0)
        assert problem.theory_text is not None
        assert reference_check(problem) == (6, 0)


def test_reference_check_refuses_failure_problems():
    with pytest.raises(ValueError):
        reference_check(build_problem(40, 0))


def test_failure_problems_have_no_theory():
    for bp_id in REPRESENTATION_IDS + SEARCH_IDS:
        assert build_problem(bp_id, 0).theory_text is None


def test_search_failure_panels_have_cheap_core_in_window():
    # A partial drawing must reach the budget-failure window on every
    # panel, otherwise the failure would look representational.
    lo, hi = problems._CORE_WINDOW
    lib = problems.Library.uniform()
    core_bitmap = render.render_term(problems._spiral(9, 3), lib)
    problem = build_problem(40, 0)
    for panel in problem.panels:
        score = render.f1(core_bitmap, panel.bitmap)
        assert lo <= score <= hi


def test_filled_panels_swamp_any_stroke_drawing():
    # Strokes max out near 230 cells; solid figures must be big enough
    # that even a perfect-precision tracing scores under 0.8.
    for bp_id in (4, 94):
        problem = build_problem(bp_id, 0)
        for panel in problem.panels:
            area = render.ink(panel.bitmap)
            assert 2 * 230 / (230 + area) < 0.8


def test_fill_polygon_interior_exceeds_outline():
    square = [(-3.0, -3.0), (3.0, -3.0), (3.0, 3.0), (-3.0, 3.0)]
    filled = fill_polygon(square)
    outline = 0
    for i in range(4):
        for c, r in render.segment_cells(square[i], square[(i + 1) % 4]):
            outline |= 1 << (r * render.GRID + c)
    assert outline & filled == outline
    assert render.ink(filled) > 3 * render.ink(outline)
    # 6x6 world units spans 24 cell widths; the supercover outline can
    # widen the block by one boundary cell on each side.
    assert 24 * 24 <= render.ink(filled) <= 26 * 26


def test_triangle_sits_above_square_in_36():
    problem = build_problem(36, 0)
    for panel in problem.positives:
        result = evaluate(panel.program, problem.library)
        tri = [s for s in result.steps if s.name == "f0"]
        sq = [s for s in result.steps if s.name == "f1"]
        assert len(tri) == 1 and len(sq) == 1
        tri_y = [y for _, y in _stroke_points(result.strokes[:3])]
        sq_y = [y for _, y in _stroke_points(result.strokes[3:])]
        gap = (sum(tri_y) / len(tri_y)) - (sum(sq_y) / len(sq_y))
        assert gap >= 1.0


def _stroke_points(strokes):
    pts = []
    for x0, y0, x1, y1 in strokes:
        pts.append((x0, y0))
        pts.append((x1, y1))
    return pts


def test_circle_generator_in_24_closes_into_convex_loop():
    problem = build_problem(24, 0)
    inv = problem.library.inventions[0]
    result = evaluate(problems._f(0, 2), problem.library)
    assert inv.arity == 1
    assert len(result.strokes) == 8
    x0, y0 = result.strokes[0][0], result.strokes[0][1]
    xe, ye = result.strokes[-1][2], result.strokes[-1][3]
    assert math.hypot(xe - x0, ye - y0) < 1e-9
    cross = []
    for (ax, ay, bx, by), (cx, cy, dx, dy) in zip(result.strokes,
                                                  result.strokes[1:]):
        cross.append((bx - ax) * (dy - cy) - (by - ay) * (dx - cx))
    assert all(c > 0 for c in cross) or all(c < 0 for c in cross)


def test_corpus_round_trips_through_pbm_files(tmp_path):
    corpus = [build_problem(16, 5), build_problem(4, 5)]
    write_corpus(corpus, tmp_path)
    for problem in corpus:
        bitmaps, meta = read_corpus_problem(tmp_path, problem.id)
        assert bitmaps == [p.bitmap for p in problem.panels]
        assert meta["concept"] == problem.concept
        assert meta["expected"] == problem.expected
        assert meta["polarity"] == tuple(p.polarity for p in problem.panels)


def test_meta_rejects_missing_fields(tmp_path):
    bad = tmp_path / "meta"
    bad.write_text("concept: something\n")
    with pytest.raises(ValueError):
        problems.read_meta(bad)


def test_reference_theories_parse_under_engine_syntax():
    for bp_id in SOLVED_IDS:
        problem = build_problem(bp_id, 0)
        theory = ilp.parse_theory(problem.theory_text)
        assert ilp.render_theory(theory) == problem.theory_text + "\n"

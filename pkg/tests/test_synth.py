import math
from collections import Counter

import pytest

from bongard.dsl import Library, evaluate, parse, print_term
from bongard.oracles import brute_force_terms
from bongard.render import f1, rasterize, render_term
from bongard.synth import (
    Enumerator,
    SearchConfig,
    Solution,
    Task,
    Unsolved,
    _anti_unify,
    abstraction_step,
    corpus_dl,
    enumerate_terms,
    load_solutions,
    mine_candidates,
    production_counts,
    reweight,
    save_solutions,
    solve_task,
    solve_tasks,
    wake_sleep,
)

UNIFORM = Library.uniform()


def take(n, stream):
    out = []
    for item in stream:
        out.append(item)
        if len(out) >= n:
            break
    return out


# ---------- enumeration ----------

def test_first_emission_is_lex_least_cheapest():
    (term, cost), = take(1, enumerate_terms(UNIFORM, max_cost_bits=12.0))
    assert print_term(term) == "(rtfwint -1 -1)"
    assert cost == pytest.approx(10.965784, abs=1e-5)


def test_first_thousand_emissions_sorted_with_print_ties():
    emitted = take(1000, enumerate_terms(UNIFORM, max_cost_bits=30.0))
    costs = [c for _, c in emitted]
    assert costs == sorted(costs)
    for (t1, c1), (t2, c2) in zip(emitted, emitted[1:]):
        if abs(c1 - c2) < 1e-9:
            assert print_term(t1) < print_term(t2)


def test_enumeration_census_matches_brute_force():
    lib = Library.uniform(constants=(1, 2, 3))
    expected = brute_force_terms(lib, 14.0, max_depth=4)
    got = {}
    for term, cost in enumerate_terms(lib, max_cost_bits=14.0):
        text = print_term(term)
        assert text not in got, "duplicate emission"
        got[text] = cost
    assert set(got) == set(expected)
    for text, cost in got.items():
        assert cost == pytest.approx(expected[text], abs=1e-6)


def test_enumeration_respects_bound():
    for _, cost in enumerate_terms(UNIFORM, max_cost_bits=16.0):
        assert cost <= 16.0 + 1e-9


def test_empty_when_bound_below_cheapest():
    assert take(5, enumerate_terms(UNIFORM, max_cost_bits=5.0)) == []


def test_pop_budget_persists_across_calls():
    enum = Enumerator(UNIFORM, max_cost_bits=30.0)
    first = list(enum.emissions(max_pops=500))
    again = list(enum.emissions(max_pops=500))
    assert enum.pops == 1000
    # the stream resumes, never repeats
    texts = [print_term(t) for t, _ in first + again]
    assert len(texts) == len(set(texts))


# ---------- solving ----------

def mk_task(task_id, text, polarity="pos"):
    return Task(task_id, render_term(parse(text, UNIFORM), UNIFORM), polarity, "bp0")


def test_solve_task_is_mdl_optimal_up_to_threshold():
    gen = "(loop 4 (lam (rtfwint 4 2)))"
    res = solve_task(mk_task("p1", gen), UNIFORM,
                     SearchConfig(max_expansions=60_000, max_cost_bits=20.0))
    assert isinstance(res, Solution)
    assert res.match_f1 >= 0.95
    assert res.cost_bits <= UNIFORM.cost(parse(gen, UNIFORM)) + 1e-6


def test_blank_target_solves_immediately_with_zero_ink():
    res = solve_task(Task("p1", 0, "pos", "bp0"), UNIFORM,
                     SearchConfig(max_expansions=5_000, max_cost_bits=16.0))
    assert isinstance(res, Solution)
    assert res.match_f1 == 1.0
    assert rasterize(evaluate(res.term, UNIFORM).strokes) == 0


def test_unsolvable_target_reports_budget_and_best_f1():
    # a checkerboard is far from anything a few strokes can draw
    board = 0
    for r in range(64):
        for c in range(64):
            if (r + c) % 2 == 0:
                board |= 1 << (r * 64 + c)
    res = solve_task(Task("p1", board, "pos", "bp0"), UNIFORM,
                     SearchConfig(max_expansions=800, max_cost_bits=14.0))
    assert isinstance(res, Unsolved)
    assert res.reason == "budget"
    assert 0.0 < res.best_f1 < 0.95


def test_pooled_round_solves_several_targets_on_one_stream():
    tasks = [mk_task("p1", "(loop 4 (lam (rtfwint 4 2)))"),
             mk_task("p2", "(loop 3 (lam (rtfwint 3 3)))"),
             mk_task("p3", "(rtfwint 0 4)")]
    results = solve_tasks(tasks, UNIFORM,
                          SearchConfig(max_expansions=40_000, max_cost_bits=20.0))
    assert all(isinstance(results[t.task_id], Solution) for t in tasks)
    for t in tasks:
        sol = results[t.task_id]
        assert f1(render_term(sol.term, UNIFORM), t.target) >= 0.95


def test_solving_is_deterministic():
    tasks = [mk_task("p1", "(loop 5 (lam (rtfwint 5 2)))"),
             mk_task("p2", "(rtfwint 2 3)")]
    cfg = SearchConfig(max_expansions=30_000, max_cost_bits=20.0)
    a = solve_tasks(tasks, UNIFORM, cfg)
    b = solve_tasks(tasks, UNIFORM, cfg)
    for tid in a:
        assert print_term(a[tid].term) == print_term(b[tid].term)
        assert a[tid].cost_bits == b[tid].cost_bits


# ---------- fragment mining ----------

def corpus(texts, library=UNIFORM):
    return [Solution("p%d" % (i + 1), parse(t, library), 0.0, 1.0)
            for i, t in enumerate(texts)]


def test_square_corpus_invents_one_argument_fragment():
    sols = corpus(["(loop 4 (lam (rtfwint 4 %d)))" % m for m in (1, 2, 3, 4, 2, 3)])
    before = corpus_dl([s.term for s in sols], UNIFORM)
    lib, rewritten = abstraction_step(sols, UNIFORM, 1.0)
    assert len(lib.inventions) == 1
    inv = lib.inventions[0]
    assert inv.arity == 1
    assert print_term(inv.body) == "(lam (loop 4 (lam (rtfwint 4 $1))))"
    assert corpus_dl([s.term for s in rewritten], lib) < before - 1.0
    assert print_term(rewritten[0].term) == "(f0 1)"


def test_rewriting_preserves_rasters():
    texts = ["(seq (loop 4 (lam (rtfwint 4 2))) (rtfwint 0 3))",
             "(seq (loop 4 (lam (rtfwint 4 3))) (rtfwint 0 3))",
             "(loop 4 (lam (rtfwint 4 2)))"]
    sols = corpus(texts)
    lib, rewritten = abstraction_step(sols, UNIFORM, 1.0)
    for old, new in zip(sols, rewritten):
        assert render_term(old.term, UNIFORM) == render_term(new.term, lib)


def test_corpus_without_repeats_is_unchanged():
    sols = corpus(["(rtfwint 4 2)", "(loop 3 (lam (rtfwint 5 $0)))",
                   "(penup (lam (rtfwint 0 3)))"])
    lib, rewritten = abstraction_step(sols, UNIFORM, 1.0)
    assert lib.inventions == []
    assert [print_term(s.term) for s in rewritten] == [print_term(s.term) for s in sols]


def test_two_hole_fragment_links_repeated_constants():
    # each program repeats its polygon count in both loop and divisor slots
    sols = corpus(["(loop %d (lam (rtfwint %d %d)))" % (k, k, m)
                   for k, m in ((3, 1), (4, 1), (5, 2), (6, 2), (7, 3), (8, 3))])
    lib, rewritten = abstraction_step(sols, UNIFORM, 1.0)
    assert len(lib.inventions) == 1
    assert print_term(lib.inventions[0].body) == "(lam (lam (loop $1 (lam (rtfwint $2 $1)))))"
    assert print_term(rewritten[0].term) == "(f0 3 1)"


def test_currying_an_invention_is_not_a_fragment():
    base = UNIFORM.with_invention(
        parse("(lam (lam (loop $1 (lam (rtfwint $1 $0)))))", UNIFORM))
    sols = [Solution("p%d" % i, parse(t, base), 0.0, 1.0) for i, t in enumerate(
        ["(f0 3 1)", "(f0 3 2)", "(f0 3 4)", "(f0 5 1)", "(f0 5 2)", "(f0 5 4)"])]
    lib, rewritten = abstraction_step(sols, base, 1.0)
    assert len(lib.inventions) == 1  # nothing beyond the existing one
    assert [print_term(s.term) for s in rewritten] == [print_term(s.term) for s in sols]


def test_capture_blocks_generalizing_a_bound_variable():
    spiral = parse("(loop 9 (lam (rtfwint 9 $0)))", UNIFORM)
    arc = parse("(loop 3 (lam (rtfwint 5 2)))", UNIFORM)
    assert _anti_unify(spiral, arc, UNIFORM) is None


def test_identical_pair_yields_zero_hole_fragment():
    sols = corpus(["(seq (loop 4 (lam (rtfwint 4 2))) (rtfwint 0 1))",
                   "(seq (loop 4 (lam (rtfwint 4 2))) (rtfwint 0 -1))",
                   "(loop 4 (lam (rtfwint 4 2)))"])
    cands = mine_candidates([s.term for s in sols], UNIFORM)
    zero = [c for c in cands if c.arity == 0]
    assert zero and zero[0].body_print == "(loop 4 (lam (rtfwint 4 2)))"
    assert zero[0].uses == 3


# ---------- reweighting ----------

def test_reweight_matches_hand_counts():
    sols = corpus(["(rtfwint 4 2)",
                   "(seq (rtfwint 4 2) (rtfwint 4 4))",
                   "(loop 3 (lam (rtfwint 4 $0)))"])
    counts = production_counts([s.term for s in sols], UNIFORM)
    assert counts == Counter({("prim", "rtfwint"): 4, ("prim", "seq"): 1,
                              ("prim", "loop"): 1, ("const", 4): 5,
                              ("const", 2): 2, ("const", 3): 1, ("var",): 1})
    lib = reweight(UNIFORM, sols)
    # action class: 6 choices total (4+1+1), 5 productions, add-one
    assert lib.weight(("prim", "rtfwint")) == pytest.approx(-math.log2(5 / 11), abs=1e-9)
    assert lib.weight(("prim", "seq")) == pytest.approx(-math.log2(2 / 11), abs=1e-9)
    assert lib.weight(("prim", "penup")) == pytest.approx(-math.log2(1 / 11), abs=1e-9)
    # int class: 9 choices, 20 productions
    assert lib.weight(("const", 4)) == pytest.approx(-math.log2(6 / 29), abs=1e-9)
    assert lib.weight(("var",)) == pytest.approx(-math.log2(2 / 29), abs=1e-9)
    assert lib.normalization_check()


def test_reweight_empty_corpus_is_uniform():
    lib = reweight(UNIFORM, [])
    for key in lib.action_keys():
        assert lib.weight(key) == pytest.approx(math.log2(5), abs=1e-9)


def test_used_production_cheaper_than_unused():
    sols = corpus(["(loop 4 (lam (rtfwint 4 2)))"] )
    lib = reweight(UNIFORM, sols)
    assert lib.weight(("prim", "loop")) < lib.weight(("prim", "embed"))


# ---------- the learning loop ----------

def test_wake_sleep_zero_cycles_returns_input_library():
    out = wake_sleep([mk_task("p1", "(rtfwint 4 2)")], SearchConfig(cycles=0))
    assert out.library.inventions == []
    assert out.results == {}
    assert out.solved_per_cycle == []


def test_wake_sleep_solves_and_compresses():
    texts = ["(loop 4 (lam (rtfwint 4 %d)))" % m for m in (1, 2, 3)] + \
            ["(rtfwint 0 %d)" % m for m in (2, 4, 6)]
    tasks = [mk_task("p%d" % (i + 1), t) for i, t in enumerate(texts)]
    cfg = SearchConfig(max_expansions=50_000, max_cost_bits=20.0, cycles=2)
    out = wake_sleep(tasks, cfg)
    assert out.solved_per_cycle == [6, 6]
    assert any(inv.arity == 1 for inv in out.library.inventions)
    for t in tasks:
        sol = out.results[t.task_id]
        assert isinstance(sol, Solution)
        assert f1(render_term(sol.term, out.library), t.target) >= 0.95


# ---------- persistence ----------

def test_solutions_file_round_trip(tmp_path):
    lib = UNIFORM.with_invention(parse("(lam (loop 4 (lam (rtfwint 4 $1))))", UNIFORM))
    results = {
        "p1": Solution("p1", parse("(f0 2)", lib), 8.25, 1.0),
        "p2": Unsolved("p2", "budget", 0.4375),
    }
    path = tmp_path / "solutions.tsv"
    save_solutions(path, results, order=["p1", "p2"])
    text = path.read_text()
    assert text == "p1\t8.250000\t1.000000\t(f0 2)\np2\tUNSOLVED\tbudget\t0.437500\n"
    back = load_solutions(path, lib)
    assert print_term(back["p1"].term) == "(f0 2)"
    assert back["p2"] == Unsolved("p2", "budget", 0.4375)

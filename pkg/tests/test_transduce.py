import pytest

from bongard.dsl import Library, evaluate, parse
from bongard.oracles import resimulate_poses
from bongard.transduce import (
    FactSet,
    HasInfo,
    TraceRecord,
    emit_facts,
    format_angle,
    format_number,
    parse_facts,
    trace_program,
)


LIB = Library.uniform()


def record(pid, text, library=LIB):
    return trace_program(pid, parse(text, library), library)


def test_format_number_basics():
    assert format_number(0.0) == "0.0"
    assert format_number(2) == "2.0"
    assert format_number(2.5) == "2.5"
    assert format_number(-0.5) == "-0.5"
    assert format_number(10) == "10.0"
    assert format_number(123.4567) == "123.4567"
    assert format_number(1.73205) == "1.7321"


def test_format_number_zero_edge_cases():
    # negative zero and dust below the print tolerance both come out as 0.0
    assert format_number(-0.0) == "0.0"
    assert format_number(1e-9) == "0.0"
    assert format_number(-4.4e-16) == "0.0"


def test_format_angle_wraps():
    assert format_angle(0.0) == "0.0"
    assert format_angle(360.0) == "0.0"
    assert format_angle(-90.0) == "270.0"
    assert format_angle(450.0) == "90.0"
    assert format_angle(719.5) == "359.5"
    # rounds up to 360.0000 in fixed point, then wraps
    assert format_angle(359.99999) == "0.0"


def test_identity_program_has_empty_trace():
    rec = record("p1", "(lam $0)")
    assert rec.steps == ()
    assert rec.states == ["s0"]
    assert emit_facts([rec]) == "trace(p1,[s0]).\n"


def test_single_move_facts():
    assert emit_facts([record("p1", "(rtfwint 4 2)")]) == (
        "trace(p1,[s0,s1]).\n"
        "has_info(p1,s0,rtfwint,[4,2],[0.0,2.0,90.0]).\n"
    )


def test_loop_flattens_to_one_step_per_iteration():
    text = emit_facts([record("p1", "(loop 3 (lam (rtfwint 3 2)))")])
    assert text == (
        "trace(p1,[s0,s1,s2,s3]).\n"
        "has_info(p1,s0,rtfwint,[3,2],[-1.0,1.7321,120.0]).\n"
        "has_info(p1,s1,rtfwint,[3,2],[-2.0,0.0,240.0]).\n"
        "has_info(p1,s2,rtfwint,[3,2],[0.0,0.0,0.0]).\n"
    )


def test_loop_variable_arguments_are_evaluated_integers():
    rec = record("p1", "(loop 3 (lam (rtfwint 4 $0)))")
    assert [s.args for s in rec.steps] == [(4, 1), (4, 2), (4, 3)]


def test_penup_moves_are_recorded():
    rec = record("p1", "(seq (penup (lam (rtfwint 4 3))) (rtfwint 0 2))")
    assert [s.name for s in rec.steps] == ["rtfwint", "rtfwint"]
    assert [s.args for s in rec.steps] == [(4, 3), (0, 2)]
    # the lifted move still changes pose
    assert emit_facts([rec]).splitlines()[1] == (
        "has_info(p1,s0,rtfwint,[4,3],[0.0,3.0,90.0]).")


def test_embed_body_steps_are_recorded():
    rec = record("p1", "(seq (embed (lam (rtfwint 4 2))) (rtfwint 2 1))")
    assert [s.args for s in rec.steps] == [(4, 2), (2, 1)]
    # embed restored the origin pose before the second move
    assert rec.steps[1].post.x == pytest.approx(-1.0)
    assert rec.steps[1].post.heading == 180.0


def test_invention_calls_are_atomic():
    lib = LIB.with_invention(parse("(lam (lam (loop $1 (lam (rtfwint $2 $1)))))", LIB))
    text = emit_facts([record("p1", "(f0 4 2)", lib)])
    assert text == (
        "trace(p1,[s0,s1]).\n"
        "has_info(p1,s0,f0,[4,2],[0.0,0.0,0.0]).\n"
    )
    rec = record("p2", "(seq (f0 4 2) (rtfwint 4 1))", lib)
    assert [s.name for s in rec.steps] == ["f0", "rtfwint"]


def test_programs_sort_naturally():
    recs = [record(pid, "(rtfwint 4 %d)" % (i + 1))
            for i, pid in enumerate(["p10", "p2", "p1"])]
    lines = emit_facts(recs).splitlines()
    assert [l for l in lines if l.startswith("trace")] == [
        "trace(p1,[s0,s1]).",
        "trace(p2,[s0,s1]).",
        "trace(p10,[s0,s1]).",
    ]


def test_duplicate_program_id_rejected():
    recs = [record("p1", "(rtfwint 4 2)"), record("p1", "(rtfwint 4 1)")]
    with pytest.raises(ValueError, match="duplicate"):
        FactSet.from_traces(recs)


def test_parse_round_trip():
    lib = LIB.with_invention(parse("(lam (lam (loop $1 (lam (rtfwint $2 $1)))))", LIB))
    text = emit_facts([
        record("p1", "(loop 5 (lam (rtfwint 5 2)))"),
        record("p2", "(seq (f0 3 2) (f0 4 1))", lib),
        record("p3", "(lam $0)"),
    ])
    parsed = parse_facts(text)
    assert parsed.render() == text
    assert parsed.programs == ["p1", "p2", "p3"]
    assert parsed.trace["p2"] == ["s0", "s1", "s2"]
    assert parsed.infos["p2"][0].prim == "f0"
    assert parsed.infos["p2"][0].args == (3, 2)
    assert parsed.infos["p3"] == []


def test_parse_rejects_second_trace_atom():
    text = "trace(p1,[s0]).\ntrace(p1,[s0]).\n"
    with pytest.raises(ValueError, match="second trace"):
        parse_facts(text)


def test_parse_rejects_orphan_has_info():
    with pytest.raises(ValueError, match="before trace"):
        parse_facts("has_info(p1,s0,rtfwint,[4,2],[0.0,2.0,90.0]).\n")


def test_parse_rejects_malformed_lines():
    for bad in [
        "Trace(p1,[s0]).",
        "trace(p1,[s0])",
        "trace(p1,[s0]). ",
        "has_info(p1,s0,rtfwint,[4,2],[0.0,2.0,90]).",
        "pos(p1).",
    ]:
        with pytest.raises(ValueError, match="unparseable|before trace"):
            parse_facts("trace(p1,[s0,s1]).\n" + bad + "\n")


def test_parse_accepts_empty_argument_list():
    text = "trace(p1,[s0,s1]).\nhas_info(p1,s0,f0,[],[0.0,0.0,0.0]).\n"
    parsed = parse_facts(text)
    assert parsed.infos["p1"][0].args == ()
    assert parsed.render() == text


def test_emitted_poses_match_independent_resimulation():
    lib = LIB.with_invention(parse("(lam (lam (loop $1 (lam (rtfwint $2 $1)))))", LIB))
    for library, text in [
        (LIB, "(loop 6 (lam (rtfwint 6 2)))"),
        (LIB, "(seq (rtfwint 4 2) (loop 3 (lam (rtfwint -3 $0))))"),
        (lib, "(seq (f0 5 2) (rtfwint 0 1))"),
    ]:
        term = parse(text, library)
        steps = evaluate(term, library).steps
        redone = resimulate_poses(term, library)
        assert len(steps) == len(redone)
        for step, pose in zip(steps, redone):
            assert abs(step.post.x - pose.x) <= 1e-9
            assert abs(step.post.y - pose.y) <= 1e-9
            assert abs(step.post.heading - pose.heading) <= 1e-9
        fs = FactSet.from_traces([TraceRecord("p1", tuple(steps))])
        rendered = [info.pose for info in fs.infos["p1"]]
        redone_text = [(format_number(p.x), format_number(p.y),
                        format_angle(p.heading)) for p in redone]
        assert rendered == redone_text


def test_resimulate_rejects_embed():
    term = parse("(embed (lam (rtfwint 4 2)))", LIB)
    with pytest.raises(ValueError, match="embed"):
        resimulate_poses(term, LIB)

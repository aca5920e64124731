import hashlib
import json

import pytest

from flipcalc.core import (
    FiniteStructure,
    PartitionedAtom,
    Relation,
    atomic_type_partition,
)
from flipcalc.errors import DomainError, FormatError
from flipcalc.flips import (
    FlipSpec,
    FlipTrace,
    GraphFlipStep,
    make_syntactic_step,
)
from flipcalc.io import (
    RunReport,
    dumps_structure,
    dumps_trace,
    file_sha256,
    graph_from_text,
    graph_to_dot,
    graph_to_text,
    load_structure,
    load_trace,
    make_report,
    parse_structure,
    save_structure,
    save_trace,
    structure_from_json,
    structure_to_json,
    trace_from_json,
    trace_to_json,
)

R3 = FiniteStructure(5, [Relation("R", 3, frozenset({(0, 1, 2), (2, 3, 4)}))])


def star(n):
    return FiniteStructure.from_edges(n + 1, [(0, i) for i in range(1, n + 1)])


def path(n):
    return FiniteStructure.from_edges(n, [(i, i + 1) for i in range(n - 1)])


# -- structure JSON -----------------------------------------------------------


def test_structure_json_round_trip():
    for s in (R3, star(4), FiniteStructure(3)):
        assert structure_from_json(structure_to_json(s)) == s


def test_structure_dumps_is_canonical():
    blob = dumps_structure(R3)
    assert parse_structure(blob) == R3
    assert dumps_structure(parse_structure(blob)) == blob


def test_structure_json_shape():
    data = structure_to_json(star(2))
    assert data == {
        "universe": 3,
        "graph": True,
        "relations": {
            "E": {"arity": 2, "tuples": [[0, 1], [0, 2], [1, 0], [2, 0]]}
        },
    }


def test_structure_json_rejects_malformed():
    bad = [
        [],
        {},
        {"universe": -1},
        {"universe": "three"},
        {"universe": 2, "graph": "yes"},
        {"universe": 2, "extra": 1},
        {"universe": 2, "relations": []},
        {"universe": 2, "relations": {"R": {"arity": 0, "tuples": []}}},
        {"universe": 2, "relations": {"R": {"arity": 1, "tuples": [[0], "x"]}}},
    ]
    for data in bad:
        with pytest.raises(FormatError):
            structure_from_json(data)


# -- graph text ---------------------------------------------------------------


def test_graph_text_round_trip():
    g = path(4)
    assert graph_from_text(graph_to_text(g)) == g
    assert graph_to_text(g) == "4\n0 1\n1 2\n2 3\n"


def test_graph_text_comments_and_blanks():
    text = "# a path\n3\n\n0 1  # first edge\n1 2\n"
    assert graph_from_text(text) == path(3)


def test_graph_text_rejects_malformed():
    for text in ("", "x\n", "3 3\n", "3\n0\n", "3\n0 5\n", "3\n1 1\n", "3\n0 -1\n"):
        with pytest.raises(FormatError):
            graph_from_text(text)


def test_text_format_is_graph_only():
    with pytest.raises(DomainError):
        graph_to_text(R3)


def test_parse_structure_sniffs_format():
    assert parse_structure(dumps_structure(R3)) == R3
    assert parse_structure("  \n2\n0 1\n") == FiniteStructure.from_edges(2, [(0, 1)])
    with pytest.raises(FormatError):
        parse_structure("{not json")


def test_file_round_trip(tmp_path):
    target = tmp_path / "g.json"
    save_structure(target, star(3))
    assert load_structure(target) == star(3)
    text_target = tmp_path / "g.txt"
    save_structure(text_target, star(3), fmt="text")
    assert load_structure(text_target) == star(3)
    with pytest.raises(FormatError):
        load_structure(tmp_path / "missing.json")
    with pytest.raises(DomainError):
        save_structure(target, star(3), fmt="yaml")


# -- traces -------------------------------------------------------------------


def _spoke_toggle_trace(g):
    part = atomic_type_partition(g, (0,))
    spec = FlipSpec.from_bits(part, "010")
    return FlipTrace((GraphFlipStep((0,), spec),))


def test_graph_trace_round_trip():
    g = star(4)
    trace = _spoke_toggle_trace(g)
    data = trace_to_json(trace)
    parsed = trace_from_json(data, g)
    assert parsed == trace
    assert parsed.replay(g) == trace.replay(g)


def test_trace_text_round_trip(tmp_path):
    g = star(4)
    trace = _spoke_toggle_trace(g)
    target = tmp_path / "trace.json"
    save_trace(target, trace)
    assert load_trace(target, g) == trace


def test_chained_trace_round_trip():
    g = star(3)
    first = FlipSpec.from_bits(atomic_type_partition(g, ()), "1")
    flipped = FlipTrace((GraphFlipStep((), first),)).replay(g)
    second = FlipSpec.from_bits(atomic_type_partition(flipped, (0,)), "010")
    trace = FlipTrace((GraphFlipStep((), first), GraphFlipStep((0,), second)))
    parsed = trace_from_json(trace_to_json(trace), g)
    assert parsed == trace
    assert parsed.replay(g) == trace.replay(g)


def test_syntactic_trace_round_trip():
    atom = PartitionedAtom("R", 3, (0,), (1, 2))
    step = make_syntactic_step(R3, atom, (0,), frozenset({(0, 0)}))
    trace = FlipTrace((step,))
    parsed = trace_from_json(trace_to_json(trace), R3)
    assert parsed == trace
    assert parsed.replay(R3) == trace.replay(R3)


def test_trace_refuses_wrong_structure():
    g = star(4)
    data = trace_to_json(_spoke_toggle_trace(g))
    with pytest.raises(FormatError):
        trace_from_json(data, path(5))


def test_trace_rejects_malformed():
    g = star(2)
    for data in (
        [],
        {},
        {"steps": [{}]},
        {"steps": [{"kind": "mystery"}]},
        {"steps": [{"kind": "graph", "params": "no", "matrix": "0"}]},
        {"steps": [{"kind": "graph", "params": [0], "matrix": "012"}]},
    ):
        with pytest.raises(FormatError):
            trace_from_json(data, g)


# -- DOT ----------------------------------------------------------------------


def test_dot_output_is_deterministic():
    g = path(3)
    dot = graph_to_dot(
        g.universe_size, g.edge_set(), filled={1}, bold_edges={(2, 1)}
    )
    assert dot == (
        "graph G {\n"
        "  0;\n"
        "  1 [style=filled, fillcolor=lightgray];\n"
        "  2;\n"
        "  0 -- 1;\n"
        "  1 -- 2 [style=bold];\n"
        "}\n"
    )


# -- run reports --------------------------------------------------------------


def test_report_hashes_inputs(tmp_path):
    target = tmp_path / "g.json"
    save_structure(target, star(2))
    report = make_report(
        "validate", [target], parameters={"strict": True}, results={"ok": True}
    )
    digest = hashlib.sha256(target.read_bytes()).hexdigest()
    assert report.inputs == ((str(target), digest),)
    assert file_sha256(target) == digest


def test_report_stable_dict_drops_timing(tmp_path):
    target = tmp_path / "g.json"
    save_structure(target, star(2))
    a = make_report("gaifman", [target], results={"edges": [[0, 1], [0, 2]]})
    b = make_report("gaifman", [target], results={"edges": [[0, 1], [0, 2]]})
    assert a.stable_dict() == b.stable_dict()
    assert "timing_s" not in a.stable_dict()
    assert "timing_s" in a.as_dict()
    parsed = json.loads(a.to_json())
    assert parsed["command"] == "gaifman"
    assert isinstance(parsed["timing_s"], float)


def test_report_is_a_value(tmp_path):
    report = make_report("srk", [], parameters={"r": 1}, results={"value": 2})
    assert isinstance(report, RunReport)
    assert report.version
    assert report.inputs == ()

"""File formats and reporting: structure files (JSON and graph text),
flip-trace files, DOT export, and deterministic run reports.

Two structure formats exist and are value-preserving round trips:

* JSON -- ``{"universe": n, "graph": bool, "relations": {"R": {"arity": k,
  "tuples": [[...], ...]}}}``, the only structured format.
* graph text -- first line the vertex count, then one ``u v`` edge per
  line; ``#`` starts a comment.  Graphs only.

Trace files carry, per step, the parameter set, the partition
fingerprint, and the flip matrix; parsing a trace therefore needs the
structure it applies to, and the fingerprints are checked against it.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path
from typing import Optional

from .core import FiniteStructure, PartitionedAtom, Relation, atomic_type_partition
from .errors import DomainError, FormatError
from .flips import (
    FlipSpec,
    FlipTrace,
    GraphFlipStep,
    SyntacticFlipStep,
    apply_graph_flip,
    apply_syntactic_flip,
    make_syntactic_step,
)

__all__ = [
    "tool_version",
    "structure_to_json",
    "structure_from_json",
    "dumps_structure",
    "parse_structure",
    "load_structure",
    "save_structure",
    "graph_to_text",
    "graph_from_text",
    "trace_to_json",
    "trace_from_json",
    "dumps_trace",
    "load_trace",
    "save_trace",
    "graph_to_dot",
    "RunReport",
    "file_sha256",
    "make_report",
]


def tool_version() -> str:
    try:
        return metadata.version("flipcalc")
    except metadata.PackageNotFoundError:
        return "0+unknown"


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------


def structure_to_json(structure: FiniteStructure) -> dict:
    return {
        "universe": structure.universe_size,
        "graph": structure.graph,
        "relations": {
            name: {
                "arity": rel.arity,
                "tuples": sorted([list(t) for t in rel.tuples]),
            }
            for name, rel in sorted(structure.relations.items())
        },
    }


def _expect(condition: bool, message: str):
    if not condition:
        raise FormatError(message)


def structure_from_json(data) -> FiniteStructure:
    _expect(isinstance(data, dict), "structure JSON must be an object")
    _expect("universe" in data, "structure JSON needs a 'universe' field")
    universe = data["universe"]
    _expect(isinstance(universe, int) and universe >= 0, "'universe' must be a nonnegative integer")
    graph = data.get("graph", False)
    _expect(isinstance(graph, bool), "'graph' must be a boolean")
    raw_rels = data.get("relations", {})
    _expect(isinstance(raw_rels, dict), "'relations' must be an object")
    unknown = set(data) - {"universe", "graph", "relations"}
    _expect(not unknown, f"unknown structure fields: {sorted(unknown)}")
    relations = []
    for name in sorted(raw_rels):
        body = raw_rels[name]
        _expect(isinstance(body, dict), f"relation {name!r} must be an object")
        _expect(
            isinstance(body.get("arity"), int) and body["arity"] >= 1,
            f"relation {name!r} needs a positive integer 'arity'",
        )
        tuples = body.get("tuples", [])
        _expect(isinstance(tuples, list), f"relation {name!r} 'tuples' must be a list")
        parsed = set()
        for t in tuples:
            _expect(
                isinstance(t, list) and all(isinstance(v, int) for v in t),
                f"relation {name!r} tuples must be lists of integers",
            )
            parsed.add(tuple(t))
        relations.append(Relation(name, body["arity"], frozenset(parsed)))
    return FiniteStructure(universe, relations, graph=graph)


def dumps_structure(structure: FiniteStructure) -> str:
    return json.dumps(structure_to_json(structure), indent=2, sort_keys=True) + "\n"


def graph_to_text(structure: FiniteStructure) -> str:
    if not structure.graph:
        raise DomainError("the text format holds graphs only")
    lines = [str(structure.universe_size)]
    lines.extend(f"{u} {v}" for u, v in sorted(structure.edge_set()))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> FiniteStructure:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        bare = raw.split("#", 1)[0].strip()
        if bare:
            rows.append((lineno, bare))
    _expect(bool(rows), "graph text needs a vertex-count line")
    lineno, head = rows[0]
    parts = head.split()
    _expect(
        len(parts) == 1 and parts[0].isdigit(),
        f"line {lineno}: expected a single vertex count, got {head!r}",
    )
    n = int(parts[0])
    edges = []
    for lineno, row in rows[1:]:
        parts = row.split()
        _expect(
            len(parts) == 2 and all(p.lstrip("-").isdigit() for p in parts),
            f"line {lineno}: expected 'u v', got {row!r}",
        )
        u, v = int(parts[0]), int(parts[1])
        _expect(
            0 <= u < n and 0 <= v < n,
            f"line {lineno}: edge {u} {v} outside universe of size {n}",
        )
        _expect(u != v, f"line {lineno}: loop edge {u} {v} not allowed")
        edges.append((u, v))
    return FiniteStructure.from_edges(n, edges)


def parse_structure(text: str) -> FiniteStructure:
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
        return structure_from_json(data)
    return graph_from_text(text)


def load_structure(path) -> FiniteStructure:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return parse_structure(text)


def save_structure(path, structure: FiniteStructure, fmt: str = "json"):
    if fmt == "json":
        payload = dumps_structure(structure)
    elif fmt == "text":
        payload = graph_to_text(structure)
    else:
        raise DomainError(f"unknown structure format {fmt!r}")
    try:
        Path(path).write_text(payload)
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def trace_to_json(trace: FlipTrace) -> dict:
    steps = []
    for st in trace.steps:
        if isinstance(st, GraphFlipStep):
            steps.append(
                {
                    "kind": "graph",
                    "params": list(st.params),
                    "fingerprint": st.spec.partition.fingerprint(),
                    "matrix": st.spec.matrix_bits(),
                }
            )
        elif isinstance(st, SyntacticFlipStep):
            steps.append(
                {
                    "kind": "syntactic",
                    "relation": st.atom.relation,
                    "arity": st.atom.arity,
                    "x_positions": list(st.atom.x_positions),
                    "y_positions": list(st.atom.y_positions),
                    "params": list(st.params),
                    "x_fingerprint": st.x_partition.fingerprint(),
                    "y_fingerprint": st.y_partition.fingerprint(),
                    "pairs": sorted([list(p) for p in st.flipped_pairs]),
                    "step_index": st.step_index,
                }
            )
        else:
            raise DomainError(f"cannot serialize trace step of type {type(st).__name__}")
    return {"steps": steps}


def _parse_graph_step(entry: dict, current: FiniteStructure):
    params = entry.get("params")
    _expect(
        isinstance(params, list) and all(isinstance(p, int) for p in params),
        "graph step 'params' must be a list of integers",
    )
    matrix = entry.get("matrix")
    _expect(isinstance(matrix, str) and set(matrix) <= {"0", "1"}, "graph step 'matrix' must be a bit string")
    partition = atomic_type_partition(current, params)
    stored = entry.get("fingerprint")
    if stored is not None and stored != partition.fingerprint():
        raise FormatError(
            "trace does not fit the structure: stored partition fingerprint "
            "differs from the one derived here"
        )
    spec = FlipSpec.from_bits(partition, matrix)
    step = GraphFlipStep(tuple(params), spec)
    return step, apply_graph_flip(current, spec)


def _parse_syntactic_step(entry: dict, current: FiniteStructure):
    for key, kind in (
        ("relation", str),
        ("arity", int),
        ("x_positions", list),
        ("y_positions", list),
        ("params", list),
        ("pairs", list),
    ):
        _expect(isinstance(entry.get(key), kind), f"syntactic step needs a {kind.__name__} '{key}'")
    atom = PartitionedAtom(
        entry["relation"],
        entry["arity"],
        tuple(entry["x_positions"]),
        tuple(entry["y_positions"]),
    )
    pairs = []
    for p in entry["pairs"]:
        _expect(
            isinstance(p, list) and len(p) == 2 and all(isinstance(v, int) for v in p),
            "syntactic step 'pairs' must be [x_class, y_class] lists",
        )
        pairs.append(tuple(p))
    step = make_syntactic_step(
        current,
        atom,
        entry["params"],
        frozenset(pairs),
        step_index=entry.get("step_index", 0),
    )
    for key, partition in (("x_fingerprint", step.x_partition), ("y_fingerprint", step.y_partition)):
        stored = entry.get(key)
        if stored is not None and stored != partition.fingerprint():
            raise FormatError(
                "trace does not fit the structure: stored partition fingerprint "
                "differs from the one derived here"
            )
    return step, apply_syntactic_flip(current, step)


def trace_from_json(data, structure: FiniteStructure) -> FlipTrace:
    """Rebuild a trace against the structure it applies to.

    Partitions are re-derived step by step and checked against the stored
    fingerprints, so a trace written for one structure refuses to parse
    against another.
    """
    _expect(isinstance(data, dict), "trace JSON must be an object")
    _expect(isinstance(data.get("steps"), list), "trace JSON needs a 'steps' list")
    current = structure
    steps = []
    for idx, entry in enumerate(data["steps"]):
        _expect(isinstance(entry, dict), f"trace step {idx} must be an object")
        kind = entry.get("kind")
        if kind == "graph":
            step, current = _parse_graph_step(entry, current)
        elif kind == "syntactic":
            step, current = _parse_syntactic_step(entry, current)
        else:
            raise FormatError(f"trace step {idx} has unknown kind {kind!r}")
        steps.append(step)
    return FlipTrace(tuple(steps))


def dumps_trace(trace: FlipTrace) -> str:
    return json.dumps(trace_to_json(trace), indent=2, sort_keys=True) + "\n"


def load_trace(path, structure: FiniteStructure) -> FlipTrace:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    return trace_from_json(data, structure)


def save_trace(path, trace: FlipTrace):
    try:
        Path(path).write_text(dumps_trace(trace))
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# DOT export (presentation only)
# ---------------------------------------------------------------------------


def graph_to_dot(
    universe_size: int,
    edges,
    *,
    name: str = "G",
    filled=frozenset(),
    bold_edges=frozenset(),
) -> str:
    """Undirected DOT text with deterministic ordering; ``filled`` vertices
    are drawn shaded and ``bold_edges`` thick."""
    filled = set(filled)
    bold = {(min(u, v), max(u, v)) for u, v in bold_edges}
    lines = [f"graph {name} {{"]
    for v in range(universe_size):
        attrs = ' [style=filled, fillcolor=lightgray]' if v in filled else ""
        lines.append(f"  {v}{attrs};")
    for u, v in sorted({(min(a, b), max(a, b)) for a, b in edges}):
        attrs = ' [style=bold]' if (u, v) in bold else ""
        lines.append(f"  {u} -- {v}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Run reports
# ---------------------------------------------------------------------------


def file_sha256(path) -> str:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class RunReport:
    """Machine-readable record of one command run.

    Identical inputs give identical reports apart from ``timing_s``;
    :meth:`stable_dict` drops the timing so reports can be compared
    byte-for-byte.
    """

    command: str
    inputs: tuple  # ((path, sha256), ...)
    parameters: dict
    results: dict
    verification: tuple
    timing_s: float
    version: str

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": [{"path": p, "sha256": h} for p, h in self.inputs],
            "parameters": self.parameters,
            "results": self.results,
            "verification": list(self.verification),
            "timing_s": self.timing_s,
            "version": self.version,
        }

    def stable_dict(self) -> dict:
        out = self.as_dict()
        del out["timing_s"]
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"


def make_report(
    command: str,
    input_paths=(),
    parameters: Optional[dict] = None,
    results: Optional[dict] = None,
    verification=(),
    started: Optional[float] = None,
) -> RunReport:
    inputs = tuple((str(p), file_sha256(p)) for p in input_paths)
    timing = 0.0 if started is None else max(0.0, time.monotonic() - started)
    return RunReport(
        command=command,
        inputs=inputs,
        parameters=dict(parameters or {}),
        results=dict(results or {}),
        verification=tuple(verification),
        timing_s=round(timing, 6),
        version=tool_version(),
    )

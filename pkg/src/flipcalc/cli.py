"""Command-line entry point: analysis subcommands, file I/O, machine-readable
run reports, and the HTTP session server.

Every subcommand accepts ``--json`` (full :class:`~flipcalc.io.RunReport` as
JSON), ``--seed`` (recorded for reproducibility; all searches are
deterministic), and the uniform budget flags ``--flip-budget-bits`` (env
fallback ``FLIPCALC_BUDGET_BITS``), ``--srk-depth``, and ``--tuple-budget``.
Exit codes: 0 success, 1 domain error, 2 budget exhausted, 3 I/O or format
problem, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Optional

from .core import (
    FiniteStructure,
    PartitionedAtom,
    atomic_type_partition,
    gaifman,
    incidence_graph,
    validate,
)
from .discrepancy import discrepancy_graph, s_avoiding_components
from .errors import BudgetExceeded, DomainError, FormatError
from .flatness_sparsity import (
    biclique,
    biclique_subgraph,
    bipartite_pattern,
    clique,
    flip_flatness_search,
    half_graph,
    ladder_index,
    path as path_graph,
    star,
    subdivided_clique_search,
)
from .flips import FlipSpec, FlipTrace, GraphFlipStep, enumerate_s_definable_flips
from .game import connector_move, game_new, game_value, separator_move, srk
from .independence import IndependenceQuery, flip_dist, flip_independent
from .io import (
    graph_to_dot,
    load_structure,
    make_report,
    save_structure,
    save_trace,
    structure_from_json,
    trace_from_json,
)
from .separation import ModelPair, separate_element, synthesize_neighborhood_definition
from .service import (
    ball_annotations,
    create_app,
    domain_error_status,
    engine_turns,
    state_payload,
)

__all__ = ["main", "dispatch", "build_parser"]


# ------------------------------------------------------------------ parsing


def _parse_ids(text: Optional[str]) -> tuple:
    """Comma-separated ids -> tuple of ints; empty / None -> ()."""
    if text is None:
        return ()
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(int(part))
        except ValueError:
            raise DomainError(f"expected a comma-separated id list, got {text!r}")
    return tuple(out)


def _parse_pair(text: str) -> tuple:
    ids = _parse_ids(text)
    if len(ids) != 2:
        raise DomainError(f"expected exactly two ids, got {text!r}")
    return ids


def _parse_cross(text: str, flag: str) -> tuple:
    left, sep, right = text.partition("x")
    if not sep:
        raise DomainError(f"{flag} must look like LEFTxRIGHT, got {text!r}")
    return left, right


def _read_json_file(path) -> object:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}")
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}")


def _write_text(path, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc}")


def _require_graph(structure: FiniteStructure) -> FiniteStructure:
    if not structure.graph:
        raise DomainError("this command needs a graph-flagged structure")
    return structure


def _binary_atom(structure: FiniteStructure, name: str) -> PartitionedAtom:
    rel = structure.relations.get(name)
    if rel is None:
        raise DomainError(f"unknown relation {name!r}")
    if rel.arity != 2:
        raise DomainError(
            f"relation {name!r} has arity {rel.arity}; the command line handles binary "
            "relations (use the library API for other splits)"
        )
    return PartitionedAtom(name, 2, (0,), (1,))


def _as_trace(witness, S) -> FlipTrace:
    if isinstance(witness, FlipTrace):
        return witness
    return FlipTrace((GraphFlipStep(tuple(S), witness),))


# ------------------------------------------------------------------- output


def _print_block(results: dict, indent: int = 0):
    pad = " " * indent
    for key, value in results.items():
        if isinstance(value, dict):
            print(f"{pad}{key}:")
            _print_block(value, indent + 2)
        elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
            print(f"{pad}{key}: [{len(value)} entries]")
        else:
            print(f"{pad}{key}: {value}")


def _emit(report, args):
    if args.json:
        print(report.to_json())
        return
    _print_block(report.results)
    for line in report.verification:
        print(f"verified: {line}")


# ------------------------------------------------------------- subcommands


def _cmd_validate(args, started):
    structure = load_structure(args.input)
    diags = validate(structure)
    results = {
        "universe": structure.universe_size,
        "graph": structure.graph,
        "relations": {
            name: {"arity": rel.arity, "tuples": len(rel.tuples)}
            for name, rel in sorted(structure.relations.items())
        },
        "diagnostics": list(diags),
        "ok": not diags,
    }
    report = make_report(
        "validate",
        input_paths=(args.input,),
        parameters={"seed": args.seed},
        results=results,
        verification=("structure well formed",) if not diags else (),
        started=started,
    )
    if diags:
        _emit(report, args)
        raise DomainError(f"structure invalid: {len(diags)} problem(s)")
    return report


def _cmd_gaifman(args, started):
    structure = load_structure(args.input)
    g = gaifman(structure)
    edges = sorted(g.edge_set())
    results = {
        "universe": g.universe_size,
        "edge_count": len(edges),
        "edges": [list(e) for e in edges],
    }
    verification = []
    if args.out:
        save_structure(args.out, g, fmt=args.format)
        results["out"] = args.out
        verification.append(f"wrote graph to {args.out}")
    return make_report(
        "gaifman",
        input_paths=(args.input,),
        parameters={"seed": args.seed, "format": args.format},
        results=results,
        verification=tuple(verification),
        started=started,
    )


def _cmd_incidence(args, started):
    structure = load_structure(args.input)
    inc = incidence_graph(structure)
    results = {
        "universe": inc.universe_size,
        "element_nodes": structure.universe_size,
        "tuple_nodes": inc.universe_size - structure.universe_size,
        "relations": {
            name: {"arity": rel.arity, "tuples": len(rel.tuples)}
            for name, rel in sorted(inc.relations.items())
        },
    }
    verification = []
    if args.out:
        save_structure(args.out, inc, fmt="json")
        results["out"] = args.out
        verification.append(f"wrote incidence structure to {args.out}")
    return make_report(
        "incidence",
        input_paths=(args.input,),
        parameters={"seed": args.seed},
        results=results,
        verification=tuple(verification),
        started=started,
    )


def _cmd_flip_apply(args, started):
    structure = _require_graph(load_structure(args.graph))
    data = _read_json_file(args.spec)
    if isinstance(data, dict) and "steps" in data:
        trace = trace_from_json(data, structure)
    elif isinstance(data, dict) and "bits" in data:
        try:
            params = tuple(int(x) for x in data.get("params", ()))
        except (TypeError, ValueError):
            raise FormatError("flip spec 'params' must be a list of integers")
        partition = atomic_type_partition(structure, params)
        trace = FlipTrace((GraphFlipStep(params, FlipSpec.from_bits(partition, data["bits"])),))
    else:
        raise FormatError(
            "flip spec file must be a trace object (with 'steps') or a single "
            "flip as {'params': [...], 'bits': '...'}"
        )
    flipped = trace.replay(structure)
    edges = sorted(flipped.edge_set())
    results = {
        "steps": len(trace),
        "edges_before": len(structure.edge_set()),
        "edges_after": len(edges),
        "edges": [list(e) for e in edges],
    }
    verification = [f"replayed {len(trace)} step(s) with matching partition fingerprints"]
    if args.out:
        save_structure(args.out, flipped, fmt=args.format)
        results["out"] = args.out
        verification.append(f"wrote flipped graph to {args.out}")
    return make_report(
        "flip apply",
        input_paths=(args.graph, args.spec),
        parameters={"seed": args.seed, "format": args.format},
        results=results,
        verification=tuple(verification),
        started=started,
    )


def _cmd_flip_enumerate(args, started):
    structure = _require_graph(load_structure(args.graph))
    S = _parse_ids(args.params)
    budget = args.budget if args.budget is not None else args.flip_budget_bits
    partition = atomic_type_partition(structure, S)
    classes = len(partition)
    bits = classes * (classes + 1) // 2
    flips = [
        {
            "bits": spec.matrix_bits(),
            "flipped_pairs": [list(p) for p in sorted(spec.flipped_pairs)],
        }
        for spec in itertools.islice(
            enumerate_s_definable_flips(structure, S, budget), args.limit
        )
    ]
    results = {
        "params": list(S),
        "classes": classes,
        "matrix_bits": bits,
        "family_size": 2 ** bits,
        "listed": len(flips),
        "flips": flips,
    }
    return make_report(
        "flip enumerate",
        input_paths=(args.graph,),
        parameters={"seed": args.seed, "budget_bits": budget, "limit": args.limit},
        results=results,
        verification=("identity flip enumerated first",) if flips else (),
        started=started,
    )


def _cmd_flipdist(args, started):
    structure = load_structure(args.input)
    S = _parse_ids(args.params)
    u, v = _parse_pair(args.pair)
    d = flip_dist(structure, S, u, v, r_max=args.rmax, budget_bits=args.flip_budget_bits)
    infinite = d == math.inf
    results = {
        "u": u,
        "v": v,
        "params": sorted(S),
        "distance": None if infinite else int(d),
        "infinite": infinite,
    }
    verification = []
    if args.trace:
        if u == v:
            results["trace"] = None
            verification.append("no separating flip exists: identical endpoints")
        else:
            if infinite:
                witness_r = args.rmax if args.rmax is not None else 2 * structure.universe_size
            else:
                witness_r = int(d) - 1
            found = flip_independent(
                IndependenceQuery(
                    structure,
                    frozenset(S),
                    witness_r,
                    frozenset({u}),
                    frozenset({v}),
                    budget_bits=args.flip_budget_bits,
                )
            )
            save_trace(args.trace, _as_trace(found.witness, S))
            results["trace"] = args.trace
            verification.append(f"witness trace keeps the pair at distance > {witness_r}")
    return make_report(
        "flipdist",
        input_paths=(args.input,),
        parameters={
            "seed": args.seed,
            "rmax": args.rmax,
            "budget_bits": args.flip_budget_bits,
        },
        results=results,
        verification=tuple(verification),
        started=started,
    )


def _cmd_separate(args, started):
    structure = load_structure(args.input)
    pair = ModelPair(structure, frozenset(_parse_ids(args.model)))
    run = separate_element(pair, args.element, args.radius, max_parameters=args.max_parameters)
    infinite = run.achieved_distance == math.inf
    results = {
        "element": args.element,
        "radius": args.radius,
        "model": sorted(pair.model),
        "success": run.success,
        "achieved_distance": None if infinite else int(run.achieved_distance),
        "achieved_infinite": infinite,
        "required_distance": run.required_distance,
        "steps": len(run.trace),
        "clause_reports": [rep.as_dict() for rep in run.reports],
        "notes": list(run.notes),
    }
    if structure.graph:
        definition = synthesize_neighborhood_definition(
            pair, args.element, strategy=args.strategy, max_parameters=args.max_parameters
        )
        results["definition"] = {
            "strategy": definition.strategy,
            "formula": str(definition.formula),
            "parameters": sorted(definition.parameters),
            "notes": list(definition.notes),
        }
    verification = []
    if run.success:
        reached = "infinity" if infinite else str(int(run.achieved_distance))
        verification.append(f"element pushed to distance {reached} > {args.radius} from the model")
    if args.trace:
        save_trace(args.trace, run.trace)
        results["trace"] = args.trace
        verification.append(f"wrote separation trace to {args.trace}")
    return make_report(
        "separate",
        input_paths=(args.input,),
        parameters={
            "seed": args.seed,
            "strategy": args.strategy,
            "max_parameters": args.max_parameters,
        },
        results=results,
        verification=tuple(verification),
        started=started,
    )


def _cmd_discrepancy(args, started):
    structure = load_structure(args.input)
    pair = ModelPair(structure, frozenset(_parse_ids(args.model)))
    rep = discrepancy_graph(pair, strategy=args.strategy, max_parameters=args.max_parameters)
    edges = sorted(rep.discrepancy_edges)
    components = sorted(sorted(c) for c in rep.components)
    results = {
        "strategy": args.strategy,
        "model": sorted(pair.model),
        "edge_count": len(edges),
        "edges": [list(e) for e in edges],
        "component_count": len(components),
        "components": components,
        "prediction_asymmetries": [list(p) for p in rep.harrington_violations],
    }
    verification = ["no discrepancy edge touches the model"]
    if args.dot:
        dot = graph_to_dot(
            structure.universe_size, edges, name="discrepancy", filled=pair.model
        )
        _write_text(args.dot, dot)
        results["dot"] = args.dot
        verification.append(f"wrote DOT rendering to {args.dot}")
    return make_report(
        "discrepancy",
        input_paths=(args.input,),
        parameters={
            "seed": args.seed,
            "strategy": args.strategy,
            "max_parameters": args.max_parameters,
        },
        results=results,
        verification=tuple(verification),
        started=started,
    )


def _cmd_components(args, started):
    structure = load_structure(args.input)
    comp = s_avoiding_components(structure, _parse_ids(args.model))
    results = {
        "deleted": sorted(comp.deleted),
        "component_count": len(comp.components),
        "components": sorted(sorted(c) for c in comp.components),
    }
    return make_report(
        "components",
        input_paths=(args.input,),
        parameters={"seed": args.seed},
        results=results,
        started=started,
    )


def _cmd_srk(args, started):
    structure = load_structure(args.input)
    U = _parse_ids(args.over) if args.over is not None else None
    S = _parse_ids(args.model)
    kwargs = {}
    if args.srk_depth is not None:
        kwargs["max_separator_size"] = args.srk_depth
    rank = srk(structure, args.radius, U=U, S=S, budget_bits=args.flip_budget_bits, **kwargs)
    results = {
        "radius": args.radius,
        "over": sorted(U) if U is not None else "universe",
        "model": sorted(S),
        "value": rank.value,
        "exact": rank.exact,
    }
    return make_report(
        "srk",
        input_paths=(args.input,),
        parameters={
            "seed": args.seed,
            "budget_bits": args.flip_budget_bits,
            "srk_depth": args.srk_depth,
        },
        results=results,
        verification=("value is exact",) if rank.exact else ("value is a lower bound",),
        started=started,
    )


def _cmd_game_value(args, started):
    structure = load_structure(args.input)
    value = game_value(structure, args.radius, budget_bits=args.flip_budget_bits)
    return make_report(
        "game value",
        input_paths=(args.input,),
        parameters={"seed": args.seed, "budget_bits": args.flip_budget_bits},
        results={"radius": args.radius, "value": value},
        started=started,
    )


# ----------------------------------------------------- game play (sessions)


def _play_view(sid: str, rec: dict) -> dict:
    return {
        "session": sid,
        "human": rec["human"],
        "state": state_payload(rec["state"]),
        "annotations": ball_annotations(rec["structure"], rec["state"], rec["budget"]),
    }


def _play_new(msg: dict, sessions: dict, counter, defaults: dict) -> dict:
    if "structure" not in msg:
        raise FormatError("op 'new' requires 'structure'")
    structure = structure_from_json(msg["structure"])
    human = msg.get("human", "connector")
    if human not in ("connector", "separator"):
        raise FormatError("'human' must be 'connector' or 'separator'")
    r = msg.get("r")
    if isinstance(r, bool) or not isinstance(r, int):
        raise FormatError("op 'new' requires an integer 'r'")
    budget = msg.get("budget_bits", defaults["budget_bits"])
    post_move = bool(msg.get("post_move_arena", defaults["post_move_arena"]))
    state = game_new(structure, r, post_move_arena=post_move, budget_bits=budget)
    engine = "separator" if human == "connector" else "connector"
    state, moves = engine_turns(state, engine)
    sid = f"g{next(counter)}"
    rec = {
        "structure": structure,
        "human": human,
        "engine": engine,
        "state": state,
        "budget": budget,
    }
    sessions[sid] = rec
    reply = _play_view(sid, rec)
    reply["engine_move"] = moves[-1] if moves else None
    return reply


def _play_move(msg: dict, sid: str, rec: dict) -> dict:
    vertex = msg.get("vertex")
    if isinstance(vertex, bool) or not isinstance(vertex, int):
        raise FormatError("op 'move' requires an integer 'vertex'")
    state = rec["state"]
    if state.finished:
        raise DomainError("game is over")
    if state.awaiting != rec["human"]:
        raise DomainError(f"illegal move: {state.awaiting} to move")
    apply_move = connector_move if rec["human"] == "connector" else separator_move
    after = apply_move(state, vertex)
    final, moves = engine_turns(after, rec["engine"])
    rec["state"] = final
    reply = _play_view(sid, rec)
    reply["after_move"] = state_payload(after)
    reply["engine_move"] = moves[-1] if moves else None
    return reply


def _play_message(raw: str, sessions: dict, counter, defaults: dict) -> dict:
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError:
        return {"error": "message is not valid JSON", "code": 400}
    if not isinstance(msg, dict):
        return {"error": "message must be a JSON object", "code": 400}
    op = msg.get("op")
    try:
        if op == "new":
            return _play_new(msg, sessions, counter, defaults)
        if op in ("move", "state"):
            sid = msg.get("session")
            rec = sessions.get(sid)
            if rec is None:
                return {"error": f"unknown session {sid!r}", "code": 404}
            if op == "state":
                return _play_view(sid, rec)
            return _play_move(msg, sid, rec)
        return {"error": f"unknown op {op!r}", "code": 400}
    except BudgetExceeded as exc:
        return {"error": str(exc), "code": 503}
    except FormatError as exc:
        return {"error": str(exc), "code": 400}
    except DomainError as exc:
        return {"error": str(exc), "code": domain_error_status(str(exc))}


def _cmd_game_play(args, started):
    """Line-oriented session protocol: one JSON message in, one JSON reply
    out, until EOF.  Session ids are sequential, so scripted transcripts are
    reproducible."""
    sessions: dict = {}
    counter = itertools.count(1)
    defaults = {
        "budget_bits": args.flip_budget_bits,
        "post_move_arena": args.post_move_arena,
    }
    handled = 0
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        reply = _play_message(line, sessions, counter, defaults)
        sys.stdout.write(json.dumps(reply, sort_keys=True) + "\n")
        sys.stdout.flush()
        handled += 1
    return make_report(
        "game play",
        parameters={"seed": args.seed, "post_move_arena": args.post_move_arena},
        results={"messages": handled, "sessions": len(sessions)},
        started=started,
    )


# --------------------------------------------------- flatness and sparsity


def _cmd_flatness(args, started):
    structure = load_structure(args.input)
    X = _parse_ids(args.set) if args.set is not None else tuple(range(structure.universe_size))
    cert = flip_flatness_search(
        structure, X, args.radius, args.k, effort=args.effort,
        budget_bits=args.flip_budget_bits,
    )
    results = {
        "radius": args.radius,
        "k": args.k,
        "effort": args.effort,
        "X_size": len(cert.X),
        "Y": sorted(cert.Y),
        "Y_size": len(cert.Y),
        "S": sorted(cert.S),
        "trace_steps": len(cert.trace),
        "exact": cert.exact,
        "partial": cert.partial,
    }
    verification = [
        f"certificate re-verified: {len(cert.Y)} elements pairwise beyond distance "
        f"{args.radius} after the flip"
    ]
    if args.trace:
        save_trace(args.trace, cert.trace)
        results["trace"] = args.trace
        verification.append(f"wrote flip trace to {args.trace}")
    return make_report(
        "flatness",
        input_paths=(args.input,),
        parameters={
            "seed": args.seed,
            "effort": args.effort,
            "budget_bits": args.flip_budget_bits,
        },
        results=results,
        verification=tuple(verification),
        started=started,
    )


_CSV_FIELDS = ("path", "universe", "edges", "biclique", "subdivision", "ladder")


def _sparsity_metrics(structure: FiniteStructure, args, label: Optional[str] = None) -> dict:
    row: dict = {}
    if label is not None:
        row["path"] = label
    row["universe"] = structure.universe_size
    row["edges"] = len(gaifman(structure).edge_set())
    if args.biclique is not None:
        witness = biclique_subgraph(structure, args.biclique)
        row["biclique"] = "yes" if witness is not None else "no"
        if witness is not None:
            row["biclique_left"] = sorted(witness.left)
            row["biclique_right"] = sorted(witness.right)
    if args.subdivision is not None:
        left, right = _parse_cross(args.subdivision, "--subdivision")
        try:
            n, r = int(left), int(right)
        except ValueError:
            raise DomainError(f"--subdivision must look like NxR, got {args.subdivision!r}")
        witness = subdivided_clique_search(structure, n, r, budget_nodes=args.tuple_budget)
        row["subdivision"] = "yes" if witness is not None else "no"
        if witness is not None:
            row["subdivision_principals"] = list(witness.principals)
    if args.ladder is not None:
        atom = _binary_atom(structure, args.ladder)
        cert = ladder_index(
            structure,
            atom,
            n_max=args.ladder_max if args.ladder_max is not None else structure.universe_size,
            budget_nodes=args.tuple_budget,
        )
        row["ladder"] = cert.n
        row["ladder_exact"] = cert.exact
    return row


def _csv_text(rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(_CSV_FIELDS)
    for row in rows:
        writer.writerow([row.get(field, "") for field in _CSV_FIELDS])
    return buffer.getvalue()


def _read_manifest(path) -> tuple:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read manifest {path}: {exc}")
    entries = []
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(line)
    if not entries:
        raise FormatError(f"manifest {path} lists no files")
    return tuple(entries)


def _cmd_sparsity(args, started):
    if args.biclique is None and args.subdivision is None and args.ladder is None:
        raise DomainError("choose at least one of --biclique / --subdivision / --ladder")
    parameters = {
        "seed": args.seed,
        "biclique": args.biclique,
        "subdivision": args.subdivision,
        "ladder": args.ladder,
        "tuple_budget": args.tuple_budget,
    }
    if args.batch:
        paths = _read_manifest(args.batch)
        rows = [_sparsity_metrics(load_structure(p), args, label=p) for p in paths]
        results = {"rows": rows}
        verification = [f"computed metrics for {len(rows)} file(s)"]
        text = _csv_text(rows)
        if args.csv:
            _write_text(args.csv, text)
            results["csv"] = args.csv
            verification.append(f"wrote CSV to {args.csv}")
        elif not args.json:
            print(text, end="")
        return make_report(
            "sparsity",
            input_paths=(args.batch, *paths),
            parameters=parameters,
            results=results,
            verification=tuple(verification),
            started=started,
        )
    if not args.input:
        raise DomainError("provide --in FILE or --batch MANIFEST")
    results = _sparsity_metrics(load_structure(args.input), args)
    return make_report(
        "sparsity",
        input_paths=(args.input,),
        parameters=parameters,
        results=results,
        started=started,
    )


def _cmd_ladder(args, started):
    structure = load_structure(args.input)
    name = args.relation
    if name is None:
        if not structure.graph:
            raise DomainError("give --relation NAME for non-graph structures")
        name = structure.graph_relation.name
    atom = _binary_atom(structure, name)
    cert = ladder_index(
        structure,
        atom,
        n_max=args.max if args.max is not None else structure.universe_size,
        budget_nodes=args.tuple_budget,
    )
    results = {
        "relation": name,
        "n": cert.n,
        "exact": cert.exact,
        "a_tuples": [list(t) for t in cert.a_tuples],
        "b_tuples": [list(t) for t in cert.b_tuples],
    }
    return make_report(
        "ladder",
        input_paths=(args.input,),
        parameters={"seed": args.seed, "max": args.max, "tuple_budget": args.tuple_budget},
        results=results,
        verification=("ladder certificate re-verified on construction",),
        started=started,
    )


def _cmd_pattern(args, started):
    structure = load_structure(args.input)
    left, right = _parse_cross(args.sides, "--sides")
    a_part, b_part = _parse_ids(left), _parse_ids(right)
    n_max = args.max if args.max is not None else min(len(a_part), len(b_part))
    report = bipartite_pattern(
        structure, a_part, b_part, n_max,
        relation=args.relation, budget_nodes=args.tuple_budget,
    )
    best = report.best
    results = {
        "a_side": list(a_part),
        "b_side": list(b_part),
        "orders": {w.pattern: w.n for w in report.witnesses},
        "best": {
            "pattern": best.pattern,
            "n": best.n,
            "a_seq": list(best.a_seq),
            "b_seq": list(best.b_seq),
        },
    }
    return make_report(
        "pattern",
        input_paths=(args.input,),
        parameters={
            "seed": args.seed,
            "relation": args.relation,
            "max": n_max,
            "tuple_budget": args.tuple_budget,
        },
        results=results,
        verification=("all four order witnesses re-verified on construction",),
        started=started,
    )


# -------------------------------------------------------- serve & fixtures


def _cmd_serve(args, started):
    import uvicorn

    app = create_app(static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return make_report(
        "serve",
        parameters={"seed": args.seed, "host": args.host, "port": args.port},
        results={"stopped": True},
        started=started,
    )


def _cycle(n: int) -> FiniteStructure:
    if n < 3:
        raise DomainError("a cycle needs at least 3 vertices")
    return FiniteStructure.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def _edgeless(n: int) -> FiniteStructure:
    if n < 1:
        raise DomainError("an edgeless graph needs at least 1 vertex")
    return FiniteStructure.from_edges(n, ())


_FIXTURES = {
    "half-graph": (half_graph, 1),
    "star": (star, 1),
    "path": (path_graph, 1),
    "clique": (clique, 1),
    "cycle": (_cycle, 1),
    "edgeless": (_edgeless, 1),
    "biclique": (biclique, 2),
}


def _cmd_fixtures(args, started):
    builder, arity = _FIXTURES[args.name]
    if len(args.sizes) != arity:
        raise DomainError(f"fixture {args.name!r} takes {arity} size argument(s)")
    structure = builder(*args.sizes)
    results = {
        "name": args.name,
        "sizes": list(args.sizes),
        "universe": structure.universe_size,
        "edge_count": len(structure.edge_set()),
    }
    verification = []
    if args.out:
        save_structure(args.out, structure, fmt=args.format)
        results["out"] = args.out
        verification.append(f"wrote fixture to {args.out}")
    else:
        results["edges"] = [list(e) for e in sorted(structure.edge_set())]
    return make_report(
        "fixtures",
        parameters={"seed": args.seed, "format": args.format},
        results=results,
        verification=tuple(verification),
        started=started,
    )


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    shared = common.add_argument_group("common options")
    shared.add_argument("--json", action="store_true", help="print the full run report as JSON")
    shared.add_argument(
        "--seed", type=int, default=0,
        help="recorded in the report; searches are deterministic for a fixed seed",
    )
    shared.add_argument(
        "--flip-budget-bits", type=int, default=None, metavar="N",
        help="cap on flip-matrix bits per parameter set (fallback: env FLIPCALC_BUDGET_BITS)",
    )
    shared.add_argument(
        "--srk-depth", type=int, default=None, metavar="N",
        help="cap on the separator-set size explored by the rank recursion",
    )
    shared.add_argument(
        "--tuple-budget", type=int, default=None, metavar="N",
        help="node budget for subdivision / ladder / pattern searches",
    )

    parser = argparse.ArgumentParser(
        prog="flipcalc",
        description="Flips, flip-independence, separation games, and sparsity "
        "diagnostics for finite structures.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("validate", parents=[common], help="check a structure file")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("gaifman", parents=[common], help="Gaifman graph of a structure")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--out", metavar="FILE", help="write the graph to a file")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(handler=_cmd_gaifman)

    p = sub.add_parser("incidence", parents=[common], help="bipartite incidence structure")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(handler=_cmd_incidence)

    flip = sub.add_parser("flip", help="apply or enumerate definable flips")
    fsub = flip.add_subparsers(dest="flip_command", metavar="ACTION")
    fsub.required = True
    p = fsub.add_parser("apply", parents=[common], help="replay a flip trace on a graph")
    p.add_argument("--graph", required=True, metavar="FILE")
    p.add_argument("--spec", required=True, metavar="FILE",
                   help="trace JSON, or a single flip as {'params','bits'}")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(handler=_cmd_flip_apply)
    p = fsub.add_parser("enumerate", parents=[common], help="list the flips over a parameter set")
    p.add_argument("--graph", required=True, metavar="FILE")
    p.add_argument("--params", default="", metavar="IDS")
    p.add_argument("--budget", type=int, default=None, metavar="N",
                   help="alias for --flip-budget-bits")
    p.add_argument("--limit", type=int, default=32, metavar="M",
                   help="list at most M flips (the family size is reported exactly)")
    p.set_defaults(handler=_cmd_flip_enumerate)

    p = sub.add_parser("flipdist", parents=[common],
                       help="largest distance of a pair over the flip family")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--params", default="", metavar="IDS")
    p.add_argument("--pair", required=True, metavar="U,V")
    p.add_argument("--rmax", type=int, default=None, metavar="N")
    p.add_argument("--trace", metavar="FILE", help="write the witnessing flip trace")
    p.set_defaults(handler=_cmd_flipdist)

    p = sub.add_parser("separate", parents=[common],
                       help="flip an element away from a model subset")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--model", required=True, metavar="IDS")
    p.add_argument("--element", required=True, type=int)
    p.add_argument("--radius", required=True, type=int)
    p.add_argument("--strategy", choices=("enumerative", "class_based"), default="class_based")
    p.add_argument("--max-parameters", type=int, default=4)
    p.add_argument("--trace", metavar="FILE")
    p.set_defaults(handler=_cmd_separate)

    p = sub.add_parser("discrepancy", parents=[common],
                       help="difference between actual and predicted adjacency")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--model", required=True, metavar="IDS")
    p.add_argument("--strategy", choices=("enumerative", "class_based"), default="class_based")
    p.add_argument("--max-parameters", type=int, default=4)
    p.add_argument("--dot", metavar="FILE", help="write a DOT rendering")
    p.set_defaults(handler=_cmd_discrepancy)

    p = sub.add_parser("components", parents=[common],
                       help="connected components avoiding a vertex set")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--model", required=True, metavar="IDS")
    p.set_defaults(handler=_cmd_components)

    p = sub.add_parser("srk", parents=[common], help="separation rank")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--radius", required=True, type=int)
    p.add_argument("--over", default=None, metavar="IDS",
                   help="rank of this set (default: the whole universe)")
    p.add_argument("--model", default="", metavar="IDS", help="parameter set S")
    p.set_defaults(handler=_cmd_srk)

    game = sub.add_parser("game", help="play or evaluate the separation game")
    gsub = game.add_subparsers(dest="game_command", metavar="ACTION")
    gsub.required = True
    p = gsub.add_parser("play", parents=[common],
                        help="line-oriented JSON session protocol on stdin/stdout")
    p.add_argument("--post-move-arena", action="store_true",
                   help="experimental variant: arena update uses the enlarged parameter set")
    p.set_defaults(handler=_cmd_game_play)
    p = gsub.add_parser("value", parents=[common], help="minimax game value")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--radius", required=True, type=int)
    p.set_defaults(handler=_cmd_game_value)

    p = sub.add_parser("flatness", parents=[common],
                       help="scattered subset after one flip")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--set", default=None, metavar="IDS",
                   help="subset X to flatten (default: the whole universe)")
    p.add_argument("--radius", required=True, type=int)
    p.add_argument("--k", required=True, type=int, help="parameter budget |S| <= k")
    p.add_argument("--effort", choices=("greedy", "exhaustive"), default="exhaustive")
    p.add_argument("--trace", metavar="FILE")
    p.set_defaults(handler=_cmd_flatness)

    p = sub.add_parser("sparsity", parents=[common],
                       help="biclique / subdivision / ladder metrics, single file or batch")
    p.add_argument("--in", dest="input", default=None, metavar="FILE")
    p.add_argument("--batch", default=None, metavar="MANIFEST",
                   help="file listing one structure path per line")
    p.add_argument("--csv", default=None, metavar="FILE", help="write batch metrics as CSV")
    p.add_argument("--biclique", type=int, default=None, metavar="T")
    p.add_argument("--subdivision", default=None, metavar="NxR")
    p.add_argument("--ladder", default=None, metavar="RELATION")
    p.add_argument("--ladder-max", type=int, default=None, metavar="N")
    p.set_defaults(handler=_cmd_sparsity)

    p = sub.add_parser("ladder", parents=[common], help="largest half-graph pattern of an atom")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--relation", default=None, metavar="NAME",
                   help="binary relation (default: the graph relation)")
    p.add_argument("--max", type=int, default=None, metavar="N")
    p.set_defaults(handler=_cmd_ladder)

    p = sub.add_parser("pattern", parents=[common],
                       help="longest =, !=, <=, >= patterns across a bipartition")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--sides", required=True, metavar="IDSxIDS")
    p.add_argument("--relation", default=None, metavar="NAME")
    p.add_argument("--max", type=int, default=None, metavar="N")
    p.set_defaults(handler=_cmd_pattern)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP session server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", default=None, metavar="DIR",
                   help="also serve this directory at /")
    p.add_argument("--log-level", default="warning")
    p.set_defaults(handler=_cmd_serve)

    p = sub.add_parser("fixtures", parents=[common], help="generate a named example graph")
    p.add_argument("name", choices=sorted(_FIXTURES))
    p.add_argument("sizes", nargs="+", type=int)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(handler=_cmd_fixtures)

    return parser


# ---------------------------------------------------------------- dispatch


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 64
    if getattr(args, "flip_budget_bits", None) is None:
        raw = os.environ.get("FLIPCALC_BUDGET_BITS")
        if raw:
            try:
                args.flip_budget_bits = int(raw)
            except ValueError:
                print(
                    f"error: FLIPCALC_BUDGET_BITS must be an integer, got {raw!r}",
                    file=sys.stderr,
                )
                return 64
    started = time.perf_counter()
    try:
        report = args.handler(args, started)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _emit(report, args)
    return 0


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

"""Instance and solution documents.

Instance files use real integer coordinates; ``limit: null`` means no limit::

    {"name": str, "root": id, "vertices": [id...], "edges": [[id, id]...],
     "terminals": [{"id": id, "x": int, "y": int, "limit": int | null}...]}

Solution files carry exact half-unit integers (``x2``, ``y2``, ``cost2``,
``d2``).  The ``cost`` field is a derived decimal for people and is never
read back.  All writers emit one canonical byte layout: keys in fixed order,
lists sorted by id, one entry per line.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import InstanceError, ParseError
from .model import INF, Embedding, HalfPoint, Instance, Terminal
from .scaling import SolveReport


def _decode(document: bytes | str) -> Any:
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    try:
        return json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _field(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", where)
    return obj[key]


def parse_instance(document: bytes | str) -> Instance:
    """Parse an instance document; raises :class:`ParseError` with a location."""
    doc = _decode(document)
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "document")
    unknown = sorted(set(doc) - {"name", "root", "vertices", "edges", "terminals"})
    if unknown:
        raise ParseError(f"unknown fields {unknown}", "document")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ParseError("must be a string", "name")

    vertices = _field(doc, "vertices", "document")
    if not isinstance(vertices, list):
        raise ParseError("must be a list of ids", "vertices")
    seen: set[str] = set()
    for i, v in enumerate(vertices):
        if not isinstance(v, str) or not v:
            raise ParseError("vertex id must be a nonempty string", f"vertices[{i}]")
        if v in seen:
            raise ParseError(f"duplicate vertex id {v!r}", f"vertices[{i}]")
        seen.add(v)

    root = _field(doc, "root", "document")
    if not isinstance(root, str) or root not in seen:
        raise ParseError(f"unknown root {root!r}", "root")

    edges = _field(doc, "edges", "document")
    if not isinstance(edges, list):
        raise ParseError("must be a list of pairs", "edges")
    pairs = []
    for i, e in enumerate(edges):
        if not (isinstance(e, list) and len(e) == 2):
            raise ParseError("edge must be a pair [id, id]", f"edges[{i}]")
        for v in e:
            if v not in seen:
                raise ParseError(f"unknown vertex {v!r}", f"edges[{i}]")
        pairs.append((e[0], e[1]))

    terminals = _field(doc, "terminals", "document")
    if not isinstance(terminals, list):
        raise ParseError("must be a list of objects", "terminals")
    terms: dict[str, Terminal] = {}
    for i, t in enumerate(terminals):
        where = f"terminals[{i}]"
        if not isinstance(t, dict):
            raise ParseError("terminal must be an object", where)
        extra = sorted(set(t) - {"id", "x", "y", "limit"})
        if extra:
            raise ParseError(f"unknown fields {extra}", where)
        tid = _field(t, "id", where)
        if tid not in seen:
            raise ParseError(f"unknown vertex {tid!r}", f"{where}.id")
        if tid in terms:
            raise ParseError(f"duplicate terminal {tid!r}", f"{where}.id")
        x, y = _field(t, "x", where), _field(t, "y", where)
        for key, val in (("x", x), ("y", y)):
            if not _is_int(val):
                raise ParseError("coordinate must be an integer", f"{where}.{key}")
        limit = t.get("limit")
        if limit is not None and (not _is_int(limit) or limit < 0):
            raise ParseError("limit must be a nonnegative integer or null", f"{where}.limit")
        terms[tid] = Terminal(HalfPoint.from_real(x, y), INF if limit is None else 2 * limit)

    try:
        inst = Instance(tuple(vertices), tuple(pairs), root, terms, name)
    except InstanceError as exc:
        raise ParseError(str(exc), "document") from None
    if inst.tree_problem is not None:
        raise ParseError(f"not a tree: {inst.tree_problem}", "edges")
    return inst


def _lines(head: list[tuple[str, Any]], blocks: list[tuple[str, list[Any]]]) -> bytes:
    out = ["{"]
    items = [f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in head]
    for key, rows in blocks:
        if rows:
            body = ",\n".join(f"    {json.dumps(r)}" for r in rows)
            items.append(f"  {json.dumps(key)}: [\n{body}\n  ]")
        else:
            items.append(f"  {json.dumps(key)}: []")
    out.append(",\n".join(items))
    out.append("}")
    return ("\n".join(out) + "\n").encode("utf-8")


def serialize_instance(inst: Instance) -> bytes:
    terms = []
    for t, term in inst.terminals.items():
        p = term.position
        if p.x2 % 2 or p.y2 % 2 or (term.limit != INF and term.limit % 2):
            raise ValueError(f"terminal {t} is not integral; instance files hold real integers")
        terms.append({"id": t, "x": p.x2 // 2, "y": p.y2 // 2, "limit": None if term.limit == INF else term.limit // 2})
    return _lines(
        [("name", inst.name), ("root", inst.root), ("vertices", list(inst.vertices))],
        [("edges", [list(e) for e in inst.edges]), ("terminals", terms)],
    )


def _half(v: int) -> int | float:
    return v // 2 if v % 2 == 0 else v / 2


def solution_document(inst: Instance, report: SolveReport) -> dict[str, Any]:
    return {
        "instance": inst.name,
        "mode": report.mode.value,
        "cost2": report.cost,
        "cost": _half(report.cost),
        "feasible": report.feasible,
        "positions": [{"id": v, "x2": p.x2, "y2": p.y2} for v, p in report.final.positions.items()],
        "path_lengths": [
            {
                "id": t,
                "d2": d,
                "limit2": None if inst.terminals[t].limit == INF else inst.terminals[t].limit,
            }
            for t, d in sorted(report.path_lengths.items())
        ],
        "levels": [level._asdict() for level in report.levels],
    }


def write_solution(inst: Instance, report: SolveReport) -> bytes:
    doc = solution_document(inst, report)
    head = [(k, doc[k]) for k in ("instance", "mode", "cost2", "cost", "feasible")]
    return _lines(head, [(k, doc[k]) for k in ("positions", "path_lengths", "levels")])


def write_report(inst: Instance, report: SolveReport) -> bytes:
    """Diagnostics: level trace plus the per-level bounds it should respect."""
    n = len(inst.vertices)
    levels = []
    prev = None
    for lv in report.levels:
        row = lv._asdict()
        row["round_bound"] = 14 * n
        # consecutive rounded optima: cost at k+1 <= cost at k + 6 n 2^k (real units)
        if prev is not None and prev.k == lv.k + 1:
            row["coarser_cost2_bound"] = lv.cost_after + 12 * n * (1 << lv.k)
            row["coarser_cost2"] = prev.cost_after
        levels.append(row)
        prev = lv
    head = [
        ("instance", inst.name),
        ("mode", report.mode.value),
        ("vertices", n),
        ("m", report.m),
        ("start_cost2", report.start_cost),
        ("cost2", report.cost),
        ("feasible", report.feasible),
        ("notes", list(report.notes)),
    ]
    return _lines(head, [("levels", levels)])


def parse_solution(document: bytes | str) -> tuple[Embedding, dict[str, Any]]:
    """Positions of a solution document plus its raw claims (cost2, ...)."""
    doc = _decode(document)
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "document")
    rows = _field(doc, "positions", "document")
    if not isinstance(rows, list):
        raise ParseError("must be a list", "positions")
    pos = {}
    for i, row in enumerate(rows):
        where = f"positions[{i}]"
        if not isinstance(row, dict):
            raise ParseError("must be an object", where)
        vid, x2, y2 = _field(row, "id", where), _field(row, "x2", where), _field(row, "y2", where)
        if not isinstance(vid, str) or not _is_int(x2) or not _is_int(y2):
            raise ParseError("expected string id and integer x2, y2", where)
        if vid in pos:
            raise ParseError(f"duplicate vertex {vid!r}", where)
        pos[vid] = HalfPoint(x2, y2)
    cost2 = _field(doc, "cost2", "document")
    if not _is_int(cost2):
        raise ParseError("must be an integer", "cost2")
    return Embedding(pos), doc

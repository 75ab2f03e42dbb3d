"""Text and JSON formats for graphs, conditions, structures, tables and instances.

JSON is canonical.  Text formats are line based; blank lines and lines
starting with ``#`` or ``c`` are skipped.

    graph:      g <n> / e <u> <v> / m <u> <v>
    condition:  s <id> <arity> / i <r> <sym> <coords..> = <sym> <coords..>
    structure:  d <size> / r <name> <arity> / t <entries..>   (t lines belong to the last r)
    instance:   p csp <vars> <atoms> / a <u> <v>
"""

from __future__ import annotations

import json
from typing import Any

from .clones import FiniteStructure, OperationTable, Relation, WitnessAssignment
from .conditions import H1Condition, Identity, MinorDerivation, Symbol, Term
from .errors import InputError
from .forb import CspInstance
from .graphs import Graph, MarkedGraph


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _lines(text: str) -> list[list[str]]:
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line.split()[0] == "c":
            continue
        out.append(line.split())
    return out


def _ints(parts: list[str], what: str) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise InputError(f"expected integers in {what}: {' '.join(parts)}") from None


def _json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad JSON: {exc}") from None


def _is_json(text: str) -> bool:
    return text.lstrip().startswith(("{", "["))


# -- graphs ------------------------------------------------------------------------------


def graph_to_json(g: Graph | MarkedGraph) -> dict:
    base = g.graph if isinstance(g, MarkedGraph) else g
    out = {"n": base.n, "edges": [list(e) for e in base.sorted_edges()]}
    if isinstance(g, MarkedGraph):
        out["marked"] = list(g.marked)
    return out


def graph_to_text(g: Graph | MarkedGraph) -> str:
    base = g.graph if isinstance(g, MarkedGraph) else g
    lines = [f"g {base.n}"] + [f"e {u} {v}" for u, v in base.sorted_edges()]
    if isinstance(g, MarkedGraph):
        lines.append("m {} {}".format(*g.marked))
    return "\n".join(lines) + "\n"


def graph_from_json(data: dict) -> Graph | MarkedGraph:
    try:
        n = int(data["n"])
        edges = [(int(u), int(v)) for u, v in data.get("edges", [])]
        marked = data.get("marked")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed graph JSON: {exc}") from None
    g = Graph.from_edges(n, ((min(e), max(e)) for e in edges))
    return MarkedGraph(g, (int(marked[0]), int(marked[1]))) if marked is not None else g


def parse_graph(text: str) -> Graph | MarkedGraph:
    if _is_json(text):
        return graph_from_json(_json(text))
    n = None
    edges = []
    marked = None
    for parts in _lines(text):
        tag, rest = parts[0], parts[1:]
        if tag == "g" and len(rest) == 1:
            n = _ints(rest, "g line")[0]
        elif tag == "e" and len(rest) == 2:
            u, v = _ints(rest, "e line")
            edges.append((min(u, v), max(u, v)))
        elif tag == "m" and len(rest) == 2:
            marked = tuple(_ints(rest, "m line"))
        else:
            raise InputError(f"unrecognised graph line: {' '.join(parts)}")
    if n is None:
        raise InputError("graph text needs a 'g <n>' line")
    g = Graph.from_edges(n, edges)
    return MarkedGraph(g, marked) if marked is not None else g


def as_graph(g: Graph | MarkedGraph) -> Graph:
    return g.graph if isinstance(g, MarkedGraph) else g


def as_marked(g: Graph | MarkedGraph) -> MarkedGraph:
    if not isinstance(g, MarkedGraph):
        raise InputError("a marked edge ('m u v' or \"marked\") is required")
    return g


# -- conditions ------------------------------------------------------------------------------


def condition_to_json(c: H1Condition) -> dict:
    return {
        "symbols": [{"id": s.id, "arity": s.arity} for s in c.symbols],
        "identities": [
            {"r": i.r, "lhs": {"sym": i.lhs.sym, "map": list(i.lhs.coords)}, "rhs": {"sym": i.rhs.sym, "map": list(i.rhs.coords)}}
            for i in c.identities
        ],
    }


def condition_from_json(data: dict) -> H1Condition:
    try:
        symbols = tuple(Symbol(str(s["id"]), int(s["arity"])) for s in data["symbols"])
        idents = tuple(
            Identity(int(i["r"]), Term(str(i["lhs"]["sym"]), tuple(i["lhs"]["map"])), Term(str(i["rhs"]["sym"]), tuple(i["rhs"]["map"])))
            for i in data["identities"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed condition JSON: {exc}") from None
    return H1Condition(symbols, idents)


def condition_to_text(c: H1Condition) -> str:
    lines = [f"s {s.id} {s.arity}" for s in c.symbols]
    for i in c.identities:
        lhs = " ".join(map(str, i.lhs.coords))
        rhs = " ".join(map(str, i.rhs.coords))
        lines.append(f"i {i.r} {i.lhs.sym} {lhs} = {i.rhs.sym} {rhs}")
    return "\n".join(lines) + "\n"


def parse_condition(text: str) -> H1Condition:
    if _is_json(text):
        return condition_from_json(_json(text))
    symbols, idents = [], []
    for parts in _lines(text):
        if parts[0] == "s" and len(parts) == 3:
            symbols.append(Symbol(parts[1], _ints(parts[2:], "s line")[0]))
        elif parts[0] == "i" and "=" in parts and len(parts) >= 5:
            eq = parts.index("=")
            r = _ints(parts[1:2], "i line")[0]
            lhs = Term(parts[2], tuple(_ints(parts[3:eq], "i line")))
            rhs = Term(parts[eq + 1], tuple(_ints(parts[eq + 2:], "i line")))
            idents.append(Identity(r, lhs, rhs))
        else:
            raise InputError(f"unrecognised condition line: {' '.join(parts)}")
    return H1Condition(tuple(symbols), tuple(idents))


def derivation_to_json(d: MinorDerivation) -> dict:
    return {"mapping": {t: {"sym": s, "map": list(mu)} for t, (s, mu) in d.mapping}}


def derivation_from_json(data: dict) -> MinorDerivation:
    try:
        return MinorDerivation.of({t: (str(v["sym"]), tuple(int(k) for k in v["map"])) for t, v in data["mapping"].items()})
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed derivation JSON: {exc}") from None


# -- structures and tables --------------------------------------------------------------------


def structure_to_json(b: FiniteStructure) -> dict:
    return {
        "size": b.size,
        "relations": [{"name": r.name, "arity": r.arity, "tuples": [list(t) for t in sorted(r.tuples)]} for r in b.relations],
    }


def structure_from_json(data: dict) -> FiniteStructure:
    try:
        rels = tuple(Relation(str(r["name"]), int(r["arity"]), frozenset(tuple(t) for t in r["tuples"])) for r in data["relations"])
        return FiniteStructure(int(data["size"]), rels)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed structure JSON: {exc}") from None


def parse_structure(text: str) -> FiniteStructure:
    """Structure text; a graph in text or JSON form is read as its edge relation E."""
    if _is_json(text):
        data = _json(text)
        if isinstance(data, dict) and "n" in data:
            from .clones import structure_from_graph
            return structure_from_graph(as_graph(graph_from_json(data)))
        return structure_from_json(data)
    lines = _lines(text)
    if lines and lines[0][0] == "g":
        from .clones import structure_from_graph
        return structure_from_graph(as_graph(parse_graph(text)))
    size = None
    rels: list[list] = []
    for parts in lines:
        if parts[0] == "d" and len(parts) == 2:
            size = _ints(parts[1:], "d line")[0]
        elif parts[0] == "r" and len(parts) == 3:
            rels.append([parts[1], _ints(parts[2:], "r line")[0], []])
        elif parts[0] == "t":
            if not rels:
                raise InputError("tuple line before any relation")
            rels[-1][2].append(tuple(_ints(parts[1:], "t line")))
        else:
            raise InputError(f"unrecognised structure line: {' '.join(parts)}")
    if size is None:
        raise InputError("structure text needs a 'd <size>' line")
    return FiniteStructure(size, tuple(Relation(n, a, frozenset(ts)) for n, a, ts in rels))


def table_to_json(t: OperationTable) -> dict:
    return {"size": t.size, "arity": t.arity, "values": list(t.values)}


def table_from_json(data: dict) -> OperationTable:
    try:
        return OperationTable(int(data["size"]), int(data["arity"]), tuple(data["values"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed table JSON: {exc}") from None


def witness_to_json(w: WitnessAssignment) -> dict:
    out = {"tables": {k: table_to_json(t) for k, t in sorted(w.tables.items())}}
    if w.subset is not None:
        out["subset"] = list(w.subset)
    return out


def witness_from_json(data: dict, condition: H1Condition) -> WitnessAssignment:
    try:
        tables = {k: table_from_json(v) for k, v in data["tables"].items()}
        subset = tuple(data["subset"]) if data.get("subset") is not None else None
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed witness JSON: {exc}") from None
    return WitnessAssignment(condition, tables, subset)


# -- CSP instances ----------------------------------------------------------------------------


def instance_to_text(inst: CspInstance) -> str:
    lines = [f"p csp {inst.var_count} {len(inst.atoms)}"] + [f"a {u} {v}" for u, v in inst.atoms]
    return "\n".join(lines) + "\n"


def instance_to_json(inst: CspInstance) -> dict:
    return {"vars": inst.var_count, "atoms": [list(a) for a in inst.atoms]}


def parse_instance(text: str) -> CspInstance:
    if _is_json(text):
        data = _json(text)
        try:
            return CspInstance(int(data["vars"]), tuple(tuple(a) for a in data["atoms"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed instance JSON: {exc}") from None
    header = None
    atoms = []
    for parts in _lines(text):
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "csp":
                raise InputError("header must read 'p csp <vars> <atoms>'")
            header = _ints(parts[2:], "p line")
        elif parts[0] == "a" and len(parts) == 3:
            atoms.append(tuple(_ints(parts[1:], "a line")))
        else:
            raise InputError(f"unrecognised instance line: {' '.join(parts)}")
    if header is None:
        raise InputError("instance needs a 'p csp' header")
    if header[1] != len(atoms):
        raise InputError(f"header announces {header[1]} atoms, found {len(atoms)}")
    return CspInstance(header[0], tuple(atoms))

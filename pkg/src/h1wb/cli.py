"""Command-line front end: ``h1wb <group> <command> [inputs] [options]``.

Inputs are file paths, ``-`` for stdin, or builtin names starting with ``:``
(``:K4``, ``:C5``, ``:W5``, ``:loop``, ``:Z3``, ``:gadget``, ``:siggers``,
``:qnu3``, ``:sigma:K4``, ``:empty``).  Every command prints one Report.

Exit codes: 0 positive answer, 1 negative answer, 2 input error,
3 resource cap or timeout, 4 a certificate failed its independent check.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from typing import Any, Callable, NamedTuple

from . import __version__, checks, io
from .clones import (
    FiniteStructure,
    OperationTable,
    build_fgraph,
    enumerate_polymorphisms,
    find_pseudo_siggers,
    find_qnu,
    find_siggers,
    looped_vertex_structure,
    minion_hom_to_p,
    satisfies,
    structure_from_graph,
    z3_affine,
)
from .conditions import (
    LEFT,
    RIGHT,
    H1Condition,
    Identity,
    Term,
    builtin_condition,
    derive_glue,
    entails_identity,
    find_derivation,
    is_trivial,
    refute_implication,
    sigma_of_graph,
)
from .csp import NodeLimit
from .errors import H1Error, InputError, InternalError, ResourceError, SeedsExhausted
from .forb import CspInstance, TemplateForb, encode_graph_tuples, loop_like_bounds, solve_css_csp
from .graphs import (
    Graph,
    MarkedGraph,
    build_chain,
    build_gadget_n,
    complete,
    cycle,
    glue,
    hom_search,
    is_critical,
    looped_vertex,
    three_coloring,
    trim_to_critical,
    verify_gadget_n,
    wheel,
)
from .growth import GrowthSpec, compute_alpha
from .pp import eval_pp, parse_pp

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_RESOURCE, EXIT_INTERNAL = 0, 1, 2, 3, 4


# -- inputs -------------------------------------------------------------------------


class Inputs:
    """Reads named inputs and remembers a digest of each."""

    def __init__(self):
        self.digests: dict[str, str] = {}

    def text(self, label: str, spec: str) -> str:
        if spec.startswith(":"):
            self.digests[label] = "builtin" + spec
            return spec
        try:
            raw = sys.stdin.buffer.read() if spec == "-" else open(spec, "rb").read()
        except OSError as exc:
            raise InputError(f"cannot read {spec}: {exc.strerror}") from None
        self.digests[label] = "sha256:" + hashlib.sha256(raw).hexdigest()
        try:
            return raw.decode()
        except UnicodeDecodeError:
            raise InputError(f"{spec} is not UTF-8 text") from None

    def graph(self, label: str, spec: str) -> Graph | MarkedGraph:
        text = self.text(label, spec)
        return builtin_graph(text[1:]) if text.startswith(":") else io.parse_graph(text)

    def structure(self, label: str, spec: str) -> FiniteStructure:
        text = self.text(label, spec)
        return builtin_structure(text[1:]) if text.startswith(":") else io.parse_structure(text)

    def condition(self, label: str, spec: str) -> H1Condition:
        text = self.text(label, spec)
        return builtin_cond(text[1:]) if text.startswith(":") else io.parse_condition(text)


def builtin_graph(name: str) -> Graph | MarkedGraph:
    try:
        if name == "loop":
            return looped_vertex()
        if name == "gadget":
            gd = build_gadget_n(verify=False)
            return MarkedGraph(gd.graph, gd.d)
        if name[0] == "K":
            g = complete(int(name[1:]))
            return MarkedGraph(g, (0, 1)) if g.n >= 2 else g
        if name[0] == "C":
            return cycle(int(name[1:]))
        if name[0] == "W":
            return wheel(int(name[1:]))
    except (ValueError, IndexError):
        pass
    raise InputError(f"unknown builtin graph :{name}")


def builtin_structure(name: str) -> FiniteStructure:
    if name == "Z3":
        return z3_affine()
    if name == "loop":
        return looped_vertex_structure()
    return structure_from_graph(io.as_graph(builtin_graph(name)))


def builtin_cond(name: str) -> H1Condition:
    if name == "siggers":
        return builtin_condition("siggers")
    if name == "empty":
        return H1Condition((), ())
    if name.startswith("qnu"):
        try:
            return builtin_condition("qnu", int(name[3:]))
        except ValueError:
            raise InputError(f"unknown builtin condition :{name}") from None
    if name.startswith("sigma:"):
        return sigma_of_graph(io.as_graph(builtin_graph(name[6:])))
    raise InputError(f"unknown builtin condition :{name}")


def parse_identity(text: str) -> Identity:
    parts = text.split()
    if "=" not in parts or len(parts) < 4:
        raise InputError("identity reads '<r> <sym> <coords..> = <sym> <coords..>'")
    eq = parts.index("=")
    try:
        r = int(parts[0])
        lhs = Term(parts[1], tuple(int(x) for x in parts[2:eq]))
        rhs = Term(parts[eq + 1], tuple(int(x) for x in parts[eq + 2:]))
        return Identity(r, lhs, rhs)
    except (ValueError, IndexError):
        raise InputError(f"bad identity {text!r}") from None


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


# -- report ---------------------------------------------------------------------------


class Outcome:
    def __init__(self, answer: bool, result: Any, witness: Any = None, checked: bool | None = None):
        self.answer = answer
        self.result = result
        self.witness = witness
        self.checked = checked


def make_report(command: str, inputs: Inputs, out: Outcome, elapsed: float) -> dict:
    body = {
        "command": command,
        "version": __version__,
        "inputs": inputs.digests,
        "answer": out.answer,
        "result": out.result,
        "checked": out.checked,
    }
    if out.witness is not None:
        body["witness"] = out.witness
    body["digest"] = hashlib.sha256(io.dumps(body).encode()).hexdigest()
    body["timings"] = {"total_ms": round(elapsed * 1000, 3)}
    return body


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {'yes' if report['answer'] else 'no'}"]
    res = report["result"]
    if isinstance(res, dict):
        for k in sorted(res):
            lines.append(f"  {k}: {io.dumps(res[k]) if not isinstance(res[k], str) else res[k]}")
    else:
        lines.append(f"  result: {res}")
    if "witness" in report:
        lines.append(f"  witness: {io.dumps(report['witness'])}")
    lines.append(f"  checked: {report['checked']}")
    lines.append(f"  digest: {report['digest']}")
    return "\n".join(lines)


def _tables_json(tables: dict[str, OperationTable]) -> dict:
    return {k: list(t.values) for k, t in sorted(tables.items())}


def _hom_json(hom: dict[int, int]) -> list[int]:
    return [hom[v] for v in range(len(hom))]


# -- graph ----------------------------------------------------------------------------


def cmd_graph_hom(a, inp: Inputs) -> Outcome:
    src = io.as_graph(inp.graph("source", a.source))
    tgt = io.as_graph(inp.graph("target", a.target))
    hom = hom_search(src, tgt)
    if hom is None:
        return Outcome(False, "absent")
    return Outcome(True, "present", {"map": _hom_json(hom)}, checks.check_hom(src, tgt, hom))


def cmd_graph_color(a, inp: Inputs) -> Outcome:
    g = io.as_graph(inp.graph("graph", a.graph))
    col = three_coloring(g)
    if col is None:
        naive = checks.naive_coloring(g.n, g.edges) if g.n <= a.check_limit else None
        return Outcome(False, "not 3-colorable", checked=(naive is None) if g.n <= a.check_limit else None)
    return Outcome(True, "3-colorable", {"coloring": _hom_json(col)}, checks.check_coloring(g, col))


def cmd_graph_critical(a, inp: Inputs) -> Outcome:
    g = inp.graph("graph", a.graph)
    edge = tuple(a.edge) if a.edge else (g.marked if isinstance(g, MarkedGraph) else None)
    g = io.as_graph(g)
    if edge is not None:
        ok = is_critical(g, edge)
        res = {"edge": list(edge), "critical": ok}
        if not ok:
            return Outcome(False, res, checked=not checks.check_critical(g, edge))
        col = three_coloring(g.without(edge))
        rest = g.without(edge)
        return Outcome(True, res, {"coloring_without_edge": _hom_json(col)},
                       checks.check_critical(g, edge) and checks.check_coloring(rest, col))
    if g.has_loop() or three_coloring(g) is not None:
        return Outcome(False, "3-colorable or looped; nothing to trim")
    h, e = trim_to_critical(g)
    col = three_coloring(h.without(e))
    return Outcome(True, {"graph": io.graph_to_json(MarkedGraph(h, e)), "edge": list(e)},
                   {"coloring_without_edge": _hom_json(col)},
                   checks.check_critical(h, e) and checks.check_coloring(h.without(e), col))


# -- gadget, glue, chain ------------------------------------------------------------------


def _gadget_input(a, inp: Inputs):
    from .graphs import GadgetN

    if a.graph is None:
        return build_gadget_n(verify=False)
    g = inp.graph("graph", a.graph)
    if not isinstance(g, MarkedGraph) or a.boundary is None:
        raise InputError("a gadget file needs its marked edge d and --boundary x x' y y'")
    return GadgetN(g.graph, dict(zip(("x", "x'", "y", "y'"), a.boundary)), g.marked)


def _gadget_check(gd) -> bool:
    counts = checks.gadget_counts(gd.graph.n, gd.graph.edges, gd.d,
                                  [gd.boundary[k] for k in ("x", "x'", "y", "y'")])
    return counts["xor_exact"] and counts["eqeq_extendable"] == 9


def cmd_gadget_build(a, inp: Inputs) -> Outcome:
    gd = build_gadget_n(verify=True)
    res = {"graph": io.graph_to_json(MarkedGraph(gd.graph, gd.d)), "boundary": gd.boundary}
    return Outcome(True, res, checked=_gadget_check(gd))


def cmd_gadget_verify(a, inp: Inputs) -> Outcome:
    gd = _gadget_input(a, inp)
    rep = verify_gadget_n(gd, strict=False)
    res = {"P1": rep.p1, "P2": rep.p2, "P3": rep.p3, "extendable": rep.extendable_n,
           "boundary_assignments": 81, "eqeq_extendable_minus_d": rep.eqeq_extendable_n_minus_d}
    counts = checks.gadget_counts(gd.graph.n, gd.graph.edges, gd.d,
                                  [gd.boundary[k] for k in ("x", "x'", "y", "y'")])
    agree = counts["extendable"] == rep.extendable_n and counts["eqeq_extendable"] == rep.eqeq_extendable_n_minus_d
    return Outcome(rep.passed, res, checked=agree)


def _glue_check(w: MarkedGraph) -> bool:
    col = three_coloring(w.graph.without(w.marked))
    return checks.check_critical(w.graph, w.marked) and checks.check_coloring(w.graph.without(w.marked), col)


def cmd_glue(a, inp: Inputs) -> Outcome:
    g = io.as_marked(inp.graph("g", a.g))
    h = io.as_marked(inp.graph("h", a.h))
    w = glue(g, h)
    return Outcome(True, {"graph": io.graph_to_json(w), "vertices": w.graph.n}, checked=_glue_check(w))


def cmd_chain(a, inp: Inputs) -> Outcome:
    chain = build_chain(a.n, a.max_vertices)
    res = {"chain": [io.graph_to_json(h) for h in chain], "sizes": [h.graph.n for h in chain]}
    return Outcome(True, res, checked=all(_glue_check(h) for h in chain))


# -- conditions ------------------------------------------------------------------------


def cmd_cond_sigma(a, inp: Inputs) -> Outcome:
    g = io.as_graph(inp.graph("graph", a.graph))
    return Outcome(True, io.condition_to_json(sigma_of_graph(g)))


def cmd_cond_builtin(a, inp: Inputs) -> Outcome:
    return Outcome(True, io.condition_to_json(builtin_condition(a.name, a.arity)))


def cmd_cond_trivial(a, inp: Inputs) -> Outcome:
    c = inp.condition("condition", a.condition)
    assign = is_trivial(c)
    if assign is None:
        return Outcome(False, "nontrivial")
    return Outcome(True, "trivial", {"projection": assign}, checks.check_projection_assignment(c, assign))


def _deriv_json(d) -> dict:
    return {t: {"sym": s, "map": list(mu)} for t, (s, mu) in d.mapping}


def cmd_cond_derive(a, inp: Inputs) -> Outcome:
    if a.glue:
        g = io.as_marked(inp.graph("g", a.source))
        h = io.as_marked(inp.graph("h", a.target))
        w = glue(g, h)
        sw = sigma_of_graph(w.graph)
        from_g, from_h = derive_glue(g, h)
        ok = (checks.check_derivation(sigma_of_graph(g.graph), sw, from_g.as_dict())
              and checks.check_derivation(sigma_of_graph(h.graph), sw, from_h.as_dict()))
        return Outcome(True, {"glued": io.graph_to_json(w)}, {"from_g": _deriv_json(from_g), "from_h": _deriv_json(from_h)}, ok)
    src = inp.condition("source", a.source)
    tgt = inp.condition("target", a.target)
    d = find_derivation(src, tgt, a.budget)
    if d is None:
        return Outcome(False, "no derivation found (inconclusive)")
    return Outcome(True, "derived", {"mapping": _deriv_json(d)}, checks.check_derivation(src, tgt, d.as_dict()))


def cmd_cond_entails(a, inp: Inputs) -> Outcome:
    src = inp.condition("source", a.source)
    if (a.identity is None) == (a.target is None):
        raise InputError("give exactly one of --identity and --target")
    if a.identity is not None:
        idents = [parse_identity(a.identity)]
        inp.digests["identity"] = "text:" + a.identity
    else:
        idents = list(inp.condition("target", a.target).identities)
    answers = [entails_identity(src, i) for i in idents]
    answer = all(answers)
    # the BFS checker is complete as well, so it can confirm either verdict
    independent = [checks._consequence(src, i.r, (i.lhs.sym, i.lhs.coords), (i.rhs.sym, i.rhs.coords)) for i in idents]
    return Outcome(answer, {"entailed": answers}, checked=independent == answers)


def cmd_cond_refute(a, inp: Inputs) -> Outcome:
    src = inp.condition("source", a.source)
    tgt = inp.condition("target", a.target)
    ws = [inp.structure(f"witness{i}", w) for i, w in enumerate(a.witnesses)]
    b = refute_implication(src, tgt, ws)
    if b is None:
        return Outcome(False, "no refuter among the witnesses (inconclusive)")
    idx = ws.index(b)
    w = satisfies(b, src)
    ok = checks.check_witness(b, src, {k: t.values for k, t in w.tables.items()})
    return Outcome(True, {"refuter": idx, "structure": io.structure_to_json(b)},
                   {"source_tables": _tables_json(w.tables)}, ok)


# -- clones --------------------------------------------------------------------------------


def _witness_outcome(b: FiniteStructure, c: H1Condition, w, subset=None) -> Outcome:
    if w is None:
        return Outcome(False, "absent")
    ok = checks.check_witness(b, c, {k: t.values for k, t in w.tables.items()}, subset)
    out = {"tables": _tables_json(w.tables)}
    if subset is not None:
        out["subset"] = list(subset)
    return Outcome(True, "present", out, ok)


def cmd_clone_satisfies(a, inp: Inputs) -> Outcome:
    b = inp.structure("structure", a.structure)
    c = inp.condition("condition", a.condition)
    subset = tuple(a.subset) if a.subset is not None else None
    return _witness_outcome(b, c, satisfies(b, c, subset), subset)


def cmd_clone_siggers(a, inp: Inputs) -> Outcome:
    b = inp.structure("structure", a.structure)
    return _witness_outcome(b, builtin_condition("siggers"), find_siggers(b))


def cmd_clone_qnu(a, inp: Inputs) -> Outcome:
    b = inp.structure("structure", a.structure)
    return _witness_outcome(b, builtin_condition("qnu", a.arity), find_qnu(b, a.arity))


def cmd_clone_polys(a, inp: Inputs) -> Outcome:
    b = inp.structure("structure", a.structure)
    polys = enumerate_polymorphisms(b, a.arity, a.cap)
    ok = all(checks.check_polymorphism(b, a.arity, t.values) for t in polys.tables)
    res = {"count": len(polys.tables), "truncated": polys.truncated}
    return Outcome(True, res, {"tables": [list(t.values) for t in polys.tables]}, ok)


def cmd_clone_fgraph(a, inp: Inputs) -> Outcome:
    b = inp.structure("structure", a.structure)
    fg = build_fgraph(b, a.cap)
    col = three_coloring(fg.graph)
    ok = True
    for i, j in sorted(fg.witnesses):
        w = fg.edge_witness(i, j)
        ok = ok and checks.check_witness(b, w.condition, {k: t.values for k, t in w.tables.items()})
    if col is not None:
        ok = ok and checks.check_coloring(fg.graph, col)
    res = {"graph": io.graph_to_json(fg.graph), "three_colorable": col is not None}
    wit = {"tables": [list(t.values) for t in fg.tables]}
    if col is not None:
        wit["coloring"] = _hom_json(col)
    return Outcome(col is not None, res, wit, ok)


def cmd_clone_quotient(a, inp: Inputs) -> Outcome:
    from .clones import quotient_power

    h = io.as_graph(inp.graph("graph", a.graph))
    q = quotient_power(h, a.n)
    return Outcome(True, {"graph": io.graph_to_json(q), "vertices": q.n, "has_loop": q.has_loop()})


def cmd_clone_pseudosiggers(a, inp: Inputs) -> Outcome:
    b = inp.structure("structure", a.structure)
    found = find_pseudo_siggers(b, a.endo_cap)
    if found is None:
        return Outcome(False, "absent")
    s, (e1, e2) = found
    ok = (checks.check_polymorphism(b, 6, s.values) and checks.check_polymorphism(b, 1, e1.values)
          and checks.check_polymorphism(b, 1, e2.values))
    for x in range(b.size):
        for y in range(b.size):
            for z in range(b.size):
                xyz = (x, y, z)
                lhs = e1.values[checks._apply(s.values, b.size, [xyz[c] for c in LEFT])]
                rhs = e2.values[checks._apply(s.values, b.size, [xyz[c] for c in RIGHT])]
                ok = ok and lhs == rhs
    return Outcome(True, "present", {"s": list(s.values), "e1": list(e1.values), "e2": list(e2.values)}, ok)


def cmd_clone_minionp(a, inp: Inputs) -> Outcome:
    b = inp.structure("structure", a.structure)
    answer = minion_hom_to_p(b, a.cap)
    if not answer:
        w = find_siggers(b)
        ok = checks.check_witness(b, builtin_condition("siggers"), {k: t.values for k, t in w.tables.items()})
        return Outcome(False, "no minion homomorphism to P", {"siggers": list(w.tables["s"].values)}, ok)
    return Outcome(True, "minion homomorphism to P exists")


def cmd_clone_pp(a, inp: Inputs) -> Outcome:
    b = inp.structure("structure", a.structure)
    f = parse_pp(a.formula)
    inp.digests["formula"] = "text:" + a.formula
    ok = eval_pp(b, f, tuple(a.args))
    return Outcome(ok, {"free": list(f.free), "holds": ok})


# -- css ----------------------------------------------------------------------------------


def cmd_css_solve(a, inp: Inputs) -> Outcome:
    forb = io.as_graph(inp.graph("forbidden", a.forbidden))
    text = inp.text("instance", a.instance)
    if text.startswith(":"):
        g = io.as_graph(builtin_graph(text[1:]))
        inst = CspInstance(g.n, tuple(g.sorted_edges()))
    else:
        inst = io.parse_instance(text)
    t = TemplateForb(forb)
    accept = solve_css_csp(t, inst)
    if accept:
        return Outcome(True, "accept")
    hom = hom_search(forb, inst.graph())
    return Outcome(False, "reject", {"forbidden_map": _hom_json(hom)}, checks.check_hom(forb, inst.graph(), hom))


def cmd_css_encode(a, inp: Inputs) -> Outcome:
    g = io.as_graph(inp.graph("graph", a.graph))
    return Outcome(True, io.structure_to_json(encode_graph_tuples(g, a.n)))


def cmd_css_bounds(a, inp: Inputs) -> Outcome:
    bounds = loop_like_bounds(a.n)
    return Outcome(True, {"count": len(bounds), "structures": [io.structure_to_json(b) for b in bounds]})


# -- growth ----------------------------------------------------------------------------


def cmd_growth_alpha(a, inp: Inputs) -> Outcome:
    spec = GrowthSpec.parse(a.f)
    if a.sizes is not None:
        sizes = a.sizes
    else:
        sizes = [h.graph.n for h in build_chain(a.n, a.max_vertices)]
    plan = compute_alpha(spec, sizes, a.n, a.k_max)
    res = {
        "f": spec.describe(),
        "sizes": plan.sizes,
        "alpha": plan.alpha,
        "thresholds": plan.thresholds,
        "steps": [{"n": s.n, "exponents": s.exponents, "crossover": s.crossover, "k": s.k,
                   "method": s.method, "spot_checks": s.spot_checks} for s in plan.steps],
        "for_all_k": "crossover: k <= s^m with s = ceil(k^(1/m)); n*s^(m*E) < 2^s and ((s+1)/s)^(m*E) <= 2 at s0",
    }
    return Outcome(True, res, checked=checks.check_growth(spec.m, plan.sizes, plan.alpha, plan.thresholds))


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="h1wb", description="Height-1 condition workbench.")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=0, help="accepted for reproducibility; default algorithms are deterministic")
    p.add_argument("--jobs", type=int, default=1, help="internal parallelism; outputs do not depend on it")
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, name: str, fn: Callable, help: str = ""):
        q = group.add_parser(name, help=help)
        q.set_defaults(fn=fn)
        return q

    g = groups.add_parser("graph").add_subparsers(dest="cmd", required=True)
    q = sub(g, "hom", cmd_graph_hom, "homomorphism search")
    q.add_argument("source")
    q.add_argument("target")
    q = sub(g, "color", cmd_graph_color, "3-coloring")
    q.add_argument("graph")
    q.add_argument("--check-limit", type=int, default=40, help="naively recheck negatives up to this many vertices")
    q = sub(g, "critical", cmd_graph_critical, "test an edge, or trim to a critical subgraph")
    q.add_argument("graph")
    q.add_argument("--edge", type=int, nargs=2)

    g = groups.add_parser("gadget").add_subparsers(dest="cmd", required=True)
    sub(g, "build", cmd_gadget_build)
    q = sub(g, "verify", cmd_gadget_verify)
    q.add_argument("graph", nargs="?")
    q.add_argument("--boundary", type=int, nargs=4)

    q = groups.add_parser("glue")
    q.set_defaults(fn=cmd_glue, cmd=None)
    q.add_argument("g")
    q.add_argument("h")

    q = groups.add_parser("chain")
    q.set_defaults(fn=cmd_chain, cmd=None)
    q.add_argument("--n", type=int, default=3)
    q.add_argument("--max-vertices", type=int, default=8)

    g = groups.add_parser("cond").add_subparsers(dest="cmd", required=True)
    q = sub(g, "sigma", cmd_cond_sigma)
    q.add_argument("graph")
    q = sub(g, "builtin", cmd_cond_builtin)
    q.add_argument("name")
    q.add_argument("--arity", type=int)
    q = sub(g, "trivial", cmd_cond_trivial)
    q.add_argument("condition")
    q = sub(g, "derive", cmd_cond_derive)
    q.add_argument("source")
    q.add_argument("target")
    q.add_argument("--budget", type=int, default=100_000)
    q.add_argument("--glue", action="store_true", help="source and target are marked graphs; certify their glue")
    q = sub(g, "entails", cmd_cond_entails)
    q.add_argument("source")
    q.add_argument("--identity")
    q.add_argument("--target")
    q = sub(g, "refute", cmd_cond_refute)
    q.add_argument("source")
    q.add_argument("target")
    q.add_argument("witnesses", nargs="+")

    g = groups.add_parser("clone").add_subparsers(dest="cmd", required=True)
    q = sub(g, "satisfies", cmd_clone_satisfies)
    q.add_argument("structure")
    q.add_argument("condition")
    q.add_argument("--subset", type=int_list)
    for name, fn in (("siggers", cmd_clone_siggers), ("minionp", cmd_clone_minionp)):
        q = sub(g, name, fn)
        q.add_argument("structure")
        if name == "minionp":
            q.add_argument("--cap", type=int, default=256)
    q = sub(g, "qnu", cmd_clone_qnu)
    q.add_argument("structure")
    q.add_argument("--arity", type=int, default=3)
    q = sub(g, "polys", cmd_clone_polys)
    q.add_argument("structure")
    q.add_argument("--arity", type=int, default=1)
    q.add_argument("--cap", type=int)
    q = sub(g, "fgraph", cmd_clone_fgraph)
    q.add_argument("structure")
    q.add_argument("--cap", type=int, default=256)
    q = sub(g, "quotient", cmd_clone_quotient)
    q.add_argument("graph")
    q.add_argument("--n", type=int, required=True)
    q = sub(g, "pseudosiggers", cmd_clone_pseudosiggers)
    q.add_argument("structure")
    q.add_argument("--endo-cap", type=int, default=10_000)
    q = sub(g, "pp", cmd_clone_pp)
    q.add_argument("structure")
    q.add_argument("formula")
    q.add_argument("args", type=int, nargs="*")

    g = groups.add_parser("css").add_subparsers(dest="cmd", required=True)
    q = sub(g, "solve", cmd_css_solve)
    q.add_argument("forbidden")
    q.add_argument("instance")
    q = sub(g, "encode", cmd_css_encode)
    q.add_argument("graph")
    q.add_argument("--n", type=int, required=True)
    q = sub(g, "bounds", cmd_css_bounds)
    q.add_argument("--n", type=int, required=True)

    g = groups.add_parser("growth").add_subparsers(dest="cmd", required=True)
    q = sub(g, "alpha", cmd_growth_alpha)
    q.add_argument("--f", default="sqrt", help="'sqrt', 'root:M' or M for f(k) = 2^ceil(k^(1/M))")
    q.add_argument("--sizes", type=int_list, help="graph sizes |H_i|; default: the chain's")
    q.add_argument("--n", type=int, default=3)
    q.add_argument("--max-vertices", type=int, default=8)
    q.add_argument("--k-max", type=int, default=10 ** 60)
    return p


class RunResult(NamedTuple):
    report: dict | None
    code: int
    error: str | None
    fmt: str = "json"


def run(argv: list[str] | None = None) -> RunResult:
    """Parse and execute one command line."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return RunResult(None, EXIT_INPUT if exc.code else EXIT_YES, None)
    command = args.group if args.cmd is None else f"{args.group} {args.cmd}"
    inp = Inputs()
    t0 = time.perf_counter()
    try:
        out = args.fn(args, inp)
    except InputError as exc:
        return RunResult(None, EXIT_INPUT, f"input error: {exc}", args.format)
    except (ResourceError, SeedsExhausted, NodeLimit) as exc:
        return RunResult(None, EXIT_RESOURCE, f"resource limit: {exc}", args.format)
    except InternalError as exc:
        return RunResult(None, EXIT_INTERNAL, f"internal error: {exc}", args.format)
    except H1Error as exc:
        return RunResult(None, EXIT_INPUT, f"error: {exc}", args.format)
    report = make_report(command, inp, out, time.perf_counter() - t0)
    if out.checked is False:
        return RunResult(report, EXIT_INTERNAL, "certificate failed its independent check", args.format)
    return RunResult(report, EXIT_YES if out.answer else EXIT_NO, None, args.format)


def main(argv: list[str] | None = None) -> int:
    res = run(argv)
    if res.report is not None:
        print(render_text(res.report) if res.fmt == "text" else json.dumps(res.report, sort_keys=True, indent=1))
    if res.error:
        print(res.error, file=sys.stderr)
    return res.code


if __name__ == "__main__":
    sys.exit(main())

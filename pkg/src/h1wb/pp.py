"""Primitive positive formulas in s-expression form.

    (exists (y z) (and (E x y) (E y z) (E z x)))

Atoms are ``(R v1 .. vk)`` for a relation name of the structure or
``(= u v)``.  Free variables are ordered by first occurrence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .clones import FiniteStructure
from .csp import CSP
from .errors import InputError, MalformedFormula

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


@dataclass(frozen=True)
class PPFormula:
    free: tuple[str, ...]
    bound: tuple[str, ...]
    atoms: tuple[tuple[str, tuple[str, ...]], ...]


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise MalformedFormula("unexpected end of formula")
    tok = tokens[pos]
    if tok == ")":
        raise MalformedFormula("unbalanced ')'")
    if tok != "(":
        return tok, pos + 1
    out = []
    pos += 1
    while True:
        if pos >= len(tokens):
            raise MalformedFormula("missing ')'")
        if tokens[pos] == ")":
            return out, pos + 1
        item, pos = _read(tokens, pos)
        out.append(item)


def parse_pp(text: str) -> PPFormula:
    tokens = _TOKEN.findall(text)
    tree, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise MalformedFormula("trailing input after formula")
    free: list[str] = []
    bound: list[str] = []
    atoms: list[tuple[str, tuple[str, ...]]] = []
    fresh = [0]

    def walk(node, scope: dict[str, str]):
        if not isinstance(node, list) or not node:
            raise MalformedFormula(f"expected a formula, got {node!r}")
        head = node[0]
        if head == "and":
            for sub in node[1:]:
                walk(sub, scope)
        elif head == "exists":
            if len(node) != 3 or not isinstance(node[1], list) or any(isinstance(v, list) for v in node[1]):
                raise MalformedFormula("exists takes a variable list and one formula")
            inner = dict(scope)
            for v in node[1]:
                fresh[0] += 1
                inner[v] = f"{v}#{fresh[0]}"
                bound.append(inner[v])
            walk(node[2], inner)
        elif isinstance(head, str):
            args = node[1:]
            if any(isinstance(a, list) for a in args) or not args:
                raise MalformedFormula(f"atom {head} needs variable arguments")
            if head == "=" and len(args) != 2:
                raise MalformedFormula("equality takes two arguments")
            names = []
            for a in args:
                if a in scope:
                    names.append(scope[a])
                else:
                    if a not in free:
                        free.append(a)
                    names.append(a)
            atoms.append((head, tuple(names)))
        else:
            raise MalformedFormula("formula head must be a name")

    walk(tree, {})
    return PPFormula(tuple(free), tuple(bound), tuple(atoms))


def eval_pp(b: FiniteStructure, formula: PPFormula | str, args: tuple[int, ...]) -> bool:
    f = parse_pp(formula) if isinstance(formula, str) else formula
    if len(args) != len(f.free):
        raise MalformedFormula(f"formula has {len(f.free)} free variables, got {len(args)} values")
    if any(a < 0 or a >= b.size for a in args):
        raise InputError("argument outside the domain")
    names = list(f.free) + list(f.bound)
    index = {v: i for i, v in enumerate(names)}
    rels = {r.name: r for r in b.relations}
    csp = CSP([b.size] * len(names))
    for name, vs in f.atoms:
        if name == "=":
            csp.add((index[vs[0]], index[vs[1]]), [(a, a) for a in range(b.size)])
            continue
        if name not in rels:
            raise MalformedFormula(f"unknown relation {name}")
        if rels[name].arity != len(vs):
            raise MalformedFormula(f"{name} has arity {rels[name].arity}, used with {len(vs)}")
        csp.add(tuple(index[v] for v in vs), rels[name].tuples)
    return csp.solve(dict(enumerate(args)), lex=False) is not None

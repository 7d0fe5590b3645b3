"""Slow, independent re-implementations used to cross-check the main code.

Nothing here shares logic with the checkers it audits: laws are re-checked
over all triples, coherence over all functions, the maximal signature over
all subset families, and iso-fullness straight from the definition using
closure-generated symbols.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable, Sequence

from .concrete import ConcreteCategory
from .core import FinCategory


def laws_hold(c: FinCategory) -> bool:
    """Brute-force category axioms over every pair and triple of morphisms."""
    mors = c.morphisms
    objs = set(c.objects)
    if len(objs) != len(c.objects):
        return False
    for m, (s, t) in mors.items():
        if s not in objs or t not in objs:
            return False
    for a in objs:
        i = c.identity.get(a)
        if i is None or mors.get(i) != (a, a):
            return False
    if set(c.identity) - objs:
        return False
    for (g, f), h in c.compose.items():
        if g not in mors or f not in mors or h not in mors:
            return False
        if mors[f][1] != mors[g][0]:
            return False
    for f, (s, t) in mors.items():
        for g, (s2, t2) in mors.items():
            if t != s2:
                continue
            h = c.compose.get((g, f))
            if h is None or mors[h] != (s, t2):
                return False
        if c.compose.get((c.identity[t], f)) != f or c.compose.get((f, c.identity[s])) != f:
            return False
    for f, (_, t) in mors.items():
        for g, (s2, t2) in mors.items():
            if s2 != t:
                continue
            gf = c.compose[g, f]
            for h, (s3, _) in mors.items():
                if s3 != t2:
                    continue
                if c.compose[h, gf] != c.compose[c.compose[h, g], f]:
                    return False
    return True


def all_functions(dom: Sequence[str], cod: Sequence[str]) -> Iterable[dict[str, str]]:
    for image in itertools.product(cod, repeat=len(dom)):
        yield dict(zip(dom, image))


def coherent_naive(k: ConcreteCategory) -> bool:
    """Coherence by enumerating every function between carriers."""
    c = k.cat
    fns = {m: dict(k.fn(m)) for m in c.morphisms}
    for h, (a, obj_c) in c.morphisms.items():
        for g, (b, c2) in c.morphisms.items():
            if c2 != obj_c:
                continue
            for f in all_functions(k.carrier(a), k.carrier(b)):
                if all(fns[g][f[x]] == fns[h][x] for x in k.carrier(a)):
                    if not any(c.morphisms[m] == (a, b) and fns[m] == f for m in c.morphisms):
                        return False
    return True


def _nodes(k: ConcreteCategory, arity: int) -> list[tuple[str, tuple]]:
    return [(a, t) for a in k.cat.objects for t in itertools.product(k.carrier(a), repeat=arity)]


def symbol_valid(k: ConcreteCategory, interp: dict[str, frozenset], arity: int) -> bool:
    """Subfunctor plus reflection, restated from scratch."""
    for m, (a, b) in k.cat.morphisms.items():
        fn = k.fn(m)
        for t in itertools.product(k.carrier(a), repeat=arity):
            image = tuple(fn[x] for x in t)
            if (t in interp[a]) != (image in interp[b]):
                return False
    return True


def sigma_oracle(k: ConcreteCategory, max_arity: int) -> set[tuple[int, frozenset]]:
    """Every valid symbol, as ``(arity, frozenset of (object, tuple))``, by trying all subset families."""
    out = set()
    for n in range(1, max_arity + 1):
        nodes = _nodes(k, n)
        for mask in range(1 << len(nodes)):
            chosen = [nodes[i] for i in range(len(nodes)) if mask >> i & 1]
            interp = {a: frozenset(t for b, t in chosen if b == a) for a in k.cat.objects}
            if symbol_valid(k, interp, n):
                out.add((n, frozenset(chosen)))
    return out


def closure_symbol(k: ConcreteCategory, seeds: Iterable[tuple[str, tuple]], arity: int) -> dict[str, frozenset]:
    """Smallest valid symbol containing ``seeds``: close under images and preimages."""
    found = set(seeds)
    queue = deque(found)
    by_obj_out: dict[str, list[str]] = {}
    by_obj_in: dict[str, list[str]] = {}
    for m, (a, b) in k.cat.morphisms.items():
        by_obj_out.setdefault(a, []).append(m)
        by_obj_in.setdefault(b, []).append(m)
    while queue:
        a, t = queue.popleft()
        nxt = []
        for m in by_obj_out.get(a, ()):
            fn = k.fn(m)
            nxt.append((k.cat.morphisms[m][1], tuple(fn[x] for x in t)))
        for m in by_obj_in.get(a, ()):
            src = k.cat.morphisms[m][0]
            fn = k.fn(m)
            for s in itertools.product(k.carrier(src), repeat=arity):
                if tuple(fn[x] for x in s) == t:
                    nxt.append((src, s))
        for node in nxt:
            if node not in found:
                found.add(node)
                queue.append(node)
    return {a: frozenset(t for b, t in found if b == a) for a in k.cat.objects}


def _inverse_exists(c: FinCategory, m: str) -> bool:
    s, t = c.morphisms[m]
    for n, (s2, t2) in c.morphisms.items():
        if (s2, t2) == (t, s) and c.compose[n, m] == c.identity[s] and c.compose[m, n] == c.identity[t]:
            return True
    return False


def sigma_iso(k: ConcreteCategory, a: str, b: str, f: dict[str, str], max_arity: int) -> bool:
    """Does the bijection ``f`` preserve and reflect every symbol of the maximal signature?"""
    for n in range(1, max_arity + 1):
        for t in itertools.product(k.carrier(a), repeat=n):
            closed = closure_symbol(k, [(a, t)], n)
            if tuple(f[x] for x in t) not in closed[b]:
                return False
    return True


def iso_full_definitional(k: ConcreteCategory, max_arity: int = 2) -> tuple[bool, tuple | None]:
    """Iso-fullness from the definition; returns a witness ``(A, B, f)`` on failure."""
    c = k.cat
    for a in c.objects:
        for b in c.objects:
            ua, ub = k.carrier(a), k.carrier(b)
            if len(ua) != len(ub):
                continue
            for image in itertools.permutations(ub):
                f = dict(zip(ua, image))
                if not sigma_iso(k, a, b, f, max_arity):
                    continue
                inv = {y: x for x, y in f.items()}
                if not sigma_iso(k, b, a, inv, max_arity):
                    continue
                if not any(
                    c.morphisms[m] == (a, b) and dict(k.fn(m)) == f and _inverse_exists(c, m)
                    for m in c.morphisms
                ):
                    return False, (a, b, f)
    return True, None

"""Finite categories, functors and natural transformations.

Everything is stored as explicit tables of opaque string identifiers. Values
are treated as immutable once built; the mappings held by the dataclasses
are never mutated by this package.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"
STRUCTURAL = "structural"

DEFAULT_HOM_CAP = 64


class BudgetExceeded(Exception):
    """An exhaustive search would exceed its configured budget."""

    def __init__(self, what: str, size: int, budget: int):
        super().__init__(f"{what}: search space {size} exceeds budget {budget}")
        self.what = what
        self.size = size
        self.budget = budget


@dataclass(frozen=True)
class Verdict:
    """Outcome of a predicate: a status plus an optional certificate.

    Truthiness is ``status == "pass"``, so a verdict can be used where a
    boolean predicate is expected.
    """

    check: str
    status: str = PASS
    reason: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.status == PASS

    @property
    def ok(self) -> bool:
        return self.status == PASS

    @classmethod
    def passed(cls, check: str, reason: str = "") -> "Verdict":
        return cls(check, PASS, reason)

    @classmethod
    def failed(cls, check: str, reason: str, *witness: Any) -> "Verdict":
        return cls(check, FAIL, reason, tuple(witness))

    @classmethod
    def structural(cls, check: str, reason: str, *witness: Any) -> "Verdict":
        return cls(check, STRUCTURAL, reason, tuple(witness))

    @classmethod
    def unknown(cls, check: str, reason: str) -> "Verdict":
        return cls(check, UNKNOWN, reason)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "status": self.status,
            "reason": self.reason,
            "witness": _jsonable(self.witness),
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


@dataclass(frozen=True)
class FinCategory:
    """A finite category given by its composition table.

    ``morphisms`` maps a morphism id to ``(dom, cod)``; ``compose`` maps
    ``(g, f)`` to ``g∘f`` and should be defined exactly on composable pairs.
    No validation happens here; see :func:`validate_category`.
    """

    objects: tuple[str, ...]
    morphisms: Mapping[str, tuple[str, str]]
    identity: Mapping[str, str]
    compose: Mapping[tuple[str, str], str]
    name: str = "C"

    def dom(self, f: str) -> str:
        return self.morphisms[f][0]

    def cod(self, f: str) -> str:
        return self.morphisms[f][1]

    def comp(self, g: str, f: str) -> str:
        return self.compose[g, f]

    def id(self, a: str) -> str:
        return self.identity[a]

    @cached_property
    def _homs(self) -> dict[tuple[str, str], tuple[str, ...]]:
        homs: dict[tuple[str, str], list[str]] = {}
        for f, (a, b) in self.morphisms.items():
            homs.setdefault((a, b), []).append(f)
        return {k: tuple(v) for k, v in homs.items()}

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self._homs.get((a, b), ())

    @cached_property
    def _outgoing(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {a: [] for a in self.objects}
        for f, (a, _) in self.morphisms.items():
            out.setdefault(a, []).append(f)
        return {a: tuple(v) for a, v in out.items()}

    @cached_property
    def _incoming(self) -> dict[str, tuple[str, ...]]:
        inc: dict[str, list[str]] = {a: [] for a in self.objects}
        for f, (_, b) in self.morphisms.items():
            inc.setdefault(b, []).append(f)
        return {a: tuple(v) for a, v in inc.items()}

    def outgoing(self, a: str) -> tuple[str, ...]:
        return self._outgoing.get(a, ())

    def incoming(self, b: str) -> tuple[str, ...]:
        return self._incoming.get(b, ())

    def is_identity(self, f: str) -> bool:
        a, b = self.morphisms[f]
        return a == b and self.identity.get(a) == f

    def composable_pairs(self) -> Iterator[tuple[str, str]]:
        """All ``(g, f)`` with ``cod(f) == dom(g)``."""
        for f, (_, b) in self.morphisms.items():
            for g in self.outgoing(b):
                yield g, f

    def renamed(self, name: str) -> "FinCategory":
        return FinCategory(self.objects, self.morphisms, self.identity, self.compose, name)


@dataclass(frozen=True)
class Functor:
    source: FinCategory
    target: FinCategory
    obj_map: Mapping[str, str]
    mor_map: Mapping[str, str]
    name: str = "F"

    def __call__(self, x: str) -> str:
        """Apply to an object or a morphism id (objects take precedence)."""
        if x in self.obj_map:
            return self.obj_map[x]
        return self.mor_map[x]

    def ob(self, a: str) -> str:
        return self.obj_map[a]

    def mor(self, f: str) -> str:
        return self.mor_map[f]


@dataclass(frozen=True)
class NatTrans:
    source: Functor
    target: Functor
    components: Mapping[str, str]
    name: str = "phi"

    def __getitem__(self, a: str) -> str:
        return self.components[a]


# ---------------------------------------------------------------- builders


def build_category(
    objects: Iterable[str],
    arrows: Mapping[str, tuple[str, str]],
    compose: Mapping[tuple[str, str], str] | None = None,
    identity: Mapping[str, str] | None = None,
    name: str = "C",
) -> FinCategory:
    """Build a category, generating identities and identity compositions.

    ``arrows`` lists the non-identity morphisms; ``compose`` only needs the
    entries between non-identity morphisms.
    """
    objects = tuple(objects)
    identity = dict(identity) if identity else {a: f"id_{a}" for a in objects}
    morphisms: dict[str, tuple[str, str]] = {identity[a]: (a, a) for a in objects}
    morphisms.update(arrows)
    table: dict[tuple[str, str], str] = dict(compose or {})
    for f, (a, b) in morphisms.items():
        table.setdefault((identity[b], f), f)
        table.setdefault((f, identity[a]), f)
    return FinCategory(objects, morphisms, identity, table, name)


def terminal_category(name: str = "1", obj: str = "*") -> FinCategory:
    return build_category([obj], {}, name=name, identity={obj: f"id_{obj}"})


def discrete_category(objects: Iterable[str], name: str = "D") -> FinCategory:
    return build_category(objects, {}, name=name)


def arrow_category(name: str = "2") -> FinCategory:
    return build_category(["0", "1"], {"u": ("0", "1")}, name=name)


def poset_category(objects: Sequence[str], leq: Iterable[tuple[str, str]], name: str = "P") -> FinCategory:
    """Thin category of a preorder given by generating pairs (closed here)."""
    rel = {(a, a) for a in objects} | set(leq)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    arrows = {f"{a}<={b}": (a, b) for a, b in sorted(rel) if a != b}
    identity = {a: f"{a}<={a}" for a in objects}
    mor = lambda a, b: identity[a] if a == b else f"{a}<={b}"
    compose = {}
    for (a, b), (c, d) in itertools.product(sorted(rel), repeat=2):
        if b == c:
            compose[mor(c, d), mor(a, b)] = mor(a, d)
    return build_category(objects, arrows, compose, identity, name)


def identity_functor(c: FinCategory, name: str | None = None) -> Functor:
    return Functor(c, c, {a: a for a in c.objects}, {f: f for f in c.morphisms}, name or f"Id_{c.name}")


def constant_functor(source: FinCategory, target: FinCategory, obj: str, name: str = "Const") -> Functor:
    ident = target.id(obj)
    return Functor(source, target, {a: obj for a in source.objects}, {f: ident for f in source.morphisms}, name)


def identity_nat(f: Functor, name: str | None = None) -> NatTrans:
    return NatTrans(f, f, {a: f.target.id(f.ob(a)) for a in f.source.objects}, name or f"id_{f.name}")


def compose_functors(f: Functor, g: Functor, name: str | None = None) -> Functor:
    """``g∘f``: first ``f`` then ``g``."""
    if f.target is not g.source and f.target != g.source:
        raise ValueError(f"cannot compose {f.name}: target {f.target.name} != source {g.source.name} of {g.name}")
    return Functor(
        f.source,
        g.target,
        {a: g.obj_map[b] for a, b in f.obj_map.items()},
        {m: g.mor_map[n] for m, n in f.mor_map.items()},
        name or f"{g.name}.{f.name}",
    )


def whisker(t: NatTrans, h: Functor, name: str | None = None) -> NatTrans:
    """``t H``: precompose a transformation with a functor."""
    return NatTrans(
        compose_functors(h, t.source),
        compose_functors(h, t.target),
        {a: t.components[h.ob(a)] for a in h.source.objects},
        name or f"{t.name}{h.name}",
    )


# -------------------------------------------------------------- validation


def _same_category(a: FinCategory, b: FinCategory) -> bool:
    return a is b or a == b


def validate_category(c: FinCategory) -> Verdict:
    """Check the category laws; dangling identifiers are structural errors.

    Laws are checked in the order totality, closure, identity,
    associativity and the first violation is reported.
    """
    check = "category"
    objs = set(c.objects)
    if len(objs) != len(c.objects):
        dup = next(a for a in c.objects if c.objects.count(a) > 1)
        return Verdict.structural(check, "duplicate object", dup)
    for f, (a, b) in c.morphisms.items():
        if a not in objs or b not in objs:
            return Verdict.structural(check, "morphism with dangling endpoint", f)
    for a in c.objects:
        i = c.identity.get(a)
        if i is None:
            return Verdict.structural(check, "missing identity", a)
        if i not in c.morphisms:
            return Verdict.structural(check, "identity is not a morphism", a, i)
        if c.morphisms[i] != (a, a):
            return Verdict.structural(check, "identity is not an endomorphism", a, i)
    for a in c.identity:
        if a not in objs:
            return Verdict.structural(check, "identity for unknown object", a)
    for (g, f), h in c.compose.items():
        for m in (g, f, h):
            if m not in c.morphisms:
                return Verdict.structural(check, "composition entry names unknown morphism", (g, f), m)
        if c.cod(f) != c.dom(g):
            return Verdict.structural(check, "composition entry for non-composable pair", (g, f))

    for g, f in c.composable_pairs():
        if (g, f) not in c.compose:
            return Verdict.failed(check, "totality", g, f)
    for (g, f), h in c.compose.items():
        if c.morphisms[h] != (c.dom(f), c.cod(g)):
            return Verdict.failed(check, "closure", g, f)
    for f, (a, b) in c.morphisms.items():
        if c.compose[c.identity[b], f] != f:
            return Verdict.failed(check, "left identity", f)
        if c.compose[f, c.identity[a]] != f:
            return Verdict.failed(check, "right identity", f)
    for g, f in c.composable_pairs():
        gf = c.compose[g, f]
        for h in c.outgoing(c.cod(g)):
            if c.compose[h, gf] != c.compose[c.compose[h, g], f]:
                return Verdict.failed(check, "associativity", h, g, f)
    return Verdict.passed(check)


def check_hom_cap(c: FinCategory, cap: int = DEFAULT_HOM_CAP) -> Verdict:
    for (a, b), ms in c._homs.items():
        if len(ms) > cap:
            return Verdict.structural("hom-cap", f"hom-set exceeds cap {cap}", a, b, len(ms))
    return Verdict.passed("hom-cap")


def validate_functor(f: Functor) -> Verdict:
    check = "functor"
    s, t = f.source, f.target
    for a in s.objects:
        if a not in f.obj_map:
            return Verdict.structural(check, "object map is not total", a)
        if f.obj_map[a] not in t.identity:
            return Verdict.structural(check, "object image not in target", a, f.obj_map[a])
    for m in s.morphisms:
        if m not in f.mor_map:
            return Verdict.structural(check, "morphism map is not total", m)
        if f.mor_map[m] not in t.morphisms:
            return Verdict.structural(check, "morphism image not in target", m, f.mor_map[m])
    for m, (a, b) in s.morphisms.items():
        if t.morphisms[f.mor_map[m]] != (f.obj_map[a], f.obj_map[b]):
            return Verdict.failed(check, "domain/codomain not preserved", m)
    for a in s.objects:
        if f.mor_map[s.identity[a]] != t.identity[f.obj_map[a]]:
            return Verdict.failed(check, "identity not preserved", a)
    for (g, h), gh in s.compose.items():
        if t.compose[f.mor_map[g], f.mor_map[h]] != f.mor_map[gh]:
            return Verdict.failed(check, "composition not preserved", g, h)
    return Verdict.passed(check)


def validate_nat(t: NatTrans) -> Verdict:
    check = "natural-transformation"
    F, G = t.source, t.target
    if not (_same_category(F.source, G.source) and _same_category(F.target, G.target)):
        return Verdict.structural(check, "functors are not parallel", F.name, G.name)
    c, d = F.source, F.target
    for a in c.objects:
        if a not in t.components:
            return Verdict.structural(check, "missing component", a)
        comp = t.components[a]
        if comp not in d.morphisms:
            return Verdict.structural(check, "component is not a morphism", a, comp)
        if d.morphisms[comp] != (F.ob(a), G.ob(a)):
            return Verdict.failed(check, "component has wrong type", a, comp)
    for k, (a, b) in c.morphisms.items():
        lhs = d.comp(G.mor(k), t.components[a])
        rhs = d.comp(t.components[b], F.mor(k))
        if lhs != rhs:
            return Verdict.failed(check, "naturality square fails", k, (lhs, rhs))
    return Verdict.passed(check)


# -------------------------------------------------------------- predicates


def is_mono(c: FinCategory, f: str) -> bool:
    """Left-cancellability of ``f``, by exhaustive search over parallel pairs."""
    a = c.dom(f)
    for x in c.objects:
        images: dict[str, str] = {}
        for u in c.hom(x, a):
            fu = c.comp(f, u)
            if fu in images:
                return False
            images[fu] = u
    return True


def is_isomorphism(c: FinCategory, f: str) -> str | None:
    """The two-sided inverse of ``f`` if it exists."""
    a, b = c.morphisms[f]
    for g in c.hom(b, a):
        if c.comp(g, f) == c.id(a) and c.comp(f, g) == c.id(b):
            return g
    return None


def isomorphisms(c: FinCategory) -> dict[str, str]:
    """All isomorphisms of ``c`` with their inverses."""
    found = {}
    for f in c.morphisms:
        if f in found:
            continue
        g = is_isomorphism(c, f)
        if g is not None:
            found[f] = g
            found[g] = f
    return found


def is_full(f: Functor) -> Verdict:
    s, t = f.source, f.target
    for a in s.objects:
        for b in s.objects:
            image = {f.mor(m) for m in s.hom(a, b)}
            for n in t.hom(f.ob(a), f.ob(b)):
                if n not in image:
                    return Verdict.failed("full", "morphism not in the image", a, b, n)
    return Verdict.passed("full")


def is_faithful(f: Functor) -> Verdict:
    s = f.source
    for (a, b), ms in s._homs.items():
        seen: dict[str, str] = {}
        for m in ms:
            n = f.mor(m)
            if n in seen:
                return Verdict.failed("faithful", "parallel morphisms identified", seen[n], m)
            seen[n] = m
    return Verdict.passed("faithful")


def is_essentially_surjective(f: Functor) -> Verdict:
    t = f.target
    images = set(f.obj_map.values())
    isos = isomorphisms(t)
    reached = set(images)
    for m in isos:
        a, b = t.morphisms[m]
        if a in images:
            reached.add(b)
    for b in t.objects:
        if b not in reached:
            return Verdict.failed("essentially-surjective", "object not isomorphic to an image", b)
    return Verdict.passed("essentially-surjective")


def is_equivalence(f: Functor) -> Verdict:
    for v in (is_full(f), is_faithful(f), is_essentially_surjective(f)):
        if not v:
            return Verdict(
                "equivalence", v.status, f"not {v.check}: {v.reason}", v.witness
            )
    return Verdict.passed("equivalence")


# ------------------------------------------------------ functor enumeration


def iter_functors(
    source: FinCategory,
    target: FinCategory,
    obj_candidates: Mapping[str, Sequence[str]] | None = None,
    rng: random.Random | None = None,
    node_budget: int | None = None,
    name: str = "F",
) -> Iterator[Functor]:
    """Enumerate functors ``source -> target`` by backtracking.

    Objects are assigned one at a time; a morphism is assigned as soon as both
    of its endpoints are, and every composition constraint is checked the
    moment its last participant is fixed. With ``rng`` the candidate order is
    shuffled (for random sampling). ``node_budget`` bounds the number of search
    nodes and raises :class:`BudgetExceeded` when hit.
    """
    objs = list(source.objects)
    steps: list[tuple[str, str]] = []
    placed: set[str] = set()
    scheduled: set[str] = set()
    non_id = [m for m in source.morphisms if not source.is_identity(m)]
    for a in objs:
        steps.append(("obj", a))
        placed.add(a)
        for m in non_id:
            d, c = source.morphisms[m]
            if d in placed and c in placed and m not in scheduled:
                scheduled.add(m)
                steps.append(("mor", m))
    position = {x: i for i, (kind, x) in enumerate(steps) if kind == "mor"}
    for a in objs:
        position[source.id(a)] = next(i for i, s in enumerate(steps) if s == ("obj", a))
    checks_at: dict[int, list[tuple[str, str, str]]] = {}
    for (g, f), h in source.compose.items():
        at = max(position[g], position[f], position[h])
        checks_at.setdefault(at, []).append((g, f, h))

    obj_map: dict[str, str] = {}
    mor_map: dict[str, str] = {}
    nodes = 0

    def candidates_obj(a: str) -> list[str]:
        cands = list(obj_candidates[a]) if obj_candidates and a in obj_candidates else list(target.objects)
        if rng is not None:
            rng.shuffle(cands)
        return cands

    def consistent(i: int) -> bool:
        for g, f, h in checks_at.get(i, ()):
            if target.compose.get((mor_map[g], mor_map[f])) != mor_map[h]:
                return False
        return True

    def go(i: int) -> Iterator[Functor]:
        nonlocal nodes
        if i == len(steps):
            yield Functor(source, target, dict(obj_map), dict(mor_map), name)
            return
        kind, x = steps[i]
        if kind == "obj":
            for b in candidates_obj(x):
                nodes += 1
                if node_budget is not None and nodes > node_budget:
                    raise BudgetExceeded("functor search", nodes, node_budget)
                obj_map[x] = b
                mor_map[source.id(x)] = target.id(b)
                if consistent(i):
                    yield from go(i + 1)
                del obj_map[x]
                del mor_map[source.id(x)]
        else:
            d, c = source.morphisms[x]
            cands = list(target.hom(obj_map[d], obj_map[c]))
            if rng is not None:
                rng.shuffle(cands)
            for n in cands:
                nodes += 1
                if node_budget is not None and nodes > node_budget:
                    raise BudgetExceeded("functor search", nodes, node_budget)
                mor_map[x] = n
                if consistent(i):
                    yield from go(i + 1)
                del mor_map[x]

    yield from go(0)


def is_quasi_inverse_available(f: Functor) -> bool:
    """Search exhaustively for object-level inverse-up-to-iso data.

    Used to cross-check :func:`is_equivalence` on small categories: for each
    target object pick a source object whose image is isomorphic to it.
    """
    t = f.target
    isos = isomorphisms(t)
    iso_pairs = {t.morphisms[m] for m in isos} | {(b, b) for b in t.objects}
    return all(any((f.ob(a), b) in iso_pairs for a in f.source.objects) for b in t.objects)

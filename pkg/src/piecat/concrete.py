"""Concrete categories: a finite category with an underlying-set functor.

The predicates here form the concreteness ladder used throughout: faithful
underlying functor, concrete monomorphisms, coherence and transportability
relative to an explicit finite element universe.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

from .core import FinCategory, Verdict, build_category, isomorphisms, is_mono
from .names import fresh

DEFAULT_FRESH = 2


@dataclass(frozen=True)
class FinSetFunctor:
    """Underlying sets per object and total functions per morphism."""

    carriers: Mapping[str, tuple[str, ...]]
    action: Mapping[str, Mapping[str, str]]


@dataclass(frozen=True)
class ConcreteCategory:
    cat: FinCategory
    u: FinSetFunctor

    @property
    def name(self) -> str:
        return self.cat.name

    def carrier(self, a: str) -> tuple[str, ...]:
        return self.u.carriers[a]

    def fn(self, f: str) -> Mapping[str, str]:
        return self.u.action[f]

    @cached_property
    def carrier_sets(self) -> dict[str, frozenset[str]]:
        return {a: frozenset(xs) for a, xs in self.u.carriers.items()}

    def fkey(self, f: str) -> tuple[str, ...]:
        """The function of ``f`` as a tuple over the domain's carrier order."""
        fn = self.u.action[f]
        return tuple(fn[x] for x in self.u.carriers[self.cat.dom(f)])

    def elements(self) -> list[str]:
        seen: dict[str, None] = {}
        for a in self.cat.objects:
            for x in self.u.carriers[a]:
                seen.setdefault(x, None)
        return sorted(seen)

    def renamed(self, name: str) -> "ConcreteCategory":
        return ConcreteCategory(self.cat.renamed(name), self.u)


def validate_set_functor(k: ConcreteCategory) -> Verdict:
    """Functoriality of the underlying-set functor, elementwise."""
    check = "set-functor"
    c, u = k.cat, k.u
    for a in c.objects:
        if a not in u.carriers:
            return Verdict.structural(check, "missing carrier", a)
        if len(set(u.carriers[a])) != len(u.carriers[a]):
            return Verdict.structural(check, "carrier lists an element twice", a)
    for f, (a, b) in c.morphisms.items():
        if f not in u.action:
            return Verdict.structural(check, "missing action", f)
        fn = u.action[f]
        src, tgt = k.carrier_sets[a], k.carrier_sets[b]
        if set(fn) != src:
            return Verdict.failed(check, "action is not total on the domain carrier", f)
        if any(y not in tgt for y in fn.values()):
            return Verdict.failed(check, "action leaves the codomain carrier", f)
    for a in c.objects:
        if any(x != y for x, y in u.action[c.id(a)].items()):
            return Verdict.failed(check, "identity not sent to an identity function", a)
    for (g, f), h in c.compose.items():
        fg, ff, fh = u.action[g], u.action[f], u.action[h]
        for x in ff:
            if fg[ff[x]] != fh[x]:
                return Verdict.failed(check, "composition not preserved", g, f, x)
    return Verdict.passed(check)


def concrete_from_functions(
    carriers: Mapping[str, Sequence[str]],
    generators: Mapping[str, tuple[str, str, Mapping[str, str]]] | Iterable[tuple[str, str, Mapping[str, str]]],
    name: str = "K",
    max_morphisms: int | None = None,
) -> ConcreteCategory:
    """Close a set of functions between carriers under composition.

    Morphisms are identified by ``(dom, cod, function)``, so the resulting
    underlying functor is faithful by construction. Morphism names are taken
    from ``generators`` when given as a mapping and otherwise serial.
    """
    objects = list(carriers)
    carriers = {a: tuple(xs) for a, xs in carriers.items()}
    named = dict(generators) if isinstance(generators, Mapping) else {}
    gens = list(named.items()) if named else [(None, g) for g in generators]

    def key(a, b, fn):
        return a, b, tuple(fn[x] for x in carriers[a])

    table: dict[tuple, str] = {}
    action: dict[str, dict[str, str]] = {}
    morphisms: dict[str, tuple[str, str]] = {}
    identity = {}
    counter = itertools.count()

    def add(a, b, fn, label=None):
        k = key(a, b, fn)
        if k in table:
            return table[k], False
        m = label if label is not None else f"m{next(counter)}"
        while m in morphisms:
            m = f"m{next(counter)}"
        table[k] = m
        morphisms[m] = (a, b)
        action[m] = dict(fn)
        return m, True

    for a in objects:
        identity[a], _ = add(a, a, {x: x for x in carriers[a]}, f"id_{a}")
    frontier = []
    for label, (a, b, fn) in gens:
        m, new = add(a, b, fn, label)
        if new:
            frontier.append(m)
    while frontier:
        nxt = []
        for m in frontier:
            a, b = morphisms[m]
            for n in list(morphisms):
                c, d = morphisms[n]
                if c == b:
                    fn = {x: action[n][action[m][x]] for x in carriers[a]}
                    r, new = add(a, d, fn)
                    if new:
                        nxt.append(r)
                if d == a:
                    fn = {x: action[m][action[n][x]] for x in carriers[c]}
                    r, new = add(c, b, fn)
                    if new:
                        nxt.append(r)
            if max_morphisms is not None and len(morphisms) > max_morphisms:
                raise ValueError(f"closure exceeds {max_morphisms} morphisms")
        frontier = nxt
    compose = {}
    for f, (a, b) in morphisms.items():
        for g, (c, d) in morphisms.items():
            if c == b:
                fn = {x: action[g][action[f][x]] for x in carriers[a]}
                compose[g, f] = table[key(a, d, fn)]
    cat = build_category(objects, {m: e for m, e in morphisms.items() if m not in identity.values()}, compose, identity, name)
    return ConcreteCategory(cat, FinSetFunctor(carriers, action))


# ----------------------------------------------------------------- ladder


def is_faithful_u(k: ConcreteCategory) -> Verdict:
    for (a, b), ms in k.cat._homs.items():
        seen: dict[tuple, str] = {}
        for m in ms:
            key = k.fkey(m)
            if key in seen:
                return Verdict.failed("faithful-u", "parallel morphisms with equal underlying function", seen[key], m)
            seen[key] = m
    return Verdict.passed("faithful-u")


def has_concrete_monos(k: ConcreteCategory) -> Verdict:
    for f in k.cat.morphisms:
        key = k.fkey(f)
        if len(set(key)) != len(key):
            return Verdict.failed("concrete-monos", "underlying function not injective", f)
        if not is_mono(k.cat, f):
            return Verdict.failed("concrete-monos", "not a monomorphism", f)
    return Verdict.passed("concrete-monos")


def _liftable(k: ConcreteCategory) -> dict[tuple[str, str], dict[tuple, list[str]]]:
    table: dict[tuple[str, str], dict[tuple, list[str]]] = {}
    for f, (a, b) in k.cat.morphisms.items():
        table.setdefault((a, b), {}).setdefault(k.fkey(f), []).append(f)
    return table


def iter_triangles(k: ConcreteCategory) -> Iterator[tuple[str, str, tuple[str, ...]]]:
    """Commutative triangles ``U(g)∘f = U(h)`` with ``h: A->C``, ``g: B->C``.

    ``f`` is yielded as a tuple over the carrier order of ``A``; candidates
    are enumerated from fibres of ``U(g)`` rather than from all functions.
    """
    c = k.cat
    for obj_c in c.objects:
        into = c.incoming(obj_c)
        for h in into:
            a = c.dom(h)
            fh = k.fn(h)
            ua = k.carrier(a)
            for g in into:
                b = c.dom(g)
                fibres: dict[str, list[str]] = {}
                for y in k.carrier(b):
                    fibres.setdefault(k.fn(g)[y], []).append(y)
                choices = [fibres.get(fh[x], []) for x in ua]
                for f in itertools.product(*choices):
                    yield h, g, f


def is_coherent(k: ConcreteCategory) -> Verdict:
    """Every commutative underlying triangle lifts to a morphism ``A -> B``.

    Triangles with ``A = B = C`` are included, and so is the empty function
    out of an empty carrier. When the underlying functor is faithful the lift
    is checked to be unique.
    """
    lifts = _liftable(k)
    faithful = bool(is_faithful_u(k))
    c = k.cat
    for h, g, f in iter_triangles(k):
        a, b = c.dom(h), c.dom(g)
        found = lifts.get((a, b), {}).get(f)
        if not found:
            return Verdict.failed(
                "coherent", "triangle does not lift", h, g, dict(zip(k.carrier(a), f))
            )
        if faithful and len(found) != 1:
            return Verdict.failed("coherent", "lift is not unique although U is faithful", h, g, tuple(found))
    return Verdict.passed("coherent")


def default_universe(k: ConcreteCategory, fresh_count: int = DEFAULT_FRESH) -> tuple[str, ...]:
    """Union of all carriers plus ``fresh_count`` unused elements."""
    base = k.elements()
    taken = set(base)
    extra = []
    i = 0
    while len(extra) < fresh_count:
        name = f"_u{i}"
        if name not in taken:
            extra.append(name)
            taken.add(name)
        i += 1
    return tuple(base) + tuple(extra)


def _check_universe(k: ConcreteCategory, universe: Sequence[str]) -> None:
    pool = set(universe)
    missing = [x for x in k.elements() if x not in pool]
    if missing:
        raise ValueError(f"universe does not contain elements {missing[:5]}")


def injections(domain: Sequence[str], universe: Sequence[str]) -> Iterator[dict[str, str]]:
    for image in itertools.permutations(universe, len(domain)):
        yield dict(zip(domain, image))


def is_transportable(k: ConcreteCategory, universe: Sequence[str]) -> Verdict:
    """Every bijection out of a carrier lifts to exactly one isomorphism.

    The bijections range over injections of ``UA`` into ``universe``; the
    lifted isomorphism may land in any object.
    """
    _check_universe(k, universe)
    c = k.cat
    isos = isomorphisms(c)
    by_source: dict[str, dict[tuple, list[str]]] = {a: {} for a in c.objects}
    for m in isos:
        a = c.dom(m)
        by_source[a].setdefault(k.fkey(m), []).append(m)
    for a in c.objects:
        ua = k.carrier(a)
        for image in itertools.permutations(universe, len(ua)):
            found = by_source[a].get(image, [])
            if len(found) != 1:
                reason = "no isomorphism over the bijection" if not found else "isomorphism over the bijection is not unique"
                return Verdict.failed("transportable", reason, a, dict(zip(ua, image)), tuple(found))
    return Verdict.passed("transportable")


def make_transportable(
    k: ConcreteCategory, universe: Sequence[str] | None = None, with_embedding: bool = False
):
    """Close ``k`` under renaming objects along bijections into ``universe``.

    Objects of the result are pairs ``(A, f)`` with ``f: UA -> universe``
    injective, identified along isomorphisms of ``k``: ``(A, f) ~ (A', f∘U(m)⁻¹)``
    for every iso ``m: A -> A'``. A class containing ``(B, inclusion)`` keeps
    the name ``B``, so an already transportable input comes back unchanged
    up to isomorphism. The result is equivalent to ``k``; with
    ``with_embedding`` the concrete comparison functor ``k -> result`` is
    returned as well.
    """
    if not is_faithful_u(k):
        raise ValueError("make_transportable needs a faithful underlying functor")
    universe = tuple(universe) if universe is not None else default_universe(k)
    _check_universe(k, universe)
    c = k.cat
    if any(len(k.carrier(a)) > len(universe) for a in c.objects):
        raise ValueError("universe too small to host a renaming of every object")
    isos = isomorphisms(c)
    isos_from: dict[str, list[str]] = {a: [] for a in c.objects}
    for m in isos:
        isos_from[c.dom(m)].append(m)

    # class id per (A, f); f as tuple of images over the carrier order of A
    cls_of: dict[tuple[str, tuple], int] = {}
    members: list[list[tuple[str, tuple]]] = []
    for a in c.objects:
        ua = k.carrier(a)
        for image in itertools.permutations(universe, len(ua)):
            if (a, image) in cls_of:
                continue
            idx = len(members)
            f = dict(zip(ua, image))
            group = []
            for m in isos_from[a]:
                b = c.cod(m)
                inv = k.fn(isos[m])
                g = tuple(f[inv[y]] for y in k.carrier(b))
                if (b, g) not in cls_of:
                    cls_of[b, g] = idx
                    group.append((b, g))
            members.append(group)

    order = {a: i for i, a in enumerate(c.objects)}
    taken: set[str] = set()
    reps: list[tuple[str, tuple]] = []
    names: list[str] = []
    for group in members:
        plain = [(b, g) for b, g in group if g == k.carrier(b)]
        rep = min(plain, key=lambda p: order[p[0]]) if plain else group[0]
        reps.append(rep)
    for rep in reps:
        b, g = rep
        if g == k.carrier(b):
            names.append(b)
            taken.add(b)
        else:
            names.append("")
    for i, (b, g) in enumerate(reps):
        if not names[i]:
            # readable base; fresh() keeps names distinct
            names[i] = fresh(f"{b}@{'.'.join(g)}", taken | set(c.objects))
            taken.add(names[i])

    carriers = {}
    to_universe: list[dict[str, str]] = []
    for name, (b, g) in zip(names, reps):
        f = dict(zip(k.carrier(b), g))
        to_universe.append(f)
        carriers[name] = tuple(sorted(g)) if g != k.carrier(b) else k.carrier(b)

    morphisms: dict[str, tuple[str, str]] = {}
    action: dict[str, dict[str, str]] = {}
    origin: dict[str, tuple[str, int, int]] = {}
    back: dict[tuple[str, int, int], str] = {}
    identity = {}
    mor_taken: set[str] = set(c.morphisms)
    for i, (a, _) in enumerate(reps):
        fi = to_universe[i]
        fi_inv = {v: x for x, v in fi.items()}
        for j, (b, _) in enumerate(reps):
            fj = to_universe[j]
            for m in c.hom(a, b):
                plain = names[i] == a and names[j] == b
                mname = m if plain else fresh(f"{m}:{names[i]}>{names[j]}", mor_taken)
                mor_taken.add(mname)
                morphisms[mname] = (names[i], names[j])
                fm = k.fn(m)
                action[mname] = {y: fj[fm[fi_inv[y]]] for y in carriers[names[i]]}
                origin[mname] = (m, i, j)
                back[m, i, j] = mname
        identity[names[i]] = back[c.id(a), i, i]
    compose = {}
    for f, (m, i, j) in origin.items():
        b = reps[j][0]
        for l in range(len(reps)):
            for n in c.hom(b, reps[l][0]):
                g = back[n, j, l]
                compose[g, f] = back[c.comp(n, m), i, l]
    cat = type(c)(tuple(names), morphisms, identity, compose, c.name)
    out = ConcreteCategory(cat, FinSetFunctor(carriers, action))
    if not with_embedding:
        return out
    from .core import Functor

    obj_map = {a: names[cls_of[a, k.carrier(a)]] for a in c.objects}
    mor_map = {}
    for m, (a, b) in c.morphisms.items():
        fm = dict(k.fn(m))
        hits = [n for n in cat.hom(obj_map[a], obj_map[b]) if action[n] == fm]
        mor_map[m] = hits[0]
    return out, Functor(c, cat, obj_map, mor_map, "J")


def ladder(k: ConcreteCategory, universe: Sequence[str] | None = None) -> list[Verdict]:
    """Run validation and the concreteness ladder; transportability only with a universe."""
    from .core import validate_category

    out = [validate_category(k.cat)]
    if not out[-1]:
        return out
    out.append(validate_set_functor(k))
    if not out[-1]:
        return out
    out += [is_faithful_u(k), has_concrete_monos(k), is_coherent(k)]
    if universe is not None:
        out.append(is_transportable(k, universe))
    return out

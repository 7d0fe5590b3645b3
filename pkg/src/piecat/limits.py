"""Products, comma categories, inserters, equifiers and (pseudo)pullbacks.

Constructed identifiers are built with :func:`piecat.names.enc`, so that
object and morphism equality stays strict string equality:

* product objects/morphisms are ``enc(A1, ..., An)``;
* inserter objects are ``enc(K, f)`` for ``f: FK -> GK``;
* pseudopullback objects carry their bijection in the name.

Underlying sets of products are tagged disjoint unions (``"i:x"``); tags are
part of element equality.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .concrete import ConcreteCategory, FinSetFunctor
from .core import (
    FinCategory,
    Functor,
    NatTrans,
    Verdict,
    compose_functors,
    is_equivalence,
    iter_functors,
)
from .names import enc, tag


@dataclass(frozen=True)
class ProductResult:
    cat: FinCategory
    projections: tuple[Functor, ...]
    u: FinSetFunctor
    factors: tuple[ConcreteCategory, ...]

    @property
    def concrete(self) -> ConcreteCategory:
        return ConcreteCategory(self.cat, self.u)


@dataclass(frozen=True)
class CommaResult:
    cat: FinCategory
    left: Functor
    right: Functor


@dataclass(frozen=True)
class InserterResult:
    cat: FinCategory
    projection: Functor
    phi: NatTrans
    f: Functor
    g: Functor
    u: FinSetFunctor | None = None

    @property
    def concrete(self) -> ConcreteCategory:
        if self.u is None:
            raise ValueError("inserter was built without an underlying functor on the source")
        return ConcreteCategory(self.cat, self.u)

    def index(self, obj: str) -> str:
        """Source object ``K`` of the inserter object ``f: FK -> GK``."""
        return self.projection.ob(obj)

    def arrow(self, obj: str) -> str:
        return self.phi.components[obj]


@dataclass(frozen=True)
class EquifierResult:
    cat: FinCategory
    inclusion: Functor
    u: FinSetFunctor | None = None

    @property
    def concrete(self) -> ConcreteCategory:
        if self.u is None:
            raise ValueError("equifier was built without an underlying functor on the source")
        return ConcreteCategory(self.cat, self.u)


# ----------------------------------------------------------------- product


def product(ks: Sequence[ConcreteCategory], name: str | None = None) -> ProductResult:
    """Componentwise product with the tagged-coproduct underlying functor.

    The empty family gives the terminal category with empty carrier.
    """
    ks = tuple(ks)
    name = name or ("x".join(k.name for k in ks) if ks else "1")
    obj_tuples = list(itertools.product(*(k.cat.objects for k in ks)))
    mor_tuples = list(itertools.product(*(list(k.cat.morphisms) for k in ks)))
    objects = tuple(enc(*t) for t in obj_tuples)
    morphisms = {}
    for t in mor_tuples:
        morphisms[enc(*t)] = (
            enc(*(k.cat.dom(m) for k, m in zip(ks, t))),
            enc(*(k.cat.cod(m) for k, m in zip(ks, t))),
        )
    identity = {enc(*t): enc(*(k.cat.id(a) for k, a in zip(ks, t))) for t in obj_tuples}
    pairs = [list(k.cat.compose.items()) for k in ks]
    compose = {}
    for combo in itertools.product(*pairs):
        g = enc(*(gf[0][0] for gf in combo))
        f = enc(*(gf[0][1] for gf in combo))
        compose[g, f] = enc(*(gf[1] for gf in combo))
    cat = FinCategory(objects, morphisms, identity, compose, name)

    carriers = {}
    for t in obj_tuples:
        carriers[enc(*t)] = tuple(tag(i, x) for i, (k, a) in enumerate(zip(ks, t)) for x in k.carrier(a))
    action = {}
    for t in mor_tuples:
        fn = {}
        for i, (k, m) in enumerate(zip(ks, t)):
            for x, y in k.fn(m).items():
                fn[tag(i, x)] = tag(i, y)
        action[enc(*t)] = fn
    u = FinSetFunctor(carriers, action)

    projections = []
    for i, k in enumerate(ks):
        projections.append(
            Functor(
                cat,
                k.cat,
                {enc(*t): t[i] for t in obj_tuples},
                {enc(*t): t[i] for t in mor_tuples},
                f"P{i}",
            )
        )
    return ProductResult(cat, tuple(projections), u, ks)


def product_pairing(result: ProductResult, legs: Sequence[Functor], name: str = "pair") -> Functor:
    """The functor into the product induced by a family of functors."""
    source = legs[0].source
    return Functor(
        source,
        result.cat,
        {a: enc(*(q.ob(a) for q in legs)) for a in source.objects},
        {m: enc(*(q.mor(m) for q in legs)) for m in source.morphisms},
        name,
    )


# ------------------------------------------------------------------- comma


def _check_target(f: Functor, g: Functor) -> None:
    if not (f.target is g.target or f.target == g.target):
        raise ValueError(f"functors {f.name}, {g.name} have different targets")


def comma(f: Functor, g: Functor, name: str | None = None) -> CommaResult:
    """The comma category ``F↓G``.

    Objects ``(K, K', h: FK -> GK')``; morphisms ``(k, k')`` with
    ``G(k')∘h = h2∘F(k)``.
    """
    _check_target(f, g)
    l = f.target
    a_cat, b_cat = f.source, g.source
    objs = []
    for k1 in a_cat.objects:
        for k2 in b_cat.objects:
            for h in l.hom(f.ob(k1), g.ob(k2)):
                objs.append((k1, k2, h))
    objects = tuple(enc(*o) for o in objs)
    morphisms: dict[str, tuple[str, str]] = {}
    parts: dict[str, tuple[str, str, tuple, tuple]] = {}
    for src in objs:
        for tgt in objs:
            for k in a_cat.hom(src[0], tgt[0]):
                for k2 in b_cat.hom(src[1], tgt[1]):
                    if l.comp(g.mor(k2), src[2]) == l.comp(tgt[2], f.mor(k)):
                        m = enc(k, k2, src[2], tgt[2])
                        morphisms[m] = (enc(*src), enc(*tgt))
                        parts[m] = (k, k2, src, tgt)
    identity = {enc(*o): enc(a_cat.id(o[0]), b_cat.id(o[1]), o[2], o[2]) for o in objs}
    compose = {}
    by_dom: dict[str, list[str]] = {}
    for m, (s, _) in morphisms.items():
        by_dom.setdefault(s, []).append(m)
    for m, (k, k2, src, mid) in parts.items():
        for n in by_dom.get(enc(*mid), ()):
            kn, kn2, _, tgt = parts[n]
            compose[n, m] = enc(a_cat.comp(kn, k), b_cat.comp(kn2, k2), src[2], tgt[2])
    cat = FinCategory(objects, morphisms, identity, compose, name or f"{f.name}|{g.name}")
    left = Functor(cat, a_cat, {enc(*o): o[0] for o in objs}, {m: p[0] for m, p in parts.items()}, "L")
    right = Functor(cat, b_cat, {enc(*o): o[1] for o in objs}, {m: p[1] for m, p in parts.items()}, "R")
    return CommaResult(cat, left, right)


# ---------------------------------------------------------------- inserter


def _check_parallel(f: Functor, g: Functor) -> None:
    if not (f.source is g.source or f.source == g.source) or not (f.target is g.target or f.target == g.target):
        raise ValueError(f"functors {f.name}, {g.name} are not parallel")


def inserter(f: Functor, g: Functor, u: FinSetFunctor | None = None, name: str | None = None) -> InserterResult:
    """``Ins(F, G)``: objects ``f: FK -> GK``, morphisms ``k`` with ``G(k)∘f = f'∘F(k)``.

    ``u`` is the underlying functor of the source; the inserter then carries
    ``U∘P``.
    """
    _check_parallel(f, g)
    k_cat, l = f.source, f.target
    objs = [(k, h) for k in k_cat.objects for h in l.hom(f.ob(k), g.ob(k))]
    objects = tuple(enc(*o) for o in objs)
    by_index: dict[str, list[tuple[str, str]]] = {}
    for o in objs:
        by_index.setdefault(o[0], []).append(o)
    morphisms: dict[str, tuple[str, str]] = {}
    parts: dict[str, tuple[str, str, str]] = {}
    for k, (a, b) in k_cat.morphisms.items():
        fk, gk = f.mor(k), g.mor(k)
        for _, h1 in by_index.get(a, ()):
            left = l.comp(gk, h1)
            for _, h2 in by_index.get(b, ()):
                if left == l.comp(h2, fk):
                    m = enc(k, h1, h2)
                    morphisms[m] = (enc(a, h1), enc(b, h2))
                    parts[m] = (k, h1, h2)
    identity = {enc(k, h): enc(k_cat.id(k), h, h) for k, h in objs}
    by_dom: dict[str, list[str]] = {}
    for m, (s, _) in morphisms.items():
        by_dom.setdefault(s, []).append(m)
    compose = {}
    for m, (k, h1, h2) in parts.items():
        for n in by_dom.get(morphisms[m][1], ()):
            kn, _, h3 = parts[n]
            compose[n, m] = enc(k_cat.comp(kn, k), h1, h3)
    cat = FinCategory(objects, morphisms, identity, compose, name or f"Ins_{f.name}_{g.name}")
    proj = Functor(cat, k_cat, {enc(*o): o[0] for o in objs}, {m: p[0] for m, p in parts.items()}, "P")
    phi = NatTrans(
        compose_functors(proj, f),
        compose_functors(proj, g),
        {enc(*o): o[1] for o in objs},
        "phi",
    )
    iu = None
    if u is not None:
        iu = FinSetFunctor(
            {enc(*o): u.carriers[o[0]] for o in objs},
            {m: u.action[p[0]] for m, p in parts.items()},
        )
    return InserterResult(cat, proj, phi, f, g, iu)


def inserter_factorize(ins: InserterResult, h: Functor, psi: NatTrans, name: str = "Hbar") -> Functor:
    """The unique ``H̄`` with ``P∘H̄ = H`` and ``φH̄ = ψ`` for ``ψ: F∘H -> G∘H``."""
    obj_map = {c: enc(h.ob(c), psi.components[c]) for c in h.source.objects}
    mor_map = {}
    for m, (a, b) in h.source.morphisms.items():
        mor_map[m] = enc(h.mor(m), psi.components[a], psi.components[b])
    out = Functor(h.source, ins.cat, obj_map, mor_map, name)
    missing = [x for x in mor_map.values() if x not in ins.cat.morphisms]
    if missing:
        raise ValueError(f"psi is not natural along {h.name}: {missing[0]} is not an inserter morphism")
    return out


# ----------------------------------------------------------------- equifier


def equifier(phi: NatTrans, psi: NatTrans, u: FinSetFunctor | None = None, name: str | None = None) -> EquifierResult:
    """Full subcategory on the objects where ``phi`` and ``psi`` agree."""
    if not (phi.source == psi.source and phi.target == psi.target):
        raise ValueError(f"transformations {phi.name}, {psi.name} are not parallel")
    k_cat = phi.source.source
    keep = [a for a in k_cat.objects if phi.components[a] == psi.components[a]]
    kept = set(keep)
    morphisms = {m: e for m, e in k_cat.morphisms.items() if e[0] in kept and e[1] in kept}
    identity = {a: k_cat.id(a) for a in keep}
    compose = {gf: h for gf, h in k_cat.compose.items() if gf[0] in morphisms and gf[1] in morphisms}
    cat = FinCategory(tuple(keep), morphisms, identity, compose, name or f"Eq_{phi.name}_{psi.name}")
    inc = Functor(cat, k_cat, {a: a for a in keep}, {m: m for m in morphisms}, "E")
    eu = None
    if u is not None:
        eu = FinSetFunctor({a: u.carriers[a] for a in keep}, {m: u.action[m] for m in morphisms})
    return EquifierResult(cat, inc, eu)


def equifier_factorize(eq: EquifierResult, h: Functor, name: str = "Hbar") -> Functor:
    """Corestriction of ``h`` to the equifier; requires ``phi∘h = psi∘h``."""
    kept = set(eq.cat.objects)
    for c in h.source.objects:
        if h.ob(c) not in kept:
            raise ValueError(f"transformations disagree at {h.ob(c)} = {h.name}({c})")
    return Functor(h.source, eq.cat, dict(h.obj_map), dict(h.mor_map), name)


# ---------------------------------------------------- (pseudo)pullbacks


def pullback(k1: ConcreteCategory, k2: ConcreteCategory, name: str | None = None) -> ConcreteCategory:
    """Strict pullback of the two underlying functors over finite sets."""
    c1, c2 = k1.cat, k2.cat
    objs = [(a, b) for a in c1.objects for b in c2.objects if k1.carrier_sets[a] == k2.carrier_sets[b]]
    objects = tuple(enc(a, b) for a, b in objs)
    kept = set(objs)
    morphisms = {}
    parts = {}
    for f, (a1, b1) in c1.morphisms.items():
        for g, (a2, b2) in c2.morphisms.items():
            if (a1, a2) in kept and (b1, b2) in kept and dict(k1.fn(f)) == dict(k2.fn(g)):
                m = enc(f, g)
                morphisms[m] = (enc(a1, a2), enc(b1, b2))
                parts[m] = (f, g)
    identity = {enc(a, b): enc(c1.id(a), c2.id(b)) for a, b in objs}
    by_dom: dict[str, list[str]] = {}
    for m, (src, _) in morphisms.items():
        by_dom.setdefault(src, []).append(m)
    compose = {}
    for m, (f, g) in parts.items():
        for n in by_dom.get(morphisms[m][1], ()):
            f2, g2 = parts[n]
            compose[n, m] = enc(c1.comp(f2, f), c2.comp(g2, g))
    cat = FinCategory(objects, morphisms, identity, compose, name or f"{k1.name}_x_{k2.name}")
    carriers = {enc(a, b): tuple(sorted(k1.carrier(a))) for a, b in objs}
    action = {m: dict(k1.fn(f)) for m, (f, _) in parts.items()}
    return ConcreteCategory(cat, FinSetFunctor(carriers, action))


def _psb_object(k1: ConcreteCategory, a: str, b: str, beta: dict) -> str:
    # the images of U1A1 in its fixed order; the pair (a, b) fixes the length
    return enc(a, b, *(beta[x] for x in k1.carrier(a)))


def pseudopullback(k1: ConcreteCategory, k2: ConcreteCategory, name: str | None = None) -> ConcreteCategory:
    """Objects ``(A1, A2, β: U1A1 ≅ U2A2)``; the carrier is ``U1A1``."""
    c1, c2 = k1.cat, k2.cat
    objs = []
    for a in c1.objects:
        ua = k1.carrier(a)
        for b in c2.objects:
            ub = k2.carrier(b)
            if len(ua) != len(ub):
                continue
            for image in itertools.permutations(ub):
                objs.append((a, b, dict(zip(ua, image))))
    oname = [_psb_object(k1, a, b, beta) for a, b, beta in objs]
    by_pair: dict[tuple[str, str], list[int]] = {}
    for i, (a, b, _) in enumerate(objs):
        by_pair.setdefault((a, b), []).append(i)
    morphisms = {}
    parts = {}
    for f, (a1, b1) in c1.morphisms.items():
        ff = k1.fn(f)
        for g, (a2, b2) in c2.morphisms.items():
            fg = k2.fn(g)
            for i in by_pair.get((a1, a2), ()):
                beta = objs[i][2]
                for j in by_pair.get((b1, b2), ()):
                    beta2 = objs[j][2]
                    if all(beta2[ff[x]] == fg[beta[x]] for x in beta):
                        m = enc(f, g, str(i), str(j))
                        morphisms[m] = (oname[i], oname[j])
                        parts[m] = (f, g, i, j)
    identity = {oname[i]: enc(c1.id(a), c2.id(b), str(i), str(i)) for i, (a, b, _) in enumerate(objs)}
    by_dom: dict[int, list[str]] = {}
    for m, (_, _, i, _) in parts.items():
        by_dom.setdefault(i, []).append(m)
    compose = {}
    for m, (f, g, i, j) in parts.items():
        for n in by_dom.get(j, ()):
            f2, g2, _, l = parts[n]
            compose[n, m] = enc(c1.comp(f2, f), c2.comp(g2, g), str(i), str(l))
    cat = FinCategory(tuple(oname), morphisms, identity, compose, name or f"{k1.name}_psx_{k2.name}")
    carriers = {oname[i]: k1.carrier(a) for i, (a, _, _) in enumerate(objs)}
    action = {m: dict(k1.fn(f)) for m, (f, _, _, _) in parts.items()}
    return ConcreteCategory(cat, FinSetFunctor(carriers, action))


def comparison_functor(k1: ConcreteCategory, k2: ConcreteCategory, pb: ConcreteCategory, psb: ConcreteCategory) -> Functor:
    """Canonical functor pullback -> pseudopullback, ``(A1, A2) ↦ (A1, A2, id)``."""
    obj_map = {}
    c1, c2 = k1.cat, k2.cat
    for a in c1.objects:
        for b in c2.objects:
            o = enc(a, b)
            if o in pb.u.carriers:
                ident = {x: x for x in k1.carrier(a)}
                obj_map[o] = _psb_object(k1, a, b, ident)
    index = {o: str(i) for i, o in enumerate(psb.cat.objects)}
    pairs = {enc(f, g): (f, g) for f in c1.morphisms for g in c2.morphisms}
    mor_map = {}
    for m, (s, t) in pb.cat.morphisms.items():
        f, g = pairs[m]
        mor_map[m] = enc(f, g, index[obj_map[s]], index[obj_map[t]])
    return Functor(pb.cat, psb.cat, obj_map, mor_map, "compare")


def compare_pb_psb(k1: ConcreteCategory, k2: ConcreteCategory) -> Verdict:
    """Whether the comparison functor from pullback to pseudopullback is an equivalence."""
    pb = pullback(k1, k2)
    psb = pseudopullback(k1, k2)
    cmp = comparison_functor(k1, k2, pb, psb)
    v = is_equivalence(cmp)
    return Verdict("pb-psb-equivalence", v.status, v.reason, v.witness)


def multiple_pullback(ks: Sequence[ConcreteCategory]) -> ConcreteCategory:
    """Left-to-right fold of the binary pullback."""
    out = ks[0]
    for k in ks[1:]:
        out = pullback(out, k)
    return out


def multiple_pseudopullback(ks: Sequence[ConcreteCategory]) -> ConcreteCategory:
    out = ks[0]
    for k in ks[1:]:
        out = pseudopullback(out, k)
    return out


def satisfying_inserter_functors(ins: InserterResult, h: Functor, psi: NatTrans) -> list[Functor]:
    """All functors ``H -> Ins`` with ``P∘H̄ = H`` and ``φH̄ = ψ``, by exhaustive search."""
    cands = {
        c: [o for o in ins.cat.objects if ins.projection.ob(o) == h.ob(c) and ins.phi.components[o] == psi.components[c]]
        for c in h.source.objects
    }
    out = []
    for cand in iter_functors(h.source, ins.cat, cands):
        if all(ins.projection.mor(cand.mor(m)) == h.mor(m) for m in h.source.morphisms):
            out.append(cand)
    return out


def satisfying_equifier_functors(eq: EquifierResult, h: Functor) -> list[Functor]:
    cands = {c: [o for o in eq.cat.objects if o == h.ob(c)] for c in h.source.objects}
    out = []
    for cand in iter_functors(h.source, eq.cat, cands):
        if all(eq.inclusion.mor(cand.mor(m)) == h.mor(m) for m in h.source.morphisms):
            out.append(cand)
    return out

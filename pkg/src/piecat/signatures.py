"""Interpretable relation symbols, the maximal signature and the canonical embedding.

A relation symbol of arity ``n`` picks ``R_A ⊆ (UA)^n`` for every object.
The subfunctor and embedding conditions together say that for every
``f: A -> B`` and tuple ``t`` of ``A``, ``t ∈ R_A`` iff ``(Uf)^n t ∈ R_B``.
Those are equality constraints between ``(object, tuple)`` nodes, so the
valid symbols are exactly the unions of connected components of the graph
linking ``(A, t)`` to ``(B, (Uf)^n t)``. Enumeration propagates these
constraints completely before anything is branched on; the components are
called *atoms* below.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .concrete import ConcreteCategory, FinSetFunctor, injections
from .core import BudgetExceeded, FinCategory, Functor, Verdict, isomorphisms
from .names import enc, enc_map, untag

DEFAULT_MAX_ARITY = 2
DEFAULT_SIGMA_BUDGET = 1 << 16

Tuple = tuple[str, ...]


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arity: int
    interp: Mapping[str, frozenset[Tuple]]

    def at(self, a: str) -> frozenset[Tuple]:
        return self.interp.get(a, frozenset())

    def same_interp(self, other: "RelationSymbol") -> bool:
        keys = set(self.interp) | set(other.interp)
        return self.arity == other.arity and all(self.at(a) == other.at(a) for a in keys)

    def renamed(self, name: str) -> "RelationSymbol":
        return RelationSymbol(name, self.arity, self.interp)


@dataclass(frozen=True)
class Signature:
    symbols: tuple[RelationSymbol, ...] = ()

    def __post_init__(self):
        names = [r.name for r in self.symbols]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise ValueError(f"duplicate relation symbol name {dup!r}")

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, name: str) -> RelationSymbol:
        for r in self.symbols:
            if r.name == name:
                return r
        raise KeyError(name)

    def names(self) -> list[str]:
        return [r.name for r in self.symbols]

    def contains_interp(self, r: RelationSymbol) -> bool:
        return any(s.same_interp(r) for s in self.symbols)


@dataclass(frozen=True)
class SigmaStructure:
    carrier: frozenset[str]
    relations: tuple[tuple[str, frozenset[Tuple]], ...]

    @classmethod
    def make(cls, carrier: Iterable[str], relations: Mapping[str, Iterable[Tuple]]) -> "SigmaStructure":
        return cls(frozenset(carrier), tuple(sorted((k, frozenset(v)) for k, v in relations.items())))

    def sort_key(self) -> tuple:
        """Hash-independent ordering key."""
        return (len(self.carrier), sorted(self.carrier), [(k, sorted(v)) for k, v in self.relations])

    def rel(self, name: str) -> frozenset[Tuple]:
        for k, v in self.relations:
            if k == name:
                return v
        raise KeyError(name)

    def transport(self, f: Mapping[str, str]) -> "SigmaStructure":
        return SigmaStructure(
            frozenset(f[x] for x in self.carrier),
            tuple((k, frozenset(tuple(f[x] for x in t) for t in v)) for k, v in self.relations),
        )


def is_embedding(x: SigmaStructure, y: SigmaStructure, f: Mapping[str, str]) -> bool:
    """Injective, and preserves and reflects every relation."""
    if len(set(f.values())) != len(f) or any(v not in y.carrier for v in f.values()):
        return False
    ry = dict(y.relations)
    image = set(f.values())
    for k, v in x.relations:
        mapped = {tuple(f[e] for e in t) for t in v}
        target = {t for t in ry[k] if all(e in image for e in t)}
        if mapped != target:
            return False
    return True


def embeddings(x: SigmaStructure, y: SigmaStructure) -> Iterable[dict[str, str]]:
    dom = sorted(x.carrier)
    for image in itertools.permutations(sorted(y.carrier), len(dom)):
        f = dict(zip(dom, image))
        if is_embedding(x, y, f):
            yield f


# ------------------------------------------------------------- validation


def check_symbol(k: ConcreteCategory, r: RelationSymbol) -> Verdict:
    """Subfunctor condition and embedding (reflection) condition."""
    check = f"symbol {r.name}"
    c = k.cat
    for a in c.objects:
        for t in r.at(a):
            if len(t) != r.arity or any(x not in k.carrier_sets[a] for x in t):
                return Verdict.structural(check, "tuple outside the carrier power", a, t)
    for f, (a, b) in c.morphisms.items():
        fn = k.fn(f)
        rb = r.at(b)
        for t in r.at(a):
            if tuple(fn[x] for x in t) not in rb:
                return Verdict.failed(check, "not a subfunctor", f, t)
        for t in itertools.product(k.carrier(a), repeat=r.arity):
            if tuple(fn[x] for x in t) in rb and t not in r.at(a):
                return Verdict.failed(check, "morphism does not reflect the relation", f, t)
    return Verdict.passed(check)


# ------------------------------------------------------------ enumeration


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


def atoms(k: ConcreteCategory, arity: int) -> list[list[tuple[str, Tuple]]]:
    """Connected components of ``(A, t)`` nodes in canonical order.

    Nodes are ordered by object order then by the lexicographic order of
    tuples over the carrier order; components are ordered by their first node.
    """
    c = k.cat
    uf = _UnionFind()
    nodes = []
    for a in c.objects:
        for t in itertools.product(k.carrier(a), repeat=arity):
            uf.add((a, t))
            nodes.append((a, t))
    for f, (a, b) in c.morphisms.items():
        fn = k.fn(f)
        for t in itertools.product(k.carrier(a), repeat=arity):
            uf.union((a, t), (b, tuple(fn[x] for x in t)))
    comps: dict = {}
    for node in nodes:
        comps.setdefault(uf.find(node), []).append(node)
    return list(comps.values())


def _symbol_from(name: str, arity: int, objects: Sequence[str], nodes: Iterable[tuple[str, Tuple]]) -> RelationSymbol:
    interp: dict[str, set] = {a: set() for a in objects}
    for a, t in nodes:
        interp[a].add(t)
    return RelationSymbol(name, arity, {a: frozenset(v) for a, v in interp.items()})


def sigma_size(k: ConcreteCategory, max_arity: int = DEFAULT_MAX_ARITY) -> int:
    """Number of symbols in the maximal signature up to ``max_arity``."""
    return sum(1 << len(atoms(k, n)) for n in range(1, max_arity + 1))


def raw_search_space(k: ConcreteCategory, max_arity: int = DEFAULT_MAX_ARITY) -> int:
    """Size of the unpruned space of subset families, summed over arities."""
    total = 0
    for n in range(1, max_arity + 1):
        total += 1 << sum(len(k.carrier(a)) ** n for a in k.cat.objects)
    return total


def enumerate_sigma(
    k: ConcreteCategory,
    max_arity: int = DEFAULT_MAX_ARITY,
    budget: int = DEFAULT_SIGMA_BUDGET,
) -> Signature:
    """Every interpretable relation symbol of arity ``<= max_arity`` reflected by all morphisms.

    Symbols are named ``R{n}.{i}`` with ``i`` the bitmask over atoms in
    canonical order, so names are reproducible. Raises
    :class:`BudgetExceeded` (carrying the size) when the signature has more
    than ``budget`` symbols.
    """
    if max_arity < 1:
        raise ValueError("max_arity must be at least 1")
    per_arity = [atoms(k, n) for n in range(1, max_arity + 1)]
    size = sum(1 << len(a) for a in per_arity)
    if size > budget:
        raise BudgetExceeded("enumerate_sigma", size, budget)
    symbols = []
    for n, comps in enumerate(per_arity, start=1):
        for mask in range(1 << len(comps)):
            chosen = itertools.chain.from_iterable(comps[i] for i in range(len(comps)) if mask >> i & 1)
            symbols.append(_symbol_from(f"R{n}.{mask}", n, k.cat.objects, chosen))
    return Signature(tuple(symbols))


def sigma_atoms(k: ConcreteCategory, max_arity: int = DEFAULT_MAX_ARITY) -> Signature:
    """The atomic symbols; every symbol of the maximal signature is a union of them.

    A bijection preserves and reflects all atoms iff it preserves and
    reflects every symbol of the maximal signature, so iso-fullness and
    repleteness can be decided on this much smaller signature.
    """
    symbols = []
    for n in range(1, max_arity + 1):
        for i, comp in enumerate(atoms(k, n)):
            symbols.append(_symbol_from(f"A{n}.{i}", n, k.cat.objects, comp))
    return Signature(tuple(symbols))


# ----------------------------------------------------- derived symbols


def coproduct_symbol(rs: Sequence[RelationSymbol], prod, name: str = "R") -> RelationSymbol:
    """``∐ R_i`` on a product: tuples whose coordinates all carry the same tag ``i``."""
    from .limits import ProductResult  # circular at import time

    assert isinstance(prod, ProductResult)
    arities = {r.arity for r in rs}
    if len(arities) > 1:
        raise ValueError(f"arity mismatch in coproduct symbol: {sorted(arities)}")
    if len(rs) != len(prod.factors):
        raise ValueError("need one symbol per product factor")
    arity = arities.pop() if arities else 1
    interp = {}
    for o in prod.cat.objects:
        comps = [p.ob(o) for p in prod.projections]
        tuples = set()
        for i, (r, a) in enumerate(zip(rs, comps)):
            for t in r.at(a):
                tuples.add(tuple(f"{i}:{x}" for x in t))
        interp[o] = frozenset(tuples)
    out = RelationSymbol(name, arity, interp)
    v = check_symbol(prod.concrete, out)
    if not v:
        raise ValueError(f"coproduct symbol is not valid: {v.reason}")
    return out


def pullback_symbol(r: RelationSymbol, p: Functor, kj: ConcreteCategory, kk: ConcreteCategory, name: str | None = None) -> RelationSymbol:
    """``R∘P`` along a functor that is concrete on the nose."""
    for a in p.source.objects:
        if kj.carrier_sets[a] != kk.carrier_sets[p.ob(a)]:
            raise ValueError(f"{p.name} is not concrete at object {a}")
    for m in p.source.morphisms:
        if dict(kj.fn(m)) != dict(kk.fn(p.mor(m))):
            raise ValueError(f"{p.name} is not concrete at morphism {m}")
    return RelationSymbol(name or f"{r.name}{p.name}", r.arity, {a: r.at(p.ob(a)) for a in p.source.objects})


def inserter_pairing_symbol(ins, k1: ConcreteCategory, k2: ConcreteCategory, w_f, w_g, name: str = "Rpair") -> RelationSymbol:
    """Graph of the inserter arrow, embedded in ``(U1 K)^2`` via the two witnesses.

    At ``g: FK -> GK`` the relation is
    ``{(αF_K(a), αG_K((U2 g) a)) : a ∈ U2FK}``.
    """
    from .functors import validate_witness

    for h, w in ((ins.f, w_f), (ins.g, w_g)):
        v = validate_witness(h, k1, k2, w)
        if not v:
            raise ValueError(f"witness for {h.name} rejected: {v.reason}")
    interp = {}
    for o in ins.cat.objects:
        kobj = ins.index(o)
        g = ins.arrow(o)
        fn = k2.fn(g)
        af, ag = w_f.alpha[kobj], w_g.alpha[kobj]
        interp[o] = frozenset((af[a], ag[fn[a]]) for a in k2.carrier(ins.f.ob(kobj)))
    out = RelationSymbol(name, 2, interp)
    v = check_symbol(ins.concrete, out)
    if not v:
        raise ValueError(f"pairing symbol is not valid: {v.reason} {v.witness}")
    return out


# ------------------------------------------------------ Emb and E


@dataclass(frozen=True)
class EmbCategory:
    """Finitely many structures over a signature, with all embeddings between them."""

    signature: Signature
    structures: tuple[tuple[str, SigmaStructure], ...]

    @cached_property
    def by_name(self) -> dict[str, SigmaStructure]:
        return dict(self.structures)

    @cached_property
    def concrete(self) -> ConcreteCategory:
        objects = tuple(n for n, _ in self.structures)
        carriers = {n: tuple(sorted(s.carrier)) for n, s in self.structures}
        morphisms, action, identity = {}, {}, {}
        index = {}
        for n, x in self.structures:
            for m, y in self.structures:
                for f in embeddings(x, y):
                    e = enc(n, m, enc_map(f))
                    morphisms[e] = (n, m)
                    action[e] = f
                    index[n, m, tuple(sorted(f.items()))] = e
            identity[n] = enc(n, n, enc_map({v: v for v in x.carrier}))
        compose = {}
        by_dom: dict[str, list[str]] = {}
        for e, (s, _) in morphisms.items():
            by_dom.setdefault(s, []).append(e)
        for e, (s, t) in morphisms.items():
            for d in by_dom[t]:
                fn = {x: action[d][y] for x, y in action[e].items()}
                compose[d, e] = index[s, morphisms[d][1], tuple(sorted(fn.items()))]
        cat = FinCategory(objects, morphisms, identity, compose, "Emb")
        return ConcreteCategory(cat, FinSetFunctor(carriers, action))

    def morphism_for(self, src: str, tgt: str, fn: Mapping[str, str]) -> str:
        e = enc(src, tgt, enc_map(fn))
        if e not in self.concrete.cat.morphisms:
            raise KeyError(f"{src} -> {tgt} along {dict(fn)} is not an embedding")
        return e


def structure_of(k: ConcreteCategory, sigma: Signature, a: str) -> SigmaStructure:
    return SigmaStructure.make(k.carrier(a), {r.name: r.at(a) for r in sigma})


@dataclass(frozen=True)
class CanonicalEmbedding:
    k: ConcreteCategory
    sigma: Signature
    emb: EmbCategory
    obj_map: Mapping[str, str]

    def image(self, a: str) -> SigmaStructure:
        return self.emb.by_name[self.obj_map[a]]

    @cached_property
    def functor(self) -> Functor:
        mor_map = {}
        for f, (a, b) in self.k.cat.morphisms.items():
            mor_map[f] = self.emb.morphism_for(self.obj_map[a], self.obj_map[b], self.k.fn(f))
        return Functor(self.k.cat, self.emb.concrete.cat, dict(self.obj_map), mor_map, "E")


def canonical_e(k: ConcreteCategory, sigma: Signature) -> CanonicalEmbedding:
    """``A ↦ (UA, (R_A)_R)``; equal images share one structure of the Emb category."""
    names: dict[SigmaStructure, str] = {}
    obj_map = {}
    for a in k.cat.objects:
        s = structure_of(k, sigma, a)
        if s not in names:
            names[s] = f"E{len(names)}"
        obj_map[a] = names[s]
    emb = EmbCategory(sigma, tuple((n, s) for s, n in names.items()))
    return CanonicalEmbedding(k, sigma, emb, obj_map)


def _profile(s: SigmaStructure) -> tuple:
    return len(s.carrier), tuple((k, len(v)) for k, v in s.relations)


def emb_isomorphisms(x: SigmaStructure, y: SigmaStructure) -> Iterable[dict[str, str]]:
    if _profile(x) != _profile(y):
        return
    for f in embeddings(x, y):
        yield f


def is_iso_full(e: CanonicalEmbedding) -> Verdict:
    """Every Emb-isomorphism ``EA -> EB`` is ``E`` of a ``K``-isomorphism."""
    k = e.k
    c = k.cat
    isos = isomorphisms(c)
    lifted: dict[tuple[str, str], set[tuple]] = {}
    for m in isos:
        a, b = c.morphisms[m]
        lifted.setdefault((a, b), set()).add(tuple(sorted(k.fn(m).items())))
    for a in c.objects:
        ea = e.image(a)
        for b in c.objects:
            eb = e.image(b)
            for f in emb_isomorphisms(ea, eb):
                if tuple(sorted(f.items())) not in lifted.get((a, b), ()):
                    return Verdict.failed("iso-full", "Emb-isomorphism does not lift", a, b, f)
    return Verdict.passed("iso-full")


def is_replete_e(e: CanonicalEmbedding, universe: Sequence[str]) -> Verdict:
    """Every transport ``X`` of some ``EA`` inside ``universe`` is ``EB`` with ``B ≅ A``."""
    k = e.k
    c = k.cat
    pool = set(universe)
    if any(x not in pool for x in k.elements()):
        raise ValueError("universe must contain every carrier element")
    isos = isomorphisms(c)
    iso_pairs = {c.morphisms[m] for m in isos}
    by_structure: dict[SigmaStructure, list[str]] = {}
    for b in c.objects:
        by_structure.setdefault(e.image(b), []).append(b)
    for a in c.objects:
        ea = e.image(a)
        for f in injections(sorted(ea.carrier), list(universe)):
            x = ea.transport(f)
            if not any((a, b) in iso_pairs for b in by_structure.get(x, ())):
                return Verdict.failed("replete", "transported structure is not an image of an isomorphic object", a, f)
    return Verdict.passed("replete")


@dataclass(frozen=True)
class LadderReport:
    rungs: tuple[Verdict, ...]
    note: str = (
        "directed-colimit rungs are not checked: over a finite category every "
        "finite directed diagram has a top element"
    )

    @property
    def ok(self) -> bool:
        return all(self.rungs)

    def __bool__(self) -> bool:
        return self.ok

    def rung(self, check: str) -> Verdict:
        for v in self.rungs:
            if v.check == check:
                return v
        raise KeyError(check)


def classify_aec(
    k: ConcreteCategory,
    max_arity: int = DEFAULT_MAX_ARITY,
    universe: Sequence[str] | None = None,
) -> LadderReport:
    """Finite proxy of the AEC characterisation, rung by rung.

    The Emb-side rungs use the atomic signature, which has the same
    isomorphisms and the same strict images as the maximal one.
    """
    from .concrete import has_concrete_monos, is_coherent, is_faithful_u

    universe = tuple(universe) if universe is not None else tuple(k.elements())
    e = canonical_e(k, sigma_atoms(k, max_arity))
    return LadderReport(
        (
            is_faithful_u(k),
            is_coherent(k),
            has_concrete_monos(k),
            is_iso_full(e),
            is_replete_e(e, universe),
        )
    )

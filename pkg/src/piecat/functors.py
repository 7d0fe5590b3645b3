"""Concrete and subconcrete functors between concrete categories.

A subconcreteness witness for ``H: K1 -> K2`` is a natural transformation
``α: U2∘H -> U1`` with injective components whose images are reflected by
the morphisms of ``K1``: ``(U1 f)(a) ∈ im α_B`` implies ``a ∈ im α_A``.
Reflection is read through the α-identification of ``U2HA`` with its image.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .concrete import ConcreteCategory, FinSetFunctor, is_coherent
from .core import BudgetExceeded, Functor, Verdict, compose_functors, isomorphisms
from .signatures import (
    DEFAULT_MAX_ARITY,
    EmbCategory,
    RelationSymbol,
    Signature,
    SigmaStructure,
    check_symbol,
    enumerate_sigma,
)

DEFAULT_WITNESS_BUDGET = 200_000


@dataclass(frozen=True)
class SubconcretenessWitness:
    alpha: Mapping[str, Mapping[str, str]]

    def image(self, a: str) -> frozenset[str]:
        return frozenset(self.alpha[a].values())


@dataclass(frozen=True)
class SignatureMorphism:
    """``R ↦ RH`` from a signature of ``K2`` into symbols over ``K1``.

    ``carrier`` is the image of the full unary symbol, i.e. the image of α.
    ``anomalies`` lists image symbols that failed validation over ``K1``.
    """

    source: Signature
    mapping: Mapping[str, str]
    image: Signature
    carrier: str
    anomalies: tuple[str, ...] = ()


def is_concrete(h: Functor, k1: ConcreteCategory, k2: ConcreteCategory) -> bool:
    """``U2∘H = U1`` on the nose."""
    for a in h.source.objects:
        if k1.carrier_sets[a] != k2.carrier_sets[h.ob(a)]:
            return False
    for m in h.source.morphisms:
        if dict(k1.fn(m)) != dict(k2.fn(h.mor(m))):
            return False
    return True


def composite_u(h: Functor, k2: ConcreteCategory) -> ConcreteCategory:
    """``K1`` with underlying functor ``U2∘H``."""
    return ConcreteCategory(
        h.source,
        FinSetFunctor(
            {a: k2.carrier(h.ob(a)) for a in h.source.objects},
            {m: k2.fn(h.mor(m)) for m in h.source.morphisms},
        ),
    )


def validate_witness(h: Functor, k1: ConcreteCategory, k2: ConcreteCategory, w: SubconcretenessWitness) -> Verdict:
    check = "subconcrete-witness"
    c = h.source
    for a in c.objects:
        alpha = w.alpha.get(a)
        if alpha is None or set(alpha) != k2.carrier_sets[h.ob(a)]:
            return Verdict.structural(check, "component missing or not total", a)
        if any(v not in k1.carrier_sets[a] for v in alpha.values()):
            return Verdict.failed(check, "component leaves U1A", a)
        if len(set(alpha.values())) != len(alpha):
            return Verdict.failed(check, "component not injective", a)
    for f, (a, b) in c.morphisms.items():
        u1f = k1.fn(f)
        u2hf = k2.fn(h.mor(f))
        for x, y in w.alpha[a].items():
            if w.alpha[b][u2hf[x]] != u1f[y]:
                return Verdict.failed(check, "naturality fails", f, x)
        im_a, im_b = w.image(a), w.image(b)
        for x in k1.carrier(a):
            if u1f[x] in im_b and x not in im_a:
                return Verdict.failed(check, "image not reflected", f, x)
    return Verdict.passed(check)


def identity_witness(h: Functor, k2: ConcreteCategory) -> SubconcretenessWitness:
    return SubconcretenessWitness({a: {x: x for x in k2.carrier(h.ob(a))} for a in h.source.objects})


def find_subconcrete_witness(
    h: Functor,
    k1: ConcreteCategory,
    k2: ConcreteCategory,
    budget: int = DEFAULT_WITNESS_BUDGET,
) -> SubconcretenessWitness | None:
    """Search for a witness, or return ``None`` if none exists.

    Elements ``(A, x)`` with ``x ∈ U2HA`` are assigned in canonical order;
    every assignment is pushed forward along all morphisms out of ``A`` by
    naturality (``α_B(U2Hf x) = U1f(α_A x)``), so most values are forced.
    Injectivity and reflection are checked on complete components. Raises
    :class:`BudgetExceeded` when more than ``budget`` nodes are explored: the
    verdict is then unknown, not negative.
    """
    if is_concrete(h, k1, k2):
        return identity_witness(h, k2)
    c = h.source
    slots = [(a, x) for a in c.objects for x in k2.carrier(h.ob(a))]
    alpha: dict[str, dict[str, str]] = {a: {} for a in c.objects}
    u2h = {m: k2.fn(h.mor(m)) for m in c.morphisms}
    size = {a: len(k2.carrier(h.ob(a))) for a in c.objects}
    nodes = 0

    def assign(a: str, x: str, y: str, trail: list) -> bool:
        stack = [(a, x, y)]
        while stack:
            a, x, y = stack.pop()
            cur = alpha[a].get(x)
            if cur is not None:
                if cur != y:
                    return False
                continue
            if y in alpha[a].values():
                return False
            alpha[a][x] = y
            trail.append((a, x))
            for f in c.outgoing(a):
                b = c.cod(f)
                stack.append((b, u2h[f][x], k1.fn(f)[y]))
        return True

    def complete_ok(a: str) -> bool:
        im = set(alpha[a].values())
        for f in c.outgoing(a):
            b = c.cod(f)
            if len(alpha[b]) != size[b]:
                continue
            im_b = set(alpha[b].values())
            u1f = k1.fn(f)
            if any(u1f[x] in im_b and x not in im for x in k1.carrier(a)):
                return False
        for f in c.incoming(a):
            s = c.dom(f)
            if len(alpha[s]) != size[s]:
                continue
            im_s = set(alpha[s].values())
            u1f = k1.fn(f)
            if any(u1f[x] in im and x not in im_s for x in k1.carrier(s)):
                return False
        return True

    def go(i: int) -> bool:
        nonlocal nodes
        while i < len(slots) and slots[i][1] in alpha[slots[i][0]]:
            i += 1
        if i == len(slots):
            return all(complete_ok(a) for a in c.objects)
        a, x = slots[i]
        for y in k1.carrier(a):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded("subconcrete witness search", nodes, budget)
            trail: list = []
            ok = assign(a, x, y, trail)
            if ok:
                done = {b for b, _ in trail if len(alpha[b]) == size[b]}
                ok = all(complete_ok(b) for b in done)
            if ok and go(i + 1):
                return True
            for b, z in trail:
                del alpha[b][z]
        return False

    if not go(0):
        return None
    w = SubconcretenessWitness({a: dict(m) for a, m in alpha.items()})
    v = validate_witness(h, k1, k2, w)
    if not v:
        raise AssertionError(f"witness search produced an invalid witness: {v}")
    return w


def reflection_split(h: Functor, k1: ConcreteCategory, k2: ConcreteCategory, budget: int = 20_000) -> bool | None:
    """Do two natural monotransformations ``U2∘H -> U1`` disagree on reflection?

    Enumerates every injective natural family; ``None`` when the raw search
    space exceeds ``budget``.
    """
    objs = h.source.objects
    per = []
    space = 1
    for a in objs:
        dom = list(k2.carrier(h.ob(a)))
        opts = [dict(zip(dom, im)) for im in itertools.permutations(k1.carrier(a), len(dom))]
        space *= max(1, len(opts))
        if space > budget:
            return None
        per.append(opts)
    verdicts = set()
    for combo in itertools.product(*per):
        v = validate_witness(h, k1, k2, SubconcretenessWitness(dict(zip(objs, combo))))
        if v or v.reason == "image not reflected":
            verdicts.add(bool(v))
    return len(verdicts) == 2


def compose_witnesses(
    h1: Functor, w1: SubconcretenessWitness, h2: Functor, w2: SubconcretenessWitness
) -> SubconcretenessWitness:
    """Witness for ``H2∘H1`` from witnesses of ``H1: K1 -> K2`` and ``H2: K2 -> K3``."""
    alpha = {}
    for a in h1.source.objects:
        inner = w2.alpha[h1.ob(a)]
        alpha[a] = {x: w1.alpha[a][y] for x, y in inner.items()}
    return SubconcretenessWitness(alpha)


def witness_symbol(w: SubconcretenessWitness, k1: ConcreteCategory, name: str = "UH") -> RelationSymbol:
    """The unary symbol ``A ↦ im α_A`` of ``K1``."""
    return RelationSymbol(name, 1, {a: frozenset((x,) for x in w.image(a)) for a in k1.cat.objects})


def induced_signature_morphism(
    h: Functor,
    k1: ConcreteCategory,
    k2: ConcreteCategory,
    w: SubconcretenessWitness,
    max_arity: int = DEFAULT_MAX_ARITY,
    sigma2: Signature | None = None,
) -> SignatureMorphism:
    """Send each symbol ``R`` of ``K2`` to ``RH``: ``A ↦ α_A^n(R_{HA})``.

    Every image is re-validated over ``K1``; failures are recorded as
    anomalies, never dropped. The full unary symbol goes to the image of α,
    recorded as ``carrier``.
    """
    sigma2 = sigma2 if sigma2 is not None else enumerate_sigma(k2, max_arity)
    mapping = {}
    images = []
    anomalies = []
    for r in sigma2:
        interp = {}
        for a in k1.cat.objects:
            alpha = w.alpha[a]
            interp[a] = frozenset(tuple(alpha[x] for x in t) for t in r.at(h.ob(a)))
        img = RelationSymbol(f"{r.name}@{h.name}", r.arity, interp)
        if not check_symbol(k1, img):
            anomalies.append(r.name)
        mapping[r.name] = img.name
        images.append(img)
    carrier = witness_symbol(w, k1, f"U@{h.name}")
    if not check_symbol(k1, carrier):
        anomalies.append(carrier.name)
    images.append(carrier)
    return SignatureMorphism(sigma2, mapping, Signature(tuple(images)), carrier.name, tuple(anomalies))


def reduct_structure(sm: SignatureMorphism, x: SigmaStructure) -> SigmaStructure:
    carrier = {t[0] for t in x.rel(sm.carrier)}
    return SigmaStructure.make(carrier, {r.name: x.rel(sm.mapping[r.name]) for r in sm.source})


def reduct_functor(sm: SignatureMorphism, source: EmbCategory) -> tuple[Functor, EmbCategory]:
    """Reducts along ``sm``: carrier is the designated carrier symbol.

    Returns the functor and its target, an Emb category over ``sm.source``
    whose structures are the reducts of the source structures.
    """
    names: dict[SigmaStructure, str] = {}
    obj_map = {}
    for n, x in source.structures:
        r = reduct_structure(sm, x)
        if r not in names:
            names[r] = f"D{len(names)}"
        obj_map[n] = names[r]
    target = EmbCategory(sm.source, tuple((n, s) for s, n in names.items()))
    src = source.concrete
    mor_map = {}
    for e, (a, b) in src.cat.morphisms.items():
        keep = {t[0] for t in source.by_name[a].rel(sm.carrier)}
        fn = {x: y for x, y in src.fn(e).items() if x in keep}
        mor_map[e] = target.morphism_for(obj_map[a], obj_map[b], fn)
    return Functor(src.cat, target.concrete.cat, obj_map, mor_map, "Red"), target


def reduct_witness(red: Functor, source: EmbCategory, target: EmbCategory) -> SubconcretenessWitness:
    """Carrier inclusion witnessing that a reduct functor is subconcrete."""
    return SubconcretenessWitness(
        {n: {x: x for x in target.by_name[red.ob(n)].carrier} for n, _ in source.structures}
    )


def check_reduct_square(
    h: Functor,
    k1: ConcreteCategory,
    k2: ConcreteCategory,
    w: SubconcretenessWitness,
    sm: SignatureMorphism,
) -> Verdict:
    """Reduct of ``E1 A`` equals ``E2 HA`` transported along ``α_A``, and likewise on morphisms."""
    from .signatures import structure_of

    check = "reduct-square"
    for a in k1.cat.objects:
        e1 = structure_of(k1, sm.image, a)
        red = reduct_structure(sm, e1)
        e2 = structure_of(k2, sm.source, h.ob(a)).transport(w.alpha[a])
        if red != e2:
            return Verdict.failed(check, "object square fails", a)
    for f, (a, b) in k1.cat.morphisms.items():
        keep = w.image(a)
        red_fn = {x: y for x, y in k1.fn(f).items() if x in keep}
        via_h = {w.alpha[a][x]: w.alpha[b][y] for x, y in k2.fn(h.mor(f)).items()}
        if red_fn != via_h:
            return Verdict.failed(check, "morphism square fails", f)
    return Verdict.passed(check)


def is_coherent_functor(
    h: Functor,
    k1: ConcreteCategory,
    k2: ConcreteCategory,
    w: SubconcretenessWitness,
) -> Verdict:
    """Coherence of ``K1`` with respect to ``U2∘H``.

    For ``h1: A -> C``, ``g: B -> C`` and any ``f: U2HA -> U2HB`` with
    ``U2H(g)∘f = U2H(h1)`` some ``f̄: A -> B`` has ``U2H(f̄) = f``. Only
    defined for subconcrete functors; ``w`` is validated first.
    """
    v = validate_witness(h, k1, k2, w)
    if not v:
        raise ValueError(f"not a subconcreteness witness for {h.name}: {v.reason}")
    out = is_coherent(composite_u(h, k2))
    return Verdict("coherent-functor", out.status, out.reason, out.witness)


def is_transportable_functor(
    h: Functor,
    k1: ConcreteCategory,
    k2: ConcreteCategory,
    universe: Sequence[str] | None = None,
) -> Verdict:
    """Every iso ``f: HA -> B`` of ``K2`` is ``H(f̄)`` for an iso ``f̄: A -> B̄``.

    With ``universe``, only isos whose codomain carrier lies in it are
    quantified over.
    """
    c1, c2 = k1.cat, k2.cat
    isos1 = isomorphisms(c1)
    isos2 = isomorphisms(c2)
    pool = set(universe) if universe is not None else None
    images: dict[str, set[str]] = {a: set() for a in c1.objects}
    for m in isos1:
        images[c1.dom(m)].add(h.mor(m))
    for a in c1.objects:
        ha = h.ob(a)
        for f in isos2:
            if c2.dom(f) != ha:
                continue
            if pool is not None and not k2.carrier_sets[c2.cod(f)] <= pool:
                continue
            if f not in images[a]:
                return Verdict.failed("transportable-functor", "isomorphism out of HA does not lift", a, f)
    return Verdict.passed("transportable-functor")

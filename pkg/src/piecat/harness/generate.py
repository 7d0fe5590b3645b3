"""Seeded generators of small concrete categories, functors and transformations.

Generation is rejection sampling: candidates are built at random and the
requested predicates are re-checked on every emission. Each stream starts
with a constructive instance (finite sets with injections, closed under
renaming) so that a stream is never vacuous.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from ..concrete import (
    ConcreteCategory,
    FinSetFunctor,
    concrete_from_functions,
    has_concrete_monos,
    is_coherent,
    is_faithful_u,
    is_transportable,
)
from ..core import (
    BudgetExceeded,
    FinCategory,
    Functor,
    NatTrans,
    build_category,
    iter_functors,
    validate_category,
)
from ..signatures import SigmaStructure, canonical_e, embeddings, is_iso_full, is_replete_e, sigma_atoms
from ..names import enc_map

PREDICATES = ("faithful", "concrete_monos", "coherent", "transportable", "aec")


class GenerationError(RuntimeError):
    """Too many consecutive rejections; the configuration is unsatisfiable in practice."""


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    max_objects: int = 4
    max_carrier: int = 3
    max_morphisms: int = 16
    require: tuple[str, ...] = ()
    max_rejections: int = 500
    injective_only: bool = False
    pool_size: int | None = None

    def __post_init__(self):
        if min(self.max_objects, self.max_morphisms, self.max_rejections) < 1 or self.max_carrier < 0:
            raise ValueError("generator bounds must be positive")
        unknown = set(self.require) - set(PREDICATES)
        if unknown:
            raise ValueError(f"unknown predicates {sorted(unknown)}")


def element_pool(n: int) -> tuple[str, ...]:
    return tuple("abcdefghijklmnopqrstuvwxyz"[i] if i < 26 else f"e{i}" for i in range(n))


# ------------------------------------------------------------ raw samplers


def random_concrete(rng: random.Random, cfg: GeneratorConfig, name: str = "K") -> ConcreteCategory | None:
    """Random functions between random carriers, closed under composition."""
    pool = element_pool(cfg.pool_size or max(cfg.max_carrier, 1))
    n = rng.randint(1, cfg.max_objects)
    objects = [f"O{i}" for i in range(n)]
    carriers = {a: tuple(sorted(rng.sample(pool, rng.randint(0, min(cfg.max_carrier, len(pool)))))) for a in objects}
    gens = []
    for _ in range(rng.randint(0, n + 1)):
        a, b = rng.choice(objects), rng.choice(objects)
        ua, ub = carriers[a], carriers[b]
        if not ub and ua:
            continue
        if cfg.injective_only or rng.random() < 0.6:
            if len(ua) > len(ub):
                continue
            fn = dict(zip(ua, rng.sample(ub, len(ua))))
        else:
            fn = {x: rng.choice(ub) for x in ua}
        gens.append((a, b, fn))
    try:
        return concrete_from_functions(carriers, gens, name, max_morphisms=cfg.max_morphisms)
    except ValueError:
        return None


def sets_with_injections(pool: Sequence[str], max_size: int, name: str = "Inj") -> ConcreteCategory:
    """All subsets of ``pool`` of size ``<= max_size`` with all injections."""
    structures = [
        SigmaStructure.make(sub, {})
        for size in range(max_size + 1)
        for sub in itertools.combinations(pool, size)
    ]
    return structure_category(structures, name)


def structure_category(structures: Sequence[SigmaStructure], name: str = "K") -> ConcreteCategory:
    """Concrete category of the given structures with all embeddings between them."""
    objects = [f"S{i}" for i in range(len(structures))]
    carriers = {a: tuple(sorted(s.carrier)) for a, s in zip(objects, structures)}
    morphisms: dict[str, tuple[str, str]] = {}
    action: dict[str, dict[str, str]] = {}
    index = {}
    identity = {}
    for a, x in zip(objects, structures):
        for b, y in zip(objects, structures):
            for i, f in enumerate(embeddings(x, y)):
                is_id = a == b and all(k == v for k, v in f.items())
                m = f"id_{a}" if is_id else f"{a}>{b}.{i}"
                morphisms[m] = (a, b)
                action[m] = f
                index[a, b, tuple(sorted(f.items()))] = m
                if is_id:
                    identity[a] = m
    compose = {}
    by_dom: dict[str, list[str]] = {}
    for m, (s, _) in morphisms.items():
        by_dom.setdefault(s, []).append(m)
    for m, (s, t) in morphisms.items():
        for n in by_dom[t]:
            fn = {x: action[n][y] for x, y in action[m].items()}
            compose[n, m] = index[s, morphisms[n][1], tuple(sorted(fn.items()))]
    cat = FinCategory(tuple(objects), morphisms, identity, compose, name)
    return ConcreteCategory(cat, FinSetFunctor(carriers, action))


@dataclass(frozen=True)
class StructureClass:
    """An AEC proxy: an isomorphism-closed class of structures over a pool, with embeddings."""

    concrete: ConcreteCategory
    structures: Mapping[str, SigmaStructure]
    arities: Mapping[str, int]
    pool: tuple[str, ...]

    @property
    def name(self) -> str:
        return self.concrete.name

    def object_of(self, s: SigmaStructure) -> str:
        for a, t in self.structures.items():
            if t == s:
                return a
        raise KeyError(s)


def iso_closure(seeds: Sequence[SigmaStructure], pool: Sequence[str]) -> list[SigmaStructure]:
    out: dict[SigmaStructure, None] = {}
    for s in seeds:
        dom = sorted(s.carrier)
        for image in itertools.permutations(pool, len(dom)):
            out.setdefault(s.transport(dict(zip(dom, image))), None)
    return sorted(out, key=SigmaStructure.sort_key)


def random_structure(rng: random.Random, elements: Sequence[str], arities: Mapping[str, int]) -> SigmaStructure:
    rels = {}
    for r, n in arities.items():
        rels[r] = [t for t in itertools.product(elements, repeat=n) if rng.random() < 0.5]
    return SigmaStructure.make(elements, rels)


def structure_class(structures: Sequence[SigmaStructure], arities: Mapping[str, int], pool: Sequence[str], name: str) -> StructureClass:
    k = structure_category(structures, name)
    return StructureClass(k, dict(zip(k.cat.objects, structures)), dict(arities), tuple(pool))


def random_aec_proxy(
    rng: random.Random,
    pool_size: int = 3,
    max_carrier: int = 2,
    max_types: int = 3,
    arities: Mapping[str, int] | None = None,
    name: str = "K",
    max_objects: int = 40,
) -> StructureClass | None:
    """Iso-closure (inside the pool) of a few random structures."""
    pool = element_pool(pool_size)
    if arities is None:
        arities = {}
        if rng.random() < 0.8:
            arities["P"] = 1
        if rng.random() < 0.3:
            arities["E"] = 2
    seeds = []
    for _ in range(rng.randint(1, max_types)):
        size = rng.randint(0, max_carrier)
        seeds.append(random_structure(rng, pool[:size], arities))
    structures = iso_closure(seeds, pool)
    if len(structures) > max_objects:
        return None
    return structure_class(structures, arities, pool, name)


def reduct(s: SigmaStructure, keep: Sequence[str], restrict: str | None = None) -> SigmaStructure:
    """Reduct to the relations ``keep``, optionally restricted to the unary ``restrict`` part."""
    carrier = {t[0] for t in s.rel(restrict)} if restrict else set(s.carrier)
    rels = {r: [t for t in s.rel(r) if all(x in carrier for x in t)] for r in keep}
    return SigmaStructure.make(carrier, rels)


def reduct_functor_between(
    k1: StructureClass, k2: StructureClass, keep: Sequence[str], restrict: str | None, name: str
) -> Functor:
    """``A ↦`` reduct of ``A`` (restricted to ``restrict``), morphisms by restriction."""
    obj_map = {a: k2.object_of(reduct(s, keep, restrict)) for a, s in k1.structures.items()}
    c2 = k2.concrete
    index = {}
    for m, (a, b) in c2.cat.morphisms.items():
        index[a, b, tuple(sorted(c2.fn(m).items()))] = m
    mor_map = {}
    for m, (a, b) in k1.concrete.cat.morphisms.items():
        keep_el = k2.structures[obj_map[a]].carrier
        fn = {x: y for x, y in k1.concrete.fn(m).items() if x in keep_el}
        mor_map[m] = index[obj_map[a], obj_map[b], tuple(sorted(fn.items()))]
    return Functor(k1.concrete.cat, c2.cat, obj_map, mor_map, name)


@dataclass(frozen=True)
class SubconcretePair:
    """Source and target proxies with a family of parallel subconcrete functors."""

    k1: StructureClass
    k2: StructureClass
    functors: tuple[Functor, ...]
    kinds: tuple[str, ...]


def random_subconcrete_family(rng: random.Random, pool_size: int = 3, max_carrier: int = 2, max_objects: int = 30) -> SubconcretePair | None:
    """Proxy ``K1`` with unary ``P``; ``K2`` closes the reducts; functors are reducts and ``P``-restrictions."""
    arities = {"P": 1}
    if rng.random() < 0.3:
        arities["E"] = 2
    k1 = random_aec_proxy(rng, pool_size, max_carrier, 3, arities, "K1", max_objects)
    if k1 is None:
        return None
    keep = [r for r in arities if r != "P" and rng.random() < 0.7]
    seeds = []
    for s in k1.structures.values():
        seeds.append(reduct(s, keep))
        seeds.append(reduct(s, keep, "P"))
    structures = iso_closure(seeds, k1.pool)
    if len(structures) > max_objects:
        return None
    k2 = structure_class(structures, {r: arities[r] for r in keep}, k1.pool, "K2")
    full = reduct_functor_between(k1, k2, keep, None, "Red")
    part = reduct_functor_between(k1, k2, keep, "P", "Res")
    return SubconcretePair(k1, k2, (full, part), ("concrete", "restriction"))


# ------------------------------------------------- functors and transformations


def random_functor(
    rng: random.Random, source: FinCategory, target: FinCategory, name: str = "F", node_budget: int = 20_000
) -> Functor | None:
    try:
        return next(iter_functors(source, target, rng=rng, node_budget=node_budget, name=name), None)
    except BudgetExceeded:
        return None


def iter_nat_trans(
    f: Functor, g: Functor, rng: random.Random | None = None, name: str = "phi", node_budget: int | None = None
) -> Iterator[NatTrans]:
    """All natural transformations ``F => G`` by backtracking over components."""
    c, d = f.source, f.target
    objs = list(c.objects)
    comps: dict[str, str] = {}
    nodes = [0]

    def ok(a: str) -> bool:
        for k in c.outgoing(a):
            b = c.cod(k)
            if b in comps and d.comp(g.mor(k), comps[a]) != d.comp(comps[b], f.mor(k)):
                return False
        for k in c.incoming(a):
            s = c.dom(k)
            if s in comps and d.comp(g.mor(k), comps[s]) != d.comp(comps[a], f.mor(k)):
                return False
        return True

    def go(i: int) -> Iterator[NatTrans]:
        if i == len(objs):
            yield NatTrans(f, g, dict(comps), name)
            return
        a = objs[i]
        cands = list(d.hom(f.ob(a), g.ob(a)))
        if rng is not None:
            rng.shuffle(cands)
        for m in cands:
            nodes[0] += 1
            if node_budget is not None and nodes[0] > node_budget:
                raise BudgetExceeded("iter_nat_trans", nodes[0], node_budget)
            comps[a] = m
            if ok(a):
                yield from go(i + 1)
            del comps[a]

    yield from go(0)


# ------------------------------------------------------------------ streams


def _check(k: ConcreteCategory, require: Sequence[str]) -> bool:
    if not validate_category(k.cat):
        return False
    for p in require:
        if p == "faithful" and not is_faithful_u(k):
            return False
        if p == "concrete_monos" and not has_concrete_monos(k):
            return False
        if p == "coherent" and not is_coherent(k):
            return False
        if p == "transportable" and not is_transportable(k, k.elements()):
            return False
        if p == "aec":
            e = canonical_e(k, sigma_atoms(k))
            if not (is_coherent(k) and has_concrete_monos(k) and is_iso_full(e) and is_replete_e(e, k.elements())):
                return False
    return True


def seed_instance(cfg: GeneratorConfig) -> ConcreteCategory:
    """Constructive instance respecting the object bound."""
    pool = element_pool(max(1, min(cfg.max_carrier, 2)))
    size = 0
    while True:
        nxt = sets_with_injections(pool[: size + 1], size + 1, "Seed")
        if len(nxt.cat.objects) > cfg.max_objects or size + 1 > len(pool) or size + 1 > cfg.max_carrier:
            break
        size += 1
    k = sets_with_injections(pool[:size], size, "Seed")
    if len(k.cat.objects) > cfg.max_objects:
        k = sets_with_injections((), 0, "Seed")
    return k


def sample(rng: random.Random, cfg: GeneratorConfig, name: str = "K") -> ConcreteCategory:
    """One random category satisfying ``cfg.require``, drawn from ``rng``."""
    for _ in range(cfg.max_rejections):
        k = random_concrete(rng, cfg, name)
        if k is not None and _check(k, cfg.require):
            return k
    raise GenerationError(f"{cfg.max_rejections} consecutive rejections for {cfg.require}")


def generate(cfg: GeneratorConfig, count: int | None = None) -> Iterator[ConcreteCategory]:
    """Deterministic stream of concrete categories satisfying ``cfg.require``.

    Raises :class:`GenerationError` after ``cfg.max_rejections`` consecutive
    rejections instead of looping forever.
    """
    rng = random.Random(cfg.seed)
    emitted = 0
    seed = seed_instance(cfg)
    if _check(seed, cfg.require):
        yield seed
        emitted += 1
    rejections = 0
    while count is None or emitted < count:
        k = random_concrete(rng, cfg, f"K{emitted}")
        if k is not None and _check(k, cfg.require):
            rejections = 0
            emitted += 1
            yield k
            continue
        rejections += 1
        if rejections >= cfg.max_rejections:
            raise GenerationError(f"{rejections} consecutive rejections for {cfg.require} at seed {cfg.seed}")


# ------------------------------------------------------------- raw tables


def random_table(rng: random.Random, max_objects: int = 4, max_morphisms: int = 16) -> FinCategory:
    """A random composition table, valid or not, for testing the law checker.

    Mixes valid categories (function closures, preorders), random monoid
    tables and single-entry corruptions of valid tables.
    """
    kind = rng.choice(["closure", "monoid", "corrupt", "corrupt", "dangling", "poset"])
    if kind == "monoid":
        n = rng.randint(1, min(4, max_morphisms))
        elems = ["e"] + [f"x{i}" for i in range(1, n)]
        compose = {}
        for g in elems:
            for f in elems:
                if g == "e":
                    compose[g, f] = f
                elif f == "e":
                    compose[g, f] = g
                else:
                    compose[g, f] = rng.choice(elems)
        return FinCategory(("*",), {m: ("*", "*") for m in elems}, {"*": "e"}, compose, "M")
    if kind == "poset":
        from ..core import poset_category

        n = rng.randint(1, max_objects)
        objs = [f"p{i}" for i in range(n)]
        leq = [(a, b) for a in objs for b in objs if a < b and rng.random() < 0.4]
        p = poset_category(objs, leq, "P")
        return p if len(p.morphisms) <= max_morphisms else terminal_like()
    cfg = GeneratorConfig(seed=0, max_objects=max_objects, max_carrier=2, max_morphisms=max_morphisms)
    k = None
    while k is None:
        k = random_concrete(rng, cfg, "T")
    c = k.cat
    if kind == "closure":
        return c
    compose = dict(c.compose)
    morphisms = dict(c.morphisms)
    if kind == "dangling":
        key = rng.choice(sorted(compose))
        compose[key] = "ghost"
        return FinCategory(c.objects, morphisms, dict(c.identity), compose, c.name)
    action = rng.choice(["change", "drop", "change", "change"])
    key = rng.choice(sorted(compose))
    if action == "drop":
        del compose[key]
    else:
        compose[key] = rng.choice(sorted(morphisms))
    return FinCategory(c.objects, morphisms, dict(c.identity), compose, c.name)


# ------------------------------------------------------------ workspaces

ODD_NAMES = ("a b", 'q"t', "x->y", "#h", "{", "1:2", "back\\slash", "ünï", "=", "(", "")


def relabel(k: ConcreteCategory, rng: random.Random, name: str) -> ConcreteCategory:
    """Rename objects, morphisms and elements, sometimes to names that need quoting."""

    def renamer(prefix: str):
        def pick(i: int, old: str) -> str:
            odd = rng.choice(ODD_NAMES) if rng.random() < 0.3 else old
            return f"{odd}{prefix}{i}" if odd != old else old
        return pick

    c = k.cat
    obj = {a: renamer("~o")(i, a) for i, a in enumerate(c.objects)}
    identity_names = set(c.identity.values())
    mor = {m: (m if m in identity_names else renamer("~m")(i, m)) for i, m in enumerate(c.morphisms)}
    elem = {x: renamer("~e")(i, x) for i, x in enumerate(k.elements())}
    cat = FinCategory(
        tuple(obj[a] for a in c.objects),
        {mor[m]: (obj[a], obj[b]) for m, (a, b) in c.morphisms.items()},
        {obj[a]: mor[i] for a, i in c.identity.items()},
        {(mor[g], mor[f]): mor[h] for (g, f), h in c.compose.items()},
        name,
    )
    u = FinSetFunctor(
        {obj[a]: tuple(elem[x] for x in k.carrier(a)) for a in c.objects},
        {mor[m]: {elem[x]: elem[y] for x, y in k.fn(m).items()} for m in c.morphisms},
    )
    return ConcreteCategory(cat, u)


def random_workspace(rng: random.Random):
    """A workspace with up to two concrete categories, a bare one, functors, a transformation and a signature."""
    from ..dsl import Workspace
    from ..signatures import Signature

    ws = Workspace()
    cfg = GeneratorConfig(max_objects=3, max_carrier=2, max_morphisms=8)
    names = ["K", "L", rng.choice(["Bare", "b a r e", "bare#1"])]
    cats = []
    for i, name in enumerate(names[: rng.randint(0, 3)]):
        k = None
        while k is None:
            k = random_concrete(rng, cfg, name)
        k = relabel(k, rng, name)
        cats.append(k.cat)
        if i < 2:
            ws.add_concrete(k, name)
            if rng.random() < 0.5:
                sig = sigma_atoms(k, rng.choice([1, 2]))
                ws.signatures[f"Sig{name}"] = (name, Signature(tuple(sig.symbols[: rng.randint(0, 4)])))
        else:
            ws.categories[name] = k.cat
    if len(cats) >= 2:
        src, tgt = cats[0], cats[1]
        fs = []
        for fname in ("F", "G"):
            f = random_functor(rng, src, tgt, fname, node_budget=2_000)
            if f is not None:
                ws.functors[fname] = f
                fs.append(f)
        if len(fs) == 2:
            t = next(iter_nat_trans(fs[0], fs[1], rng, "eta", 2_000), None) if rng.random() < 0.7 else None
            if t is not None:
                ws.nats["eta"] = t
    return ws


def terminal_like() -> FinCategory:
    return build_category(["*"], {}, name="1")

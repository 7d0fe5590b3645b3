import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from piecat.concrete import concrete_from_functions, has_concrete_monos, is_faithful_u, make_transportable
from piecat.core import BudgetExceeded, identity_functor, is_faithful, validate_functor
from piecat.functors import identity_witness
from piecat.harness.generate import GeneratorConfig, random_concrete, sets_with_injections
from piecat.limits import inserter, product
from piecat.oracles import closure_symbol, iso_full_definitional, sigma_oracle, symbol_valid
from piecat.signatures import (
    RelationSymbol,
    Signature,
    canonical_e,
    check_symbol,
    classify_aec,
    coproduct_symbol,
    enumerate_sigma,
    inserter_pairing_symbol,
    is_embedding,
    is_iso_full,
    is_replete_e,
    pullback_symbol,
    raw_search_space,
    sigma_atoms,
)

from .conftest import load_corpus

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def generated(seed: int, name: str = "K", **bounds):
    rng = random.Random(seed)
    cfg = GeneratorConfig(**{"max_objects": 3, "max_carrier": 2, "max_morphisms": 8, **bounds})
    k = None
    while k is None:
        k = random_concrete(rng, cfg, name)
    return k


def as_nodes(r: RelationSymbol) -> tuple[int, frozenset]:
    return r.arity, frozenset((a, t) for a, ts in r.interp.items() for t in ts)


def single(carrier=("a",)):
    return concrete_from_functions({"A": carrier}, [], "single")


# ------------------------------------------------------------ enumeration


def test_one_point_has_two_unary_symbols():
    sig = enumerate_sigma(single(), max_arity=1)
    assert sorted(len(r.at("A")) for r in sig) == [0, 1]


@given(seeds)
@settings(max_examples=40)
def test_full_symbol_is_always_present(seed):
    k = generated(seed)
    sig = enumerate_sigma(k, 2)
    for n in (1, 2):
        full = RelationSymbol("full", n, {a: frozenset(itertools.product(k.carrier(a), repeat=n)) for a in k.cat.objects})
        assert sig.contains_interp(full)


@given(seeds)
@settings(max_examples=40)
def test_every_enumerated_symbol_is_valid(seed):
    k = generated(seed)
    for r in enumerate_sigma(k, 2):
        interp = {a: r.at(a) for a in k.cat.objects}
        assert symbol_valid(k, interp, r.arity)


def small_enough(k, max_arity: int = 2) -> bool:
    return raw_search_space(k, max_arity) <= 2**16


@given(seeds)
@settings(max_examples=40)
def test_enumeration_matches_the_unpruned_oracle(seed):
    k = generated(seed, max_carrier=2, max_objects=3)
    arity = 2 if small_enough(k, 2) else 1
    if not small_enough(k, arity):
        return
    got = {as_nodes(r) for r in enumerate_sigma(k, arity)}
    assert got == sigma_oracle(k, arity)


@given(seeds, st.integers(0, 10_000))
@settings(max_examples=50)
def test_closure_probes_are_contained(seed, probe):
    k = generated(seed)
    rng = random.Random(probe)
    n = rng.choice([1, 2])
    nodes = [(a, tuple(rng.choice(k.carrier(a)) for _ in range(n))) for a in k.cat.objects if k.carrier(a)]
    picked = rng.sample(nodes, rng.randint(0, len(nodes)))
    closed = closure_symbol(k, picked, n)
    r = RelationSymbol("probe", n, closed)
    assert check_symbol(k, r)
    assert enumerate_sigma(k, n).contains_interp(r)


def test_budget_refusal_reports_the_size():
    k = sets_with_injections(("a", "b", "c"), 3)
    with pytest.raises(BudgetExceeded) as info:
        enumerate_sigma(k, 2, budget=4)
    assert info.value.size > 4


# ---------------------------------------------------------- derived symbols


def test_product_unary_symbol_is_found():
    k1 = sets_with_injections(("a",), 1, "K1")
    k2 = sets_with_injections(("b",), 1, "K2")
    p = product([k1, k2])
    u1 = RelationSymbol("U1", 1, {a: frozenset((x,) for x in k1.carrier(a)) for a in k1.cat.objects})
    none2 = RelationSymbol("E2", 1, {})
    r = coproduct_symbol([u1, none2], p)
    sig = enumerate_sigma(p.concrete, 1)
    assert sig.contains_interp(r)
    for o in p.cat.objects:
        assert {x[0].split(":")[0] for x in r.at(o)} <= {"0"}
        assert len(r.at(o)) == len(k1.carrier(p.projections[0].ob(o)))


def test_coproduct_of_empty_symbols_is_empty():
    k = sets_with_injections(("a", "b"), 1)
    p = product([k, k])
    r = coproduct_symbol([RelationSymbol("E", 2, {}), RelationSymbol("E", 2, {})], p)
    assert all(not r.at(o) for o in p.cat.objects)


def test_coproduct_arity_mismatch():
    k = sets_with_injections(("a",), 1)
    p = product([k, k])
    with pytest.raises(ValueError):
        coproduct_symbol([RelationSymbol("E", 1, {}), RelationSymbol("E", 2, {})], p)


@given(seeds)
@settings(max_examples=30)
def test_pullback_symbol_along_identity_and_projection(seed):
    k = generated(seed)
    sig = enumerate_sigma(k, 1)
    ident = identity_functor(k.cat)
    for r in sig:
        assert pullback_symbol(r, ident, k, k).same_interp(r)
    ins = inserter(ident, ident, k.u)
    for r in sig:
        rp = pullback_symbol(r, ins.projection, ins.concrete, k)
        assert check_symbol(ins.concrete, rp)
        assert all(rp.at(o) == r.at(ins.index(o)) for o in ins.cat.objects)


def test_pairing_symbol_is_the_diagonal_at_identities():
    k = sets_with_injections(("a", "b"), 2)
    ident = identity_functor(k.cat, "Id")
    ins = inserter(ident, ident, k.u)
    w = identity_witness(ident, k)
    r = inserter_pairing_symbol(ins, k, k, w, w)
    for o in ins.cat.objects:
        if k.cat.is_identity(ins.arrow(o)):
            assert r.at(o) == {(x, x) for x in k.carrier(ins.index(o))}
    assert enumerate_sigma(ins.concrete, 2).contains_interp(r)


# ------------------------------------------------------------ canonical E


def test_empty_signature_gives_bare_carriers():
    k = sets_with_injections(("a", "b"), 2)
    e = canonical_e(k, Signature())
    assert all(e.image(a).carrier == frozenset(k.carrier(a)) for a in k.cat.objects)


@given(seeds)
@settings(max_examples=30)
def test_e_is_concrete_faithful_and_an_embedding_on_morphisms(seed):
    k = generated(seed)
    if not has_concrete_monos(k):
        return  # E lands in Emb only when every U(f) is injective
    e = canonical_e(k, sigma_atoms(k))
    func = e.functor
    assert validate_functor(func)
    emb = e.emb.concrete
    for m, (a, b) in k.cat.morphisms.items():
        assert dict(emb.fn(func.mor(m))) == dict(k.fn(m))
        assert is_embedding(e.image(a), e.image(b), k.fn(m))
    if is_faithful_u(k):
        assert is_faithful(func)


# ------------------------------------------------------ iso-full, replete


def test_sets_with_injections_are_iso_full():
    k = sets_with_injections(("a", "b"), 2)
    assert is_iso_full(canonical_e(k, enumerate_sigma(k, 1)))


def test_identical_images_without_an_iso_fail_iso_fullness():
    k = load_corpus("not_iso_full").concrete("K")
    v = is_iso_full(canonical_e(k, sigma_atoms(k)))
    assert not v
    a, b, f = v.witness
    assert {a, b} == {"A", "B"} and f == {"x": "x"}


@given(seeds)
@settings(max_examples=60)
def test_atomic_iso_fullness_matches_the_definition(seed):
    k = generated(seed)
    assert bool(is_iso_full(canonical_e(k, sigma_atoms(k)))) == iso_full_definitional(k)[0]


def test_repleteness_after_closure():
    k = single()
    universe = ["a", "b"]
    e = canonical_e(k, sigma_atoms(k))
    assert not is_replete_e(e, universe)
    closed = make_transportable(k, universe)
    assert is_replete_e(canonical_e(closed, sigma_atoms(closed)), universe)


def test_repleteness_is_vacuous_without_room_to_rename():
    k = single()
    assert is_replete_e(canonical_e(k, sigma_atoms(k)), ["a"])


# ------------------------------------------------------------ classification


def test_terminal_passes_every_rung():
    assert classify_aec(load_corpus("terminal").concrete("terminal"))


def test_bounded_injections_pass_every_rung():
    assert classify_aec(sets_with_injections(("a", "b"), 2))


def test_coherence_failing_instance_also_fails_the_emb_rungs():
    # a↦b is a Σ-isomorphism EA -> EB with no morphism A -> B behind it
    k = load_corpus("coherence_fail").concrete("K")
    report = classify_aec(k)
    failing = {v.check for v in report.rungs if not v}
    assert failing == {"coherent", "iso-full", "replete"}
    assert iso_full_definitional(k) == (False, ("A", "B", {"a": "b"}))

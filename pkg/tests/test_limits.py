import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from piecat.concrete import (
    concrete_from_functions,
    has_concrete_monos,
    is_coherent,
    is_faithful_u,
    make_transportable,
)
from piecat.core import (
    Functor,
    NatTrans,
    compose_functors,
    constant_functor,
    identity_functor,
    is_equivalence,
    is_faithful,
    terminal_category,
    validate_category,
    validate_functor,
    validate_nat,
)
from piecat.harness.generate import GeneratorConfig, iter_nat_trans, random_concrete, random_functor, sets_with_injections
from piecat.harness.suites import control_pair, suite_factorization
from piecat.limits import (
    comma,
    compare_pb_psb,
    equifier,
    equifier_factorize,
    inserter,
    inserter_factorize,
    multiple_pullback,
    product,
    pseudopullback,
    pullback,
    satisfying_equifier_functors,
    satisfying_inserter_functors,
)
from piecat.names import untag

from .conftest import load_corpus

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def generated(seed: int, name: str = "K", **bounds):
    rng = random.Random(seed)
    cfg = GeneratorConfig(**{"max_objects": 3, "max_carrier": 2, "max_morphisms": 8, **bounds})
    k = None
    while k is None:
        k = random_concrete(rng, cfg, name)
    return k


def parallel_pair(seed: int):
    rng = random.Random(seed)
    k, l = generated(seed, "K"), generated(seed + 1, "L")
    fs = []
    for name in ("F", "G"):
        h = random_functor(rng, k.cat, l.cat, name, node_budget=5_000)
        fs.append(h or constant_functor(k.cat, l.cat, l.cat.objects[0], name))
    return k, l, fs[0], fs[1]


# ---------------------------------------------------------------- product


def test_empty_product_is_terminal_with_empty_carrier():
    p = product([])
    assert len(p.cat.objects) == 1 and len(p.cat.morphisms) == 1
    assert p.concrete.carrier(p.cat.objects[0]) == ()


@given(seeds, seeds)
@settings(max_examples=60)
def test_product_counts_and_tagged_union(s1, s2):
    k1, k2 = generated(s1, "K1"), generated(s2, "K2")
    p = product([k1, k2])
    assert validate_category(p.cat)
    assert len(p.cat.objects) == len(k1.cat.objects) * len(k2.cat.objects)
    for obj in p.cat.objects:
        a1, a2 = (pr.ob(obj) for pr in p.projections)
        tagged = sorted(untag(x) for x in p.concrete.carrier(obj))
        assert tagged == sorted([(0, x) for x in k1.carrier(a1)] + [(1, x) for x in k2.carrier(a2)])
    for pr in p.projections:
        assert validate_functor(pr)


@given(seeds, seeds)
@settings(max_examples=60)
def test_product_preserves_faithfulness_and_concrete_monos(s1, s2):
    k1, k2 = generated(s1, "K1"), generated(s2, "K2")
    p = product([k1, k2]).concrete
    if is_faithful_u(k1) and is_faithful_u(k2):
        assert is_faithful_u(p)
    if has_concrete_monos(k1) and has_concrete_monos(k2):
        assert has_concrete_monos(p)


# ------------------------------------------------------------------ comma


def test_comma_of_identities_on_terminal():
    t = terminal_category()
    ident = identity_functor(t)
    c = comma(ident, ident).cat
    assert len(c.objects) == 1 and len(c.morphisms) == 1


@given(seeds)
@settings(max_examples=40)
def test_comma_of_identities_is_the_arrow_category(seed):
    k = generated(seed).cat
    ident = identity_functor(k)
    c = comma(ident, ident).cat
    assert validate_category(c)
    assert len(c.objects) == len(k.morphisms)


@given(seeds, seeds)
@settings(max_examples=40)
def test_comma_of_constants(s1, s2):
    a, b = generated(s1, "A").cat, generated(s2, "B").cat
    l = generated(s1 ^ s2, "L").cat
    x, y = l.objects[0], l.objects[-1]
    c = comma(constant_functor(a, l, x, "F"), constant_functor(b, l, y, "G")).cat
    assert len(c.objects) == len(a.objects) * len(b.objects) * len(l.hom(x, y))


# --------------------------------------------------------------- inserter


@given(seeds)
@settings(max_examples=40)
def test_inserter_of_identities_has_endomorphism_objects(seed):
    k = generated(seed).cat
    ident = identity_functor(k)
    ins = inserter(ident, ident)
    assert len(ins.cat.objects) == sum(len(k.hom(a, a)) for a in k.objects)


def test_inserter_of_identities_on_terminal():
    ident = identity_functor(terminal_category())
    ins = inserter(ident, ident)
    assert len(ins.cat.objects) == 1 and len(ins.cat.morphisms) == 1


@given(seeds)
@settings(max_examples=60)
def test_inserter_invariants(seed):
    k, l, f, g = parallel_pair(seed)
    ins = inserter(f, g, k.u)
    assert validate_category(ins.cat)
    assert validate_functor(ins.projection)
    assert is_faithful(ins.projection)
    assert validate_nat(ins.phi)
    com = comma(f, g)
    same_index = [o for o in com.cat.objects if com.left.ob(o) == com.right.ob(o)]
    assert len(same_index) == len(ins.cat.objects)


def test_non_parallel_functors_are_rejected():
    ws = load_corpus("inserter_demo")
    f = ws.functors["F"]
    other = identity_functor(terminal_category())
    with pytest.raises(ValueError):
        inserter(f, other)


# --------------------------------------------------------------- equifier


def test_equal_transformations_give_everything():
    ws = load_corpus("equifier_demo")
    phi = ws.nats["phi"]
    eq = equifier(phi, phi)
    assert set(eq.cat.objects) == set(phi.source.source.objects)


def test_demo_equifier_drops_the_disagreeing_object():
    ws = load_corpus("equifier_demo")
    eq = equifier(ws.nats["phi"], ws.nats["psi"])
    assert set(eq.cat.objects) == {"A", "B"}


def test_everywhere_different_components_give_the_empty_category():
    ws = load_corpus("equifier_demo")
    phi = ws.nats["phi"]
    psi = NatTrans(phi.source, phi.target, {a: "q" for a in phi.components}, "psi")
    assert validate_nat(psi)
    assert equifier(phi, psi).cat.objects == ()


@given(seeds)
@settings(max_examples=60)
def test_equifier_objects_by_componentwise_comparison(seed):
    k, l, f, g = parallel_pair(seed)
    nats = list(itertools.islice(iter_nat_trans(f, g, random.Random(seed), "phi", 20_000), 3))
    if not nats:
        return
    phi, psi = nats[0], nats[-1]
    eq = equifier(phi, psi, k.u)
    assert set(eq.cat.objects) == {a for a in k.cat.objects if phi[a] == psi[a]}
    assert validate_category(eq.cat)
    sub = eq.concrete
    # full replete subcategory: the ladder predicates survive
    if is_faithful_u(k):
        assert is_faithful_u(sub)
    if has_concrete_monos(k):
        assert has_concrete_monos(sub)


# ---------------------------------------------------------- factorizations


def test_projection_factors_as_identity():
    ws = load_corpus("inserter_demo")
    f, g = ws.functors["F"], ws.functors["G"]
    ins = inserter(f, g)
    hbar = inserter_factorize(ins, ins.projection, ins.phi)
    assert all(hbar.ob(o) == o for o in ins.cat.objects)
    assert all(hbar.mor(m) == m for m in ins.cat.morphisms)


def test_point_factorization_picks_the_component():
    ws = load_corpus("inserter_demo")
    f, g = ws.functors["F"], ws.functors["G"]
    ins = inserter(f, g)
    t = terminal_category()
    h = constant_functor(t, f.source, "A", "H")
    psi = NatTrans(compose_functors(h, f), compose_functors(h, g), {"*": "t"}, "psi")
    hbar = inserter_factorize(ins, h, psi)
    obj = hbar.ob("*")
    assert ins.index(obj) == "A" and ins.arrow(obj) == "t"


def test_equifier_factorizations():
    ws = load_corpus("equifier_demo")
    eq = equifier(ws.nats["phi"], ws.nats["psi"])
    hbar = equifier_factorize(eq, eq.inclusion)
    assert all(hbar.ob(o) == o for o in eq.cat.objects)
    t = terminal_category()
    k = ws.nats["phi"].source.source
    point = equifier_factorize(eq, constant_functor(t, k, "B", "H"))
    assert point.ob("*") == "B"
    with pytest.raises(ValueError):
        equifier_factorize(eq, constant_functor(t, k, "C", "H"))


def test_generated_factorizations_are_unique():
    report = suite_factorization(n=60, seed=3)
    assert report.failed == 0
    assert report.skip_rate < 0.2
    assert all(r.details.get("oracle_size") == 1 for r in report.records if r.verdict == "pass")


def test_brute_force_sets_agree_on_the_demo():
    ws = load_corpus("inserter_demo")
    f, g = ws.functors["F"], ws.functors["G"]
    ins = inserter(f, g)
    assert len(satisfying_inserter_functors(ins, ins.projection, ins.phi)) == 1
    eq_ws = load_corpus("equifier_demo")
    eq = equifier(eq_ws.nats["phi"], eq_ws.nats["psi"])
    assert len(satisfying_equifier_functors(eq, eq.inclusion)) == 1


# --------------------------------------------------- pullbacks and pseudo


def test_diagonal_is_in_the_pullback():
    k = sets_with_injections(("a", "b"), 2)
    pb = pullback(k, k)
    from piecat.names import enc

    assert all(enc(a, a) in pb.cat.objects for a in k.cat.objects)


def test_transportable_legs_give_an_equivalence():
    k = sets_with_injections(("a", "b"), 1)
    assert compare_pb_psb(k, k)


def test_control_pair_is_not_an_equivalence():
    c1, c2 = control_pair()
    assert pullback(c1, c2).cat.objects == ()
    assert len(pseudopullback(c1, c2).cat.objects) == 1
    assert not compare_pb_psb(c1, c2)


@given(seeds)
@settings(max_examples=20)
def test_transport_closure_repairs_the_comparison(seed):
    k = generated(seed, max_objects=2, max_carrier=1)
    if not is_faithful_u(k):
        return
    universe = sorted(set(k.elements()) | {"z"})
    kt = make_transportable(k, universe)
    assert compare_pb_psb(kt, kt)


def test_multiple_pullback_folds_left_to_right():
    k = sets_with_injections(("a",), 1)
    three = multiple_pullback([k, k, k])
    assert validate_category(three.cat)
    assert len(three.cat.objects) == len(k.cat.objects)

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from piecat.concrete import concrete_from_functions, is_coherent
from piecat.core import Functor, compose_functors, identity_functor
from piecat.functors import (
    SubconcretenessWitness,
    check_reduct_square,
    compose_witnesses,
    find_subconcrete_witness,
    identity_witness,
    induced_signature_morphism,
    is_coherent_functor,
    is_concrete,
    is_transportable_functor,
    reduct_functor,
    reduct_witness,
    reflection_split,
    validate_witness,
)
from piecat.harness.generate import random_subconcrete_family, sets_with_injections
from piecat.harness.suites import instance_seed
from piecat.limits import equifier, inserter, product
from piecat.names import tag
from piecat.signatures import canonical_e, enumerate_sigma, is_embedding

from .conftest import load_corpus

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def family(seed: int):
    rng = random.Random(seed)
    fam = None
    while fam is None:
        fam = random_subconcrete_family(rng, max_objects=12)
    return fam


def one(name: str, obj: str, carrier) -> object:
    return concrete_from_functions({obj: carrier}, [], name)


# -------------------------------------------------------------- concrete


def test_identity_is_concrete():
    k = sets_with_injections(("a", "b"), 2)
    assert is_concrete(identity_functor(k.cat), k, k)


def test_limit_projections_are_concrete():
    ws = load_corpus("inserter_demo")
    k = ws.concrete("K")
    ins = inserter(ws.functors["F"], ws.functors["G"], k.u)
    assert is_concrete(ins.projection, ins.concrete, k)
    eq_ws = load_corpus("equifier_demo")
    kk = eq_ws.concrete("K")
    eq = equifier(eq_ws.nats["phi"], eq_ws.nats["psi"], kk.u)
    assert is_concrete(eq.inclusion, eq.concrete, kk)


def test_renaming_functor_is_not_concrete():
    k1, k2 = one("K1", "A", ("a",)), one("K2", "B", ("b",))
    h = Functor(k1.cat, k2.cat, {"A": "B"}, {"id_A": "id_B"}, "H")
    assert not is_concrete(h, k1, k2)
    # but it is subconcrete, through the renaming
    w = find_subconcrete_witness(h, k1, k2)
    assert w is not None and w.alpha["A"] == {"b": "a"}


# ---------------------------------------------------------------- witnesses


def test_identity_witness_is_found():
    k = sets_with_injections(("a", "b"), 2)
    ident = identity_functor(k.cat)
    w = find_subconcrete_witness(ident, k, k)
    assert w == identity_witness(ident, k)


def test_coproduct_injections_witness_projections():
    k1 = sets_with_injections(("a", "b"), 1, "K1")
    k2 = sets_with_injections(("c",), 1, "K2")
    p = product([k1, k2])
    for i, (proj, k) in enumerate(zip(p.projections, (k1, k2))):
        alpha = {o: {x: tag(i, x) for x in k.carrier(proj.ob(o))} for o in p.cat.objects}
        w = SubconcretenessWitness(alpha)
        assert validate_witness(proj, p.concrete, k, w)
        assert find_subconcrete_witness(proj, p.concrete, k) is not None


def test_size_mismatch_has_no_witness():
    k1, k2 = one("K1", "A", ("a",)), one("K2", "X", ("x", "y"))
    h = Functor(k1.cat, k2.cat, {"A": "X"}, {"id_A": "id_X"}, "H")
    assert find_subconcrete_witness(h, k1, k2) is None


@given(seeds)
@settings(max_examples=30)
def test_generated_family_functors_have_witnesses(seed):
    fam = family(seed)
    k1, k2 = fam.k1.concrete, fam.k2.concrete
    for h in fam.functors:
        w = find_subconcrete_witness(h, k1, k2)
        assert w is not None and validate_witness(h, k1, k2, w)
        if is_concrete(h, k1, k2):
            assert w == identity_witness(h, k2)


@given(seeds)
@settings(max_examples=30)
def test_witnesses_compose(seed):
    fam = family(seed)
    k1, k2 = fam.k1.concrete, fam.k2.concrete
    h = fam.functors[1]
    ident = identity_functor(k2.cat, "Id")
    w1 = find_subconcrete_witness(h, k1, k2)
    w2 = identity_witness(ident, k2)
    composite = compose_functors(h, ident, "HId")
    assert validate_witness(composite, k1, k2, compose_witnesses(h, w1, ident, w2))


# ----------------------------------------------------- signature morphisms


def test_identity_signature_morphism():
    k = sets_with_injections(("a", "b"), 2)
    ident = identity_functor(k.cat, "Id")
    sm = induced_signature_morphism(ident, k, k, identity_witness(ident, k), 1)
    assert not sm.anomalies
    for r in sm.source:
        assert sm.image[sm.mapping[r.name]].same_interp(r)


@given(seeds)
@settings(max_examples=25)
def test_images_lie_in_the_source_signature(seed):
    fam = family(seed)
    k1, k2 = fam.k1.concrete, fam.k2.concrete
    sigma1 = enumerate_sigma(k1, 1)
    for h in fam.functors:
        w = find_subconcrete_witness(h, k1, k2)
        sm = induced_signature_morphism(h, k1, k2, w, 1)
        assert not sm.anomalies
        for r in sm.image:
            assert sigma1.contains_interp(r)
        # the full unary symbol goes to the image of α
        full = next(r for r in sm.source if all(len(r.at(b)) == len(k2.carrier(b)) for b in k2.cat.objects))
        mapped = sm.image[sm.mapping[full.name]]
        assert all(mapped.at(a) == {(x,) for x in w.image(a)} for a in k1.cat.objects)


@given(seeds)
@settings(max_examples=25)
def test_reduct_square_and_reduct_witness(seed):
    fam = family(seed)
    k1, k2 = fam.k1.concrete, fam.k2.concrete
    for h in fam.functors:
        w = find_subconcrete_witness(h, k1, k2)
        sm = induced_signature_morphism(h, k1, k2, w, 1)
        assert check_reduct_square(h, k1, k2, w, sm)
        source = canonical_e(k1, sm.image).emb
        red, target = reduct_functor(sm, source)
        assert validate_witness(red, source.concrete, target.concrete, reduct_witness(red, source, target))


def test_empty_designated_carrier_gives_the_empty_structure():
    k1 = one("K1", "A", ("a",))
    k2 = one("K2", "Z", ())
    h = Functor(k1.cat, k2.cat, {"A": "Z"}, {"id_A": "id_Z"}, "H")
    w = find_subconcrete_witness(h, k1, k2)
    sm = induced_signature_morphism(h, k1, k2, w, 1)
    source = canonical_e(k1, sm.image).emb
    red, target = reduct_functor(sm, source)
    assert all(s.carrier == frozenset() for _, s in target.structures)


# ------------------------------------------------- coherence, transport


def test_identity_on_a_coherent_category():
    k = sets_with_injections(("a", "b"), 2)
    ident = identity_functor(k.cat)
    assert is_coherent(k)
    assert is_coherent_functor(ident, k, k, identity_witness(ident, k))
    assert is_transportable_functor(ident, k, k)


def test_product_projections_are_transportable_but_not_coherent():
    # Objects (S0, S0) and (S0, S1) of the product both project to the empty set in
    # the first factor, and the second factor has no morphism S1 -> S0, so the
    # empty function between them has no lift. Recorded as a finding, not a bug.
    k1 = sets_with_injections(("a", "b"), 1, "K1")
    k2 = sets_with_injections(("c", "d"), 1, "K2")
    p = product([k1, k2])
    for proj, k in zip(p.projections, (k1, k2)):
        w = find_subconcrete_witness(proj, p.concrete, k)
        assert is_transportable_functor(proj, p.concrete, k)
        v = is_coherent_functor(proj, p.concrete, k, w)
        assert not v
        h, g, f = v.witness
        assert f == {}


@given(seeds)
@settings(max_examples=30)
def test_concrete_reducts_are_coherent(seed):
    fam = family(seed)
    k1, k2 = fam.k1.concrete, fam.k2.concrete
    h = fam.functors[0]
    assert is_concrete(h, k1, k2)
    assert is_coherent_functor(h, k1, k2, identity_witness(h, k2))


def test_coherence_needs_a_valid_witness():
    k1, k2 = one("K1", "A", ("a",)), one("K2", "X", ("x",))
    h = Functor(k1.cat, k2.cat, {"A": "X"}, {"id_A": "id_X"}, "H")
    with pytest.raises(ValueError):
        is_coherent_functor(h, k1, k2, SubconcretenessWitness({"A": {}}))


def test_unreachable_iso_copy_breaks_transport():
    k2 = load_corpus("iso_pair").concrete("G")
    src = concrete_from_functions({"A": ("a1", "a2")}, [], "K1")
    h = Functor(src.cat, k2.cat, {"A": "A"}, {"id_A": "id_A"}, "H")
    v = is_transportable_functor(h, src, k2)
    assert not v and v.witness[0] == "A"


def test_restriction_functor_failure_is_real():
    # the bundled certificate: a subconcrete functor whose composite U2∘H is not coherent
    ws = load_corpus("lemma35_failure")
    h = ws.functors["H"]
    k1, k2 = ws.concrete("K1"), ws.concrete("K2")
    w = find_subconcrete_witness(h, k1, k2)
    assert w is not None
    assert not is_coherent_functor(h, k1, k2, w)


def test_witness_choice_never_changes_coherence():
    # the reflection verdict can depend on the chosen natural monotransformation,
    # but coherence is a property of U2 H alone
    splits = 0
    for i in range(60):
        fam = random_subconcrete_family(random.Random(instance_seed(0, i)), max_carrier=2, max_objects=12)
        if fam is None:
            continue
        k1, k2 = fam.k1.concrete, fam.k2.concrete
        for h in fam.functors:
            if not reflection_split(h, k1, k2):
                continue
            splits += 1
            per = [
                [dict(zip(k2.carrier(h.ob(a)), im)) for im in itertools.permutations(k1.carrier(a), len(k2.carrier(h.ob(a))))]
                for a in h.source.objects
            ]
            verdicts = set()
            for combo in itertools.product(*per):
                w = SubconcretenessWitness(dict(zip(h.source.objects, combo)))
                if validate_witness(h, k1, k2, w):
                    verdicts.add(bool(is_coherent_functor(h, k1, k2, w)))
            assert len(verdicts) == 1
    assert splits > 0

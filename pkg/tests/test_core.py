import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from piecat.core import (
    FAIL,
    STRUCTURAL,
    FinCategory,
    Functor,
    NatTrans,
    arrow_category,
    build_category,
    compose_functors,
    constant_functor,
    discrete_category,
    identity_functor,
    identity_nat,
    is_equivalence,
    is_essentially_surjective,
    is_faithful,
    is_full,
    is_isomorphism,
    is_mono,
    is_quasi_inverse_available,
    iter_functors,
    poset_category,
    terminal_category,
    validate_category,
    validate_functor,
    validate_nat,
)
from piecat.harness.generate import GeneratorConfig, random_concrete, random_table
from piecat.oracles import laws_hold

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def groupoid2() -> FinCategory:
    return build_category(
        ["A", "B"],
        {"s": ("A", "B"), "t": ("B", "A")},
        {("t", "s"): "id_A", ("s", "t"): "id_B"},
        name="G",
    )


def small_category(seed: int) -> FinCategory:
    rng = random.Random(seed)
    cfg = GeneratorConfig(max_objects=3, max_carrier=2, max_morphisms=8)
    k = None
    while k is None:
        k = random_concrete(rng, cfg, "K")
    return k.cat


# ----------------------------------------------------------- validation


def test_terminal_category_validates():
    assert validate_category(terminal_category())


def test_wrong_codomain_is_a_closure_failure():
    c = build_category(["A", "B", "C"], {"f": ("A", "B"), "g": ("B", "C"), "h": ("A", "C")}, {("g", "f"): "f"})
    v = validate_category(c)
    assert v.status == FAIL
    assert v.reason == "closure"
    assert v.witness == ("g", "f")


def test_dangling_entry_is_structural_not_a_law_failure():
    c = build_category(["A"], {}, {("id_A", "id_A"): "ghost"})
    v = validate_category(c)
    assert v.status == STRUCTURAL


def test_non_associative_monoid_fails():
    # y∘(x∘y) = x but (y∘x)∘y = y
    elems = ["e", "x", "y"]
    table = {}
    for g in elems:
        for f in elems:
            table[g, f] = f if g == "e" else g if f == "e" else "x"
    table["x", "y"] = "y"
    c = FinCategory(("*",), {m: ("*", "*") for m in elems}, {"*": "e"}, table, "M")
    assert laws_hold(c) is False
    assert not validate_category(c)


@given(seeds)
@settings(max_examples=300)
def test_validate_category_matches_brute_force(seed):
    c = random_table(random.Random(seed))
    assert bool(validate_category(c)) == laws_hold(c)


@given(seeds)
@settings(max_examples=50)
def test_validation_is_deterministic(seed):
    c = random_table(random.Random(seed))
    assert validate_category(c) == validate_category(c)


# ---------------------------------------------------- functors and nats


@given(seeds)
@settings(max_examples=40)
def test_identity_functor_and_nat_validate(seed):
    c = small_category(seed)
    ident = identity_functor(c)
    assert validate_functor(ident)
    assert validate_nat(identity_nat(ident))


def test_broken_naturality_square_is_reported():
    c = arrow_category()
    g = groupoid2()
    f = Functor(c, g, {"0": "A", "1": "A"}, {"id_0": "id_A", "id_1": "id_A", "u": "id_A"}, "F")
    h = Functor(c, g, {"0": "A", "1": "B"}, {"id_0": "id_A", "id_1": "id_B", "u": "s"}, "H")
    assert validate_nat(NatTrans(f, h, {"0": "id_A", "1": "s"}, "good"))
    # identity components from Id to the functor swapping two parallel arrows
    c2 = build_category(["A", "B"], {"p": ("A", "B"), "q": ("A", "B")}, name="P")
    k = identity_functor(c2, "K")
    assert validate_nat(NatTrans(k, k, {"A": "id_A", "B": "id_B"}, "same"))
    swap = Functor(c2, c2, {"A": "A", "B": "B"}, {"id_A": "id_A", "id_B": "id_B", "p": "q", "q": "p"}, "S")
    broken = NatTrans(k, swap, {"A": "id_A", "B": "id_B"}, "broken")
    v = validate_nat(broken)
    assert v.status == FAIL
    assert "p" in v.witness or "q" in v.witness


def test_functor_must_preserve_composition():
    c = poset_category(["p", "q", "r"], [("p", "q"), ("q", "r")])
    g = groupoid2()
    bad = Functor(
        c,
        g,
        {"p": "A", "q": "B", "r": "A"},
        {"p<=p": "id_A", "q<=q": "id_B", "r<=r": "id_A", "p<=q": "s", "q<=r": "t", "p<=r": "s"},
        "Bad",
    )
    assert not validate_functor(bad)


# ------------------------------------------------------ mono and isos


def test_identities_are_monos_and_isos():
    g = groupoid2()
    for a in g.objects:
        assert is_mono(g, g.id(a))
        assert is_isomorphism(g, g.id(a)) == g.id(a)


def test_arrow_has_no_inverse_and_swap_does():
    assert is_isomorphism(arrow_category(), "u") is None
    g = groupoid2()
    assert is_isomorphism(g, "s") == "t"
    assert is_isomorphism(g, "t") == "s"


def test_non_mono_found_by_enumeration():
    # u, v: A -> B with f∘u = f∘v for f: B -> C
    c = build_category(
        ["A", "B", "C"],
        {"u": ("A", "B"), "v": ("A", "B"), "f": ("B", "C"), "w": ("A", "C")},
        {("f", "u"): "w", ("f", "v"): "w"},
    )
    assert validate_category(c)
    assert not is_mono(c, "f")
    assert is_mono(c, "u")


@given(st.integers(1, 5), st.randoms(use_true_random=False))
def test_poset_morphisms_are_monos(n, r):
    objs = [f"p{i}" for i in range(n)]
    leq = [(a, b) for a in objs for b in objs if a < b and r.random() < 0.5]
    p = poset_category(objs, leq)
    assert all(is_mono(p, m) for m in p.morphisms)


# ------------------------------------------------ functor predicates


@given(seeds)
@settings(max_examples=40)
def test_identity_is_an_equivalence(seed):
    c = small_category(seed)
    ident = identity_functor(c)
    assert is_full(ident) and is_faithful(ident) and is_essentially_surjective(ident) and is_equivalence(ident)


def test_constant_from_discrete_pair_to_terminal():
    # hom(a, b) is empty but hom(*, *) is not, so fullness fails at (a, b)
    f = constant_functor(discrete_category(["a", "b"]), terminal_category(), "*")
    full = is_full(f)
    assert not full and full.witness[:2] == ("a", "b")
    assert is_faithful(f)
    assert is_essentially_surjective(f)
    assert not is_equivalence(f)


def test_non_full_subcategory_inclusion():
    big = build_category(["A", "B"], {"f": ("A", "B")})
    small = discrete_category(["A", "B"])
    inc = Functor(small, big, {"A": "A", "B": "B"}, {"id_A": "id_A", "id_B": "id_B"}, "inc")
    v = is_full(inc)
    assert not v and v.witness == ("A", "B", "f")


def test_groupoid_collapse_is_an_equivalence():
    g = groupoid2()
    t = terminal_category()
    f = constant_functor(g, t, "*")
    assert is_equivalence(f)


@given(seeds, seeds)
@settings(max_examples=60)
def test_equivalence_implies_quasi_inverse_data(s1, s2):
    src, tgt = small_category(s1), small_category(s2)
    f = next(iter_functors(src, tgt, rng=random.Random(s1 ^ s2), node_budget=5_000), None)
    if f is not None and is_equivalence(f):
        assert is_quasi_inverse_available(f)


# -------------------------------------------------------- composition


@given(seeds, seeds)
@settings(max_examples=60)
def test_composition_with_identity(s1, s2):
    src, tgt = small_category(s1), small_category(s2)
    f = next(iter_functors(src, tgt, rng=random.Random(s2), node_budget=5_000), None)
    if f is None:
        return
    for h in (compose_functors(f, identity_functor(tgt)), compose_functors(identity_functor(src), f)):
        assert h.obj_map == f.obj_map and h.mor_map == f.mor_map


@given(seeds, seeds, seeds)
@settings(max_examples=40)
def test_composite_of_generated_functors_validates(s1, s2, s3):
    a, b, c = small_category(s1), small_category(s2), small_category(s3)
    f = next(iter_functors(a, b, rng=random.Random(s1), node_budget=5_000), None)
    g = next(iter_functors(b, c, rng=random.Random(s2), node_budget=5_000), None)
    if f is None or g is None:
        return
    h = compose_functors(f, g)
    assert validate_functor(h)
    assert all(h.mor(m) == g.mor(f.mor(m)) for m in a.morphisms)


def test_composition_rejects_mismatch():
    f = identity_functor(arrow_category())
    g = identity_functor(terminal_category())
    with pytest.raises(ValueError):
        compose_functors(f, g)

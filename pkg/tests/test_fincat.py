from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from devhom import corpus
from devhom.errors import CategoryError
from devhom.fincat import (
    FinCategory,
    FunctorData,
    Morphism,
    analyze_category,
    arrow,
    build_from_spec,
    combine,
    compose_functors,
    coproduct,
    discrete,
    free_on_dag,
    full_subcategory,
    identity_functor,
    inclusion,
    initial_objects,
    is_isomorphism,
    is_loop_free,
    is_preorder,
    monoid,
    opposite,
    point,
    poset,
    posetal_reflection,
    product,
    slice,
    slice_of_functor,
    slice_over,
    terminal_objects,
    thin_category,
    to_point,
    validate_category,
    validate_functor,
)


def test_point_and_arrow():
    P = point()
    assert P.objects == ("*",) and P.n_morphisms == 1
    A = arrow()
    assert A.n_objects == 2 and A.n_morphisms == 3
    assert validate_category(A) == []


def test_poset_closes_transitively():
    C = poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert C.hom("a", "c") == ("a->c",)
    assert C.comp("b->c", "a->b") == "a->c"
    assert C.comp("id_b", "a->b") == "a->b"


def test_cyclic_relations_give_a_preorder():
    C = poset(["a", "b"], [("a", "b"), ("b", "a")])
    assert is_preorder(C) and not is_loop_free(C)
    P, _ = posetal_reflection(C)
    assert P.objects == ("a",)
    with pytest.raises(CategoryError):
        poset(["a"], [("a", "zz")])


def test_monoid_z2():
    Z2 = corpus.z2()
    assert Z2.n_objects == 1 and Z2.n_morphisms == 2
    assert validate_category(Z2) == []
    assert not is_loop_free(Z2)
    g = next(f for f in Z2.non_identities())
    assert Z2.is_identity(Z2.comp(g, g))


def test_free_on_dag_paths():
    C = free_on_dag(["x", "y", "z"], [("f", "x", "y"), ("g", "y", "z"), ("h", "x", "z")])
    assert set(C.hom("x", "z")) == {"g.f", "h"}
    assert C.comp("g", "f") == "g.f"
    assert validate_category(C) == []


def test_validate_reports_each_law():
    objs = ["a", "b"]
    ms = [Morphism("id_a", "a", "a"), Morphism("id_b", "b", "b"), Morphism("f", "a", "b")]
    ids = {"a": "id_a", "b": "id_b"}
    compose = {("id_b", "f"): "f", ("f", "id_a"): "f", ("id_a", "id_a"): "id_a", ("id_b", "id_b"): "id_b"}
    assert validate_category(FinCategory(objs, ms, ids, compose)) == []
    missing = dict(compose)
    del missing[("id_b", "f")]
    d = validate_category(FinCategory(objs, ms, ids, missing))
    assert [x.code for x in d] == ["composition-missing"] and d[0].ids == ("id_b", "f")
    wrong = dict(compose)
    wrong[("id_b", "f")] = "id_a"
    d = validate_category(FinCategory(objs, ms, ids, wrong))
    assert d[0].code == "composition-typing"
    ms2 = ms + [Morphism("g", "a", "b")]
    c2 = dict(compose)
    c2.update({("id_b", "g"): "g", ("g", "id_a"): "f"})
    d = validate_category(FinCategory(objs, ms2, ids, c2))
    assert d[0].code == "identity" and "g" in d[0].ids
    assert str(d[0]).startswith("identity @ (")


def test_associativity_violation():
    # one object, elements e, a, b with a made non-associative
    els = ["e", "a", "b"]
    table = {("e", x): x for x in els} | {(x, "e"): x for x in els}
    table |= {("a", "a"): "b", ("a", "b"): "a", ("b", "a"): "b", ("b", "b"): "b"}
    with pytest.raises(CategoryError) as e:
        monoid(els, "e", table)
    assert e.value.code == "associativity"
    assert e.value.diagnostics


def test_build_from_spec_shapes():
    C = build_from_spec({"objects": ["a", "b"], "morphisms": [{"id": "f", "dom": "a", "cod": "b"}], "compose": []})
    assert C.n_morphisms == 3 and C.identity("a") == "id_a"
    assert build_from_spec({"poset": {"elements": ["x", "y"], "relations": [["x", "y"]]}}).n_morphisms == 3
    assert build_from_spec({"discrete": 3}).n_objects == 3
    spec = corpus.circle().to_spec()
    assert build_from_spec(spec) == corpus.circle()
    with pytest.raises(CategoryError) as e:
        build_from_spec({"objects": ["a"], "morphisms": [{"id": "f", "dom": "a", "cod": "zz"}]})
    assert e.value.code == "unknown-object"


def test_slice_of_cospan():
    C = corpus.cospan()
    s = slice(C, "c")
    assert s.slice.n_objects == 3
    assert terminal_objects(s.slice) == ("(c, id_c)",)
    assert validate_category(s.slice) == []
    assert validate_functor(s.projection) == []
    s2 = slice_over(C, ["a", "b"], "c")
    assert s2.slice.n_objects == 2 and terminal_objects(s2.slice) == ()


def test_slice_counts_morphisms_into_x():
    rng = random.Random(3)
    for _ in range(15):
        C = corpus.random_dag_category(rng, 4)
        for X in C.objects:
            S = slice(C, X).slice
            assert S.n_objects == sum(len(C.hom(a, X)) for a in C.objects)
            assert validate_category(S) == []
            # identity of X is terminal in C/X
            assert f"({X}, {C.identity(X)})" in terminal_objects(S)


def test_slice_of_functor_matches_slice_for_identity():
    C = corpus.span()
    a = slice_of_functor(identity_functor(C), "a").slice
    b = slice(C, "a").slice
    assert a.n_objects == b.n_objects and a.n_morphisms == b.n_morphisms


def test_slice_unknown_object():
    with pytest.raises(CategoryError):
        slice(point(), "nope")


def test_product_and_coproduct_sizes():
    A, B = arrow(), corpus.cospan()
    P = product(A, B)
    assert P.n_objects == 6 and P.n_morphisms == A.n_morphisms * B.n_morphisms
    assert validate_category(P) == []
    S = coproduct(A, B)
    assert S.n_objects == 5 and S.n_morphisms == A.n_morphisms + B.n_morphisms
    assert "0:0" in S.objects and "1:a" in S.objects
    assert validate_category(S) == []


def test_opposite_is_involutive():
    C = corpus.circle()
    assert opposite(opposite(C)) == C
    assert terminal_objects(C) == initial_objects(opposite(C))


def test_full_subcategory_and_combine():
    C = corpus.circle()
    F = full_subcategory(C, ["v1", "e12", "v2"])
    assert F.n_objects == 3 and F.n_morphisms == 5
    assert combine("full_subcategory", C, objs=["v1"]).n_objects == 1
    with pytest.raises(CategoryError):
        combine("product", C)
    with pytest.raises(CategoryError):
        combine("bogus", C)


def test_analysis():
    a = analyze_category(corpus.chain_poset(4))
    assert a.terminal_objects == ("3",) and a.initial_objects == ("0",)
    assert a.loop_free and a.longest_chain == 3
    z = analyze_category(corpus.z2())
    assert not z.loop_free and z.longest_chain is None


def test_functors():
    C = corpus.circle()
    F = to_point(C)
    assert validate_functor(F) == []
    assert validate_functor(compose_functors(F, identity_functor(C))) == []
    assert is_isomorphism(identity_functor(C)) and not is_isomorphism(F)
    sub = full_subcategory(C, ["v1", "e12"])
    assert validate_functor(inclusion(sub, C)) == []
    bad = FunctorData(arrow(), arrow(), {"0": "1", "1": "0"}, {m.id: m.id for m in arrow().morphisms})
    assert validate_functor(bad)


def test_posetal_reflection():
    C = thin_category(["a", "b", "c"], lambda x, y: x in "ab" and y in "abc")
    P, F = posetal_reflection(C)
    assert P.objects == ("a", "c")
    assert F.object_map == {"a": "a", "b": "a", "c": "c"}
    assert validate_functor(F) == []
    with pytest.raises(CategoryError) as e:
        posetal_reflection(corpus.z2())
    assert e.value.code == "not-a-preorder"
    assert is_preorder(C) and not is_preorder(corpus.z2())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_random_constructions_are_categories(seed):
    rng = random.Random(seed)
    A, B = corpus.random_loop_free(rng), corpus.random_loop_free(rng)
    for C in (A, product(A, B), coproduct(A, B), opposite(A)):
        assert validate_category(C) == []


def test_discrete():
    D3 = discrete(3)
    assert D3.objects == ("0", "1", "2") and D3.non_identities() == ()

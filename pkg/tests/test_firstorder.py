from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from devhom.errors import FormulaSyntaxError, InstitutionError
from devhom.fincat import validate_category
from devhom.instances.firstorder import (
    GRAPH_FRAGMENT,
    all_structures,
    build_fo_institution,
    check_formula,
    enumerate_homomorphisms,
    evaluate,
    format_sexp,
    graphs_institution,
    make_structure,
    parse_sexp,
)

VARS = ("x", "y", "z")


def _satisfying(S, e):
    """Oracle: the set of assignments of VARS satisfying e, computed bottom-up."""
    all_envs = set(product(S.universe, repeat=len(VARS)))
    head = e[0]
    if head == "not":
        return all_envs - _satisfying(S, e[1])
    if head == "and":
        out = all_envs
        for a in e[1:]:
            out = out & _satisfying(S, a)
        return out
    if head == "or":
        out = set()
        for a in e[1:]:
            out = out | _satisfying(S, a)
        return out
    if head == "implies":
        return (all_envs - _satisfying(S, e[1])) | _satisfying(S, e[2])
    if head in ("exists", "forall"):
        i = VARS.index(e[1])
        body = _satisfying(S, e[2])
        out = set()
        for env in all_envs:
            variants = [env[:i] + (d,) + env[i + 1 :] for d in S.universe]
            ok = any(v in body for v in variants) if head == "exists" else all(v in body for v in variants)
            if ok:
                out.add(env)
        return out
    rel = S.rel(head)
    return {env for env in all_envs if tuple(env[VARS.index(v)] for v in e[1:]) in rel}


def _random_formula(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return ("E", rng.choice(VARS), rng.choice(VARS))
    k = rng.choice(["not", "and", "or", "implies", "exists", "forall"])
    if k == "not":
        return ("not", _random_formula(rng, depth - 1))
    if k in ("exists", "forall"):
        return (k, rng.choice(VARS), _random_formula(rng, depth - 1))
    return (k, _random_formula(rng, depth - 1), _random_formula(rng, depth - 1))


def _close(e):
    for v in VARS:
        e = ("forall", v, e)
    return e


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_tarski_matches_assignment_sets(seed):
    rng = random.Random(seed)
    e = _close(_random_formula(rng, 4))
    for S in all_structures({"E": 2}, 2):
        expected = bool(_satisfying(S, e)) if S.size else evaluate(S, e)
        assert evaluate(S, e) == expected


def test_open_formulas_against_assignment_sets():
    rng = random.Random(4)
    structs = all_structures({"E": 2}, 2)
    for _ in range(40):
        e = _random_formula(rng, 3)
        for S in structs[1:]:
            sat = _satisfying(S, e)
            for env in product(S.universe, repeat=3):
                assert evaluate(S, e, dict(zip(VARS, env))) == (env in sat)


def test_homomorphisms_against_brute_force():
    structs = all_structures({"E": 2}, 2)
    for A in structs:
        for B in structs:
            brute = [
                h
                for h in product(B.universe, repeat=A.size)
                if all(tuple(h[i - 1] for i in t) in B.rel("E") for t in A.rel("E"))
            ]
            assert enumerate_homomorphisms(A, B) == brute


def test_sexp_round_trip_and_errors():
    text = "(forall x (exists y (and (E x y) (not (E y x)))))"
    assert format_sexp(parse_sexp(text)) == text
    assert format_sexp(parse_sexp("  (E   x y) ")) == "(E x y)"
    for bad in ("(E x y", "E x y)", "()", ""):
        with pytest.raises(FormulaSyntaxError):
            parse_sexp(bad)
    assert check_formula(parse_sexp("(exists x (E x y))"), {"E": 2}) == {"y"}
    with pytest.raises(InstitutionError):
        check_formula(parse_sexp("(E x)"), {"E": 2})
    with pytest.raises(InstitutionError):
        check_formula(parse_sexp("(R x)"), {"E": 2})


def test_structures():
    S = make_structure(2, {"E": [(1, 2)]})
    assert S.id == "k2:E[(1,2)]"
    with pytest.raises(InstitutionError):
        make_structure(1, {"E": [(1, 2)]})
    # 1 + 2 + 16 labelled graphs with at most two vertices
    assert len(all_structures({"E": 2}, 2)) == 19


def test_graph_institution():
    g = graphs_institution(2)
    sig = g.signatures()[-1]
    assert sig == ("E",) and g.signatures()[0] == ()
    C = g.model_category(sig)
    assert C.n_objects == 19 and validate_category(C) == []
    assert set(g.formula_classes(sig)) == set(GRAPH_FRAGMENT)
    assert g.formula_classes(()) == ()
    phi = "(forall x (exists y (E x y)))"
    assert not g.satisfies(sig, "k1:E[]", phi)
    assert g.satisfies(sig, "k1:E[(1,1)]", phi)
    assert g.satisfies(sig, "k0:E[]", phi)  # vacuous on the empty universe
    with pytest.raises(InstitutionError):
        g.satisfies(sig, "nope", phi)
    assert g.classify(sig, "(forall  x (exists y (E x y)))") == phi
    # classes are compared by canonical text, without renaming bound variables
    with pytest.raises(InstitutionError):
        g.classify(sig, "(exists y (E y y))")


def test_bounds_and_closedness():
    with pytest.raises(InstitutionError) as e:
        build_fo_institution({"E": 2}, 2, ["(E x y)"])
    assert e.value.code == "non-closed-formula"
    with pytest.raises(InstitutionError) as e:
        build_fo_institution({"E": 2}, 4, [])
    assert e.value.code == "bound-too-large"
    with pytest.raises(InstitutionError):
        build_fo_institution({"E": 2, "R": 3}, 2, [])
    inst = build_fo_institution({"E": 2}, 1, ["(exists x (E x x))", "(exists  x (E x x))"])
    assert inst.fragment == ["(exists x (E x x))"]


def test_reduct_forgets_relations():
    inst = build_fo_institution({"P": 1, "Q": 1}, 1, ["(exists x (P x))", "(exists x (Q x))"])
    sm = next(s for s in inst.signature_morphisms() if s.source == ("P",) and s.target == ("P", "Q"))
    assert inst.reduct_model(sm, "k1:P[(1)];Q[(1)]") == "k1:P[(1)]"

from __future__ import annotations

import json
from itertools import combinations

import pytest

from devhom.errors import InstitutionError
from devhom.institution import (
    Budget,
    check_institution_axioms,
    closure,
    closure_and_theory,
    elementarily_equivalent,
    independence_status,
    models_of,
    semantic_consequence,
    theory_of_models,
)
from devhom.instances.firstorder import graphs_institution
from devhom.instances.propositional import PropositionalInstitution

SIG = (0, 1)


@pytest.fixture(scope="module")
def prop():
    return PropositionalInstitution(2)


def _models(inst, gamma):
    """Oracle: brute-force model set straight from ``satisfies``."""
    return {m for m in inst.model_category(SIG).objects if all(inst.satisfies(SIG, m, g) for g in gamma)}


def test_models_of_and_consequence(prop):
    classes = prop.formula_classes(SIG)
    for g1, g2 in combinations(classes, 2):
        gamma = [g1, g2]
        assert set(models_of(prop, SIG, gamma).models) == _models(prop, gamma)
        for phi in (0, 5, 15, g1):
            assert semantic_consequence(prop, SIG, gamma, phi) == (_models(prop, gamma) <= _models(prop, [phi]))


def test_closure_is_a_closure_operator(prop):
    classes = prop.formula_classes(SIG)
    for g in classes:
        c = closure(prop, SIG, [g])
        assert g in c
        assert closure(prop, SIG, c) == c
        for h in classes:
            if semantic_consequence(prop, SIG, [h], g):
                assert closure(prop, SIG, [g]) <= closure(prop, SIG, [h])


def test_closure_and_theory(prop):
    a = prop.classify(SIG, "[0 & 1]")
    st = closure_and_theory(prop, SIG, [a])
    assert not st.is_theory and st.consistent and st.given == {a}
    assert closure_and_theory(prop, SIG, st.gamma).is_theory
    bottom = prop.classify(SIG, "[0 & ~0]")
    assert not closure_and_theory(prop, SIG, [bottom]).consistent
    assert closure(prop, SIG, [bottom]) == frozenset(prop.formula_classes(SIG))


def test_theory_of_models_galois(prop):
    ms = prop.model_category(SIG).objects
    for k in range(len(ms) + 1):
        for U in combinations(ms, k):
            T = theory_of_models(prop, SIG, U)
            assert set(U) <= set(models_of(prop, SIG, T).models)
    assert theory_of_models(prop, SIG, []) == frozenset(prop.formula_classes(SIG))
    with pytest.raises(InstitutionError):
        theory_of_models(prop, SIG, ["nope"])


def test_elementary_equivalence(prop):
    ms = prop.model_category(SIG).objects
    assert elementarily_equivalent(prop, SIG, ms[0], ms[0])
    assert not elementarily_equivalent(prop, SIG, ms[0], ms[1])
    g = graphs_institution(2)
    sig = g.signatures()[-1]
    # the one-vertex loop and the two-vertex complete graph with loops agree on the fragment
    assert elementarily_equivalent(g, sig, "k1:E[(1,1)]", "k2:E[(1,1),(1,2),(2,1),(2,2)]")


def test_independence_status(prop):
    gamma = closure(prop, SIG, [prop.classify(SIG, "0")])
    assert independence_status(prop, SIG, gamma, prop.classify(SIG, "[0 | 1]")) == "provable"
    assert independence_status(prop, SIG, gamma, prop.classify(SIG, "~0")) == "refutable"
    assert independence_status(prop, SIG, gamma, prop.classify(SIG, "1")) == "independent"
    with pytest.raises(InstitutionError) as e:
        independence_status(prop, SIG, [prop.classify(SIG, "0")], 3)
    assert e.value.code == "gamma-not-a-theory"


def test_resolve_accepts_text_and_ids(prop):
    assert prop.resolve(SIG, 6) == 6
    assert prop.resolve(SIG, "[0 & 1]") == prop.classify(SIG, "[0 & 1]")
    with pytest.raises(InstitutionError):
        prop.resolve(SIG, 3.5)


def test_axiom_report_json_and_budget(prop):
    rep = check_institution_axioms(prop)
    data = json.loads(json.dumps(rep.to_json()))
    assert data["schema"] == "devhom/1" and [c["name"] for c in data["checks"]] == ["I1", "I2", "pi-coherence"]
    small = check_institution_axioms(prop, Budget(max_classes=3, max_models=2))
    assert small.truncated and small.ok
    assert small.check("I1").cases < rep.check("I1").cases


def test_graph_institution_axioms():
    rep = check_institution_axioms(graphs_institution(2))
    assert rep.ok
    # graphs have isomorphic distinct structures, so invariance is exercised
    assert rep.check("I2").cases > 0

from __future__ import annotations

import json

import pytest

from devhom import corpus
from devhom.errors import ComplexError, InstitutionError, InvariantBreach
from devhom.deviation import (
    curvature_hierarchy,
    deviation_category,
    deviation_report,
    homological_asphericity,
    proof_system_from_institution,
    proof_system_from_preorder,
    theorem_status,
)
from devhom.fincat import discrete, point
from devhom.homalg import HomologyGroup
from devhom.institution import closure
from devhom.instances.firstorder import GRAPH_FRAGMENT, graphs_institution
from devhom.instances.propositional import PropositionalInstitution

SIG = (0, 1)


@pytest.fixture(scope="module")
def prop():
    return PropositionalInstitution(2)


@pytest.fixture(scope="module")
def graphs():
    return graphs_institution(2)


def test_satisfied_formulas_have_trivial_deviation(prop):
    for m in prop.model_category(SIG).objects:
        sat = [phi for phi in prop.formula_classes(SIG) if prop.satisfies(SIG, m, phi)]
        rep = deviation_report(prop, SIG, sat, m)
        assert rep.satisfied and rep.quasi_model and not rep.errant
        for f in rep.per_formula:
            assert f.chi.chi == 1 and f.certificate == f"({m}, id_{m})"


def test_satisfied_graph_formulas_have_chi_one(graphs):
    # these slices have automorphisms, so no finite chain count exists
    sig = ("E",)
    for m in ("k2:E[(1,2)]", "k1:E[]", "k0:E[]"):
        rep = deviation_report(graphs, sig, list(GRAPH_FRAGMENT), m)
        for f in rep.per_formula:
            if f.satisfied:
                assert f.certificate and f.aspherical and f.chi.chi == 1
            assert (f.chi.chi is not None and f.chi.chi != 1) == (f.formula in rep.curvature_set)


def test_unsatisfied_propositional_formulas_are_curvature(prop):
    # the model category is discrete, so a failing formula has an empty slice
    for m in prop.model_category(SIG).objects:
        bad = [phi for phi in prop.formula_classes(SIG) if not prop.satisfies(SIG, m, phi)]
        rep = deviation_report(prop, SIG, bad, m)
        assert all(f.slice_size == 0 and f.chi.chi == 0 and not f.aspherical for f in rep.per_formula)
        assert list(rep.curvature_set) == [f.formula for f in rep.per_formula]


def test_report_json_shape(prop):
    m = prop.model_category(SIG).objects[1]
    data = deviation_report(prop, SIG, ["0", "[0 & 1]"], m, D=3).to_json()
    assert list(data) == ["schema", "sigma", "model", "truncation", "conventions", "per_formula", "errant", "curvature_set", "quasi_model"]
    row = data["per_formula"][0]
    assert list(row) == ["formula", "satisfied", "homology", "chi", "aspherical"]
    assert [h["n"] for h in row["homology"]] == [0, 1, 2]
    assert data["curvature_set"] == [data["per_formula"][1]["formula"]]
    json.dumps(data)


def test_jobs_do_not_change_the_report(graphs):
    sig = ("E",)
    for m in ("k2:E[(1,2)]", "k1:E[]", "k0:E[]"):
        a = deviation_report(graphs, sig, list(GRAPH_FRAGMENT), m).to_json()
        b = deviation_report(graphs, sig, list(GRAPH_FRAGMENT), m, jobs=4).to_json()
        assert a == b


def test_isomorphic_models_have_equal_reports(graphs):
    sig = ("E",)
    # models with loops have slices whose degree-4 nerves are far too large
    for a, b in [("k2:E[(1,2)]", "k2:E[(2,1)]")]:
        ra = deviation_report(graphs, sig, list(GRAPH_FRAGMENT), a).to_json()
        rb = deviation_report(graphs, sig, list(GRAPH_FRAGMENT), b).to_json()
        assert ra.pop("model") == a and rb.pop("model") == b
        assert ra == rb


def test_oversized_nerves_are_refused(graphs):
    with pytest.raises(ComplexError) as e:
        deviation_report(graphs, ("E",), ["(exists x (E x x))"], "k2:E[(1,1)]")
    assert e.value.code == "too-large"
    rep = deviation_report(graphs, ("E",), ["(exists x (E x x))"], "k2:E[(1,1)]", D=2)
    assert rep.satisfied and rep.per_formula[0].aspherical


def test_deviation_category_contents(graphs):
    sig = ("E",)
    phi = "(forall x (exists y (E x y)))"
    s = deviation_category(graphs, sig, [phi], "k1:E[]")
    # models of phi mapping into a single vertex without edges: only the empty graph
    assert s.slice.n_objects == 1 and s.slice.objects[0].startswith("(k0:E[]")
    with pytest.raises(InstitutionError):
        deviation_category(graphs, sig, [phi], "nope")


def test_satisfaction_without_terminal_is_a_breach():
    class Lying(PropositionalInstitution):
        def satisfies(self, sigma, model, phi):
            return True

    inst = Lying(1)
    m = inst.model_category((0,)).objects[0]
    with pytest.raises(InvariantBreach):
        deviation_report(inst, (0,), [0], m)


def test_truncation_bound(prop):
    with pytest.raises(ValueError):
        deviation_report(prop, SIG, [1], prop.model_category(SIG).objects[0], D=1)


def test_asphericity():
    assert homological_asphericity(point()).certificate == "*"
    assert not homological_asphericity(discrete(0)).aspherical
    assert not homological_asphericity(discrete(2)).aspherical
    a = homological_asphericity(corpus.circle())
    assert not a.aspherical and a.homology[1] == HomologyGroup(1)
    # the cone on the circle is contractible without a terminal object check
    assert homological_asphericity(corpus.sphere2()).aspherical is False


def test_theorem_status_agrees_with_closure(prop):
    for seed in prop.formula_classes(SIG):
        gamma = closure(prop, SIG, [seed])
        view = proof_system_from_institution(prop, SIG, gamma)
        assert view.closed
        for phi in view.formulas:
            ev = theorem_status(view, phi)
            assert ev.derivable == (view.names[phi] in gamma or any(
                prop.spectrum(SIG).mask(g) == prop.spectrum(SIG).mask(view.names[phi]) for g in gamma))
            assert ev.status == ("theorem" if ev.derivable else "non-theorem")


def test_theorem_status_needs_closed_gamma(prop):
    view = proof_system_from_institution(prop, SIG, [prop.classify(SIG, "0")])
    assert not view.closed
    with pytest.raises(InstitutionError) as e:
        theorem_status(view, view.formulas[0])
    assert e.value.code == "gamma-not-closed"
    closed = proof_system_from_institution(prop, SIG, closure(prop, SIG, [prop.classify(SIG, "0")]))
    with pytest.raises(InstitutionError):
        theorem_status(closed, "nope")


def test_curvature_of_the_circle_preorder():
    elems = corpus.CIRCLE_ELEMENTS + ["phi", "psi"]
    derives = list(corpus.CIRCLE_RELATIONS) + [(e, "phi") for e in corpus.CIRCLE_ELEMENTS]
    view = proof_system_from_preorder(elems, derives, corpus.CIRCLE_ELEMENTS + ["phi"])
    assert view.closed
    labels = {c.formula: c for c in curvature_hierarchy(view)}
    assert labels["phi"].label == "theorem"
    assert labels["psi"].label == "void"
    for e in corpus.CIRCLE_ELEMENTS:
        assert labels[e].label == "theorem"
    # Γ without phi: the slice over phi is the circle itself
    view2 = proof_system_from_preorder(elems, derives, corpus.CIRCLE_ELEMENTS)
    assert not view2.closed
    c = {c.formula: c for c in curvature_hierarchy(view2)}["phi"]
    assert c.label == "1-curvature" and c.k == 1 and not c.lower_bound
    assert c.cohomology[1] == HomologyGroup(1)


def test_propositional_labels_are_theorem_or_void(prop):
    for seed in prop.formula_classes(SIG):
        view = proof_system_from_institution(prop, SIG, closure(prop, SIG, [seed]))
        labels = curvature_hierarchy(view)
        assert {c.label for c in labels} <= {"theorem", "void"}
        for c in labels:
            assert (c.label == "theorem") == theorem_status(view, c.formula).derivable


def test_preorder_collapses_equivalent_formulas():
    view = proof_system_from_preorder(["a", "b", "c"], [("a", "b"), ("b", "a"), ("b", "c")], ["b", "c"])
    assert view.formulas == ("a", "c") and view.gamma == ("a", "c") and view.closed

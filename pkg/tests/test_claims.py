from __future__ import annotations

import json
from math import prod

import pytest

from devhom import corpus
from devhom.claims import (
    CLAIMS,
    check_coproducts,
    check_fields,
    check_filtered,
    check_products,
    homology,
    verify_claims,
)
from devhom.errors import InvariantBreach
from devhom.fincat import coproduct, product


def _kunneth_betti(A, B, n, D=6):
    """Betti numbers of a product from the factors (torsion-free factors only)."""
    HA, HB = homology(A, D), homology(B, D)
    assert all(not HA[k].torsion and not HB[k].torsion for k in range(D))
    return sum(HA[i].betti * HB[n - i].betti for i in range(n + 1))


def test_product_rows_against_kunneth():
    rep = check_products()
    assert not rep.asserted and len(rep.rows) == 5
    for row, (a, b) in zip(rep.rows, [("arrow", "arrow"), ("discrete2", "arrow"), ("circle", "arrow"), ("discrete2", "discrete2"), ("circle", "point")]):
        A, B = corpus.named(a), corpus.named(b)
        for d in row["degrees"]:
            assert d["product"]["betti"] == _kunneth_betti(A, B, d["n"])
        assert row["coproduct_reading_agrees"]
    # an arrow times an arrow is connected, while the sum has two components
    aa = next(r for r in rep.rows if r["pair"] == "arrow x arrow")
    assert aa["degrees"][0]["product"]["betti"] == 1 and not aa["agrees"]


def test_coproducts_include_point_and_circle():
    rep = check_coproducts(seed=3, count=4)
    assert rep.asserted and rep.agrees and len(rep.rows) == 5
    first = rep.rows[0]
    assert first["pair"] == "point + circle"
    assert [d["coproduct"]["betti"] for d in first["degrees"][:2]] == [2, 1]


def test_coproduct_breach_is_raised(monkeypatch):
    import devhom.claims as claims

    # swap in a product to stand in for a broken disjoint union
    monkeypatch.setattr(claims, "coproduct", lambda A, B: product(A, B))
    with pytest.raises(InvariantBreach):
        claims.check_coproducts([("arrow", "arrow")])


def test_filtered_rows():
    rep = check_filtered(seed=2, count=4)
    assert rep.agrees and len(rep.rows) == 4
    for row in rep.rows:
        assert row["union"] == row["colimit"]
        assert len(row["inclusions"]) == len(row["stages"]) - 1


def test_fields_rows():
    rep = check_fields((2, 3), 3)
    assert rep.agrees
    assert [r["p"] for r in rep.rows] == [2, 3, "mixed"]
    assert rep.rows[1]["H0_units"] == rep.rows[1]["expected_H0"]
    assert rep.rows[2]["H0_rank"] == 2 and rep.rows[2]["matches_coproduct_of_slices"]


def test_verify_claims_dispatch():
    assert CLAIMS == ("products", "coproducts", "filtered", "fields")
    rep = verify_claims("fields", {"primes": [5], "degree_bound": 2})
    data = json.loads(json.dumps(rep.to_json()))
    assert list(data) == ["schema", "claim", "asserted", "verdict", "rows"] and data["verdict"] == "agree"
    with pytest.raises(ValueError):
        verify_claims("nope")


def test_coproduct_homology_adds_on_corpus():
    names = ["circle", "rp2", "z2", "cospan"]
    for a in names:
        for b in names:
            A, B = corpus.named(a), corpus.named(b)
            HS = homology(coproduct(A, B), 3)
            HA, HB = homology(A, 3), homology(B, 3)
            for n in range(3):
                assert HS[n].betti == HA[n].betti + HB[n].betti
                # torsion subgroups have multiplicative orders
                assert prod(HS[n].torsion) == prod(HA[n].torsion) * prod(HB[n].torsion)

"""Desk-scale checkers for homology statements about products, coproducts,
sequential unions of posets and the finite-field site over Spec(Z).

Each checker computes both sides of a statement independently and reports
them side by side. Only coproduct additivity is enforced; the others are
evidence.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from devhom import corpus
from devhom.errors import InvariantBreach
from devhom.fincat import FinCategory, analyze_category, coproduct, inclusion, poset, product
from devhom.homalg import (
    HomologyGroup,
    direct_sum,
    homology_basis,
    homology_of_complex,
    induced_homology_map,
    is_isomorphism,
)
from devhom.instances.fields import build_field_site
from devhom.simplicial import assemble_chain_complex, assemble_cochain_complex, chain_map_of_functor

SCHEMA = "devhom/1"
CLAIMS = ("products", "coproducts", "filtered", "fields")


def _g(h: HomologyGroup) -> dict:
    return {"betti": h.betti, "torsion": list(h.torsion)}


def homology(C: FinCategory, D: int) -> dict[int, HomologyGroup]:
    return homology_of_complex(assemble_chain_complex(C, None, D))


def _degrees(D: int) -> range:
    # the top degree of a truncated complex is only trusted when the complex is complete
    return range(D)


@dataclass
class ClaimReport:
    claim: str
    asserted: bool
    rows: list[dict] = field(default_factory=list)

    @property
    def agrees(self) -> bool:
        return all(r["agrees"] for r in self.rows)

    @property
    def verdict(self) -> str:
        return "agree" if self.agrees else "disagree"

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "claim": self.claim,
            "asserted": self.asserted,
            "verdict": self.verdict,
            "rows": self.rows,
        }


def _as_category(x) -> tuple[str, FinCategory]:
    if isinstance(x, FinCategory):
        return repr(x), x
    return x, corpus.named(x)


DEFAULT_PRODUCT_PAIRS = [("arrow", "arrow"), ("discrete2", "arrow"), ("circle", "arrow"), ("discrete2", "discrete2"), ("circle", "point")]


def check_products(pairs: Sequence = DEFAULT_PRODUCT_PAIRS, D: int = 4) -> ClaimReport:
    """H_n(A x B) against H_n(A) + H_n(B); the coproduct A + B is listed too."""
    rep = ClaimReport("products", asserted=False)
    for a, b in pairs:
        na, A = _as_category(a)
        nb, B = _as_category(b)
        HP = homology(product(A, B), D)
        HA, HB = homology(A, D), homology(B, D)
        HC = homology(coproduct(A, B), D)
        degs = []
        for n in _degrees(D):
            s = direct_sum(HA[n], HB[n])
            degs.append({
                "n": n,
                "product": _g(HP[n]),
                "direct_sum": _g(s),
                "coproduct": _g(HC[n]),
                "product_matches_sum": HP[n] == s,
                "coproduct_matches_sum": HC[n] == s,
            })
        rep.rows.append({
            "pair": f"{na} x {nb}",
            "degrees": degs,
            "agrees": all(d["product_matches_sum"] for d in degs),
            "coproduct_reading_agrees": all(d["coproduct_matches_sum"] for d in degs),
        })
    return rep


def check_coproducts(pairs: Sequence | None = None, D: int = 4, seed: int = 0, count: int = 20) -> ClaimReport:
    """H_n(A + B) = H_n(A) + H_n(B); a failure is an invariant breach."""
    if pairs is None:
        rng = random.Random(seed)
        pairs = [("point", "circle")] + [(corpus.random_loop_free(rng), corpus.random_loop_free(rng)) for _ in range(count)]
    rep = ClaimReport("coproducts", asserted=True)
    for a, b in pairs:
        na, A = _as_category(a)
        nb, B = _as_category(b)
        HS = homology(coproduct(A, B), D)
        HA, HB = homology(A, D), homology(B, D)
        degs = []
        for n in range(D + 1):
            s = direct_sum(HA[n], HB[n])
            if HS[n] != s:
                raise InvariantBreach("coproduct-additivity", f"{na} + {nb}: H_{n} is {HS[n]}, summands give {s}")
            degs.append({"n": n, "coproduct": _g(HS[n]), "direct_sum": _g(s)})
        rep.rows.append({"pair": f"{na} + {nb}", "degrees": degs, "agrees": True})
    return rep


def _stage_category(stage) -> FinCategory:
    elems, rels = stage
    return poset(elems, rels)


def check_filtered(chains: Sequence | None = None, D: int = 4, seed: int = 0, count: int = 10) -> ClaimReport:
    """Homology of the union of a nested poset sequence against the
    stabilized stage, with the induced maps of the stage inclusions."""
    if chains is None:
        rng = random.Random(seed)
        chains = [corpus.random_nested_chain(rng, stages=4, stabilize_at=rng.randint(1, 3)) for _ in range(count)]
    rep = ClaimReport("filtered", asserted=False)
    for idx, stages in enumerate(chains):
        cats = [_stage_category(s) for s in stages]
        union_elems = list(dict.fromkeys(e for s in stages for e in s[0]))
        union_rels = list(dict.fromkeys(r for s in stages for r in s[1]))
        U = poset(union_elems, union_rels)
        stab = next(j for j in range(len(cats)) if all(c == cats[j] for c in cats[j:]))
        complexes = [assemble_chain_complex(C, None, D) for C in cats]
        Hs = [homology_of_complex(cx) for cx in complexes]
        HU = homology(U, D)
        maps = []
        for j in range(len(cats) - 1):
            F = inclusion(cats[j], cats[j + 1])
            induced = induced_homology_map(complexes[j], complexes[j + 1], chain_map_of_functor(F, D))
            iso = all(
                is_isomorphism(homology_basis(complexes[j], n), homology_basis(complexes[j + 1], n), induced[n])
                for n in _degrees(D)
            )
            maps.append({"from": j + 1, "to": j + 2, "iso": iso})
        union_ok = all(HU[n] == Hs[stab][n] for n in _degrees(D))
        maps_ok = all(m["iso"] for m in maps[stab:])
        rep.rows.append({
            "chain": idx,
            "stages": [len(s[0]) for s in stages],
            "stabilizes_at": stab + 1,
            "union": [_g(HU[n]) for n in _degrees(D)],
            "colimit": [_g(Hs[stab][n]) for n in _degrees(D)],
            "inclusions": maps,
            "agrees": union_ok and maps_ok,
        })
    return rep


def check_fields(primes: Sequence[int] = (2, 3, 5), degree_bound: int = 4, D: int = 4) -> ClaimReport:
    """Per characteristic: the slice over Spec(Z) is acyclic, and with units
    coefficients H^0 = Z/(p-1) and H^1 = 0. On the mixed site H_0 has one
    free summand per characteristic."""
    site = build_field_site(primes, degree_bound)
    rep = ClaimReport("fields", asserted=False)
    for p in site.primes:
        s = site.slice_over_spec_z(p)
        S = s.slice
        term = analyze_category(S).terminal_objects
        H = homology(S, D)
        aspherical = H[0].is_Z() and all(H[n].is_zero() for n in range(1, D))
        Hu = homology_of_complex(assemble_cochain_complex(S, site.units_on(s), D))
        expected = HomologyGroup(0, (p - 1,) if p > 2 else ())
        rep.rows.append({
            "p": p,
            "terminal": list(term),
            "aspherical": aspherical,
            "H0_units": str(Hu[0]),
            "H1_units": str(Hu[1]),
            "expected_H0": str(expected),
            "agrees": aspherical and Hu[0] == expected and Hu[1].is_zero(),
        })
    mixed = site.slice_over_spec_z()
    Hm = homology(mixed.slice, D)
    parts = [site.slice_over_spec_z(p).slice for p in site.primes]
    glued = parts[0]
    for P in parts[1:]:
        glued = coproduct(glued, P)
    Hg = homology(glued, D)
    rep.rows.append({
        "p": "mixed",
        "H0_rank": Hm[0].betti,
        "expected_H0_rank": len(site.primes),
        "matches_coproduct_of_slices": all(Hm[n] == Hg[n] for n in range(D)),
        "agrees": Hm[0].betti == len(site.primes) and all(Hm[n].is_zero() for n in range(1, D)),
    })
    return rep


def verify_claims(which: str, config: Mapping | None = None) -> ClaimReport:
    config = dict(config or {})
    if which == "products":
        return check_products(**config)
    if which == "coproducts":
        return check_coproducts(**config)
    if which == "filtered":
        return check_filtered(**config)
    if which == "fields":
        return check_fields(**config)
    raise ValueError(f"unknown claim {which!r}; choose from {', '.join(CLAIMS)}")

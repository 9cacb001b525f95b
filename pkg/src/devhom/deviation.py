"""Deviation of a structure from a theory, measured by homology of slices.

For a model M and formula phi the deviation category is the slice of the
phi-models over M. When M satisfies phi it has the terminal object (M, id);
when it does not, its homology records how far M is from being a model.
Asphericity here means homological acyclicity up to the truncation degree.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from devhom.errors import InstitutionError, InvariantBreach
from devhom.fincat import (
    FinCategory,
    SliceResult,
    analyze_category,
    posetal_reflection,
    slice_over,
    thin_category,
)
from devhom.homalg import EulerData, HomologyGroup, euler_characteristic, homology_of_complex
from devhom.institution import Institution, closure, models_of
from devhom.simplicial import (
    CoefficientSystem,
    assemble_chain_complex,
    assemble_cochain_complex,
    constant_coefficients,
    nerve_euler_characteristic,
    pullback_coefficients,
)

SCHEMA = "devhom/1"


def deviation_category(inst: Institution, sigma, gamma: Iterable, model: str) -> SliceResult:
    """Mod_Σ[Γ]/M, whose projection to the model category is the deviation functor."""
    C = inst.model_category(sigma)
    if model not in C.identities:
        raise InstitutionError("unknown-model", f"no model {model!r}", (model,))
    gamma = [inst.resolve(sigma, phi) for phi in gamma]
    return slice_over(C, models_of(inst, sigma, gamma).models, model)


@dataclass(frozen=True)
class Asphericity:
    aspherical: bool
    certificate: str | None
    homology: Mapping[int, HomologyGroup] | None = None


def homological_asphericity(C: FinCategory, D: int = 4, homology: Mapping[int, HomologyGroup] | None = None) -> Asphericity:
    """H_0 = Z and H_n = 0 for 1 <= n <= D-1; a terminal object certifies
    this without matrix work."""
    if not C.objects:
        return Asphericity(False, None, homology)
    term = analyze_category(C).terminal_objects
    if term:
        return Asphericity(True, term[0], homology)
    H = homology if homology is not None else homology_of_complex(assemble_chain_complex(C, None, D))
    ok = H[0].is_Z() and all(H[n].is_zero() for n in range(1, D))
    return Asphericity(ok, None, H)


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class FormulaDeviation:
    formula: str
    formula_class: Hashable
    satisfied: bool
    slice_size: int
    homology: Mapping[int, HomologyGroup]
    cohomology: Mapping[int, HomologyGroup]
    chi: EulerData
    aspherical: bool
    certificate: str | None
    exact_above: bool

    def to_json(self, D: int) -> dict:
        return {
            "formula": self.formula,
            "satisfied": self.satisfied,
            "homology": [
                {"n": n, "betti": self.homology[n].betti, "torsion": list(self.homology[n].torsion)}
                for n in range(D)
            ],
            "chi": self.chi.chi,
            "aspherical": self.aspherical,
        }


@dataclass(frozen=True)
class DeviationReport:
    sigma: str
    model: str
    truncation: int
    per_formula: tuple[FormulaDeviation, ...]
    conventions: Mapping[str, object] = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return all(f.satisfied for f in self.per_formula)

    @property
    def curvature_set(self) -> tuple[str, ...]:
        return tuple(f.formula for f in self.per_formula if f.chi.chi is not None and f.chi.chi != 1)

    @property
    def errant(self) -> bool:
        return bool(self.curvature_set)

    @property
    def quasi_model(self) -> bool:
        return all(f.aspherical for f in self.per_formula)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "sigma": self.sigma,
            "model": self.model,
            "truncation": self.truncation,
            "conventions": dict(self.conventions),
            "per_formula": [f.to_json(self.truncation) for f in self.per_formula],
            "errant": self.errant,
            "curvature_set": list(self.curvature_set),
            "quasi_model": self.quasi_model,
        }


def _conventions(T: CoefficientSystem | None, D: int) -> dict:
    return {
        "homology": "normalized nerve chains, coefficients constant Z unless a covariant system is given, value at chain source"
        if T is None or T.variance == "contravariant"
        else "normalized nerve chains, given covariant coefficients pulled back along the deviation functor",
        "cohomology": "normalized nerve cochains, coefficients constant Z unless a contravariant system is given, value at chain source"
        if T is None or T.variance == "covariant"
        else "normalized nerve cochains, given contravariant coefficients pulled back along the deviation functor",
        "asphericity": f"H_0 = Z and H_n = 0 for 1 <= n <= {D - 1}",
        "chi": "alternating sum of free ranks; from counts of all nondegenerate chains when the slice is loop-free and deeper than the truncation; from the value at a terminal object when the slice has one; null otherwise",
        "universe": "relative to the declared finite model universe",
    }


def _formula_deviation(inst, sigma, model, phi, T, D) -> FormulaDeviation:
    s = deviation_category(inst, sigma, [phi], model)
    S = s.slice
    if T is not None and T.variance == "covariant":
        cx = assemble_chain_complex(S, pullback_coefficients(T, s.projection), D)
    else:
        cx = assemble_chain_complex(S, constant_coefficients(S), D)
    if T is not None and T.variance == "contravariant":
        co = assemble_cochain_complex(S, pullback_coefficients(T, s.projection), D)
    else:
        co = assemble_cochain_complex(S, constant_coefficients(S, variance="contravariant"), D)
    H = homology_of_complex(cx)
    Hc = homology_of_complex(co)
    TS = pullback_coefficients(T, s.projection) if T is not None and T.variance == "covariant" else None
    asph = homological_asphericity(S, D, H if TS is None else None)
    chi = euler_characteristic(cx, H)
    if chi.chi is None:
        chi = nerve_euler_characteristic(S, TS)
    if chi.chi is None and asph.certificate:
        # a terminal object makes homology vanish in every positive degree,
        # leaving the free rank of the value there
        t = asph.certificate
        chi = EulerData(TS.groups[t].free_rank if TS else 1, "terminal object", True)
    sat = inst.satisfies(sigma, model, phi)
    if sat and not asph.certificate:
        raise InvariantBreach("satisfied-without-terminal", f"{model} satisfies {phi!r} but its slice has no terminal object")
    return FormulaDeviation(
        inst.describe(sigma, phi), phi, sat, S.n_objects, H, Hc, chi, asph.aspherical, asph.certificate, cx.exact_above
    )


def deviation_report(
    inst: Institution,
    sigma,
    gamma: Sequence,
    model: str,
    T: CoefficientSystem | None = None,
    D: int = 4,
    jobs: int = 1,
) -> DeviationReport:
    """Per-formula homology of the deviation categories of ``model``.

    ``T`` (on the model category) replaces constant Z on the route of its
    variance. ``jobs`` > 1 computes formulas concurrently; the result does
    not depend on it.
    """
    if D < 2:
        raise ValueError("truncation must be at least 2")
    gamma = [inst.resolve(sigma, phi) for phi in gamma]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(lambda phi: _formula_deviation(inst, sigma, model, phi, T, D), gamma))
    else:
        rows = [_formula_deviation(inst, sigma, model, phi, T, D) for phi in gamma]
    return DeviationReport(inst.describe_signature(sigma), model, D, tuple(rows), _conventions(T, D))


# ---------------------------------------------------------------------------
# Proof systems


@dataclass(frozen=True)
class ProofSystemView:
    """A consequence preorder reflected to a poset, with a theory Γ.

    ``poset`` has one object per formula up to mutual derivability; ``gamma``
    lists the objects of Γ; ``closed`` records whether Γ is upward closed
    (deductively closed for a single-premise consequence relation).
    """

    poset: FinCategory
    gamma: tuple[str, ...]
    names: Mapping[str, Hashable]
    closed: bool
    multi_premise: bool = False

    @property
    def formulas(self) -> tuple[str, ...]:
        return self.poset.objects

    def derives(self, phi: str) -> bool:
        """Γ ⊢ φ for a closed Γ: membership, by triviality plus closure."""
        return phi in self.gamma

    def slice(self, phi: str) -> SliceResult:
        return slice_over(self.poset, self.gamma, phi)


def _upward_closed(P: FinCategory, gamma: Sequence[str]) -> bool:
    g = set(gamma)
    return all(P.cod(f) in g for a in gamma for f in P.out_of(a))


def proof_system_from_preorder(elements: Sequence[str], derivations: Iterable[tuple[str, str]], gamma: Iterable[str]) -> ProofSystemView:
    """Single-premise ⊢ given by pairs (φ, ψ) meaning φ ⊢ ψ (closed reflexively and transitively)."""
    from devhom.fincat import poset

    pre = poset(elements, derivations)
    P, q = posetal_reflection(pre)
    g = []
    for x in gamma:
        r = q.object_map[str(x)]
        if r not in g:
            g.append(r)
    g = [a for a in P.objects if a in g]
    return ProofSystemView(P, tuple(g), {a: a for a in P.objects}, _upward_closed(P, g))


def proof_system_from_institution(inst: Institution, sigma, gamma: Iterable) -> ProofSystemView:
    """Formula classes ordered by semantic consequence φ ⊩ ψ."""
    sv = inst.spectrum(sigma)
    classes = sv.classes
    names = {inst.describe(sigma, phi): phi for phi in classes}
    order = list(names)
    mask = {n: sv._masks[names[n]] for n in order}
    pre = thin_category(order, lambda a, b: mask[a] & ~mask[b] == 0)
    P, q = posetal_reflection(pre)
    gamma = [inst.resolve(sigma, phi) for phi in gamma]
    gnames = {q.object_map[inst.describe(sigma, phi)] for phi in gamma}
    g = tuple(a for a in P.objects if a in gnames)
    closed = closure(inst, sigma, gamma) == frozenset(gamma)
    return ProofSystemView(P, g, {a: names[a] for a in P.objects}, closed, multi_premise=True)


@dataclass(frozen=True)
class TheoremEvidence:
    status: str
    derivable: bool
    nonempty: bool
    aspherical: bool
    h_profile: bool
    cohomology: Mapping[int, HomologyGroup]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "status": self.status,
            "evidence": {
                "derivable": self.derivable,
                "nonempty": self.nonempty,
                "aspherical": self.aspherical,
                "h_profile": self.h_profile,
                "cohomology": [
                    {"n": n, "betti": g.betti, "torsion": list(g.torsion)} for n, g in sorted(self.cohomology.items())
                ],
            },
        }


def theorem_status(view: ProofSystemView, phi: str, D: int = 4) -> TheoremEvidence:
    """Evaluate Γ ⊢ φ, asphericity of Γ/φ, its cohomology profile and its
    nonemptiness independently; they must agree for a closed Γ."""
    if not view.closed:
        raise InstitutionError("gamma-not-closed", "Γ is not deductively closed")
    if phi not in view.poset.identities:
        raise InstitutionError("unknown-formula-class", f"no formula {phi!r}", (phi,))
    s = view.slice(phi).slice
    derivable = view.derives(phi)
    nonempty = s.n_objects > 0
    aspherical = homological_asphericity(s, D).aspherical
    Hc = homology_of_complex(assemble_cochain_complex(s, constant_coefficients(s, variance="contravariant"), D))
    h_profile = Hc[0].is_Z() and all(Hc[n].is_zero() for n in range(1, D))
    verdicts = (derivable, aspherical, h_profile, nonempty)
    if len(set(verdicts)) != 1:
        raise InvariantBreach(
            "proposition-equivalence-breach",
            f"for {phi}: derivable={derivable} aspherical={aspherical} h_profile={h_profile} nonempty={nonempty}",
        )
    return TheoremEvidence("theorem" if derivable else "non-theorem", derivable, nonempty, aspherical, h_profile,
                           {n: Hc[n] for n in range(D)})


@dataclass(frozen=True)
class CurvatureLabel:
    formula: str
    label: str  # "theorem", "void" or "k-curvature"
    k: int | None
    lower_bound: bool
    cohomology: Mapping[int, HomologyGroup]

    def to_json(self) -> dict:
        return {
            "formula": self.formula,
            "label": self.label,
            "k": self.k,
            "lower_bound": self.lower_bound,
            "cohomology": [{"n": n, "betti": g.betti, "torsion": list(g.torsion)} for n, g in sorted(self.cohomology.items())],
        }


def curvature_hierarchy(view: ProofSystemView, D: int = 4) -> list[CurvatureLabel]:
    """Label every formula by the top nonvanishing cohomology degree of Γ/φ.

    "theorem": nonempty and acyclic (H^0 = Z, H^i = 0 for 1 <= i <= D-1).
    "void": empty slice. Otherwise "k-curvature" with k the largest i <= D-1
    where H^i != 0 (k = 0 when only H^0 differs from Z). ``lower_bound`` is
    set when k = D-1 and the truncated complex is not the full complex.
    """
    out = []
    for phi in view.formulas:
        s = view.slice(phi).slice
        co = assemble_cochain_complex(s, constant_coefficients(s, variance="contravariant"), D)
        Hc = homology_of_complex(co)
        prof = {n: Hc[n] for n in range(D)}
        if s.n_objects == 0:
            out.append(CurvatureLabel(phi, "void", None, False, prof))
            continue
        if prof[0].is_Z() and all(prof[n].is_zero() for n in range(1, D)):
            out.append(CurvatureLabel(phi, "theorem", 0, False, prof))
            continue
        k = max((n for n in range(1, D) if not prof[n].is_zero()), default=0)
        out.append(CurvatureLabel(phi, f"{k}-curvature", k, k == D - 1 and not co.exact_above, prof))
    return out

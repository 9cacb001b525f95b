"""Abstract institutions over finite declared universes and the semantic
operators built from satisfaction: model classes, consequence, closure,
theories of model sets, independence, and an exhaustive axiom checker.

Formulas are handled as semantic classes; every instance guarantees a finite
class list per signature, so each operator here is an exact finite
computation relative to the instance's declared model universe.
"""
from __future__ import annotations

import random
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, NamedTuple, Sequence

from devhom.errors import InstitutionError
from devhom.fincat import FinCategory, full_subcategory


class SignatureMorphism(NamedTuple):
    id: str
    source: Hashable
    target: Hashable


@dataclass(frozen=True)
class SpectrumView:
    """Models of one signature against its formula classes.

    ``v_of(phi)`` is the set of models satisfying phi, ``d_of`` its
    complement, ``o_at(M)`` the classes M satisfies.
    """

    spec: tuple[str, ...]
    classes: tuple[Hashable, ...]
    _masks: dict = field(repr=False)

    def mask(self, phi) -> int:
        try:
            return self._masks[phi]
        except KeyError:
            raise InstitutionError("unknown-formula-class", f"no formula class {phi!r}", (phi,)) from None

    def _models(self, mask: int) -> frozenset[str]:
        return frozenset(m for i, m in enumerate(self.spec) if mask >> i & 1)

    def v_of(self, phi) -> frozenset[str]:
        return self._models(self.mask(phi))

    def d_of(self, phi) -> frozenset[str]:
        return frozenset(self.spec) - self.v_of(phi)

    def o_at(self, m: str) -> frozenset:
        try:
            i = self.spec.index(m)
        except ValueError:
            raise InstitutionError("unknown-model", f"no model {m!r}", (m,)) from None
        return frozenset(phi for phi in self.classes if self._masks[phi] >> i & 1)

    @property
    def full(self) -> int:
        return (1 << len(self.spec)) - 1


class Institution(ABC):
    """Capability contract for a finite institution instance.

    Model ids are the object ids of ``model_category(sigma)``.
    """

    name = "institution"

    def __init__(self):
        self._spectra: dict = {}
        self._lock = threading.Lock()

    @abstractmethod
    def signatures(self) -> tuple: ...

    @abstractmethod
    def signature_morphisms(self) -> tuple[SignatureMorphism, ...]: ...

    @abstractmethod
    def formula_classes(self, sigma) -> tuple: ...

    @abstractmethod
    def model_category(self, sigma) -> FinCategory: ...

    @abstractmethod
    def satisfies(self, sigma, model: str, phi) -> bool: ...

    @abstractmethod
    def translate_formula(self, sigma_morphism: SignatureMorphism, phi): ...

    @abstractmethod
    def reduct_model(self, sigma_morphism: SignatureMorphism, model: str) -> str: ...

    def classify(self, sigma, text: str):
        """Formula class of a raw formula written in the instance syntax."""
        raise InstitutionError("no-parser", f"{self.name} does not parse raw formulas")

    def describe(self, sigma, phi) -> str:
        return str(phi)

    def describe_signature(self, sigma) -> str:
        return str(sigma)

    def model_payload(self, sigma, model: str):
        return model

    def extent(self, sigma, phi) -> int:
        """Bitmask over the listed models of those satisfying phi."""
        mods = self.model_category(sigma).objects
        return sum(1 << i for i, m in enumerate(mods) if self.satisfies(sigma, m, phi))

    def spectrum(self, sigma) -> SpectrumView:
        with self._lock:
            sv = self._spectra.get(sigma)
        if sv is None:
            mods = self.model_category(sigma).objects
            classes = tuple(self.formula_classes(sigma))
            sv = SpectrumView(tuple(mods), classes, {phi: self.extent(sigma, phi) for phi in classes})
            with self._lock:
                self._spectra.setdefault(sigma, sv)
        return sv

    def resolve(self, sigma, phi):
        """Accept a class id or raw text and return the class id."""
        sv = self.spectrum(sigma)
        if phi in sv._masks:
            return phi
        if isinstance(phi, str):
            return self.classify(sigma, phi)
        raise InstitutionError("unknown-formula-class", f"no formula class {phi!r}", (phi,))

    def find_signature(self, sigma):
        if sigma not in self.signatures():
            raise InstitutionError("unknown-signature", f"no signature {sigma!r}", (sigma,))
        return sigma


# ---------------------------------------------------------------------------
# Semantic operators


def _gamma_mask(sv: SpectrumView, gamma: Iterable) -> int:
    m = sv.full
    for phi in gamma:
        m &= sv.mask(phi)
    return m


@dataclass(frozen=True)
class ModelClass:
    models: tuple[str, ...]
    category: FinCategory


def models_of(inst: Institution, sigma, gamma: Iterable) -> ModelClass:
    """V(Γ) in listed order and the full subcategory of models it spans."""
    sv = inst.spectrum(sigma)
    mask = _gamma_mask(sv, gamma)
    models = tuple(m for i, m in enumerate(sv.spec) if mask >> i & 1)
    return ModelClass(models, full_subcategory(inst.model_category(sigma), models))


def semantic_consequence(inst: Institution, sigma, gamma: Iterable, phi) -> bool:
    sv = inst.spectrum(sigma)
    g = _gamma_mask(sv, gamma)
    return g & ~sv.mask(phi) == 0


def closure(inst: Institution, sigma, gamma: Iterable) -> frozenset:
    sv = inst.spectrum(sigma)
    g = _gamma_mask(sv, gamma)
    return frozenset(phi for phi in sv.classes if g & ~sv._masks[phi] == 0)


@dataclass(frozen=True)
class TheoryState:
    """``gamma`` is the closure of ``given``; ``is_theory`` records whether
    ``given`` was already closed."""

    sigma: Hashable
    gamma: frozenset
    is_theory: bool
    consistent: bool
    given: frozenset


def closure_and_theory(inst: Institution, sigma, gamma: Iterable) -> TheoryState:
    given = frozenset(gamma)
    sv = inst.spectrum(sigma)
    closed = closure(inst, sigma, given)
    return TheoryState(sigma, closed, closed == given, _gamma_mask(sv, given) != 0, given)


def theory_of_models(inst: Institution, sigma, models: Iterable[str]) -> frozenset:
    """I(U): classes true in every model of U (all classes when U is empty)."""
    sv = inst.spectrum(sigma)
    idx = {m: i for i, m in enumerate(sv.spec)}
    u = 0
    for m in models:
        if m not in idx:
            raise InstitutionError("unknown-model", f"no model {m!r}", (m,))
        u |= 1 << idx[m]
    return frozenset(phi for phi in sv.classes if u & ~sv._masks[phi] == 0)


def elementarily_equivalent(inst: Institution, sigma, m1: str, m2: str) -> bool:
    sv = inst.spectrum(sigma)
    return sv.o_at(m1) == sv.o_at(m2)


def independence_status(inst: Institution, sigma, gamma: Iterable, phi) -> str:
    state = closure_and_theory(inst, sigma, gamma)
    if not state.is_theory:
        raise InstitutionError("gamma-not-a-theory", "Γ is not closed under semantic consequence")
    sv = inst.spectrum(sigma)
    g, p = _gamma_mask(sv, state.gamma), sv.mask(phi)
    if g & ~p == 0:
        return "provable"
    if g & p == 0:
        return "refutable"
    return "independent"


# ---------------------------------------------------------------------------
# Axiom checker


@dataclass(frozen=True)
class Budget:
    max_signatures: int | None = None
    max_models: int | None = None
    max_classes: int | None = None
    max_gammas: int = 64
    seed: int = 0


@dataclass
class AxiomCheck:
    name: str
    cases: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


@dataclass
class AxiomReport:
    instance: str
    checks: list[AxiomCheck]
    truncated: bool

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, name: str) -> AxiomCheck:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        return {
            "schema": "devhom/1",
            "instance": self.instance,
            "checks": [
                {
                    "name": c.name,
                    "ok": c.ok,
                    "cases": c.cases,
                    "counterexamples": [[str(x) for x in t] for t in c.counterexamples[:20]],
                    "counterexample_count": len(c.counterexamples),
                }
                for c in self.checks
            ],
            "truncated": self.truncated,
        }


def _take(seq: Sequence, limit: int | None) -> tuple[Sequence, bool]:
    if limit is None or len(seq) <= limit:
        return seq, False
    return seq[:limit], True


def _isomorphic_pairs(C: FinCategory) -> list[tuple[str, str]]:
    pairs = []
    for a, b in combinations(C.objects, 2):
        for f in C.hom(a, b):
            if any(C.comp(g, f) == C.identities[a] and C.comp(f, g) == C.identities[b] for g in C.hom(b, a)):
                pairs.append((a, b))
                break
    return pairs


def check_institution_axioms(inst: Institution, budget: Budget | None = None) -> AxiomReport:
    """Exhaustive (within budget) check of the satisfaction condition (I1),
    isomorphism invariance (I2), and coherence of semantic closure with
    translation along signature morphisms."""
    budget = budget or Budget()
    truncated = False
    sigs, cut = _take(list(inst.signatures()), budget.max_signatures)
    truncated |= cut
    allowed = set(sigs)
    i1, i2, pi = AxiomCheck("I1"), AxiomCheck("I2"), AxiomCheck("pi-coherence")
    rng = random.Random(budget.seed)

    for sm in inst.signature_morphisms():
        if sm.source not in allowed or sm.target not in allowed:
            continue
        classes, cut = _take(list(inst.formula_classes(sm.source)), budget.max_classes)
        truncated |= cut
        models, cut = _take(list(inst.model_category(sm.target).objects), budget.max_models)
        truncated |= cut
        src_models = set(inst.model_category(sm.source).objects)
        tgt_classes = set(inst.formula_classes(sm.target))
        translated = {}
        for phi in classes:
            t = inst.translate_formula(sm, phi)
            if t not in tgt_classes:
                i1.counterexamples.append((sm.id, "-", phi))
            translated[phi] = t
        for mp in models:
            m = inst.reduct_model(sm, mp)
            if m not in src_models:
                i1.counterexamples.append((sm.id, mp, "-"))
                continue
            for phi in classes:
                i1.cases += 1
                if inst.satisfies(sm.target, mp, translated[phi]) != inst.satisfies(sm.source, m, phi):
                    i1.counterexamples.append((sm.id, mp, phi))

        # closure coherence: translate(C(Γ)) ⊆ C(translate(Γ))
        gammas: list[tuple] = [()] + [(phi,) for phi in classes]
        pool = list(classes)
        for _ in range(max(0, budget.max_gammas - len(gammas))):
            if len(pool) < 2:
                break
            gammas.append(tuple(rng.sample(pool, 2)))
        for gamma in gammas[: max(budget.max_gammas, 1)]:
            pi.cases += 1
            lhs = {inst.translate_formula(sm, phi) for phi in closure(inst, sm.source, gamma)}
            rhs = closure(inst, sm.target, [translated[phi] for phi in gamma])
            for bad in sorted(lhs - rhs, key=str):
                pi.counterexamples.append((sm.id, gamma, bad))

    for sigma in sigs:
        C = inst.model_category(sigma)
        classes, cut = _take(list(inst.formula_classes(sigma)), budget.max_classes)
        truncated |= cut
        for a, b in _isomorphic_pairs(C):
            for phi in classes:
                i2.cases += 1
                if inst.satisfies(sigma, a, phi) != inst.satisfies(sigma, b, phi):
                    i2.counterexamples.append((sigma, f"{a}~{b}", phi))
    return AxiomReport(inst.name, [i1, i2, pi], truncated)

"""Concrete institutions: propositional logic, finite relational structures,
and the finite-field site over Spec(Z)."""
from devhom.instances.fields import FieldSite, build_field_site
from devhom.instances.firstorder import (
    FirstOrderInstitution,
    RelStructure,
    build_fo_institution,
    enumerate_homomorphisms,
    graphs_institution,
    make_structure,
)
from devhom.instances.propositional import (
    PropositionalInstitution,
    build_prop_institution,
    eval_formula,
    format_formula,
    free_vars,
    parse_formula,
)

__all__ = [
    "FieldSite",
    "FirstOrderInstitution",
    "PropositionalInstitution",
    "RelStructure",
    "build_field_site",
    "build_fo_institution",
    "build_prop_institution",
    "enumerate_homomorphisms",
    "eval_formula",
    "format_formula",
    "free_vars",
    "graphs_institution",
    "make_structure",
    "parse_formula",
]

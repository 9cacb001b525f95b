"""``devhom`` command-line front end.

Exit codes: 0 success, 2 computation succeeded with findings (diagnostics,
errant model, failed axiom, claim disagreement), 1 usage, file or schema
errors. JSON output is deterministic.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import jsonschema

from devhom import corpus
from devhom.claims import CLAIMS, verify_claims
from devhom.deviation import (
    curvature_hierarchy,
    deviation_report,
    proof_system_from_institution,
    proof_system_from_preorder,
    theorem_status,
)
from devhom.errors import DevhomError
from devhom.fincat import FinCategory, analyze_category, build_from_spec, slice as slice_category, validate_category
from devhom.homalg import euler_characteristic, homology_of_complex
from devhom.institution import Budget, check_institution_axioms, closure
from devhom.instances.firstorder import build_fo_institution, graphs_institution
from devhom.instances.propositional import Binary, Not, PropositionalInstitution, eval_formula
from devhom.simplicial import assemble_chain_complex, assemble_cochain_complex

SCHEMA = "devhom/1"

_ID = {"type": "string", "minLength": 1}
CATEGORY_SCHEMA = {
    "type": "object",
    "required": ["schema"],
    "properties": {
        "schema": {"const": SCHEMA},
        "objects": {"type": "array", "items": _ID},
        "morphisms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "dom", "cod"],
                "properties": {"id": _ID, "dom": _ID, "cod": _ID},
                "additionalProperties": False,
            },
        },
        "identities": {"type": "object", "additionalProperties": _ID},
        "compose": {"type": "array", "items": {"type": "array", "items": _ID, "minItems": 3, "maxItems": 3}},
        "poset": {
            "type": "object",
            "required": ["elements"],
            "properties": {
                "elements": {"type": "array", "items": _ID},
                "relations": {"type": "array", "items": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2}},
            },
            "additionalProperties": False,
        },
        "discrete": {"type": "integer", "minimum": 0},
        "monoid": {
            "type": "object",
            "required": ["elements", "unit", "table"],
            "properties": {
                "elements": {"type": "array", "items": _ID},
                "unit": _ID,
                "table": {"type": "array", "items": {"type": "array", "items": _ID, "minItems": 3, "maxItems": 3}},
            },
            "additionalProperties": False,
        },
    },
    "oneOf": [
        {"required": ["objects"], "not": {"anyOf": [{"required": ["poset"]}, {"required": ["discrete"]}, {"required": ["monoid"]}]}},
        {"required": ["poset"]},
        {"required": ["discrete"]},
        {"required": ["monoid"]},
    ],
    "additionalProperties": False,
}

FO_SCHEMA = {
    "type": "object",
    "required": ["schema", "signature", "max_size", "fragment"],
    "properties": {
        "schema": {"const": SCHEMA},
        "signature": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "max_size": {"type": "integer", "minimum": 0, "maximum": 3},
        "fragment": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

FIELDS_SCHEMA = {
    "type": "object",
    "required": ["schema", "primes", "degree_bound"],
    "properties": {
        "schema": {"const": SCHEMA},
        "primes": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "degree_bound": {"type": "integer", "minimum": 1, "maximum": 6},
    },
    "additionalProperties": False,
}

PREORDER_SCHEMA = {
    "type": "object",
    "required": ["schema", "elements", "derives", "gamma"],
    "properties": {
        "schema": {"const": SCHEMA},
        "elements": {"type": "array", "items": _ID},
        "derives": {"type": "array", "items": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2}},
        "gamma": {"type": "array", "items": _ID},
    },
    "additionalProperties": False,
}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


# ---------------------------------------------------------------------------
# loading


def _load_json(path: str, schema: dict) -> dict:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"file not found: {path}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        pointer = "/" + "/".join(str(x) for x in e.absolute_path)
        raise InputError(f"{path}: schema violation at {pointer}: {e.message}")
    return data


def _load_category(args) -> FinCategory:
    if getattr(args, "example", None):
        try:
            return corpus.named(args.example)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    if not getattr(args, "category", None):
        raise UsageError("one of --category or --example is required")
    data = _load_json(args.category, CATEGORY_SCHEMA)
    data = {k: v for k, v in data.items() if k != "schema"}
    return build_from_spec(data)


class _FaultyProp(PropositionalInstitution):
    """Propositional instance whose evaluator ignores negation (for demonstrations)."""

    name = "prop-faulty"

    def _eval(self, val, phi):
        if isinstance(phi, Not):
            return self._eval(val, phi.arg)
        if isinstance(phi, Binary):
            a, b = self._eval(val, phi.left), self._eval(val, phi.right)
            return {"&": a and b, "|": a or b, "->": (not a) or b}[phi.op]
        return eval_formula(val, phi)


def _load_instance(args):
    kind = args.instance
    if kind == "prop":
        cls = _FaultyProp if getattr(args, "inject_fault", None) == "negation" else PropositionalInstitution
        return cls(args.atoms)
    if kind == "graphs":
        return graphs_institution(args.max_size)
    if kind == "fo":
        if not args.config:
            raise UsageError("--instance fo needs --config")
        cfg = _load_json(args.config, FO_SCHEMA)
        return build_fo_institution(cfg["signature"], cfg["max_size"], cfg["fragment"])
    raise UsageError(f"unknown instance {kind!r}")


def _sigma(inst, args):
    if args.sigma is None:
        return inst.signatures()[-1]
    parts = [p.strip() for p in args.sigma.split(",") if p.strip()]
    if isinstance(inst, PropositionalInstitution):
        return inst.find_signature(tuple(sorted(int(p) for p in parts)))
    return inst.find_signature(tuple(sorted(parts)))


# ---------------------------------------------------------------------------
# rendering


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()  # noqa: E731
    out = [line(headers), line(["-" * w for w in widths])]
    out += [line(r) for r in rows]
    return "\n".join(out) + "\n"


def _profile(groups) -> str:
    return ", ".join(f"H{n}={g}" for n, g in groups)


def render_report(report, fmt: str) -> str:
    """Table or JSON rendering of a deviation or claim report."""
    data = report.to_json()
    if fmt == "json":
        return _dump(data)
    if "per_formula" in data:
        rows = []
        for f in report.per_formula:
            rows.append([
                f.formula,
                "yes" if f.satisfied else "no",
                _profile((n, f.homology[n]) for n in range(report.truncation)),
                "undefined" if f.chi.chi is None else str(f.chi.chi),
                "yes" if f.aspherical else "no",
            ])
        head = f"sigma {data['sigma']}  model {data['model']}  D={report.truncation}\n"
        body = _table(["formula", "satisfied", "homology", "chi", "aspherical"], rows)
        qm = "yes" if report.quasi_model else "no"
        if report.quasi_model and not report.satisfied:
            qm += f" (up to D={report.truncation})"
        foot = f"model: {'yes' if report.satisfied else 'no'}, quasi-model: {qm}, errant: {'yes' if report.errant else 'no'}\n"
        return head + body + foot
    # claim report
    claim = data["claim"]
    if claim == "fields":
        rows = []
        for r in data["rows"]:
            if r["p"] == "mixed":
                rows.append(["mixed", f"H_0 rank {r['H0_rank']}", "-", "-", "yes" if r["agrees"] else "no"])
            else:
                rows.append([str(r["p"]), r["H0_units"], r["H1_units"], "yes" if r["aspherical"] else "no", "yes" if r["agrees"] else "no"])
        body = _table(["p", "H^0 (units)", "H^1 (units)", "aspherical", "agrees"], rows)
    elif claim in ("products", "coproducts"):
        rows = []
        for r in data["rows"]:
            for d in r["degrees"]:
                lhs = d.get("product", d.get("coproduct"))
                rows.append([r["pair"], str(d["n"]), _gtxt(lhs), _gtxt(d["direct_sum"]),
                             "yes" if d.get("product_matches_sum", lhs == d["direct_sum"]) else "no"])
        body = _table(["pair", "n", "left side", "direct sum", "equal"], rows)
    else:
        rows = [[str(r["chain"]), str(r["stabilizes_at"]), " ".join(_gtxt(g) for g in r["union"]),
                 " ".join(_gtxt(g) for g in r["colimit"]), "yes" if r["agrees"] else "no"] for r in data["rows"]]
        body = _table(["chain", "stable from", "H(union)", "H(colimit)", "agrees"], rows)
    return f"claim {claim}: {data['verdict']}{' (asserted)' if data['asserted'] else ''}\n" + body


def _gtxt(g: dict) -> str:
    parts = []
    if g["betti"]:
        parts.append("Z" if g["betti"] == 1 else f"Z^{g['betti']}")
    parts += [f"Z/{t}" for t in g["torsion"]]
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# commands


@dataclass
class Outcome:
    code: int
    text: str


def cmd_validate(args) -> Outcome:
    if args.example:
        C = corpus.named(args.example)
        diags = validate_category(C)
    else:
        try:
            C = _load_category(args)
            diags = []
        except DevhomError as exc:
            diags = getattr(exc, "diagnostics", None)
            if diags is None:
                raise
    if args.format == "json":
        return Outcome(2 if diags else 0, _dump({"schema": SCHEMA, "valid": not diags, "diagnostics": [
            {"code": d.code, "ids": list(d.ids), "message": d.message} for d in diags]}))
    if not diags:
        return Outcome(0, f"valid: {C.n_objects} objects, {C.n_morphisms} morphisms\n")
    return Outcome(2, "".join(f"{d}  {d.message}\n" for d in diags))


def cmd_homology(args) -> Outcome:
    C = _load_category(args)
    D = args.max_dim
    cx = (assemble_cochain_complex if args.cohomology else assemble_chain_complex)(C, None, D)
    H = homology_of_complex(cx)
    chi = euler_characteristic(cx, H)
    listed = [n for n in range(D) if not H[n].is_zero()]
    if args.format == "json":
        items = []
        for n in listed:
            item = {"n": n, "betti": H[n].betti}
            if H[n].torsion:
                item["torsion"] = list(H[n].torsion)
            items.append(item)
        return Outcome(0, _dump({"schema": SCHEMA, "H": items, "chi": chi.chi}))
    sym = "H^" if args.cohomology else "H_"
    lines = [f"{sym}{n} = {H[n]}" for n in listed] or [f"{sym}n = 0 for n < {D}"]
    lines.append(f"chi = {'undefined (chains in degree ' + str(D) + ')' if chi.chi is None else chi.chi}")
    return Outcome(0, "\n".join(lines) + "\n")


def cmd_slice(args) -> Outcome:
    C = _load_category(args)
    over = [x.strip() for x in args.objects.split(",")] if args.objects else None
    s = slice_category(C, args.over, over=over)
    S = s.slice
    an = analyze_category(S)
    if args.format == "json":
        return Outcome(0, _dump({
            "schema": SCHEMA,
            "objects": list(S.objects),
            "morphisms": [{"id": m.id, "dom": m.dom, "cod": m.cod} for m in S.morphisms],
            "terminal": list(an.terminal_objects),
        }))
    lines = [f"slice over {args.over}: {S.n_objects} objects, {S.n_morphisms} morphisms"]
    lines += [f"  {o}" for o in S.objects]
    lines.append(f"terminal: {', '.join(an.terminal_objects) or 'none'}")
    return Outcome(0, "\n".join(lines) + "\n")


def cmd_deviation(args) -> Outcome:
    inst = _load_instance(args)
    sigma = _sigma(inst, args)
    if not args.gamma:
        raise UsageError("at least one --gamma formula is required")
    if args.model not in inst.model_category(sigma).identities:
        raise InputError(f"unknown model {args.model!r} over {inst.describe_signature(sigma)}")
    rep = deviation_report(inst, sigma, args.gamma, args.model, None, args.max_dim, args.jobs)
    return Outcome(2 if rep.errant else 0, render_report(rep, args.format))


def cmd_theorem(args) -> Outcome:
    inst = _load_instance(args)
    sigma = _sigma(inst, args)
    gamma = closure(inst, sigma, [inst.resolve(sigma, g) for g in args.gamma])
    view = proof_system_from_institution(inst, sigma, gamma)
    phi = inst.resolve(sigma, args.phi)
    name = next(a for a in view.poset.objects if view.names[a] == phi) if phi in view.names.values() else inst.describe(sigma, phi)
    ev = theorem_status(view, name, args.max_dim)
    if args.format == "json":
        out = ev.to_json()
        out = {"schema": out["schema"], "formula": inst.describe(sigma, phi), **{k: v for k, v in out.items() if k != "schema"}}
        return Outcome(0, _dump(out))
    e = ev
    return Outcome(0, (
        f"{inst.describe(sigma, phi)}: {e.status}\n"
        f"  derivable: {'yes' if e.derivable else 'no'}\n"
        f"  nonempty: {'yes' if e.nonempty else 'no'}\n"
        f"  aspherical: {'yes' if e.aspherical else 'no'}\n"
        f"  cohomology: {_profile(sorted(e.cohomology.items()))}\n"
    ))


def cmd_curvature(args) -> Outcome:
    if args.preorder:
        cfg = _load_json(args.preorder, PREORDER_SCHEMA)
        view = proof_system_from_preorder(cfg["elements"], [tuple(p) for p in cfg["derives"]], cfg["gamma"])
    else:
        inst = _load_instance(args)
        sigma = _sigma(inst, args)
        gamma = closure(inst, sigma, [inst.resolve(sigma, g) for g in args.gamma])
        view = proof_system_from_institution(inst, sigma, gamma)
    labels = curvature_hierarchy(view, args.max_dim)
    if args.format == "json":
        return Outcome(0, _dump({"schema": SCHEMA, "truncation": args.max_dim, "gamma_closed": view.closed,
                                 "labels": [l.to_json() for l in labels]}))
    rows = [[l.formula, l.label + (" (at least)" if l.lower_bound else ""),
             _profile(sorted(l.cohomology.items()))] for l in labels]
    return Outcome(0, _table(["formula", "label", "cohomology"], rows))


def cmd_check_institution(args) -> Outcome:
    inst = _load_instance(args)
    rep = check_institution_axioms(inst, Budget(max_models=args.max_models, max_classes=args.max_classes, seed=args.seed))
    code = 0 if rep.ok else 2
    if args.format == "json":
        return Outcome(code, _dump(rep.to_json()))
    lines = []
    for c in rep.checks:
        label = f"({c.name})" if c.name in ("I1", "I2") else c.name
        note = "  (vacuous: no isomorphic pairs of distinct models)" if c.cases == 0 else ""
        lines.append(f"{label} {'OK' if c.ok else 'FAILED'}  cases={c.cases}{note}")
        for t in c.counterexamples[:5]:
            lines.append(f"  counterexample: ({', '.join(map(str, t))})")
    if rep.truncated:
        lines.append("budget reached: checks are partial")
    return Outcome(code, "\n".join(lines) + "\n")


def cmd_verify_claims(args) -> Outcome:
    config = {}
    if args.config:
        if args.claim == "fields":
            cfg = _load_json(args.config, FIELDS_SCHEMA)
            config = {"primes": cfg["primes"], "degree_bound": cfg["degree_bound"]}
        else:
            raise UsageError("--config is only read by the fields claim")
    config["D"] = args.max_dim
    rep = verify_claims(args.claim, config)
    return Outcome(0 if rep.agrees else 2, render_report(rep, args.format))


def cmd_examples(args) -> Outcome:
    names = list(corpus.CATEGORIES)
    if args.write:
        out = Path(args.write)
        out.mkdir(parents=True, exist_ok=True)
        for n in names:
            (out / f"{n}.json").write_text(_dump({"schema": SCHEMA, **corpus.named(n).to_spec()}))
        for n, cfg in corpus.INSTANCE_CONFIGS.items():
            (out / f"{n}.json").write_text(_dump(cfg))
        (out / "circle-preorder.json").write_text(_dump(_circle_preorder()))
    if args.format == "json":
        return Outcome(0, _dump({"schema": SCHEMA, "categories": names, "configs": list(corpus.INSTANCE_CONFIGS)}))
    lines = ["categories: " + ", ".join(names), "configs: " + ", ".join(corpus.INSTANCE_CONFIGS)]
    if args.write:
        lines.append(f"written to {args.write}")
    return Outcome(0, "\n".join(lines) + "\n")


def _circle_preorder() -> dict:
    elems = corpus.CIRCLE_ELEMENTS + ["phi"]
    derives = [list(r) for r in corpus.CIRCLE_RELATIONS] + [[e, "phi"] for e in corpus.CIRCLE_ELEMENTS]
    return {"schema": SCHEMA, "elements": elems, "derives": derives, "gamma": list(corpus.CIRCLE_ELEMENTS)}


# ---------------------------------------------------------------------------


def _max_dim(text: str) -> int:
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("must be an integer") from None
    if d < 2:
        raise argparse.ArgumentTypeError("must be at least 2")
    return d


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--max-dim", type=_max_dim, default=4, help="truncation degree D (>= 2)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads; output does not depend on it")
    common.add_argument("--output", help="write output to this file instead of stdout")

    cat = argparse.ArgumentParser(add_help=False)
    cat.add_argument("--category", help="category description file (JSON)")
    cat.add_argument("--example", help="name of a bundled example category")

    inst = argparse.ArgumentParser(add_help=False)
    inst.add_argument("--instance", choices=("prop", "graphs", "fo"), default="prop")
    inst.add_argument("--atoms", type=int, default=2, help="propositional atoms (at most 4)")
    inst.add_argument("--max-size", type=int, default=2, help="largest universe for graphs")
    inst.add_argument("--config", help="first-order instance file (JSON)")
    inst.add_argument("--sigma", help="signature, comma separated (default: all symbols)")

    p = _Parser(prog="devhom", description="Homological deviation of finite structures from theories.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("validate", parents=[common, cat], help="check the category laws of a finite category description")
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("homology", parents=[common, cat],
                       help="integer homology of the nerve of a finite category and its Euler characteristic")
    s.add_argument("--cohomology", action="store_true", help="cohomology with constant Z coefficients instead")
    s.set_defaults(run=cmd_homology)

    s = sub.add_parser("slice", parents=[common, cat], help="slice category A/X of objects over X")
    s.add_argument("--over", required=True, help="object X")
    s.add_argument("--objects", help="restrict to objects from this comma separated list")
    s.set_defaults(run=cmd_slice)

    s = sub.add_parser("deviation", parents=[common, inst],
                       help="deviation report: homology of the slices Mod[phi]/M, Euler characteristic, errancy and quasi-model verdict")
    s.add_argument("--gamma", action="append", default=[], help="formula of Gamma (repeatable)")
    s.add_argument("--model", required=True, help="model id")
    s.set_defaults(run=cmd_deviation)

    s = sub.add_parser("theorem", parents=[common, inst],
                       help="cohomological theorem test: Gamma derives phi iff the slice Gamma/phi is nonempty and acyclic")
    s.add_argument("--gamma", action="append", default=[], help="generator of the theory (closed under consequence)")
    s.add_argument("--phi", required=True)
    s.set_defaults(run=cmd_theorem)

    s = sub.add_parser("curvature", parents=[common, inst],
                       help="k-curvature hierarchy: top nonvanishing cohomology degree of each slice Gamma/phi")
    s.add_argument("--gamma", action="append", default=[], help="generator of the theory")
    s.add_argument("--preorder", help="custom consequence preorder file (JSON) instead of an instance")
    s.set_defaults(run=cmd_curvature)

    s = sub.add_parser("check-institution", parents=[common, inst],
                       help="institution axioms: satisfaction condition (I1), isomorphism invariance (I2), closure coherence")
    s.add_argument("--max-models", type=int)
    s.add_argument("--max-classes", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--inject-fault", choices=("negation",), help="use a deliberately broken evaluator")
    s.set_defaults(run=cmd_check_institution)

    s = sub.add_parser("verify-claims", parents=[common],
                       help="homology of products, coproducts, sequential unions and the finite-field site over Spec(Z)")
    s.add_argument("claim", choices=CLAIMS)
    s.add_argument("--config", help="fields site file (JSON)")
    s.set_defaults(run=cmd_verify_claims)

    s = sub.add_parser("examples", parents=[common], help="bundled example categories and instance configurations")
    s.add_argument("--write", metavar="DIR", help="write the examples as JSON files into DIR")
    s.set_defaults(run=cmd_examples)
    return p


def execute(argv: Sequence[str]) -> tuple[int, str, str]:
    """Run one command; returns (exit code, stdout text, stderr text)."""
    parser = build_parser()
    out = io.StringIO()
    try:
        with contextlib.redirect_stdout(out):
            try:
                args = parser.parse_args(list(argv))
            except SystemExit as exc:  # --help
                return int(exc.code or 0), out.getvalue(), ""
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        result = args.run(args)
    except UsageError as exc:
        return 1, "", str(exc) if str(exc).endswith("\n") else f"{exc}\n"
    except InputError as exc:
        return 1, "", f"devhom: {exc}\n"
    except DevhomError as exc:
        return 1, "", f"devhom: {exc}\n"
    if args.output:
        Path(args.output).write_text(result.text)
        return result.code, "", ""
    return result.code, result.text, ""


def main(argv: Sequence[str] | None = None) -> int:
    code, out, err = execute(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())

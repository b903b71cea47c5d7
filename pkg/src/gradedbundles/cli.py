"""Command-line front end: parse a spec file, run one check, emit a report.

Exit codes: 0 when every verdict passes, 1 when any check fails, 2 on
parse or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .bundle import validate
from .linfun import (
    embedding_compatibility,
    holonomic_assignment,
    is_symmetric,
    linear_dual,
    linearise,
    mironian,
    mironian_report,
    pairing,
)
from .algebroid import anchor, restrict_to_A1, weighted_lie_algebra_check
from .constructions import (
    AlgebroidData,
    PolynomialDiffeo,
    StructureConstants,
    TowerSection,
    cotangent_algebroid,
    higher_tangent,
    lie_tower,
    linear_poisson,
    prolongation_algebroid,
    reduced_bracket,
    tangent_algebroid,
    tower_section_polynomial,
)
from .report import Report, render_json, render_text
from .specfile import (
    SpecDocument,
    SpecError,
    SpecSyntaxError,
    build_bundle,
    parse,
    parse_expression,
    structure_entries,
)
from .superalg import render as render_poly
from .superalg import weight_of

COMMANDS = (
    "validate",
    "linearise",
    "dual",
    "mironian",
    "embed",
    "check-q",
    "bracket",
    "construct",
)
CONSTRUCTS = ("tangent", "cotangent", "tk", "lie-tower", "prolong")


def _weight_str(w):
    return "(" + ", ".join(str(c) for c in w) + ")"


def _emit_transitions(report: Report, b, label: str):
    for (i, j), t in sorted(b.transitions.items()):
        if i > j:
            continue
        for v in b.charts[j].variables:
            report.info(
                f"{label} {i}->{j}: {v.name} = {render_poly(t.forward[v])}",
                weights=_weight_str(v.weight),
            )


# ------------------------------------------------------- structure builders
def _entry_value(e, names=None):
    return parse_expression(e.value, names or {}, e.line, e.col)


def _scalar(e) -> Fraction:
    p = _entry_value(e)
    return p.constant_term()


def _int_entry(grouped, key, default=None):
    entries = grouped.get(key)
    if not entries:
        if default is None:
            raise SpecSyntaxError(f"missing {key!r} entry")
        return default
    e = entries[-1]
    try:
        return int(e.value)
    except ValueError:
        raise SpecSyntaxError(f"{key!r} must be an integer", e.line, e.col)


def build_constants(section) -> tuple[StructureConstants, int]:
    grouped = structure_entries(section)
    dim = _int_entry(grouped, "dim")
    k = _int_entry(grouped, "k")
    c = {}
    for e in grouped.get("c", []):
        if len(e.key) != 4:
            raise SpecSyntaxError("structure constants read 'c i j k = value'",
                                  e.line, 1)
        i, j, kk = (int(x) for x in e.key[1:])
        c[(i, j, kk)] = _scalar(e)
    return StructureConstants(dim, c), k


def build_tk(section) -> tuple[PolynomialDiffeo, int]:
    grouped = structure_entries(section)
    dim = _int_entry(grouped, "dim")
    k = _int_entry(grouped, "k")
    from .bundle import CoordinateSystem

    src = CoordinateSystem([(f"x{i}", 0, 0) for i in range(1, dim + 1)], name="m_src")
    dst = CoordinateSystem([(f"X{i}", 0, 0) for i in range(1, dim + 1)], name="m_dst")
    src_names = {v.name: v for v in src.variables}
    dst_names = {v.name: v for v in dst.variables}
    fwd = {}
    inv = {}
    for e in grouped.get("forward", []):
        fwd[int(e.key[1])] = parse_expression(e.value, src_names, e.line, e.col)
    for e in grouped.get("inverse", []):
        inv[int(e.key[1])] = parse_expression(e.value, dst_names, e.line, e.col)
    missing = [i for i in range(1, dim + 1) if i not in fwd or i not in inv]
    if missing:
        raise SpecSyntaxError(f"tk structure misses components {missing}")
    phi = PolynomialDiffeo(
        src, dst,
        {dst.variables[i - 1]: fwd[i] for i in range(1, dim + 1)},
        {src.variables[i - 1]: inv[i] for i in range(1, dim + 1)},
    )
    return phi, k


def build_prolong_data(section) -> tuple[AlgebroidData, int]:
    grouped = structure_entries(section)
    k = _int_entry(grouped, "k")
    from .bundle import CoordinateSystem

    base_names = []
    for e in grouped.get("base", []):
        base_names.extend(e.value.split())
    fiber_names = []
    for e in grouped.get("fiber", []):
        fiber_names.extend(e.value.split())
    if not fiber_names:
        raise SpecSyntaxError("prolong structures need a fiber entry")
    base = CoordinateSystem([(n, 0, 0) for n in base_names], name="base")
    names = {v.name: v for v in base.variables}
    anchor_data = {}
    for e in grouped.get("anchor", []):
        if len(e.key) != 3:
            raise SpecSyntaxError("anchor entries read 'anchor f x = expr'",
                                  e.line, 1)
        _, f, x = e.key
        if f not in fiber_names or x not in names:
            raise SpecSyntaxError(f"unknown anchor indices {f!r}, {x!r}",
                                  e.line, 1)
        anchor_data[(f, x)] = parse_expression(e.value, names, e.line, e.col)
    bracket_data = {}
    for e in grouped.get("bracket", []):
        if len(e.key) != 4:
            raise SpecSyntaxError("bracket entries read 'bracket a b c = expr'",
                                  e.line, 1)
        _, a, b, c = e.key
        for nm in (a, b, c):
            if nm not in fiber_names:
                raise SpecSyntaxError(f"unknown fiber name {nm!r}", e.line, 1)
        bracket_data[(a, b, c)] = parse_expression(e.value, names, e.line, e.col)
    return AlgebroidData(base, fiber_names, anchor_data, bracket_data), k


def build_tower_section(section, tower) -> TowerSection:
    phase = tower.phase
    base_names = {
        v.name: v for v in phase.system.variables if v.weight[1] == 0 and v.weight[2] == 0
    }
    Y = {}
    Z = {}
    for e in section.entries:
        if e.key[0] == "Y" and len(e.key) == 2:
            Y[e.key[1]] = parse_expression(e.value, base_names, e.line, e.col)
        elif e.key[0] == "Z" and len(e.key) == 3:
            Z[(e.key[1], int(e.key[2]))] = parse_expression(
                e.value, base_names, e.line, e.col
            )
        else:
            raise SpecSyntaxError(
                "section entries read 'Y a = expr' or 'Z a r = expr'", e.line, 1
            )
    return TowerSection(Y, Z)


def _structure_algebroid(doc: SpecDocument, report: Report):
    """Build the algebroid a document's structure section declares."""
    section = doc.first("structure")
    if section is None:
        bs = build_bundle(doc)
        report.info("structure: canonical tangent algebroid of the declared bundle")
        return tangent_algebroid(bs.bundle)
    kind = section.args[0]
    if kind == "lie-tower":
        c, k = build_constants(section)
        report.info(f"structure: lie-tower, dim {c.dim}, k {k}")
        return lie_tower(c, k)
    if kind == "prolong":
        data, k = build_prolong_data(section)
        report.info(f"structure: prolongation, k {k}")
        return prolongation_algebroid(data, k)
    if kind == "cotangent-linear":
        c, k = build_constants(section)
        if k != 2:
            raise SpecSyntaxError("cotangent-linear structures fix k = 2")
        report.info(f"structure: cotangent of a linear Poisson space, dim {c.dim}")
        F, carrier, phase, P = linear_poisson(c)
        return cotangent_algebroid(F, P, carrier, phase)
    if kind == "tk":
        phi, k = build_tk(section)
        report.info(f"structure: tangent algebroid of T^{k - 1}M")
        return tangent_algebroid(higher_tangent(phi, k - 1))
    raise SpecSyntaxError(f"no algebroid for structure kind {kind!r}")


# ------------------------------------------------------------------ commands
def cmd_validate(doc: SpecDocument) -> Report:
    report = Report("validate")
    bs = build_bundle(doc)
    report.info(f"bundle: degree {bs.bundle.degree}, arity {bs.bundle.arity}, "
                f"{len(bs.bundle.charts)} charts")
    if bs.declared_degree is not None:
        report.add("declared degree matches", bs.declared_degree == bs.bundle.degree)
    report.merge_validation(validate(bs.bundle))
    return report


def cmd_linearise(doc: SpecDocument) -> Report:
    report = Report("linearise")
    bs = build_bundle(doc)
    D = linearise(bs.bundle)
    _emit_transitions(report, D, "D(F)")
    report.merge_validation(validate(D), prefix="D(F) ")
    report.add("linearisation is symmetric", is_symmetric(D))
    return report


def cmd_dual(doc: SpecDocument) -> Report:
    report = Report("dual")
    bs = build_bundle(doc)
    dual = linear_dual(bs.bundle)
    _emit_transitions(report, dual, "D*(F)")
    report.merge_validation(validate(dual), prefix="D*(F) ")
    pr = pairing(bs.bundle, dual)
    report.info(
        f"pairing delta* = {render_poly(pr.polynomial)}",
        weights=_weight_str(weight_of(pr.polynomial, 2)),
    )
    report.merge_validation(pr.check_invariance())
    return report


def cmd_mironian(doc: SpecDocument) -> Report:
    report = Report("mironian")
    bs = build_bundle(doc)
    dual = linear_dual(bs.bundle)
    mi = mironian(bs.bundle, dual)
    _emit_transitions(report, mi, "Mi(F)")
    report.merge_validation(mironian_report(bs.bundle, dual))
    return report


def cmd_embed(doc: SpecDocument) -> Report:
    report = Report("embed")
    bs = build_bundle(doc)
    D = linearise(bs.bundle)
    holo = holonomic_assignment(D, 0)
    for dv in D.charts[0].variables:
        if dv in holo:
            report.info(f"iota*({dv.name}) = {render_poly(holo[dv])}")
    report.merge_validation(embedding_compatibility(bs.bundle, D))
    return report


def cmd_check_q(doc: SpecDocument) -> Report:
    report = Report("check-q")
    alg = _structure_algebroid(doc, report)
    report.info(f"kind = {alg.kind}")
    report.merge_validation(alg.check.report)
    if weighted_lie_algebra_check(alg):
        report.info("carrier is a weighted lie algebra (no weight-zero coordinates)")
    return report


def cmd_bracket(doc: SpecDocument) -> Report:
    report = Report("bracket")
    section = doc.first("structure")
    if section is None or section.args[0] != "lie-tower":
        raise SpecSyntaxError("bracket documents declare a lie-tower structure")
    c, k = build_constants(section)
    tower = lie_tower(c, k)
    report.info(f"structure: lie-tower, dim {c.dim}, k {k}")
    sections = doc.all("section")
    if len(sections) != 2:
        raise SpecSyntaxError("bracket documents need exactly two sections")
    s1 = build_tower_section(sections[0], tower)
    s2 = build_tower_section(sections[1], tower)
    out = reduced_bracket(tower, s1, s2)
    for n in sorted(out.Y):
        report.info(f"result Y {n} = {render_poly(out.Y[n])}")
    for (n, r) in sorted(out.Z):
        report.info(f"result Z {n} {r} = {render_poly(out.Z[(n, r)])}")
    if not out.Y and not out.Z:
        report.info("result = 0")
    lhs = tower_section_polynomial(tower, out)
    phase = tower.phase
    p1 = tower_section_polynomial(tower, s1)
    p2 = tower_section_polynomial(tower, s2)
    derived = -phase.schouten(phase.schouten(p1, tower.hamiltonian.poly), p2)
    residual = lhs - derived
    report.add(
        "reduced bracket agrees with the derived bracket",
        residual.is_zero(),
        "" if residual.is_zero() else render_poly(residual),
    )
    return report


def cmd_construct(doc: SpecDocument, what: str) -> Report:
    report = Report(f"construct {what}")
    if what == "tangent":
        bs = build_bundle(doc)
        alg = tangent_algebroid(bs.bundle)
        report.info(f"carrier: {len(alg.carrier.chart)} coordinates, "
                    f"degree {alg.carrier.gl_degree}")
        report.merge_validation(validate(alg.carrier), prefix="carrier ")
        report.add("kind = lie", alg.kind == "lie")
        anc = anchor(alg)
        for b, p in anc.delta.items():
            report.info(f"anchor delta_{b.name} = {render_poly(p)}")
        return report
    if what == "tk":
        section = doc.first("structure")
        if section is None or section.args[0] != "tk":
            raise SpecSyntaxError("construct tk needs a tk structure")
        phi, k = build_tk(section)
        tk = higher_tangent(phi, k)
        _emit_transitions(report, tk, f"T^{k}M")
        report.merge_validation(validate(tk), prefix=f"T^{k}M ")
        report.add("linearisation is symmetric", is_symmetric(linearise(tk)))
        return report
    if what == "lie-tower":
        section = doc.first("structure")
        if section is None or section.args[0] != "lie-tower":
            raise SpecSyntaxError("construct lie-tower needs a lie-tower structure")
        c, k = build_constants(section)
        alg = lie_tower(c, k)
        report.info(f"jacobi verdict on constants: "
                    f"{'holds' if c.satisfies_jacobi else 'fails'}")
        report.merge_validation(alg.check.report)
        report.add("kind matches jacobi verdict",
                   (alg.kind == "lie") == c.satisfies_jacobi)
        report.add("weighted lie algebra", weighted_lie_algebra_check(alg))
        return report
    if what == "prolong":
        section = doc.first("structure")
        if section is None or section.args[0] != "prolong":
            raise SpecSyntaxError("construct prolong needs a prolong structure")
        data, k = build_prolong_data(section)
        alg = prolongation_algebroid(data, k)
        report.info(f"input data lie verdict: {data.is_lie}")
        report.merge_validation(alg.check.report)
        report.add("kind matches the input lie verdict",
                   (alg.kind == "lie") == data.is_lie)
        d_eps = restrict_to_A1(alg.q)
        for v in sorted(d_eps.action, key=lambda u: u.index):
            report.info(f"d_eps({v.name}) = {render_poly(d_eps.action[v])}")
        return report
    if what == "cotangent":
        section = doc.first("structure")
        if section is None or section.args[0] != "cotangent-linear":
            raise SpecSyntaxError(
                "construct cotangent needs a cotangent-linear structure"
            )
        c, _ = build_constants(section)
        F, carrier, phase, P = linear_poisson(c)
        alg = cotangent_algebroid(F, P, carrier, phase)
        report.info(f"poisson data P = {render_poly(P)}")
        report.add("[P,P] = 0", alg.poisson_residual.is_zero(),
                   "" if alg.poisson_residual.is_zero()
                   else render_poly(alg.poisson_residual))
        report.merge_validation(alg.check.report)
        report.add("kind matches jacobi verdict",
                   (alg.kind == "lie") == c.satisfies_jacobi)
        return report
    raise SpecSyntaxError(f"unknown construct target {what!r}")


# ---------------------------------------------------------------------- main
def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradedbundles",
        description="exact checks for graded bundles and weighted algebroids",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "construct":
            p.add_argument("target", choices=CONSTRUCTS)
        p.add_argument("--spec", required=True, help="path to the spec file")
        p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def run_command(command: str, doc: SpecDocument, target: str | None = None) -> Report:
    if command == "validate":
        return cmd_validate(doc)
    if command == "linearise":
        return cmd_linearise(doc)
    if command == "dual":
        return cmd_dual(doc)
    if command == "mironian":
        return cmd_mironian(doc)
    if command == "embed":
        return cmd_embed(doc)
    if command == "check-q":
        return cmd_check_q(doc)
    if command == "bracket":
        return cmd_bracket(doc)
    if command == "construct":
        return cmd_construct(doc, target)
    raise SpecSyntaxError(f"unknown command {command!r}")


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        doc = parse(text)
        report = run_command(args.command, doc, getattr(args, "target", None))
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # construction failures surface as verdicts
        report = Report(args.command)
        report.add(f"construction failed: {exc}", False)
    out = render_text(report) if args.format == "text" else render_json(report)
    sys.stdout.write(out)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

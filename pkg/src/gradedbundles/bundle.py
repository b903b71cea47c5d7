"""Graded and n-tuple graded bundles as atlases of polynomial transitions.

A bundle is a list of coordinate systems together with transition maps whose
components are weight- and parity-homogeneous polynomials.  Inverse
transitions are required input, never computed: the declared pair is checked
by symbolic composition, which turns invertibility into a decidable
verification.

Validation never raises; it returns a report listing every check with its
residual, so callers can surface honest failures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .superalg import (
    Derivation,
    SuperPolynomial,
    Variable,
    ZERO,
    partial,
    remap,
    render,
    substitute,
    total,
    weight_of,
)


class IllDefinedProjection(ValueError):
    """A tower projection hit a transition that mixes dropped coordinates in."""


_system_counter = itertools.count()


class CoordinateSystem:
    """An ordered chart of weighted, parity-carrying variables."""

    def __init__(self, specs, name: str | None = None, arity: int | None = None):
        """``specs`` is an iterable of (name, weight, parity) triples.

        Integer weights are promoted to 1-tuples.  The declaration order
        fixes the canonical monomial order for every polynomial on the chart.
        """
        self.name = name or f"chart{next(_system_counter)}"
        vars_ = []
        seen = set()
        for i, (vname, weight, parity) in enumerate(specs):
            if isinstance(weight, int):
                weight = (weight,)
            weight = tuple(weight)
            if vname in seen:
                raise ValueError(f"duplicate coordinate name {vname!r}")
            seen.add(vname)
            vars_.append(Variable(self.name, vname, weight, parity, i))
        self.variables: tuple[Variable, ...] = tuple(vars_)
        arities = {len(v.weight) for v in self.variables}
        if len(arities) > 1:
            raise ValueError(f"mixed weight arities in chart {self.name}: {arities}")
        self.arity = arity if arity is not None else (arities.pop() if arities else 1)
        self._by_name = {v.name: v for v in self.variables}

    def __getitem__(self, name: str) -> Variable:
        return self._by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __iter__(self):
        return iter(self.variables)

    def __len__(self):
        return len(self.variables)

    @property
    def base(self) -> tuple[Variable, ...]:
        return tuple(v for v in self.variables if total(v.weight) == 0)

    @property
    def nonbase(self) -> tuple[Variable, ...]:
        return tuple(v for v in self.variables if total(v.weight) > 0)

    def of_total_weight(self, w: int) -> tuple[Variable, ...]:
        return tuple(v for v in self.variables if total(v.weight) == w)

    @property
    def degree(self) -> int:
        return max((total(v.weight) for v in self.variables), default=0)

    def var(self, name: str) -> SuperPolynomial:
        return SuperPolynomial.from_var(self._by_name[name])

    def __repr__(self):
        return f"CoordinateSystem({self.name}: {[v.name for v in self.variables]})"


@dataclass
class TransitionMap:
    """Forward and declared-inverse components of one chart change."""

    source: CoordinateSystem
    target: CoordinateSystem
    forward: dict[Variable, SuperPolynomial]
    inverse: dict[Variable, SuperPolynomial]

    def forward_assignment(self):
        """Assignment substituting target variables by source expressions."""
        return self.forward

    def inverse_assignment(self):
        return self.inverse

    def reversed(self) -> "TransitionMap":
        return TransitionMap(self.target, self.source, self.inverse, self.forward)


@dataclass
class CheckItem:
    check_id: str
    ok: bool
    residual: str = ""

    def __str__(self):
        verdict = "PASS" if self.ok else "FAIL"
        tail = f"  residual: {self.residual}" if (self.residual and not self.ok) else ""
        return f"{verdict}  {self.check_id}{tail}"


@dataclass
class ValidationReport:
    items: list[CheckItem] = field(default_factory=list)

    def add(self, check_id: str, ok: bool, residual: str = ""):
        self.items.append(CheckItem(check_id, bool(ok), residual))

    def extend(self, other: "ValidationReport"):
        self.items.extend(other.items)

    @property
    def passed(self) -> bool:
        return all(item.ok for item in self.items)

    def failures(self) -> list[CheckItem]:
        return [i for i in self.items if not i.ok]

    def __str__(self):
        return "\n".join(str(i) for i in self.items)


class GradedBundle:
    """An atlas of charts with weight-homogeneous polynomial transitions."""

    def __init__(self, charts, transitions=None, origin=None):
        self.charts: list[CoordinateSystem] = list(charts)
        self.transitions: dict[tuple[int, int], TransitionMap] = dict(transitions or {})
        self.origin = origin
        arities = {c.arity for c in self.charts}
        if len(arities) != 1:
            raise ValueError(f"charts disagree on grading arity: {arities}")
        self.arity = arities.pop()

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.charts)

    @property
    def chart(self) -> CoordinateSystem:
        return self.charts[0]

    def transition_pairs(self):
        """Transitions in declaration order, one per unordered chart pair."""
        seen = set()
        for (i, j), t in self.transitions.items():
            if (j, i) in seen:
                continue
            seen.add((i, j))
            yield (i, j), t

    def __repr__(self):
        return (
            f"{type(self).__name__}(degree {self.degree}, arity {self.arity}, "
            f"{len(self.charts)} charts)"
        )


class NTupleBundle(GradedBundle):
    """A graded bundle whose weights have arity at least two."""

    def __init__(self, charts, transitions=None, origin=None):
        super().__init__(charts, transitions, origin)
        if self.arity < 2:
            raise ValueError("n-tuple bundles need weight arity >= 2")


def two_chart_bundle(chart_a, chart_b, forward, inverse, cls=GradedBundle, origin=None):
    """Convenience constructor for the default desk-scale atlas.

    ``forward`` and ``inverse`` map coordinate names of the respective target
    chart to polynomials over the other chart.
    """
    fwd = {chart_b[name]: p for name, p in forward.items()}
    inv = {chart_a[name]: p for name, p in inverse.items()}
    t = TransitionMap(chart_a, chart_b, fwd, inv)
    return cls([chart_a, chart_b], {(0, 1): t, (1, 0): t.reversed()}, origin=origin)


def single_chart_bundle(chart, cls=GradedBundle, origin=None):
    return cls([chart], {}, origin=origin)


# ------------------------------------------------------------------ validate
def _check_components(report, label, target_vars, components, arity):
    for v in target_vars:
        p = components.get(v)
        if p is None:
            report.add(f"{label}: component for {v.name} declared", False)
            continue
        w = weight_of(p, arity)
        ok = w == "zero" or w == v.weight
        report.add(
            f"{label}: weight of {v.name}-component",
            ok,
            "" if ok else f"weight {w}, expected {v.weight}",
        )
        par = p.parity()
        ok = par in ("zero", v.parity)
        report.add(
            f"{label}: parity of {v.name}-component",
            ok,
            "" if ok else f"parity {par}, expected {v.parity}",
        )


def _check_round_trip(report, label, t: TransitionMap):
    for v in t.source.variables:
        back = substitute(t.inverse[v], t.forward) if v in t.inverse else None
        if back is None:
            report.add(f"{label}: inverse component for {v.name} declared", False)
            continue
        residual = back - SuperPolynomial.from_var(v)
        report.add(
            f"{label}: round trip on {v.name}",
            residual.is_zero(),
            "" if residual.is_zero() else render(residual),
        )


def _check_linear_block(report, label, t: TransitionMap):
    # every non-base image must contain a term linear in equal-weight
    # coordinates: the invertible T-block of the structured transition form
    for v in t.target.nonbase:
        p = t.forward.get(v)
        if p is None:
            continue
        found = False
        for m in p.terms:
            nb = [(u, e) for u, e in m if total(u.weight) > 0]
            if len(nb) == 1 and nb[0][1] == 1 and nb[0][0].weight == v.weight:
                found = True
                break
        report.add(
            f"{label}: linear block present in {v.name}-component",
            found,
            "" if found else render(p),
        )


def validate(bundle: GradedBundle) -> ValidationReport:
    """Check homogeneity, declared invertibility and structure of an atlas."""
    report = ValidationReport()
    for (i, j), t in sorted(bundle.transitions.items()):
        label = f"transition {i}->{j}"
        _check_components(
            report, label, t.target.variables, t.forward, bundle.arity
        )
        _check_round_trip(report, label, t)
        _check_linear_block(report, label, t)
    if len(bundle.charts) >= 3:
        for i, j, k in itertools.permutations(range(len(bundle.charts)), 3):
            if (i, j) in bundle.transitions and (j, k) in bundle.transitions \
                    and (i, k) in bundle.transitions:
                t_ij = bundle.transitions[(i, j)]
                t_jk = bundle.transitions[(j, k)]
                t_ik = bundle.transitions[(i, k)]
                ok = True
                bad = ""
                for v in t_ik.target.variables:
                    composed = substitute(t_jk.forward[v], t_ij.forward)
                    if composed != t_ik.forward[v]:
                        ok = False
                        bad = f"{v.name}: {render(composed - t_ik.forward[v])}"
                        break
                report.add(f"cocycle {i}->{j}->{k}", ok, bad)
    return report


# ----------------------------------------------------------------- operators
def weight_vector_field(chart: CoordinateSystem, component: int = 0) -> Derivation:
    """The Euler-type field counting one weight component: sum of w v d/dv."""
    if component >= chart.arity:
        raise ValueError(f"component {component} out of range for arity {chart.arity}")
    action = {}
    for v in chart.variables:
        w = v.weight[component]
        if w:
            action[v] = SuperPolynomial.from_var(v) * w
    shift = tuple(0 for _ in range(chart.arity))
    return Derivation(action, 0, shift)


def _restrict_system(chart: CoordinateSystem, keep) -> tuple[CoordinateSystem, dict]:
    specs = [(v.name, v.weight, v.parity) for v in chart.variables if keep(v)]
    new = CoordinateSystem(specs, name=f"{chart.name}", arity=chart.arity)
    varmap = {v: new[v.name] for v in chart.variables if keep(v)}
    return new, varmap


def _restrict_bundle(bundle, keep, origin, on_component=None, cls=None):
    """Rebuild the atlas on the kept variables.

    ``on_component`` post-processes each transition polynomial (already
    remapped into the new variables); dropped variables appearing in a kept
    image raise IllDefinedProjection.
    """
    new_charts = []
    varmaps = []
    for chart in bundle.charts:
        nc, vm = _restrict_system(chart, keep)
        new_charts.append(nc)
        varmaps.append(vm)

    def convert(p, src_map, what):
        for v in p.variables():
            if v not in src_map:
                raise IllDefinedProjection(
                    f"{what} depends on dropped coordinate {v.name}"
                )
        q = remap(p, src_map)
        return on_component(q) if on_component else q

    new_transitions = {}
    for (i, j), t in bundle.transitions.items():
        fwd = {}
        for v, p in t.forward.items():
            if keep(v):
                fwd[varmaps[j][v]] = convert(p, varmaps[i], f"image of {v.name}")
        inv = {}
        for v, p in t.inverse.items():
            if keep(v):
                inv[varmaps[i][v]] = convert(p, varmaps[j], f"image of {v.name}")
        new_transitions[(i, j)] = TransitionMap(new_charts[i], new_charts[j], fwd, inv)
    cls = cls or type(bundle)
    out = cls(new_charts, new_transitions, origin=origin)
    out._varmaps = varmaps
    return out


def project_leq(bundle: GradedBundle, l: int, component: int | None = None,
                cls=None) -> GradedBundle:
    """Base of the fibration keeping weights <= l (total or one component)."""
    if component is None:
        keep = lambda v: total(v.weight) <= l
        tag = ("project_total", l)
    else:
        keep = lambda v: v.weight[component] <= l
        tag = ("project_component", component, l)
    return _restrict_bundle(bundle, keep, origin=(tag, bundle), cls=cls)


def project_tower(bundle: GradedBundle, l: int) -> GradedBundle:
    """The tower fibration F_k -> F_l, recorded in the result's origin.

    Levels above the degree act as the identity, so composites satisfy
    project(project(F, l), m) = project(F, min(l, m)).
    """
    if l < 0:
        raise ValueError(f"negative tower level {l}")
    return project_leq(bundle, l, cls=GradedBundle)


def core_submanifold(bundle: GradedBundle, i: int) -> GradedBundle:
    """Set to zero every coordinate of weight 0 < w <= i and keep the rest."""
    if not 0 <= i < bundle.degree:
        raise ValueError(f"core level {i} outside 0..{bundle.degree - 1}")
    if i == 0:
        return bundle
    killed = {
        v
        for chart in bundle.charts
        for v in chart.variables
        if 0 < total(v.weight) <= i
    }
    zero_map = {v: ZERO for v in killed}

    new_charts = []
    varmaps = []
    for chart in bundle.charts:
        nc, vm = _restrict_system(chart, lambda v: v not in killed)
        new_charts.append(nc)
        varmaps.append(vm)

    new_transitions = {}
    for (a, b), t in bundle.transitions.items():
        def conv(p, vm):
            q = substitute(p, zero_map)
            return remap(q, vm)
        fwd = {
            varmaps[b][v]: conv(p, varmaps[a])
            for v, p in t.forward.items() if v not in killed
        }
        inv = {
            varmaps[a][v]: conv(p, varmaps[b])
            for v, p in t.inverse.items() if v not in killed
        }
        new_transitions[(a, b)] = TransitionMap(new_charts[a], new_charts[b], fwd, inv)
    return GradedBundle(new_charts, new_transitions,
                        origin=(("core", i), bundle))


def _lift_chart(chart: CoordinateSystem, dotted_weight, dotted_of_base: bool,
                prefix: str = "d"):
    """Bi-graded chart with a dotted copy of (some) coordinates.

    Undotted variables get weight (w, 0); each dotted partner of a weight-w
    variable gets ``dotted_weight(w)`` and the same parity.
    """
    specs = [(v.name, v.weight + (0,), v.parity) for v in chart.variables]
    dotted_names = {}
    taken = {v.name for v in chart.variables}
    for v in chart.variables:
        if not dotted_of_base and total(v.weight) == 0:
            continue
        name = prefix + v.name
        while name in taken:
            name = prefix + name
        taken.add(name)
        dotted_names[v] = name
        specs.append((name, dotted_weight(total(v.weight)), v.parity))
    new = CoordinateSystem(specs, name=chart.name + "_" + prefix,
                           arity=chart.arity + 1)
    varmap = {v: new[v.name] for v in chart.variables}
    dotmap = {v: new[n] for v, n in dotted_names.items()}
    return new, varmap, dotmap


def _differential_lift(bundle: GradedBundle, dotted_weight, dotted_of_base: bool,
                       origin_tag: str, cls=NTupleBundle):
    """Adjoin dotted coordinates transforming by the differentials of the
    undotted transition laws.  Vertical bundles (dotted for fibre directions
    only) and full tangent bundles (dotted for everything) both come from
    here."""
    if bundle.arity != 1:
        raise ValueError("differential lifts are implemented for arity-1 bundles")
    lifted = [
        _lift_chart(c, dotted_weight, dotted_of_base) for c in bundle.charts
    ]
    charts = [lc[0] for lc in lifted]
    varmaps = [lc[1] for lc in lifted]
    dotmaps = [lc[2] for lc in lifted]

    def lift_components(components, src_idx, dst_idx):
        src_vm, src_dm = varmaps[src_idx], dotmaps[src_idx]
        dst_vm, dst_dm = varmaps[dst_idx], dotmaps[dst_idx]
        out = {}
        for v, p in components.items():
            out[dst_vm[v]] = remap(p, src_vm)
        for v, p in components.items():
            if v not in dst_dm:
                continue
            dp = ZERO
            for u in p.variables():
                if u in src_dm:
                    dp = dp + SuperPolynomial.from_var(src_dm[u]) * remap(
                        partial(p, u), src_vm
                    )
            out[dst_dm[v]] = dp
        return out

    transitions = {}
    for (i, j), t in bundle.transitions.items():
        fwd = lift_components(t.forward, i, j)
        inv = lift_components(t.inverse, j, i)
        transitions[(i, j)] = TransitionMap(charts[i], charts[j], fwd, inv)
    out = cls(charts, transitions, origin=((origin_tag,), bundle))
    out.lift_source = bundle
    out.undotted_of = varmaps
    out.dotted_of = dotmaps
    return out


def vertical_bundle(bundle: GradedBundle) -> NTupleBundle:
    """Tangent directions along the fibration over the base.

    The dotted copy of a weight-w coordinate carries bi-weight (w-1, 1), so
    the vertical bundle is again of total degree k.
    """
    if bundle.degree < 1:
        raise ValueError("vertical bundle needs degree >= 1")
    return _differential_lift(
        bundle, lambda w: (w - 1, 1), dotted_of_base=False, origin_tag="vertical"
    )


def tangent_bundle(bundle: GradedBundle) -> NTupleBundle:
    """Full tangent lift; dotted weight-w coordinates carry bi-weight (w, 1)."""
    return _differential_lift(
        bundle, lambda w: (w, 1), dotted_of_base=True, origin_tag="tangent"
    )

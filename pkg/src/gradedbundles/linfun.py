"""Linearisation of graded bundles, linear duals, pairing, parity reversion.

The linearisation of a degree-k bundle is obtained from its vertical bundle
by projecting out the top-weight undotted coordinates; the dotted transition
laws are the differentials of the undotted ones.  The result is a
graded-linear bundle: a double graded bundle whose second weight takes
values in {0, 1} and whose weight-1 leg is a vector bundle over the degree
k-1 base leg.

Dual transitions are computed, never user-supplied: the linear part of the
dotted laws is block-triangular in weight with the user's invertible
diagonal blocks, so the contragredient comes out of the declared inverse
atlas by differentiation and substitution alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .superalg import (
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
from .bundle import (
    CoordinateSystem,
    GradedBundle,
    NTupleBundle,
    TransitionMap,
    ValidationReport,
    project_leq,
    vertical_bundle,
)


class WeightViolation(ValueError):
    """A morphism component fails weight or parity preservation."""


class NotSymmetric(ValueError):
    """A GL-bundle is not the linearisation of any graded bundle."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NonlinearFiber(ValueError):
    """A transition component is not linear in the vector-bundle leg."""


class GLBundle(NTupleBundle):
    """Double graded bundle with a linear (Euler) second leg.

    The base leg (second weight 0) is a graded bundle of degree k-1, the
    fibre coordinates carry second weight 1 and appear linearly in every
    transition.
    """

    def __init__(self, charts, transitions=None, origin=None, gl_degree=None):
        super().__init__(charts, transitions, origin)
        for chart in self.charts:
            for v in chart.variables:
                if v.weight[1] not in (0, 1):
                    raise ValueError(
                        f"{v.name} has second weight {v.weight[1]}, expected 0 or 1"
                    )
        top = max(
            (v.weight[0] for c in self.charts for v in c.variables), default=0
        )
        self.gl_degree = gl_degree if gl_degree is not None else top + 1
        if top > self.gl_degree - 1:
            raise ValueError(
                f"first weight {top} exceeds degree bound {self.gl_degree - 1}"
            )

    def fiber_vars(self, chart_idx=0):
        return tuple(
            v for v in self.charts[chart_idx].variables if v.weight[1] == 1
        )

    def base_leg_vars(self, chart_idx=0):
        return tuple(
            v for v in self.charts[chart_idx].variables if v.weight[1] == 0
        )

    def fiber_block(self, u: int, chart_idx=0):
        return tuple(v for v in self.fiber_vars(chart_idx) if v.weight[0] == u)

    def base_block(self, w: int, chart_idx=0):
        return tuple(
            v for v in self.base_leg_vars(chart_idx) if v.weight[0] == w
        )

    def base_bundle(self) -> GradedBundle:
        """The degree k-1 bundle carried by the second-weight-0 leg."""
        flat = project_leq(self, 0, component=1, cls=NTupleBundle)
        charts, transitions = _collapse_to_arity_one(flat)
        return GradedBundle(charts, transitions, origin=(("base_leg",), self))


def _collapse_to_arity_one(bundle: GradedBundle):
    """Rebuild an arity-2 bundle whose second weights are all zero as arity 1."""
    charts = []
    varmaps = []
    for c in bundle.charts:
        specs = [(v.name, (v.weight[0],), v.parity) for v in c.variables]
        nc = CoordinateSystem(specs, name=c.name, arity=1)
        charts.append(nc)
        varmaps.append({v: nc[v.name] for v in c.variables})
    transitions = {}
    for (i, j), t in bundle.transitions.items():
        fwd = {varmaps[j][v]: remap(p, varmaps[i]) for v, p in t.forward.items()}
        inv = {varmaps[i][v]: remap(p, varmaps[j]) for v, p in t.inverse.items()}
        transitions[(i, j)] = TransitionMap(charts[i], charts[j], fwd, inv)
    return charts, transitions


# --------------------------------------------------------------- linearise
def linearise(F: GradedBundle) -> GLBundle:
    """D(F): vertical bundle with the top-weight undotted coordinates
    projected out.  Carries maps from F's variables to its own."""
    if F.degree < 1:
        raise ValueError("linearisation needs degree >= 1")
    k = F.degree
    V = vertical_bundle(F)
    D = project_leq(V, k - 1, component=0, cls=GLBundle)
    D.gl_degree = k
    proj_maps = D._varmaps
    D.lin_source = F
    D.undotted_of = []
    D.dotted_of = []
    for i in range(len(F.charts)):
        und = {}
        dot = {}
        for v, vv in V.undotted_of[i].items():
            if vv in proj_maps[i]:
                und[v] = proj_maps[i][vv]
        for v, vd in V.dotted_of[i].items():
            dot[v] = proj_maps[i][vd]
        D.undotted_of.append(und)
        D.dotted_of.append(dot)
    D.origin = (("linearise",), F)
    return D


# --------------------------------------------------------------- morphisms
@dataclass
class GradedMorphism:
    """Chart-level morphism: pullback components of target coordinates."""

    source: GradedBundle
    target: GradedBundle
    components: dict[Variable, SuperPolynomial]

    def component(self, v: Variable) -> SuperPolynomial:
        return self.components[v]

    def assignment(self):
        return self.components

    def validate(self) -> None:
        """Raise WeightViolation unless weight and parity are preserved.

        Weights are compared component-wise between equal arities and by
        total weight across different arities (embeddings into double
        graded bundles use the total weight on the target).
        """
        same_arity = self.source.arity == self.target.arity
        for v in self.target.chart.variables:
            p = self.components.get(v)
            if p is None:
                raise WeightViolation(f"missing component for {v.name}")
            w = weight_of(p, self.source.arity)
            if w == "zero":
                continue
            if w == "inhomogeneous":
                raise WeightViolation(f"component of {v.name} is inhomogeneous")
            expected = v.weight if same_arity else total(v.weight)
            got = w if same_arity else total(w)
            if got != expected:
                raise WeightViolation(
                    f"component of {v.name} has weight {w}, expected {v.weight}"
                )
            par = p.parity()
            if par not in ("zero", v.parity):
                raise WeightViolation(f"component of {v.name} flips parity")


def identity_morphism(F: GradedBundle) -> GradedMorphism:
    return GradedMorphism(
        F, F, {v: SuperPolynomial.from_var(v) for v in F.chart.variables}
    )


def compose_morphisms(outer: GradedMorphism, inner: GradedMorphism) -> GradedMorphism:
    """outer after inner; pullbacks compose the other way round."""
    comps = {
        v: substitute(p, inner.components) for v, p in outer.components.items()
    }
    return GradedMorphism(inner.source, outer.target, comps)


def morphisms_equal(a: GradedMorphism, b: GradedMorphism) -> bool:
    keys = set(a.components) | set(b.components)
    return all(a.components.get(v, ZERO) == b.components.get(v, ZERO) for v in keys)


def linearise_morphism(
    phi: GradedMorphism, DF: GLBundle | None = None, DFp: GLBundle | None = None
) -> GradedMorphism:
    """The linearisation functor on morphisms.

    Dotted components are the differentials of the undotted ones with the
    top-weight source coordinates projected out.
    """
    phi.validate()
    F, Fp = phi.source, phi.target
    DF = DF if DF is not None else linearise(F)
    DFp = DFp if DFp is not None else linearise(Fp)
    k = F.degree
    tops = {v for v in F.chart.variables if total(v.weight) == k}
    drop_top = {v: ZERO for v in tops}
    und_src = DF.undotted_of[0]
    dot_src = DF.dotted_of[0]

    comps: dict[Variable, SuperPolynomial] = {}
    for vt, dvt in DFp.undotted_of[0].items():
        p = substitute(phi.components[vt], drop_top)
        comps[dvt] = remap(p, und_src)
    for vt, dvt in DFp.dotted_of[0].items():
        dp = ZERO
        body = phi.components[vt]
        for u in F.chart.nonbase:
            if u not in body.variables():
                continue
            coeff = substitute(partial(body, u), drop_top)
            dp = dp + SuperPolynomial.from_var(dot_src[u]) * remap(coeff, und_src)
        comps[dvt] = dp
    return GradedMorphism(DF, DFp, comps)


def holonomic_assignment(DF: GLBundle, chart_idx: int = 0):
    """Pullback data of the embedding F -> D(F) on one chart.

    Undotted coordinates pull back to themselves, the dotted copy of a
    weight-w coordinate pulls back to w times that coordinate.
    """
    F = DF.lin_source
    out: dict[Variable, SuperPolynomial] = {}
    for v, dv in DF.undotted_of[chart_idx].items():
        out[dv] = SuperPolynomial.from_var(v)
    for v, dv in DF.dotted_of[chart_idx].items():
        out[dv] = SuperPolynomial.from_var(v) * total(v.weight)
    return out


def holonomic_embedding(F: GradedBundle, DF: GLBundle | None = None) -> GradedMorphism:
    DF = DF if DF is not None else linearise(F)
    return GradedMorphism(F, DF, holonomic_assignment(DF, 0))


def embedding_compatibility(F: GradedBundle, DF: GLBundle | None = None) -> ValidationReport:
    """Check that the dotted laws pulled back through the embedding give
    the weight multiple of the undotted laws, on every transition."""
    DF = DF if DF is not None else linearise(F)
    report = ValidationReport()
    for (i, j), t in sorted(DF.transitions.items()):
        holo_i = holonomic_assignment(DF, i)
        tF = F.transitions[(i, j)]
        for v, dv in DF.dotted_of[j].items():
            lhs = substitute(t.forward[dv], holo_i)
            rhs = tF.forward[v] * total(v.weight)
            residual = lhs - rhs
            report.add(
                f"transition {i}->{j}: embedding compatibility on {dv.name}",
                residual.is_zero(),
                "" if residual.is_zero() else render(residual),
            )
    return report


# ----------------------------------------------------------- symmetric test
def _paired_blocks(G: GLBundle, chart_idx: int):
    """Pair each non-top fibre block with the equally indexed base block.

    Returns (pairs, top) where pairs[w] is a list of (fibre var, base var)
    for the (w-1, 1) fibre block against the weight-w base block.
    """
    k = G.gl_degree
    pairs = {}
    for w in range(1, k):
        fib = G.fiber_block(w - 1, chart_idx)
        base = G.base_block(w, chart_idx)
        if len(fib) != len(base):
            raise NotSymmetric(
                f"chart {chart_idx}: fibre block ({w - 1},1) has size {len(fib)}"
                f" but base block of weight {w} has size {len(base)}",
                witness=(fib, base),
            )
        pairs[w] = list(zip(fib, base))
    return pairs, G.fiber_block(k - 1, chart_idx)


def symmetry_report(G: GLBundle) -> ValidationReport:
    """Both halves of the symmetric criterion as report items.

    (a) the non-top fibre coordinates transform as the vertical lift of the
    base leg, (b) the lower-index tensors of the top block are symmetric,
    i.e. the top transition is the differential of some undotted law.
    """
    report = ValidationReport()
    k = G.gl_degree
    try:
        block_data = [_paired_blocks(G, idx) for idx in range(len(G.charts))]
    except NotSymmetric as exc:
        report.add("fibre/base block sizes match", False, str(exc))
        return report
    report.add("fibre/base block sizes match", True)

    for (i, j), t in sorted(G.transitions.items()):
        pairs_i, _ = block_data[i]
        pairs_j, top_j = block_data[j]
        dot_of_base_i = {b: f for w in pairs_i.values() for f, b in w}
        label = f"transition {i}->{j}"
        for w, entries in pairs_j.items():
            for fvar, bvar in entries:
                expected = ZERO
                law = t.forward[bvar]
                for u in law.variables():
                    if u in dot_of_base_i:
                        expected = expected + SuperPolynomial.from_var(
                            dot_of_base_i[u]
                        ) * partial(law, u)
                residual = t.forward[fvar] - expected
                report.add(
                    f"{label}: {fvar.name} transforms as the vertical lift of {bvar.name}",
                    residual.is_zero(),
                    "" if residual.is_zero() else render(residual),
                )
        base_nonbase_i = [
            b for w in sorted(pairs_i) for _, b in pairs_i[w]
        ]
        for zt in top_j:
            law = t.forward[zt]
            coeffs = {}
            for fvar, bvar in ((f, b) for w in pairs_i.values() for f, b in w):
                c = partial(law, fvar)
                if not c.is_zero():
                    coeffs[bvar] = c
            for a in base_nonbase_i:
                for b in base_nonbase_i:
                    if a.index >= b.index:
                        continue
                    lhs = partial(coeffs.get(a, ZERO), b)
                    rhs = partial(coeffs.get(b, ZERO), a)
                    residual = lhs - rhs
                    report.add(
                        f"{label}: {zt.name}-tensor symmetric in ({a.name},{b.name})",
                        residual.is_zero(),
                        "" if residual.is_zero() else render(residual),
                    )
    return report


def is_symmetric(G: GLBundle) -> bool:
    return symmetry_report(G).passed


def _strip_dot_name(name: str, taken: set) -> str:
    cand = name[1:] if name.startswith("d") and len(name) > 1 else name
    if cand in taken or not cand:
        cand = name + "_u"
    while cand in taken:
        cand += "_u"
    return cand


def reconstruct(G: GLBundle) -> GradedBundle:
    """Rebuild the graded bundle whose linearisation a symmetric GL-bundle is.

    The holonomic locus is imposed by substituting w*y for each non-top
    fibre coordinate, and the top fibre coordinate is rescaled by 1/k.
    """
    rep = symmetry_report(G)
    if not rep.passed:
        bad = rep.failures()[0]
        raise NotSymmetric(f"not a linearisation: {bad.check_id}", witness=bad)
    k = G.gl_degree
    charts = []
    assignments = []  # per chart: G-variable -> polynomial in new variables
    new_name = []  # per chart: G-variable -> its coordinate name on F
    for idx, chart in enumerate(G.charts):
        pairs, top = _paired_blocks(G, idx)
        specs = [(v.name, (v.weight[0],), v.parity) for v in G.base_leg_vars(idx)]
        taken = {s[0] for s in specs}
        naming = {v: v.name for v in G.base_leg_vars(idx)}
        for zv in top:
            nm = _strip_dot_name(zv.name, taken)
            taken.add(nm)
            naming[zv] = nm
            specs.append((nm, (k,), zv.parity))
        nc = CoordinateSystem(specs, name=chart.name + "_rec", arity=1)
        charts.append(nc)
        assign: dict[Variable, SuperPolynomial] = {}
        for v in G.base_leg_vars(idx):
            assign[v] = nc.var(v.name)
        for w, entries in pairs.items():
            for fvar, bvar in entries:
                assign[fvar] = nc.var(bvar.name) * w
        for zv in top:
            assign[zv] = nc.var(naming[zv]) * k
        assignments.append(assign)
        new_name.append(naming)

    inv_k = Fraction(1, k)
    transitions = {}
    for (i, j), t in G.transitions.items():
        fwd = {}
        inv = {}
        for v in G.base_leg_vars(j):
            fwd[charts[j][v.name]] = substitute(t.forward[v], assignments[i])
        for zv in G.fiber_block(k - 1, j):
            fwd[charts[j][new_name[j][zv]]] = substitute(
                t.forward[zv], assignments[i]) * inv_k
        for v in G.base_leg_vars(i):
            inv[charts[i][v.name]] = substitute(t.inverse[v], assignments[j])
        for zv in G.fiber_block(k - 1, i):
            inv[charts[i][new_name[i][zv]]] = substitute(
                t.inverse[zv], assignments[j]) * inv_k
        transitions[(i, j)] = TransitionMap(charts[i], charts[j], fwd, inv)
    out = GradedBundle(charts, transitions, origin=(("reconstruct",), G))
    out.holonomic_assignments = assignments
    return out


# -------------------------------------------------------------- linear dual
def linear_dual(F: GradedBundle, DF: GLBundle | None = None) -> GLBundle:
    """The dual of the vector bundle D(F) -> F_{k-1}.

    Dual fibre coordinates are named p<fibre name>; the dual of a bi-weight
    (u, 1) coordinate carries bi-weight (k-1-u, 1).  Transitions are the
    contragredients of the dotted laws, obtained from the declared inverse
    atlas by differentiation and substitution.
    """
    DF = DF if DF is not None else linearise(F)
    k = DF.gl_degree
    charts = []
    base_maps = []
    pi_of = []
    for chart in DF.charts:
        specs = [(v.name, v.weight, v.parity) for v in chart.variables if v.weight[1] == 0]
        taken = {s[0] for s in specs}
        fib = [v for v in chart.variables if v.weight[1] == 1]
        dual_names = {}
        for v in fib:
            nm = "p" + v.name
            while nm in taken:
                nm = "p" + nm
            taken.add(nm)
            dual_names[v] = nm
            specs.append((nm, (k - 1 - v.weight[0], 1), v.parity))
        nc = CoordinateSystem(specs, name=chart.name + "_dual", arity=2)
        charts.append(nc)
        base_maps.append({v: nc[v.name] for v in chart.variables if v.weight[1] == 0})
        pi_of.append({v: nc[dual_names[v]] for v in fib})

    transitions = {}
    for (i, j), t in DF.transitions.items():
        fwd: dict[Variable, SuperPolynomial] = {}
        inv: dict[Variable, SuperPolynomial] = {}
        for v in DF.base_leg_vars(j):
            fwd[base_maps[j][v]] = remap(t.forward[v], base_maps[i])
        for v in DF.base_leg_vars(i):
            inv[base_maps[i][v]] = remap(t.inverse[v], base_maps[j])
        fwd_assign = t.forward
        inv_assign = t.inverse
        fib_i = [v for v in DF.charts[i].variables if v.weight[1] == 1]
        fib_j = [v for v in DF.charts[j].variables if v.weight[1] == 1]
        for ap in fib_j:
            expr = ZERO
            for b in fib_i:
                entry = partial(t.inverse[b], ap)
                if entry.is_zero():
                    continue
                entry = substitute(entry, fwd_assign)
                expr = expr + remap(entry, base_maps[i]) * SuperPolynomial.from_var(
                    pi_of[i][b]
                )
            fwd[pi_of[j][ap]] = expr
        for b in fib_i:
            expr = ZERO
            for ap in fib_j:
                entry = partial(t.forward[ap], b)
                if entry.is_zero():
                    continue
                entry = substitute(entry, inv_assign)
                expr = expr + remap(entry, base_maps[j]) * SuperPolynomial.from_var(
                    pi_of[j][ap]
                )
            inv[pi_of[i][b]] = expr
        transitions[(i, j)] = TransitionMap(charts[i], charts[j], fwd, inv)

    dual = GLBundle(charts, transitions, origin=(("linear_dual",), F), gl_degree=k)
    dual.dual_of = DF
    dual.pi_of = pi_of
    dual.base_maps = base_maps
    return dual


# ------------------------------------------------------------------ pairing
@dataclass
class PairingResult:
    """The canonical pairing polynomial on D*(F) x_{F_{k-1}} F."""

    bundle: GradedBundle
    dual: GLBundle
    systems: list[CoordinateSystem]
    polynomials: list[SuperPolynomial]
    transitions: dict

    @property
    def polynomial(self) -> SuperPolynomial:
        return self.polynomials[0]

    def check_invariance(self) -> ValidationReport:
        report = ValidationReport()
        for (i, j), assign in sorted(self.transitions.items()):
            residual = substitute(self.polynomials[j], assign) - self.polynomials[i]
            report.add(
                f"transition {i}->{j}: pairing invariance",
                residual.is_zero(),
                "" if residual.is_zero() else render(residual),
            )
        return report


def pairing(F: GradedBundle, dual: GLBundle | None = None) -> PairingResult:
    """delta* = sum_w w pi y_w + k pi^1 z, of bi-weight (k, 1)."""
    dual = dual if dual is not None else linear_dual(F)
    DF = dual.dual_of
    k = DF.gl_degree
    systems = []
    polys = []
    f_maps = []
    d_maps = []
    for idx, fchart in enumerate(F.charts):
        specs = [(v.name, v.weight + (0,), v.parity) for v in fchart.variables]
        dchart = dual.charts[idx]
        taken = {v.name for v in fchart.variables}
        dual_fib = [v for v in dchart.variables if v.weight[1] == 1]
        for v in dual_fib:
            nm = v.name
            while nm in taken:
                nm = nm + "_d"
            taken.add(nm)
            specs.append((nm, v.weight, v.parity))
        sys = CoordinateSystem(specs, name=f"pairing_{fchart.name}", arity=2)
        systems.append(sys)
        fmap = {v: sys[v.name] for v in fchart.variables}
        f_maps.append(fmap)
        dmap = {}
        names = iter([s[0] for s in specs[len(fchart.variables):]])
        for v in dual_fib:
            dmap[v] = sys[next(names)]
        d_maps.append(dmap)
        delta = ZERO
        for fvar, dot in DF.dotted_of[idx].items():
            w = total(fvar.weight)
            pi = dmap[dual.pi_of[idx][dot]]
            delta = delta + (
                SuperPolynomial.from_var(pi)
                * SuperPolynomial.from_var(fmap[fvar])
                * w
            )
        polys.append(delta)

    pair_transitions = {}
    for (i, j), tF in F.transitions.items():
        tD = dual.transitions[(i, j)]
        assign = {}
        for v, p in tF.forward.items():
            assign[f_maps[j][v]] = remap(p, f_maps[i])
        for v in dual.charts[j].variables:
            if v.weight[1] != 1:
                continue
            q = tD.forward[v]
            lift = {}
            for u in q.variables():
                # dual base-leg variables share their names with F variables
                img = d_maps[i].get(u, None)
                lift[u] = SuperPolynomial.from_var(img if img is not None else systems[i][u.name])
            assign[d_maps[j][v]] = substitute(q, lift)
        pair_transitions[(i, j)] = assign
    return PairingResult(F, dual, systems, polys, pair_transitions)


# ----------------------------------------------------------------- mironian
def mironian(F: GradedBundle, dual: GLBundle | None = None) -> GLBundle:
    """Sub-bundle of the linear dual spanned by the bi-weight (0,1) momenta."""
    dual = dual if dual is not None else linear_dual(F)
    k = dual.gl_degree
    keep = lambda v: v.weight[0] + k * v.weight[1] <= k
    from .bundle import _restrict_bundle

    mi = _restrict_bundle(dual, keep, origin=(("mironian",), F), cls=GLBundle)
    mi.gl_degree = k
    return mi


def mironian_report(F: GradedBundle, dual: GLBundle | None = None) -> ValidationReport:
    """Structural identification Mi(F) = F_{k-1} x_M (bar F_k)*."""
    dual = dual if dual is not None else linear_dual(F)
    report = ValidationReport()
    try:
        mi = mironian(F, dual)
    except Exception as exc:  # pragma: no cover - defensive
        report.add("mironian restriction is well defined", False, str(exc))
        return report
    report.add("mironian restriction is well defined", True)
    for (i, j), t in sorted(mi.transitions.items()):
        for v in mi.charts[j].variables:
            if v.weight[1] != 1:
                continue
            p = t.forward[v]
            offenders = [u.name for u in p.variables() if total(u.weight) > 0 and u.weight[1] == 0]
            report.add(
                f"transition {i}->{j}: {v.name}-component depends only on base",
                not offenders,
                ", ".join(offenders),
            )
    return report


# ---------------------------------------------------------- parity reversal
def _relabel_ordered(p: SuperPolynomial, varmap) -> SuperPolynomial:
    """Relabel variables assuming the map preserves the declaration order."""
    out = {}
    for m, c in p.terms.items():
        nm = tuple((varmap.get(v, v), e) for v, e in m)
        out[nm] = out.get(nm, 0) + c
    return SuperPolynomial(out)


def parity_reverse(G: GLBundle) -> GLBundle:
    """Flip the Grassmann parity of the vector-bundle leg.

    Transitions are unchanged as polynomials; linearity in the fibre leg is
    what makes this well formed, so it is re-checked defensively.
    """
    for (i, j), t in G.transitions.items():
        for v, p in t.forward.items():
            for m in p.terms:
                deg = sum(e for u, e in m if u.weight[1] == 1)
                if deg > 1:
                    raise NonlinearFiber(
                        f"transition {i}->{j}: {v.name}-component is nonlinear: {render(p)}"
                    )
    charts = []
    varmaps = []
    for chart in G.charts:
        specs = [
            (v.name, v.weight, (v.parity + 1) % 2 if v.weight[1] == 1 else v.parity)
            for v in chart.variables
        ]
        nc = CoordinateSystem(specs, name=chart.name + "_pi", arity=2)
        charts.append(nc)
        varmaps.append({v: nc[v.name] for v in chart.variables})
    transitions = {}
    for (i, j), t in G.transitions.items():
        fwd = {varmaps[j][v]: _relabel_ordered(p, varmaps[i]) for v, p in t.forward.items()}
        inv = {varmaps[i][v]: _relabel_ordered(p, varmaps[j]) for v, p in t.inverse.items()}
        transitions[(i, j)] = TransitionMap(charts[i], charts[j], fwd, inv)
    out = GLBundle(charts, transitions, origin=(("parity_reverse",), G),
                   gl_degree=G.gl_degree)
    out.reversed_of = G
    return out


# ------------------------------------------------------- structural equality
def bundles_structurally_equal(b1: GradedBundle, b2: GradedBundle,
                               names=None) -> bool:
    """Equality of atlases up to renaming charts' variables by name.

    ``names`` maps b1 variable names to b2 variable names (identity when
    omitted).  Weights, parities and all transition components must agree.
    """
    if len(b1.charts) != len(b2.charts):
        return False
    names = names or (lambda n: n)
    varmaps = []
    for c1, c2 in zip(b1.charts, b2.charts):
        if len(c1) != len(c2):
            return False
        vm = {}
        for v in c1.variables:
            target = names(v.name)
            if target not in c2:
                return False
            w = c2[target]
            if v.weight != w.weight or v.parity != w.parity:
                return False
            vm[v] = w
        varmaps.append(vm)
    if set(b1.transitions) != set(b2.transitions):
        return False
    for (i, j), t1 in b1.transitions.items():
        t2 = b2.transitions[(i, j)]
        for v, p in t1.forward.items():
            if _relabel_ordered(p, varmaps[i]) != t2.forward[varmaps[j][v]]:
                return False
        for v, p in t1.inverse.items():
            if _relabel_ordered(p, varmaps[j]) != t2.inverse[varmaps[i][v]]:
                return False
    return True

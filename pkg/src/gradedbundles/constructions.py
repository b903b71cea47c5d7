"""Canonical weighted-algebroid constructions.

Tangent and cotangent algebroids of graded bundles, higher tangent bundles
by total-derivative prolongation, complete lifts, the reduction tower of a
Lie group's higher tangent bundles, the reduced bracket of its sections and
the groupoid-prolongation algebroid (taken at algebroid-data level).

Conventions: the weight-r coordinate of a higher tangent bundle is the
jet coefficient x^(r)/r!, and the structure field of a Lie algebra acts on
odd fibre coordinates by xi^c -> -1/2 c^c_{ab} xi^a xi^b.  Both choices are
what make the reduction identities come out as exact equalities of
components rather than equalities up to rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .superalg import (
    Derivation,
    EVEN,
    ODD,
    SuperPolynomial,
    Variable,
    ZERO,
    commutator,
    partial,
    remap,
    total,
    weight_of,
)
from .bundle import (
    CoordinateSystem,
    GradedBundle,
    NTupleBundle,
    TransitionMap,
    single_chart_bundle,
    tangent_bundle,
    two_chart_bundle,
)
from .linfun import GLBundle
from .algebroid import (
    HomologicalField,
    OddPhaseSpace,
    OddPoissonSpace,
    WeightedAlgebroid,
)


# ------------------------------------------------------- structure constants
@dataclass
class StructureConstants:
    """Antisymmetric three-index data c^k_{ij} with a computed Jacobi verdict."""

    dim: int
    c: dict[tuple[int, int, int], Fraction]

    def __post_init__(self):
        full: dict[tuple[int, int, int], Fraction] = {}
        for (i, j, k), v in self.c.items():
            v = Fraction(v)
            if not (1 <= i <= self.dim and 1 <= j <= self.dim and 1 <= k <= self.dim):
                raise ValueError(f"index out of range in c^{k}_{{{i}{j}}}")
            if v == 0:
                continue
            for key, val in (((i, j, k), v), ((j, i, k), -v)):
                if key in full and full[key] != val:
                    raise ValueError(f"antisymmetry conflict at {key}")
                full[key] = val
        if any(full.get((i, i, k), 0) != 0 for i in range(1, self.dim + 1)
               for k in range(1, self.dim + 1)):
            raise ValueError("diagonal entries must vanish")
        self.c = full

    def value(self, i: int, j: int, k: int) -> Fraction:
        return self.c.get((i, j, k), Fraction(0))

    def bracket(self, a: int, b: int) -> dict[int, Fraction]:
        """[e_a, e_b] as a coefficient vector."""
        return {
            k: self.value(a, b, k)
            for k in range(1, self.dim + 1)
            if self.value(a, b, k) != 0
        }

    def jacobi_residuals(self) -> dict[tuple[int, int, int, int], Fraction]:
        out = {}
        d = self.dim
        for i in range(1, d + 1):
            for j in range(i + 1, d + 1):
                for k in range(j + 1, d + 1):
                    for l in range(1, d + 1):
                        s = Fraction(0)
                        for m in range(1, d + 1):
                            s += self.value(i, j, m) * self.value(m, k, l)
                            s += self.value(j, k, m) * self.value(m, i, l)
                            s += self.value(k, i, m) * self.value(m, j, l)
                        if s:
                            out[(i, j, k, l)] = s
        return out

    @property
    def satisfies_jacobi(self) -> bool:
        return not self.jacobi_residuals()


def abelian(dim: int) -> StructureConstants:
    return StructureConstants(dim, {})


def so3() -> StructureConstants:
    return StructureConstants(3, {(1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1})


def sl2() -> StructureConstants:
    # basis (e, f, h): [e,f] = h, [h,e] = 2e, [h,f] = -2f
    return StructureConstants(3, {(1, 2, 3): 1, (3, 1, 1): 2, (3, 2, 2): -2})


def heisenberg3() -> StructureConstants:
    return StructureConstants(3, {(1, 2, 3): 1})


# ------------------------------------------------------------ algebroid data
@dataclass
class AlgebroidData:
    """A Lie-algebroid chart: anchor and bracket coefficient polynomials.

    ``anchor[(a, A)]`` is P_a^A(x), the coefficient of d/dx^A in the image
    of the fibre basis vector a; ``bracket[(a, b, c)]`` is the c-component
    of [e_a, e_b], polynomial in the base coordinates and antisymmetric in
    (a, b).  The Lie verdict is the vanishing of the square of the induced
    weight-one field, computed rather than assumed.
    """

    base: CoordinateSystem
    fiber_names: list[str]
    anchor: dict[tuple[str, str], SuperPolynomial]
    bracket: dict[tuple[str, str, str], SuperPolynomial]

    def __post_init__(self):
        full = {}
        for (a, b, c), p in self.bracket.items():
            p = p if isinstance(p, SuperPolynomial) else SuperPolynomial.constant(p)
            if p.is_zero():
                continue
            for key, val in (((a, b, c), p), ((b, a, c), -p)):
                if key in full and full[key] != val:
                    raise ValueError(f"bracket data not antisymmetric at {key}")
                full[key] = val
        self.bracket = full
        self.anchor = {
            key: (p if isinstance(p, SuperPolynomial) else SuperPolynomial.constant(p))
            for key, p in self.anchor.items()
            if not (isinstance(p, SuperPolynomial) and p.is_zero())
        }
        self._pie = None

    def pie_system(self) -> tuple[CoordinateSystem, dict]:
        """The parity-reversed total space: base coordinates and odd xi's."""
        if self._pie is None:
            specs = [(v.name, (0,), EVEN) for v in self.base.variables]
            specs += [("xi" + n, (1,), ODD) for n in self.fiber_names]
            sys = CoordinateSystem(specs, name=self.base.name + "_pie", arity=1)
            maps = {
                "x": {v: sys[v.name] for v in self.base.variables},
                "xi": {n: sys["xi" + n] for n in self.fiber_names},
            }
            self._pie = (sys, maps)
        return self._pie

    def q_field(self) -> Derivation:
        """The weight-one odd field xi P dx - 1/2 xi xi P dxi on the
        parity-reversed total space."""
        sys, maps = self.pie_system()
        action: dict[Variable, SuperPolynomial] = {}
        for (a, aname), p in self.anchor.items():
            x = maps["x"][self.base[aname]]
            action[x] = action.get(x, ZERO) + (
                SuperPolynomial.from_var(maps["xi"][a]) * remap(p, maps["x"])
            )
        for (a, b, c), p in self.bracket.items():
            xi_c = maps["xi"][c]
            term = (
                SuperPolynomial.from_var(maps["xi"][a])
                * SuperPolynomial.from_var(maps["xi"][b])
                * remap(p, maps["x"])
                * Fraction(-1, 2)
            )
            action[xi_c] = action.get(xi_c, ZERO) + term
        return Derivation(action, ODD, (1,))

    @property
    def is_lie(self) -> bool:
        q = self.q_field()
        return commutator(q, q).is_zero()


def point_algebroid(c: StructureConstants) -> AlgebroidData:
    """A Lie algebra as algebroid data over the one-point base."""
    base = CoordinateSystem([], name="pt", arity=1)
    names = [str(a) for a in range(1, c.dim + 1)]
    bracket = {
        (names[i - 1], names[j - 1], names[k - 1]): SuperPolynomial.constant(v)
        for (i, j, k), v in c.c.items()
        if i < j
    }
    data = AlgebroidData(base, names, {}, bracket)
    data.constants = c
    return data


def tm_algebroid(dim: int) -> AlgebroidData:
    """The tangent bundle as algebroid data: identity anchor, zero bracket."""
    base = CoordinateSystem([(f"x{i}", 0, EVEN) for i in range(1, dim + 1)],
                            name="m")
    names = [f"e{i}" for i in range(1, dim + 1)]
    anchor = {
        (names[i - 1], f"x{i}"): SuperPolynomial.constant(1)
        for i in range(1, dim + 1)
    }
    return AlgebroidData(base, names, anchor, {})


# -------------------------------------------------------- tangent algebroid
def _as_gl(bundle: NTupleBundle, gl_degree=None) -> GLBundle:
    out = GLBundle(bundle.charts, bundle.transitions, origin=bundle.origin,
                   gl_degree=gl_degree)
    for attr in ("lift_source", "undotted_of", "dotted_of"):
        if hasattr(bundle, attr):
            setattr(out, attr, getattr(bundle, attr))
    return out


def tangent_algebroid(F: GradedBundle) -> WeightedAlgebroid:
    """The de Rham field on the parity-reversed tangent bundle of F."""
    TF = _as_gl(tangent_bundle(F))
    phase = OddPhaseSpace(TF)
    action = {}
    for v, dv in TF.dotted_of[0].items():
        base_leg_var = TF.undotted_of[0][v]
        action[phase.x_of[base_leg_var]] = SuperPolynomial.from_var(
            phase.theta_of[dv]
        )
    Q = HomologicalField(Derivation(action, ODD, (0, 1, 0)), phase)
    return WeightedAlgebroid.from_q(TF, Q)


# ------------------------------------------------------ cotangent algebroid
def cotangent_bundle(F: GradedBundle) -> GLBundle:
    """T*F with the phase-lifted bi-weight: the momentum of a weight-w
    coordinate carries (deg F - w, 1).  Momentum transitions are the
    contragredient of the Jacobian, from the declared inverse atlas."""
    km1 = F.degree
    charts = []
    base_maps = []
    p_of = []
    for chart in F.charts:
        specs = [(v.name, (total(v.weight), 0), v.parity) for v in chart.variables]
        taken = {s[0] for s in specs}
        momentum_names = {}
        for v in chart.variables:
            nm = "p_" + v.name
            while nm in taken:
                nm = nm + "_"
            taken.add(nm)
            momentum_names[v] = nm
            specs.append((nm, (km1 - total(v.weight), 1), v.parity))
        nc = CoordinateSystem(specs, name=chart.name + "_t*", arity=2)
        charts.append(nc)
        base_maps.append({v: nc[v.name] for v in chart.variables})
        p_of.append({v: nc[momentum_names[v]] for v in chart.variables})

    from .superalg import substitute

    transitions = {}
    for (i, j), t in F.transitions.items():
        fwd = {base_maps[j][v]: remap(p, base_maps[i]) for v, p in t.forward.items()}
        inv = {base_maps[i][v]: remap(p, base_maps[j]) for v, p in t.inverse.items()}
        for vp in F.charts[j].variables:
            expr = ZERO
            for u in F.charts[i].variables:
                entry = partial(t.inverse[u], vp)
                if entry.is_zero():
                    continue
                entry = substitute(entry, t.forward)
                expr = expr + remap(entry, base_maps[i]) * SuperPolynomial.from_var(
                    p_of[i][u]
                )
            fwd[p_of[j][vp]] = expr
        for u in F.charts[i].variables:
            expr = ZERO
            for vp in F.charts[j].variables:
                entry = partial(t.forward[vp], u)
                if entry.is_zero():
                    continue
                entry = substitute(entry, t.inverse)
                expr = expr + remap(entry, base_maps[j]) * SuperPolynomial.from_var(
                    p_of[j][vp]
                )
            inv[p_of[i][u]] = expr
        transitions[(i, j)] = TransitionMap(charts[i], charts[j], fwd, inv)
    out = GLBundle(charts, transitions, origin=(("cotangent",), F),
                   gl_degree=km1 + 1)
    out.momentum_of = p_of
    out.base_of = base_maps
    return out


def momentum_pairing(carrier: GLBundle, phase: OddPhaseSpace) -> OddPoissonSpace:
    """The odd symplectic pairing of a parity-reversed cotangent bundle:
    each coordinate against the theta of its own momentum."""
    chart = phase.chart
    pairs = []
    for v, pv in carrier.momentum_of[chart].items():
        pairs.append((phase.x_of[carrier.base_of[chart][v]], phase.theta_of[pv]))
    return OddPoissonSpace(phase.system, pairs)


def cotangent_algebroid(F: GradedBundle, P: SuperPolynomial,
                        carrier: GLBundle | None = None,
                        phase: OddPhaseSpace | None = None) -> WeightedAlgebroid:
    """Weighted algebroid of an (almost) Poisson structure on F.

    ``P`` is a polynomial in the phase-space coordinates (x..., theta...)
    of the parity-reversed cotangent bundle, homogeneous of tri-weight
    (deg F, 2, 0).  The structure field is minus its Hamiltonian field for
    the momentum pairing; the Lie verdict is the vanishing of [P, P].
    """
    carrier = carrier if carrier is not None else cotangent_bundle(F)
    phase = phase if phase is not None else OddPhaseSpace(carrier)
    km1 = F.degree
    w = weight_of(P, 3)
    if w not in ("zero", (km1, 2, 0)):
        raise ValueError(f"Poisson data has tri-weight {w}, expected {(km1, 2, 0)}")
    poisson = momentum_pairing(carrier, phase)
    derivation = poisson.hamiltonian_field(
        P,
        variables=phase.xs + phase.thetas,
        weight_shift=(0, 1, 0),
        parity=ODD,
    )
    Q = HomologicalField(derivation, phase)
    alg = WeightedAlgebroid.from_q(carrier, Q)
    alg.poisson_data = P
    alg.poisson_residual = poisson.bracket(P, P)
    from .algebroid import restrict_to_A1

    alg.a1_field = restrict_to_A1(Q)
    return alg


def linear_poisson(c: StructureConstants):
    """The linear Poisson structure of a Lie algebra on its dual space.

    Returns (F, carrier, phase, P) where F is the dual space as a degree-1
    bundle over a point and P = 1/2 c^k_{ij} y_k theta^i theta^j.
    """
    chart = CoordinateSystem(
        [(f"y{a}", 1, EVEN) for a in range(1, c.dim + 1)], name="gstar"
    )
    F = single_chart_bundle(chart)
    carrier = cotangent_bundle(F)
    phase = OddPhaseSpace(carrier)
    P = ZERO
    for (i, j, k), v in c.c.items():
        if i < j:
            P = P + (
                phase.var(f"y{k}")
                * phase.var(f"theta_p_y{i}")
                * phase.var(f"theta_p_y{j}")
                * v
            )
    return F, carrier, phase, P


# ------------------------------------------------------ higher tangent lift
@dataclass
class PolynomialDiffeo:
    """A polynomial base change with its declared polynomial inverse.

    The round-trip identity is a computed verdict, not a constructor
    requirement: interesting one-dimensional changes such as x -> x + x^2
    have no exact polynomial inverse, and the constructions that only
    consume forward data stay available for them.
    """

    source: CoordinateSystem
    target: CoordinateSystem
    forward: dict[Variable, SuperPolynomial]
    inverse: dict[Variable, SuperPolynomial]

    @staticmethod
    def build(dim: int, forward, inverse, names=("x", "X")):
        src = CoordinateSystem(
            [(f"{names[0]}{i}", 0, EVEN) for i in range(1, dim + 1)], name="m_src"
        )
        dst = CoordinateSystem(
            [(f"{names[1]}{i}", 0, EVEN) for i in range(1, dim + 1)], name="m_dst"
        )
        fw = forward([src.var(v.name) for v in src.variables])
        iv = inverse([dst.var(v.name) for v in dst.variables])
        return PolynomialDiffeo(
            src,
            dst,
            {dst.variables[i]: fw[i] for i in range(dim)},
            {src.variables[i]: iv[i] for i in range(dim)},
        )

    @property
    def dim(self) -> int:
        return len(self.source.variables)

    def round_trip_exact(self) -> bool:
        from .superalg import substitute

        for v in self.source.variables:
            if substitute(self.inverse[v], self.forward) != SuperPolynomial.from_var(v):
                return False
        for v in self.target.variables:
            if substitute(self.forward[v], self.inverse) != SuperPolynomial.from_var(v):
                return False
        return True


def _jet_chart(dim: int, k: int, stem: str, name: str) -> CoordinateSystem:
    specs = []
    for i in range(1, dim + 1):
        specs.append((f"{stem}{i}", 0, EVEN))
    for r in range(1, k + 1):
        for i in range(1, dim + 1):
            specs.append((f"{stem}{i}_{r}", r, EVEN))
    return CoordinateSystem(specs, name=name)


def _jet_prolong(chart: CoordinateSystem, dim: int, k: int,
                 components: list[SuperPolynomial], varmap) -> dict:
    """Total-derivative lift of a base map to all jet levels.

    ``components`` are the base components over the source base chart and
    ``varmap`` renames those base variables into the jet chart.  Level-r
    components are D^r(f)/r! for the operator D counting one jet level up.
    """
    level = {}
    for v in chart.variables:
        nm = v.name
        if "_" in nm and nm.rsplit("_", 1)[-1].isdigit():
            base_nm, r = nm.rsplit("_", 1)
            level[v] = (base_nm, int(r))
        else:
            level[v] = (nm, 0)
    action = {}
    for v, (base_nm, r) in level.items():
        if r < k:
            action[v] = SuperPolynomial.from_var(chart[f"{base_nm}_{r + 1}"]) * (r + 1)
    d_t = Derivation(action, EVEN, (1,))

    out = {}
    for i in range(1, dim + 1):
        p = remap(components[i - 1], varmap)
        out[(i, 0)] = p
        for r in range(1, k + 1):
            p = d_t(p)
            out[(i, r)] = p * Fraction(1, math.factorial(r))
    return out


def higher_tangent(phi: PolynomialDiffeo, k: int) -> GradedBundle:
    """T^k M over a two-chart base, weight-r coordinates being the jet
    coefficients x^(r)/r!.  Transitions are the r-fold total-derivative
    lifts of the base change; the Faa di Bruno combinatorics arise
    mechanically from iterated differentiation."""
    if k < 1:
        raise ValueError("higher tangent bundles need k >= 1")
    dim = phi.dim
    src_stem = phi.source.variables[0].name[:-1] if dim else "x"
    dst_stem = phi.target.variables[0].name[:-1] if dim else "X"
    chart_a = _jet_chart(dim, k, src_stem, name="tk_src")
    chart_b = _jet_chart(dim, k, dst_stem, name="tk_dst")
    fwd_base = [phi.forward[v] for v in phi.target.variables]
    inv_base = [phi.inverse[v] for v in phi.source.variables]
    fwd_lift = _jet_prolong(
        chart_a, dim, k, fwd_base,
        {v: chart_a[f"{src_stem}{i + 1}"] for i, v in enumerate(phi.source.variables)},
    )
    inv_lift = _jet_prolong(
        chart_b, dim, k, inv_base,
        {v: chart_b[f"{dst_stem}{i + 1}"] for i, v in enumerate(phi.target.variables)},
    )
    forward = {}
    inverse = {}
    for i in range(1, dim + 1):
        forward[f"{dst_stem}{i}"] = fwd_lift[(i, 0)]
        inverse[f"{src_stem}{i}"] = inv_lift[(i, 0)]
        for r in range(1, k + 1):
            forward[f"{dst_stem}{i}_{r}"] = fwd_lift[(i, r)]
            inverse[f"{src_stem}{i}_{r}"] = inv_lift[(i, r)]
    out = two_chart_bundle(chart_a, chart_b, forward, inverse,
                           origin=(("higher_tangent", k), phi))
    return out


# -------------------------------------------------------------- complete lift
@dataclass
class LiftedField:
    """A complete lift: the prolonged system, level maps and the field."""

    system: CoordinateSystem
    derivation: Derivation
    level_of: dict[tuple[Variable, int], Variable]


def complete_lift(Q: Derivation, system: CoordinateSystem, k: int) -> LiftedField:
    """Total-derivative lift of a weight-one field to k-1 jet levels.

    The level-r coefficient is D^r(Q(v))/r! in jet-normalised coordinates,
    which is the prolongation of the flow of Q; homologicity is preserved
    and is re-verified by callers, never assumed.
    """
    if k < 1:
        raise ValueError("complete lifts need k >= 1")
    specs = []
    for r in range(k):
        for v in system.variables:
            nm = v.name if r == 0 else f"{v.name}_{r}"
            w = total(v.weight)
            specs.append((nm, (r, w), v.parity))
    lifted = CoordinateSystem(specs, name=system.name + f"_t{k - 1}", arity=2)
    level_of = {}
    for r in range(k):
        for v in system.variables:
            nm = v.name if r == 0 else f"{v.name}_{r}"
            level_of[(v, r)] = lifted[nm]

    d_action = {}
    for r in range(k - 1):
        for v in system.variables:
            d_action[level_of[(v, r)]] = (
                SuperPolynomial.from_var(level_of[(v, r + 1)]) * (r + 1)
            )
    d_t = Derivation(d_action, EVEN, (1, 0))

    zero_map = {v: level_of[(v, 0)] for v in system.variables}
    action = {}
    for v in system.variables:
        body = remap(Q.coefficient(v), zero_map)
        p = body
        for r in range(k):
            if r > 0:
                p = d_t(p)
            coeff = p * Fraction(1, math.factorial(r))
            if not coeff.is_zero():
                action[level_of[(v, r)]] = coeff
    lift = Derivation(action, Q.parity, (0,) + tuple(Q.weight_shift))
    return LiftedField(lifted, lift, level_of)


# ------------------------------------------------------------ reduction tower
@dataclass
class TowerInfo:
    data: AlgebroidData
    k: int
    names: list[str]


def _prolongation(E: AlgebroidData, k: int) -> WeightedAlgebroid:
    names = E.fiber_names
    specs = [(v.name, (0, 0), EVEN) for v in E.base.variables]
    for r in range(1, k):
        specs += [(f"y{n}_{r}", (r, 0), EVEN) for n in names]
    specs += [(f"xi{n}", (0, 1), EVEN) for n in names]
    for r in range(1, k):
        specs += [(f"dy{n}_{r + 1}", (r, 1), EVEN) for n in names]
    chart = CoordinateSystem(specs, name=f"prolong{k}_{E.base.name}", arity=2)
    carrier = single_chart_bundle(chart, cls=GLBundle,
                                  origin=(("prolongation", k), E))
    carrier.gl_degree = k
    phase = OddPhaseSpace(carrier)
    base_map = {v: phase.x_of[chart[v.name]] for v in E.base.variables}

    action: dict[Variable, SuperPolynomial] = {}
    for (a, aname), p in E.anchor.items():
        x = phase.x_of[chart[aname]]
        action[x] = action.get(x, ZERO) + (
            SuperPolynomial.from_var(phase.theta_of[chart[f"xi{a}"]])
            * remap(p, base_map)
        )
    for (a, b, c), p in E.bracket.items():
        th_c = phase.theta_of[chart[f"xi{c}"]]
        action[th_c] = action.get(th_c, ZERO) + (
            SuperPolynomial.from_var(phase.theta_of[chart[f"xi{a}"]])
            * SuperPolynomial.from_var(phase.theta_of[chart[f"xi{b}"]])
            * remap(p, base_map)
            * Fraction(-1, 2)
        )
    for r in range(1, k):
        for n in names:
            x = phase.x_of[chart[f"y{n}_{r}"]]
            action[x] = SuperPolynomial.from_var(
                phase.theta_of[chart[f"dy{n}_{r + 1}"]]
            )
    Q = HomologicalField(Derivation(action, ODD, (0, 1, 0)), phase)
    alg = WeightedAlgebroid.from_q(carrier, Q)
    alg.tower = TowerInfo(E, k, list(names))
    return alg


def prolongation_algebroid(E: AlgebroidData, k: int) -> WeightedAlgebroid:
    """The weighted algebroid on the linearised reduction of a groupoid's
    higher tangent bundle, taken at algebroid-data level."""
    if k < 2:
        raise ValueError("prolongation algebroids need k >= 2")
    return _prolongation(E, k)


def lie_tower(c: StructureConstants, k: int) -> WeightedAlgebroid:
    """The reduction tower of a Lie group: base g_{k-1} over a point, fibre
    spanned by xi and the dy's, structure field sum dy d/dy + CE term."""
    if k < 1:
        raise ValueError("towers need k >= 1")
    alg = _prolongation(point_algebroid(c), k)
    alg.constants = c
    return alg


# ------------------------------------------------------------ reduced bracket
@dataclass
class TowerSection:
    """A section of the tower as a pair (Y, Z): a fibre-valued map and a
    vector field on the base g_{k-1}.

    ``Y[name]`` and ``Z[(name, r)]`` are polynomials in the phase-space
    base coordinates y<name>_<r>.
    """

    Y: dict[str, SuperPolynomial]
    Z: dict[tuple[str, int], SuperPolynomial]

    def __eq__(self, other):
        if not isinstance(other, TowerSection):
            return NotImplemented
        keys_y = set(self.Y) | set(other.Y)
        keys_z = set(self.Z) | set(other.Z)
        return all(
            self.Y.get(n, ZERO) == other.Y.get(n, ZERO) for n in keys_y
        ) and all(
            self.Z.get(a, ZERO) == other.Z.get(a, ZERO) for a in keys_z
        )


def tower_section_polynomial(alg: WeightedAlgebroid, s: TowerSection) -> SuperPolynomial:
    """Encode (Y, Z) as the pi-linear phase-space function sum Y pi_xi +
    sum Z pi_dy."""
    phase = alg.phase
    chart = alg.carrier.charts[phase.chart]
    out = ZERO
    for n, p in s.Y.items():
        out = out + p * phase.var(f"pi_xi{n}")
    for (n, r), p in s.Z.items():
        out = out + p * phase.var(f"pi_dy{n}_{r + 1}")
    return out


def tower_section_from_polynomial(alg: WeightedAlgebroid, p: SuperPolynomial) -> TowerSection:
    phase = alg.phase
    info = alg.tower
    Y = {}
    Z = {}
    for n in info.names:
        c = partial(p, phase.system[f"pi_xi{n}"])
        if not c.is_zero():
            Y[n] = c
        for r in range(1, info.k):
            cz = partial(p, phase.system[f"pi_dy{n}_{r + 1}"])
            if not cz.is_zero():
                Z[(n, r)] = cz
    return TowerSection(Y, Z)


def _tower_vector_field(alg: WeightedAlgebroid, Z) -> Derivation:
    # generally inhomogeneous; only ever applied, so the shift is unused
    phase = alg.phase
    action = {}
    for (n, r), p in Z.items():
        action[phase.system[f"y{n}_{r}"]] = p
    return Derivation(action, EVEN, (0, 0, 0), check=False)


def reduced_bracket(alg: WeightedAlgebroid, s1: TowerSection,
                    s2: TowerSection) -> TowerSection:
    """Componentwise bracket ([Y1,Y2] + Z1(Y2) - Z2(Y1), Z1 Z2 - Z2 Z1)."""
    info = alg.tower
    if info.data.base.variables:
        raise ValueError("the reduced bracket is defined over a point base")
    c = getattr(alg, "constants", None)
    if c is None:
        raise ValueError("reduced brackets need structure-constant data")
    names = info.names
    Z1 = _tower_vector_field(alg, s1.Z)
    Z2 = _tower_vector_field(alg, s2.Z)
    Y = {}
    for ci in range(1, c.dim + 1):
        cn = names[ci - 1]
        comp = ZERO
        for a in range(1, c.dim + 1):
            for b in range(1, c.dim + 1):
                v = c.value(a, b, ci)
                if v:
                    comp = comp + v * (
                        s1.Y.get(names[a - 1], ZERO) * s2.Y.get(names[b - 1], ZERO)
                    )
        comp = comp + Z1(s2.Y.get(cn, ZERO)) - Z2(s1.Y.get(cn, ZERO))
        if not comp.is_zero():
            Y[cn] = comp
    Z = {}
    for (n, r) in {*s1.Z, *s2.Z}:
        comp = Z1(s2.Z.get((n, r), ZERO)) - Z2(s1.Z.get((n, r), ZERO))
        if not comp.is_zero():
            Z[(n, r)] = comp
    return TowerSection(Y, Z)

"""Weighted skew/Lie algebroids on graded-linear bundles.

The three equivalent encodings live on one tri-graded odd phase space built
over the dual of the carrier: base-leg coordinates x, their odd conjugates
chi, even momenta pi dual to the fibre leg and their odd conjugates theta.
Conjugate tri-weights add up to (k-1, 1, 1), the Grassmann parity is the
second tri-weight component mod 2, and the canonical odd bracket therefore
shifts tri-weight by (1-k, -1, -1).

Sign conventions, fixed once and used everywhere:

* the odd bracket is the antibracket with (x, chi) = (pi, theta) = +1,
  built from right derivatives in the first slot and left derivatives in
  the second,
* a homological field and its Hamiltonian correspond through
  ``P = sum Q(x) chi - sum Q(theta) pi``,
* the derived bracket is normalised as ``-[[s1, P], s2]`` so that the
  bracket of a reduced higher tangent bundle of a Lie group comes out
  componentwise as ([Y1,Y2] + Z1(Y2) - Z2(Y1), Z1(Z2) - Z2(Z1)).
"""

from __future__ import annotations

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
    partial_right,
    remap,
    render,
    total,
    weight_of,
)
from .bundle import CoordinateSystem, ValidationReport
from .linfun import GLBundle, NotSymmetric, reconstruct


class CoordinateMismatch(ValueError):
    """Operands live on different phase spaces."""


class MalformedQ(ValueError):
    """An odd vector field is outside the algebroid structural shape."""


class DegreeUnderflow(ValueError):
    """A derived bracket left the representable section degrees."""


class NotALinearisation(ValueError):
    """Graded-bundle anchors need a symmetric carrier."""


class ProjectionObstruction(ValueError):
    """The field does not project to the weight-one leg."""


# ------------------------------------------------------------- odd brackets
class OddPoissonSpace:
    """A coordinate system with chosen conjugate pairs (q even, q* odd).

    The antibracket is normalised by (q, q*) = +1 and satisfies graded
    antisymmetry and Jacobi with the shifted parity |F| + 1.
    """

    def __init__(self, system: CoordinateSystem, pairs):
        self.system = system
        self.pairs = list(pairs)
        for q, qstar in self.pairs:
            if q.parity != EVEN or qstar.parity != ODD:
                raise ValueError(
                    f"pair ({q.name}, {qstar.name}) must be (even, odd)"
                )
        self._allowed = set(system.variables)

    def _check(self, *polys):
        for p in polys:
            for v in p.variables():
                if v not in self._allowed:
                    raise CoordinateMismatch(
                        f"variable {v.name} is not on this phase space"
                    )

    def bracket(self, f: SuperPolynomial, g: SuperPolynomial) -> SuperPolynomial:
        self._check(f, g)
        out = ZERO
        for q, qs in self.pairs:
            out = out + partial_right(f, q) * partial(g, qs)
            out = out - partial_right(f, qs) * partial(g, q)
        return out

    def hamiltonian_field(self, h: SuperPolynomial, variables=None,
                          weight_shift=None, parity=None) -> Derivation:
        """The derivation v -> -(h, v) on the listed variables."""
        self._check(h)
        variables = variables if variables is not None else self.system.variables
        action = {}
        for v in variables:
            c = -self.bracket(h, SuperPolynomial.from_var(v))
            if not c.is_zero():
                action[v] = c
        par = parity if parity is not None else (h.parity() + 1) % 2
        if weight_shift is None:
            hw = weight_of(h, self.system.arity)
            shift_src = hw if isinstance(hw, tuple) else (0,) * self.system.arity
            weight_shift = tuple(a + b for a, b in zip(shift_src, self._bracket_shift()))
        return Derivation(action, par, weight_shift)

    def _bracket_shift(self):
        q, qs = self.pairs[0]
        return tuple(-(a + b) for a, b in zip(q.weight, qs.weight))


def schouten(f: SuperPolynomial, g: SuperPolynomial, space) -> SuperPolynomial:
    """Canonical odd Poisson bracket of the given phase space."""
    poisson = space.poisson if isinstance(space, OddPhaseSpace) else space
    return poisson.bracket(f, g)


# ------------------------------------------------------------- phase space
def _fresh(name, taken):
    while name in taken:
        name = name + "_"
    taken.add(name)
    return name


class OddPhaseSpace:
    """Tri-graded coordinates (x, pi, chi, theta) over a carrier's dual.

    x mirrors the carrier's base leg with tri-weight (u, 0, 0); each fibre
    coordinate of bi-weight (u, 1) contributes an even momentum pi of
    tri-weight (k-1-u, 0, 1) and an odd theta of tri-weight (u, 1, 0); each
    base-leg coordinate contributes an odd chi of tri-weight (k-1-u, 1, 1).
    A homological field acts on the (x, theta) part only and is represented
    as a derivation of this system with weight shift (0, 1, 0).
    """

    def __init__(self, carrier: GLBundle, chart: int = 0):
        self.carrier = carrier
        self.chart = chart
        self.k = carrier.gl_degree
        k = self.k
        base_leg = carrier.base_leg_vars(chart)
        fiber = carrier.fiber_vars(chart)
        taken: set[str] = set()
        specs = []
        x_names = {b: _fresh(b.name, taken) for b in base_leg}
        specs += [(x_names[b], (b.weight[0], 0, 0), EVEN) for b in base_leg]
        pi_names = {f: _fresh("pi_" + f.name, taken) for f in fiber}
        specs += [
            (pi_names[f], (k - 1 - f.weight[0], 0, 1), EVEN) for f in fiber
        ]
        chi_names = {b: _fresh("chi_" + b.name, taken) for b in base_leg}
        specs += [
            (chi_names[b], (k - 1 - b.weight[0], 1, 1), ODD) for b in base_leg
        ]
        theta_names = {f: _fresh("theta_" + f.name, taken) for f in fiber}
        specs += [(theta_names[f], (f.weight[0], 1, 0), ODD) for f in fiber]
        self.system = CoordinateSystem(
            specs, name=f"phase_{carrier.charts[chart].name}", arity=3
        )
        from .superalg import parity_matches_weight

        assert all(parity_matches_weight(v, 1) for v in self.system.variables)
        self.x_of = {b: self.system[x_names[b]] for b in base_leg}
        self.pi_of = {f: self.system[pi_names[f]] for f in fiber}
        self.chi_of = {b: self.system[chi_names[b]] for b in base_leg}
        self.theta_of = {f: self.system[theta_names[f]] for f in fiber}
        self.xs = tuple(self.x_of.values())
        self.pis = tuple(self.pi_of.values())
        self.chis = tuple(self.chi_of.values())
        self.thetas = tuple(self.theta_of.values())
        pairs = [(self.x_of[b], self.chi_of[b]) for b in base_leg]
        pairs += [(self.pi_of[f], self.theta_of[f]) for f in fiber]
        self.poisson = OddPoissonSpace(self.system, pairs)
        self.conjugate = {}
        for q, qs in pairs:
            self.conjugate[q] = qs
            self.conjugate[qs] = q

    def var(self, name: str) -> SuperPolynomial:
        return self.system.var(name)

    def schouten(self, f, g) -> SuperPolynomial:
        return self.poisson.bracket(f, g)

    def field(self, action_by_name: dict[str, SuperPolynomial]) -> "HomologicalField":
        action = {self.system[n]: p for n, p in action_by_name.items()}
        return HomologicalField(
            Derivation(action, ODD, (0, 1, 0)), self
        )


@dataclass
class HomologicalField:
    """Odd vector field of total weight one on the parity-reversed carrier."""

    derivation: Derivation
    phase: OddPhaseSpace

    def __post_init__(self):
        if self.derivation.parity != ODD:
            raise MalformedQ("structure field must be odd")
        if self.derivation.weight_shift != (0, 1, 0):
            raise MalformedQ(
                f"structure field must shift tri-weight by (0, 1, 0), "
                f"got {self.derivation.weight_shift}"
            )

    def __call__(self, p: SuperPolynomial) -> SuperPolynomial:
        return self.derivation(p)

    def coefficient(self, v: Variable) -> SuperPolynomial:
        return self.derivation.coefficient(v)

    def square(self) -> Derivation:
        return commutator(self.derivation, self.derivation)


@dataclass
class AlgebroidHamiltonian:
    """Homogeneous Hamiltonian of tri-weight (k-1, 2, 1) on the phase space."""

    poly: SuperPolynomial
    phase: OddPhaseSpace

    def __post_init__(self):
        k = self.phase.k
        w = weight_of(self.poly, 3)
        if w not in ("zero", (k - 1, 2, 1)):
            raise MalformedQ(
                f"Hamiltonian has tri-weight {w}, expected {(k - 1, 2, 1)}"
            )
        thetas = set(self.phase.thetas)
        pis = set(self.phase.pis)
        chis = set(self.phase.chis)
        for m in self.poly.terms:
            n_theta = sum(e for v, e in m if v in thetas)
            n_pi = sum(e for v, e in m if v in pis)
            n_chi = sum(e for v, e in m if v in chis)
            if not ((n_theta, n_pi, n_chi) in ((1, 0, 1), (2, 1, 0))):
                raise MalformedQ(
                    "Hamiltonian term outside the theta*chi + theta*theta*pi shape: "
                    + render(SuperPolynomial({m: self.poly.terms[m]}))
                )


def _check_q_shape(Q: HomologicalField):
    phase = Q.phase
    thetas = set(phase.thetas)
    forbidden = set(phase.pis) | set(phase.chis)
    for v in list(phase.pis) + list(phase.chis):
        if not Q.coefficient(v).is_zero():
            raise MalformedQ(f"field acts on dual coordinate {v.name}")
    for v in phase.xs:
        for m in Q.coefficient(v).terms:
            n_theta = sum(e for u, e in m if u in thetas)
            if n_theta != 1 or any(u in forbidden for u, _ in m):
                raise MalformedQ(
                    f"coefficient of d/d{v.name} is not linear in theta"
                )
    for v in phase.thetas:
        for m in Q.coefficient(v).terms:
            n_theta = sum(e for u, e in m if u in thetas)
            if n_theta != 2 or any(u in forbidden for u, _ in m):
                raise MalformedQ(
                    f"coefficient of d/d{v.name} is not quadratic in theta"
                )


def p_from_q(Q: HomologicalField) -> AlgebroidHamiltonian:
    """Hamiltonian encoding: P = sum Q(x) chi - sum Q(theta) pi."""
    _check_q_shape(Q)
    phase = Q.phase
    P = ZERO
    for b, x in phase.x_of.items():
        P = P + Q.coefficient(x) * SuperPolynomial.from_var(phase.chi_of[b])
    for f, th in phase.theta_of.items():
        P = P - Q.coefficient(th) * SuperPolynomial.from_var(phase.pi_of[f])
    return AlgebroidHamiltonian(P, phase)


def q_from_p(P: AlgebroidHamiltonian) -> HomologicalField:
    phase = P.phase
    action = {}
    for b, x in phase.x_of.items():
        c = partial_right(P.poly, phase.chi_of[b])
        if not c.is_zero():
            action[x] = c
    for f, th in phase.theta_of.items():
        c = -partial_right(P.poly, phase.pi_of[f])
        if not c.is_zero():
            action[th] = c
    return HomologicalField(Derivation(action, ODD, (0, 1, 0)), phase)


# ------------------------------------------------------------ classification
@dataclass
class AlgebroidCheck:
    odd: bool
    weight_ok: bool
    residual: Derivation
    kind: str
    report: ValidationReport

    @property
    def is_lie(self) -> bool:
        return self.kind == "lie"


def check_weighted_algebroid(Q: HomologicalField, k: int | None = None) -> AlgebroidCheck:
    """Verify oddness and the (0,1) weight, then decide lie vs skew by Q^2."""
    report = ValidationReport()
    phase = Q.phase
    if k is not None and k != phase.k:
        report.add(f"carrier degree is {k}", phase.k == k)
    odd = Q.derivation.parity == ODD
    report.add("structure field is Grassmann odd", odd)
    weight_ok = Q.derivation.weight_shift == (0, 1, 0)
    report.add("structure field has weight (0,1)", weight_ok)
    residual = Q.square()
    kind = "lie" if residual.is_zero() else "skew"
    for v in phase.xs + phase.thetas:
        c = residual.coefficient(v)
        report.add(
            f"[Q,Q] on {v.name}",
            c.is_zero(),
            "" if c.is_zero() else render(c),
        )
    return AlgebroidCheck(odd, weight_ok, residual, kind, report)


@dataclass
class WeightedAlgebroid:
    """A carrier with a structure field, its Hamiltonian and classification."""

    carrier: GLBundle
    phase: OddPhaseSpace
    q: HomologicalField | None
    hamiltonian: AlgebroidHamiltonian | None
    kind: str
    check: AlgebroidCheck | None

    @classmethod
    def from_q(cls, carrier: GLBundle, Q: HomologicalField) -> "WeightedAlgebroid":
        chk = check_weighted_algebroid(Q)
        return cls(carrier, Q.phase, Q, p_from_q(Q), chk.kind, chk)

    @property
    def is_lie(self) -> bool:
        return self.kind == "lie"


def algebroid_from_coefficients(carrier: GLBundle, anchor_coeffs, bracket_coeffs,
                                chart: int = 0) -> WeightedAlgebroid:
    """Build from raw epsilon data.

    ``anchor_coeffs`` maps (base-leg name, fibre name) to a polynomial in
    the carrier's base-leg coordinates; ``bracket_coeffs`` maps fibre-name
    triples (I, J, K) to the coefficient standing with theta^J theta^I
    against d/d theta^K.  Antisymmetric bracket data encodes an odd vector
    field and the result is classified skew or lie; non-antisymmetric data
    is recorded as a general weighted algebroid without a field.
    """
    phase = OddPhaseSpace(carrier, chart)
    chart_sys = carrier.charts[chart]
    to_phase = {b: x for b, x in phase.x_of.items()}

    def lift(p):
        return remap(p, to_phase) if isinstance(p, SuperPolynomial) else SuperPolynomial.constant(p)

    data = {key: lift(c) for key, c in bracket_coeffs.items()}
    skew = all(
        (c + data.get((j, i, k_n), ZERO)) == ZERO
        for (i, j, k_n), c in data.items()
    )
    if not skew:
        return WeightedAlgebroid(carrier, phase, None, None, "general", None)
    action: dict[Variable, SuperPolynomial] = {}
    for (b_name, f_name), c in anchor_coeffs.items():
        x = phase.x_of[chart_sys[b_name]]
        th = SuperPolynomial.from_var(phase.theta_of[chart_sys[f_name]])
        action[x] = action.get(x, ZERO) + th * lift(c)
    for (i_name, j_name, k_name), c in data.items():
        th_k = phase.theta_of[chart_sys[k_name]]
        th_i = SuperPolynomial.from_var(phase.theta_of[chart_sys[i_name]])
        th_j = SuperPolynomial.from_var(phase.theta_of[chart_sys[j_name]])
        action[th_k] = action.get(th_k, ZERO) + th_j * th_i * c * Fraction(-1, 2)
    Q = HomologicalField(Derivation(action, ODD, (0, 1, 0)), phase)
    return WeightedAlgebroid.from_q(carrier, Q)


# ----------------------------------------------------------------- sections
@dataclass
class AlgebroidSection:
    """A degree-r section encoded as a pi-linear phase-space function."""

    poly: SuperPolynomial
    degree: int
    phase: OddPhaseSpace

    def __post_init__(self):
        pis = set(self.phase.pis)
        xs = set(self.phase.xs)
        for m in self.poly.terms:
            n_pi = sum(e for v, e in m if v in pis)
            if n_pi != 1 or any(v not in pis and v not in xs for v, _ in m):
                raise ValueError(
                    "section terms must be linear in pi with base coefficients"
                )
        w = weight_of(self.poly, 3)
        expected = (self.degree - 1, 0, 1)
        if w not in ("zero", expected):
            raise ValueError(f"section has tri-weight {w}, expected {expected}")

    def is_zero(self) -> bool:
        return self.poly.is_zero()


def derived_bracket(
    s1: AlgebroidSection, s2: AlgebroidSection, P: AlgebroidHamiltonian
) -> AlgebroidSection:
    """[[s1, P], s2] up to the fixed overall sign; degree r1 + r2 - k.

    A bracket that would land below the representable section degrees is
    identically zero by weight accounting; it is returned as the zero
    section and DegreeUnderflow is raised only if a nonzero residue ever
    appeared there.
    """
    if s1.phase is not s2.phase or s1.phase is not P.phase:
        raise CoordinateMismatch("sections and Hamiltonian on different spaces")
    phase = P.phase
    inner = phase.schouten(s1.poly, P.poly)
    result = -phase.schouten(inner, s2.poly)
    degree = s1.degree + s2.degree - phase.k
    if degree < 1 and not result.is_zero():
        raise DegreeUnderflow(
            f"bracket of degrees {s1.degree}, {s2.degree} is nonzero below "
            f"degree 1: {render(result)}"
        )
    return AlgebroidSection(result, degree, phase)


# ------------------------------------------------------------------ anchors
@dataclass
class AnchorData:
    """Anchor pullback data over the carrier's own coordinates.

    ``delta`` maps each base-leg coordinate b to the pullback of the fibre
    coordinate delta-b of T(B_{k-1}); base coordinates pull back to
    themselves.
    """

    algebroid: WeightedAlgebroid
    delta: dict[Variable, SuperPolynomial]

    def rho(self) -> dict[Variable, SuperPolynomial]:
        return dict(self.delta)

    def rho_q(self, q: int) -> dict[Variable, SuperPolynomial]:
        """Composition with the tower projection to B_{q-1}."""
        return {
            b: p for b, p in self.delta.items() if b.weight[0] <= q - 1
        }

    def rho_hat(self, q: int | None = None) -> dict[Variable, SuperPolynomial]:
        """Graded-bundle anchor rho-hat_q = T tau o rho o iota on F_k.

        Needs the carrier to be a linearisation; raises NotALinearisation
        otherwise.  Components are polynomials over the source bundle F.
        """
        from .superalg import substitute
        from .linfun import holonomic_assignment

        carrier = self.algebroid.carrier
        chart = self.algebroid.phase.chart
        if getattr(carrier, "lin_source", None) is not None:
            holo = holonomic_assignment(carrier, chart)
        else:
            try:
                F = reconstruct(carrier)
            except NotSymmetric as exc:
                raise NotALinearisation(
                    "carrier is not symmetric, graded-bundle anchors undefined"
                ) from exc
            holo = F.holonomic_assignments[chart]
        k = carrier.gl_degree
        q = q if q is not None else k
        return {
            b: substitute(p, holo)
            for b, p in self.delta.items()
            if b.weight[0] <= q - 1
        }


def anchor(A: WeightedAlgebroid) -> AnchorData:
    if A.q is None:
        raise MalformedQ("general algebroids carry no anchor field")
    phase = A.phase
    chart_sys = A.carrier.charts[phase.chart]
    delta = {}
    x_to_carrier = {x: b for b, x in phase.x_of.items()}
    for b, x in phase.x_of.items():
        coeff_poly = A.q.coefficient(x)
        comp = ZERO
        for f, th in phase.theta_of.items():
            c = partial(coeff_poly, th)
            if c.is_zero():
                continue
            comp = comp + SuperPolynomial.from_var(f) * remap(c, x_to_carrier)
        delta[b] = comp
    return AnchorData(A, delta)


# ------------------------------------------------------- weight-one leg A1
def restrict_to_A1(Q: HomologicalField) -> Derivation:
    """Projection d of the structure field to the (x_0, theta_1) leg."""
    phase = Q.phase
    a1 = {v for v in phase.xs if v.weight == (0, 0, 0)}
    a1 |= {v for v in phase.thetas if v.weight == (0, 1, 0)}
    action = {}
    for v in sorted(a1, key=lambda u: u.index):
        c = Q.coefficient(v)
        outside = [u.name for u in c.variables() if u not in a1]
        if outside:
            raise ProjectionObstruction(
                f"coefficient of d/d{v.name} depends on {', '.join(sorted(outside))}"
            )
        if not c.is_zero():
            action[v] = c
    return Derivation(action, ODD, (0, 1, 0))


def leibniz_check(Q: HomologicalField, alpha: SuperPolynomial,
                  phi: SuperPolynomial) -> bool:
    """Q(alpha phi) = d(alpha) phi + (-1)^|alpha| alpha Q(phi), exactly."""
    d = restrict_to_A1(Q)
    par = alpha.parity()
    if par == "mixed":
        raise ValueError("alpha must be parity homogeneous")
    sign = -1 if par == ODD else 1
    lhs = Q(alpha * phi)
    rhs = d(alpha) * phi + sign * (alpha * Q(phi))
    return lhs == rhs


# --------------------------------------------------------------- components
@dataclass
class EpsilonComponents:
    """The pullback families of the defining triple-bundle morphism."""

    system: CoordinateSystem
    delta_x: dict[str, SuperPolynomial]
    delta_pi: dict[str, SuperPolynomial]


def extract_coefficients(Q: HomologicalField):
    """Anchor and bracket coefficient polynomials in the base variables.

    Returns (P_aI, P_KIJ): P_aI[(base name, fibre name)] and
    P_KIJ[(I, J, K)] with P_KIJ antisymmetric in (I, J).
    """
    phase = Q.phase
    p_ai = {}
    for b, x in phase.x_of.items():
        for f, th in phase.theta_of.items():
            c = partial(Q.coefficient(x), th)
            if not c.is_zero():
                p_ai[(b.name, f.name)] = c
    p_kij = {}
    fibers = list(phase.theta_of.items())
    for fk, thk in fibers:
        body = Q.coefficient(thk)
        if body.is_zero():
            continue
        for fi, thi in fibers:
            for fj, thj in fibers:
                # P^K_{IJ} = -d_I d_J Q(theta^K), outer derivative first
                c = -partial(partial(body, thj), thi)
                if not c.is_zero():
                    p_kij[(fi.name, fj.name, fk.name)] = c
    return p_ai, p_kij


def epsilon_components(A: WeightedAlgebroid) -> EpsilonComponents:
    """Emit delta-x and delta-pi pullbacks on an even display system."""
    if A.q is None:
        raise MalformedQ("general algebroids are classified by raw data only")
    phase = A.phase
    k = phase.k
    carrier_chart = A.carrier.charts[phase.chart]
    base_leg = A.carrier.base_leg_vars(phase.chart)
    fiber = A.carrier.fiber_vars(phase.chart)
    taken: set[str] = set()
    specs = []
    x_names = {b: _fresh(b.name, taken) for b in base_leg}
    specs += [(x_names[b], (b.weight[0], 0, 0), EVEN) for b in base_leg]
    y_names = {f: _fresh(f.name, taken) for f in fiber}
    specs += [(y_names[f], (f.weight[0], 1, 0), EVEN) for f in fiber]
    p_names = {b: _fresh("p_" + b.name, taken) for b in base_leg}
    specs += [(p_names[b], (k - 1 - b.weight[0], 1, 1), EVEN) for b in base_leg]
    pi_names = {f: _fresh("pi_" + f.name, taken) for f in fiber}
    specs += [(pi_names[f], (k - 1 - f.weight[0], 0, 1), EVEN) for f in fiber]
    sys = CoordinateSystem(specs, name="epsilon_display", arity=3)

    x_map = {phase.x_of[b]: sys[x_names[b]] for b in base_leg}
    p_ai, p_kij = extract_coefficients(A.q)
    by_name = {b.name: b for b in base_leg}
    fib_by_name = {f.name: f for f in fiber}

    delta_x = {}
    for b in base_leg:
        comp = ZERO
        for (bn, fn), c in p_ai.items():
            if bn == b.name:
                comp = comp + sys.var(y_names[fib_by_name[fn]]) * remap(c, x_map)
        delta_x["delta_" + b.name] = comp
    delta_pi = {}
    for f in fiber:
        comp = ZERO
        for (bn, fn), c in p_ai.items():
            if fn == f.name:
                comp = comp + remap(c, x_map) * sys.var(p_names[by_name[bn]])
        for (i_n, j_n, k_n), c in p_kij.items():
            if j_n == f.name:
                comp = comp + (
                    sys.var(y_names[fib_by_name[i_n]])
                    * remap(c, x_map)
                    * sys.var(pi_names[fib_by_name[k_n]])
                )
        delta_pi["delta_pi_" + f.name] = comp
    return EpsilonComponents(sys, delta_x, delta_pi)


def weighted_lie_algebra_check(A: WeightedAlgebroid) -> bool:
    """True when the carrier has no total-weight-zero coordinates."""
    return all(
        total(v.weight) > 0
        for chart in A.carrier.charts
        for v in chart.variables
    )

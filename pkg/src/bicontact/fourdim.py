"""Four-dimensional charts carrying a pair of exact symplectic forms.

The 3D pipeline stops at frames whose invariant has a nonzero vertical
derivative with a functionally dependent second invariant; those extend to a
4-chart with structure equations

    d(omega^1) = omega^1 ^ omega^4 - C omega^1 ^ omega^3 + omega^2 ^ omega^3
    d(omega^2) = omega^2 ^ omega^4 + C omega^2 ^ omega^3 + eps omega^1 ^ omega^3
    d(omega^3) = 0
    d(omega^4) = E omega^1 ^ omega^2

This module verifies that pattern, extracts the scale invariant E, checks the
quadratic identities of the exact symplectic pair, runs the curvature oracles
of the product metric, and constructs coframes of this kind from a scalar
second-order ODE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import jets
from .jets import Jet
from .errors import (DegenerateH, DomainError, OdeStepFailure,
                     SingularVolumeError)
from . import expressions
from .forms import (Chart, Coframe, CoframeField, PForm, ext_d,
                    one_form_coeffs, scalar_d, top_ratio, two_form_coeffs,
                    wedge)
from .curvature import (curvature, leaf_geometry, levi_civita,
                        pfaffian_coefficient, scalar_curvature)

__all__ = ["Coframe4", "symp_structure", "compute_E", "e_expansion",
           "symplectic_quadratic", "symplectic_quadratic_check",
           "Curvature4Report", "curvature4", "QOde", "QSolution", "solve_q",
           "q_jets", "normal_form_4d", "verify_normal_form"]


# ---------------------------------------------------------------------------
# structure recognition

@dataclass
class Coframe4:
    """A 4D coframe matching the exact-symplectic-pair pattern.

    ``residuals`` holds the deviation of every structure-equation coefficient
    from the pattern above, keyed by equation; ``eps`` is rounded from the
    extracted coefficient and ``C``/``E`` keep their jets.
    """

    frame: Coframe
    eps: int
    C: Jet
    E: Jet
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def symp_structure(frame: Coframe) -> Coframe4:
    """Extract (eps, C, E) and the full residual table of the 4D pattern."""
    if frame.dim != 4:
        raise ValueError("symp_structure needs a 4D coframe")
    d = [two_form_coeffs(ext_d(frame.omega(i + 1)), frame) for i in range(4)]
    C = -d[0][(0, 2)]
    eps_raw = d[1][(0, 2)].value
    eps = int(round(eps_raw))
    E = d[3][(0, 1)]

    def dev(table, expected):
        worst = 0.0
        for pair, coeff in table.items():
            worst = max(worst, abs(coeff.value - expected.get(pair, 0.0)))
        return worst

    res = {
        "domega1": dev(d[0], {(0, 3): 1.0, (0, 2): -C.value, (1, 2): 1.0}),
        "domega2": dev(d[1], {(1, 3): 1.0, (1, 2): C.value, (0, 2): eps_raw}),
        "domega3": dev(d[2], {}),
        "domega4": dev(d[3], {(0, 1): E.value}),
        "C_match": abs(d[1][(1, 2)].value - C.value),
        "eps_integer": abs(eps_raw - eps),
    }
    return Coframe4(frame=frame, eps=eps, C=C, E=E, residuals=res)


def compute_E(frame: Coframe) -> Jet:
    """The invariant scale of d(omega^4) against the coframe volume.

    E = (d(omega^4) ^ omega^3 ^ omega^4) / (omega^1 ^ ... ^ omega^4); the
    wedge with omega^3 ^ omega^4 kills every d(omega^4) component except the
    omega^1 ^ omega^2 one.
    """
    num = wedge(wedge(ext_d(frame.omega(4)), frame.omega(3)), frame.omega(4))
    return top_ratio(num, frame.volume())


def e_expansion(frame: Coframe, E: Jet | None = None) -> dict:
    """Expand dE in the coframe: dE = E1 omega^1 + E2 omega^2 + 2E omega^4.

    Returns E1, E2 and the deviation of the omega^3 / omega^4 slots from
    (0, 2E).  A declared constant nonzero E shows up here: its differential
    vanishes, so the omega^4 slot misses 2E by |2E|.
    """
    if E is None:
        E = compute_E(frame)
    coeffs = one_form_coeffs(scalar_d(frame.chart, E), frame)
    residual = max(abs(coeffs[2].value), abs(coeffs[3].value - 2.0 * E.value))
    return {"E1": coeffs[0], "E2": coeffs[1], "residual": residual}


# ---------------------------------------------------------------------------
# the symplectic pair and its quadratic

def symplectic_quadratic(a1: float, a2: float, C: float, eps: int) -> float:
    """Volume coefficient of (a1 d omega^1 + a2 d omega^2) squared.

    Twice the contact quadratic: 2 (a1^2 + 2 C a1 a2 - eps a2^2).
    """
    return 2.0 * (a1 * a1 + 2.0 * C * a1 * a2 - eps * a2 * a2)


def symplectic_quadratic_check(F: Coframe4, a_samples=()) -> dict:
    """Residuals of the squared-pair identities.

    theta^i := d(omega^i) are closed 2-forms with
    theta^1 ^ theta^1 = 2 Omega, theta^2 ^ theta^2 = -2 eps Omega and
    theta^1 ^ theta^2 = 2 C Omega; arbitrary combinations follow the
    quadratic above and are spot-checked for each pair in ``a_samples``.
    """
    frame = F.frame
    vol = frame.volume()
    th1 = ext_d(frame.omega(1))
    th2 = ext_d(frame.omega(2))
    closed = max(ext_d(th1).max_abs_value(), ext_d(th2).max_abs_value())
    r11 = top_ratio(wedge(th1, th1), vol).value - 2.0
    r22 = top_ratio(wedge(th2, th2), vol).value + 2.0 * F.eps
    r12 = top_ratio(wedge(th1, th2), vol).value - 2.0 * F.C.value
    worst_a = 0.0
    for a1, a2 in a_samples:
        th = th1.scaled(float(a1)) + th2.scaled(float(a2))
        got = top_ratio(wedge(th, th), vol).value
        want = symplectic_quadratic(a1, a2, F.C.value, F.eps)
        worst_a = max(worst_a, abs(got - want))
    return {"closed": closed, "quad11": abs(r11), "quad22": abs(r22),
            "quad12": abs(r12), "sampled": worst_a}


# ---------------------------------------------------------------------------
# curvature oracles for the product metric

@dataclass
class Curvature4Report:
    """Connection/curvature of the orthonormal metric on a 4D pattern frame."""

    connection: object
    curvature: object
    S: Jet
    pfaffian: Jet
    leaf: object
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _matrix_dev(got_rows, want_rows):
    return max(abs(g.value - w) for grow, wrow in zip(got_rows, want_rows)
               for g, w in zip(grow, wrow))


def curvature4(F: Coframe4, tol: float = 1e-8) -> Curvature4Report:
    """Levi-Civita data of the 4D pattern frame, checked against closed forms.

    Every nonzero connection entry, every curvature entry, the scalar
    curvature, the Pfaffian coefficient, and the leaf trace of the closed
    coframe direction are all functions of (eps, C, C3, E, E1, E2); the
    report carries the deviation of each.
    """
    frame = F.frame
    eps, C, E = float(F.eps), F.C.value, F.E.value
    conn = levi_civita(frame)
    curv = curvature(conn)
    C3 = one_form_coeffs(scalar_d(frame.chart, F.C), frame)[2].value
    exp_d = e_expansion(frame, F.E)
    E1, E2 = exp_d["E1"].value, exp_d["E2"].value

    G = conn.gamma
    conn_dev = max(
        _matrix_dev([G[0][1]], [[0.0, 0.0, 0.5 * (1 - eps), -0.5 * E]]),
        _matrix_dev([G[2][0]], [[-C, 0.5 * (1 + eps), 0.0, 0.0]]),
        _matrix_dev([G[2][1]], [[0.5 * (1 + eps), C, 0.0, 0.0]]),
        _matrix_dev([G[3][0]], [[1.0, 0.5 * E, 0.0, 0.0]]),
        _matrix_dev([G[3][1]], [[-0.5 * E, 1.0, 0.0, 0.0]]),
        _matrix_dev([G[3][2]], [[0.0, 0.0, 0.0, 0.0]]),
    )

    half_pe = 0.5 * (1 + eps)
    cross = 0.5 * (1 + eps + C * E)
    mixed = C - 0.25 * E * (1 + eps)
    want_theta = {
        (0, 1): {(0, 1): C * C - 0.75 * E * E - 0.5 * (1 - eps),
                 (0, 3): -0.5 * E1, (1, 3): -0.5 * E2},
        (0, 2): {(0, 2): -(C * C + C3 + half_pe), (0, 3): mixed,
                 (1, 2): C * (1 - eps), (1, 3): -cross},
        (0, 3): {(0, 1): -0.5 * E1, (0, 2): mixed,
                 (0, 3): 0.25 * E * E - 1.0, (1, 2): -cross},
        (1, 2): {(0, 2): C * (1 - eps), (0, 3): -cross,
                 (1, 2): -(half_pe + C * C - C3), (1, 3): -mixed},
        (1, 3): {(0, 1): -0.5 * E2, (0, 2): -cross, (1, 2): -mixed,
                 (1, 3): 0.25 * E * E - 1.0},
        (2, 3): {},
    }
    curv_dev = 0.0
    theta34 = 0.0
    for (i, j), want in want_theta.items():
        table = curv.coeffs[i][j]
        for pair, coeff in table.items():
            dev = abs(coeff.value - want.get(pair, 0.0))
            curv_dev = max(curv_dev, dev)
            if (i, j) == (2, 3):
                theta34 = max(theta34, abs(coeff.value))

    S = scalar_curvature(curv)
    pf = pfaffian_coefficient(curv)
    leaf = leaf_geometry(frame, conn, curv, tol=tol, normal=2)
    shape_want = [[-C, half_pe, 0.0], [half_pe, C, 0.0], [0.0, 0.0, 0.0]]
    shape_dev = max(abs(g - w) for grow, wrow in zip(leaf.shape, shape_want)
                    for g, w in zip(grow, wrow))

    res = {
        "connection": conn_dev,
        "structure": conn.structure_residual,
        "curvature": curv_dev,
        "theta34": theta34,
        "scalar": abs(S.value + (0.5 * E * E + 2.0 * C * C + 7.0 + eps)),
        "pfaffian": abs(pf.value - 2.0 * ((1 + eps) + 2.0 * C * C)),
        "leaf_trace": abs(leaf.trace),
        "leaf_shape": shape_dev,
    }
    return Curvature4Report(connection=conn, curvature=curv, S=S, pfaffian=pf,
                            leaf=leaf, residuals=res)


# ---------------------------------------------------------------------------
# the scalar ODE behind the 4D normal form

@dataclass
class QOde:
    """Q'' = (C^2 + eps + C') Q for a declared vertical invariant C(z).

    Two independent solutions are tracked with the given initial data at
    ``z0``; their Wronskian Q1 Q2' - Q2 Q1' is the constant W0.
    """

    c_text: str
    eps: int
    z0: float = 0.0
    q1_init: tuple = (0.0, 1.0)
    q2_init: tuple = (1.0, 0.0)
    rtol: float = 1e-10
    atol: float = 1e-12
    _node: object = field(default=None, repr=False)

    def __post_init__(self):
        self._node = expressions.parse(self.c_text, ("z",))

    @property
    def W0(self) -> float:
        w0 = (self.q1_init[0] * self.q2_init[1]
              - self.q2_init[0] * self.q1_init[1])
        if w0 == 0.0:
            raise DomainError("initial conditions have zero Wronskian")
        return w0

    def u_jet(self, z: float, order: int) -> Jet:
        """The coefficient C^2 + eps + C' as a univariate jet at z."""
        c = expressions.eval_jet(self._node, (z,), order + 1, ("z",))
        return c * c + float(self.eps) + jets.partial(c, 0)

    def u_value(self, z: float) -> float:
        return self.u_jet(z, 0).value


@dataclass
class QSolution:
    """Dense ODE solution carrying (Q1, Q1', Q2, Q2') over a z-interval."""

    ode: QOde
    lo: float
    hi: float
    _eval: object

    def state(self, z: float):
        if not (self.lo - 1e-12 <= z <= self.hi + 1e-12):
            raise DomainError(f"z={z!r} outside integrated interval "
                              f"[{self.lo}, {self.hi}]")
        return self._eval(z)

    def wronskian(self, z: float) -> float:
        q1, dq1, q2, dq2 = self.state(z)
        return q1 * dq2 - q2 * dq1

    def wronskian_drift(self, z_values) -> float:
        w0 = self.ode.W0
        return max(abs(self.wronskian(z) - w0) for z in z_values)


def solve_q(ode: QOde, z_span) -> QSolution:
    """Integrate both solutions over ``z_span`` with dense output."""
    lo, hi = float(z_span[0]), float(z_span[1])
    if not lo <= ode.z0 <= hi:
        raise DomainError(f"z0={ode.z0!r} outside span {z_span!r}")

    def rhs(z, s):
        u = ode.u_value(z)
        return [s[1], u * s[0], s[3], u * s[2]]

    y0 = [ode.q1_init[0], ode.q1_init[1], ode.q2_init[0], ode.q2_init[1]]
    pieces = []
    for a, b in ((ode.z0, hi), (ode.z0, lo)):
        if a == b:
            pieces.append(None)
            continue
        sol = solve_ivp(rhs, (a, b), y0, method="RK45", dense_output=True,
                        rtol=ode.rtol, atol=ode.atol)
        if not sol.success:
            raise OdeStepFailure(sol.message)
        pieces.append(sol.sol)

    def evaluate(z):
        part = pieces[0] if z >= ode.z0 else pieces[1]
        if part is None:
            return tuple(y0)
        return tuple(part(z))

    return QSolution(ode=ode, lo=lo, hi=hi, _eval=evaluate)


def q_jets(sol: QSolution, z: float, dim: int, axis: int, order: int):
    """Lift (Q1, Q2) at z into jets of the ambient chart.

    Values and first derivatives come from the integrated state; all higher
    derivatives follow from the ODE by the Leibniz recursion
    Q^(n+2) = sum_k binom(n, k) u^(k) Q^(n-k), so the jets satisfy the
    equation coefficient-for-coefficient regardless of integration error.
    """
    u = sol.ode.u_jet(z, max(order - 2, 0))
    uder = [u.coeff((k,)) * math.factorial(k) for k in range(max(order - 1, 1))]
    q1, dq1, q2, dq2 = sol.state(z)
    out = []
    for q, dq in ((q1, dq1), (q2, dq2)):
        der = [q, dq]
        for n in range(order - 1):
            nxt = sum(math.comb(n, k) * uder[k] * der[n - k]
                      for k in range(n + 1))
            der.append(nxt)
        zvar = Jet.variable(z, axis, dim, order)
        dz = zvar - z
        acc = Jet.constant(0.0, dim, order)
        for m in range(order, -1, -1):
            acc = acc * dz + der[m] / math.factorial(m)
        out.append(acc)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# the 4D normal form

_CHART4 = ("x", "y", "z", "w")
_IDENTITY_H = (("1", "0"), ("0", "1"))


def normal_form_4d(ode: QOde, h=None, z_span=(-1.2, 1.2),
                   det_tol: float = 1e-10) -> CoframeField:
    """Coframe field built from the ODE solutions on the chart (x, y, z, w).

    With S = Q-solution data, h a 2x2 matrix of expressions in (x, y) and
    K = (h11 Q1 + h12 Q2)/sqrt(w), L = (h21 Q1 + h22 Q2)/sqrt(w):

        omega^1 = K dx + L dy
        omega^2 = C omega^1 - (K_z dx + L_z dy)
        omega^3 = dz
        omega^4 = dw/(2w) - (K f_z - f K_z) dx - (L f_z - f L_z) dy

    where f = (w / (W0 det h)) (L_x - K_y).  The first three structure
    equations hold for every invertible h; the last one additionally needs
    d/dy(K f_z - f K_z) - d/dx(L f_z - f L_z) = -W0 det h, a constraint on
    h alone that the verification report surfaces when violated (the
    identity matrix violates it: the left side is 0).
    """
    chart = Chart(_CHART4)
    rows = h if h is not None else _IDENTITY_H
    hnodes = [[expressions.parse(str(e), _CHART4) for e in row]
              for row in rows]
    sol = solve_q(ode, z_span)
    w0 = ode.W0

    def build(point, order):
        x, y, z, w = point
        if w <= 0.0:
            raise DomainError(f"normal form needs w > 0, got {w!r}")
        hj = [[expressions.eval_jet(n, point, order, _CHART4) for n in row]
              for row in hnodes]
        det_h = hj[0][0] * hj[1][1] - hj[0][1] * hj[1][0]
        if abs(det_h.value) <= det_tol:
            raise DegenerateH(f"det h = {det_h.value!r} at {point!r}")
        q1, q2 = q_jets(sol, z, 4, 2, order)
        sqw = jets.sqrt(Jet.variable(w, 3, 4, order))
        K = (hj[0][0] * q1 + hj[0][1] * q2) / sqw
        L = (hj[1][0] * q1 + hj[1][1] * q2) / sqw
        Cj = expressions.eval_jet(ode._node, (z,), order, ("z",))
        Cj = _lift_univariate(Cj, z, 4, 2, order)
        Kz, Lz = jets.partial(K, 2), jets.partial(L, 2)
        f = (Jet.variable(w, 3, 4, order) / (det_h * w0)) \
            * (jets.partial(L, 0) - jets.partial(K, 1))
        fz = jets.partial(f, 2)
        zero = Jet.constant(0.0, 4, order)
        w1 = PForm(chart, 1, {(0,): K, (1,): L, (2,): zero, (3,): zero})
        w2 = w1.scaled(Cj) - PForm(chart, 1, {(0,): Kz, (1,): Lz,
                                              (2,): zero, (3,): zero})
        w3 = PForm.d_coord(chart, 2, order)
        w4 = PForm(chart, 1, {
            (0,): -(K * fz - f * Kz),
            (1,): -(L * fz - f * Lz),
            (2,): zero,
            (3,): jets.reciprocal(Jet.variable(w, 3, 4, order) * 2.0),
        })
        return Coframe(chart, point, (w1, w2, w3, w4), stage="normal_form_4d")

    return CoframeField(chart, build, stage="normal_form_4d")


def _lift_univariate(j: Jet, z: float, dim: int, axis: int, order: int) -> Jet:
    """Re-seed a univariate jet at z as a jet of a dim-dimensional chart."""
    zvar = Jet.variable(z, axis, dim, order)
    dz = zvar - z
    acc = Jet.constant(0.0, dim, order)
    for m in range(min(order, j.order), -1, -1):
        acc = acc * dz + j.coeff((m,))
    return acc


def verify_normal_form(fld: CoframeField, ode: QOde, points,
                       order: int = 6) -> dict:
    """Structure-equation and round-trip residuals of a constructed field.

    Reports the worst deviation over ``points`` of: the four structure
    equations against the declared (eps, C), compute_E against the w
    coordinate, and the cross-term coefficient K L_z - L K_z against
    -W0 det(h) / w (extracted from omega^1 ^ omega^2).
    """
    worst = {"domega1": 0.0, "domega2": 0.0, "domega3": 0.0, "domega4": 0.0,
             "C": 0.0, "eps": 0.0, "E_vs_w": 0.0}
    for p in points:
        cf = fld.at(p, order)
        s4 = symp_structure(cf)
        for key in ("domega1", "domega2", "domega3", "domega4"):
            worst[key] = max(worst[key], s4.residuals[key])
        c_here = expressions.eval_number(ode._node, {"z": p[2]})
        worst["C"] = max(worst["C"], abs(s4.C.value - c_here))
        worst["eps"] = max(worst["eps"], abs(s4.eps - ode.eps)
                           + s4.residuals["eps_integer"])
        worst["E_vs_w"] = max(worst["E_vs_w"], abs(compute_E(cf).value - p[3]))
    return worst

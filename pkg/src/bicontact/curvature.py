"""Levi-Civita connection and curvature for the orthonormal-coframe metric.

The metric declares the given coframe orthonormal.  The connection solves
the first structure equation d(omega^i) = -omega^i_j ^ omega^j with a
skew coefficient matrix; curvature is Theta = d(theta) + theta ^ theta.
Everything works in any chart dimension (used here for 3 and 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import jets
from .jets import Jet
from .errors import NotIntegrable
from .forms import (Coframe, PForm, wedge, ext_d, top_ratio, two_form_coeffs,
                    frobenius_defect)

__all__ = ["ConnectionMatrix", "CurvatureMatrix", "levi_civita", "curvature",
           "scalar_curvature", "pfaffian_coefficient", "LeafGeometry",
           "leaf_geometry"]


def _structure_coeffs(frame: Coframe):
    """D[i][j][k] with d(omega^i) = sum_{j<k} D[i][j][k] omega^j ^ omega^k,
    stored fully antisymmetric in (j, k)."""
    dim = frame.chart.dim
    zero = Jet.constant(0.0, dim, max(frame.forms[0].order - 1, 0))
    D = [[[zero for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        dw = ext_d(frame.omega(i + 1), stage="levi_civita(structure coeffs)")
        coeffs = two_form_coeffs(dw, frame)
        for (j, k), c in coeffs.items():
            D[i][j][k] = c
            D[i][k][j] = -c
    return D


@dataclass
class ConnectionMatrix:
    """Skew matrix of connection 1-forms omega^i_j = Gamma[i][j][k] omega^k."""

    frame: Coframe
    gamma: list
    structure_residual: float = 0.0

    def form(self, i: int, j: int) -> PForm:
        """The connection 1-form omega^i_j (0-based indices)."""
        out = None
        for k in range(self.frame.chart.dim):
            term = self.frame.omega(k + 1).scaled(self.gamma[i][j][k])
            out = term if out is None else out + term
        return out

    def residual(self) -> float:
        """Max coefficient of d(omega^i) + omega^i_j ^ omega^j over i."""
        worst = 0.0
        dim = self.frame.chart.dim
        for i in range(dim):
            r = ext_d(self.frame.omega(i + 1), stage="connection residual")
            for j in range(dim):
                r = r + wedge(self.form(i, j), self.frame.omega(j + 1))
            worst = max(worst, r.max_abs_value())
        return worst


def levi_civita(frame: Coframe) -> ConnectionMatrix:
    """The unique metric-compatible torsion-free connection of the coframe.

    Gamma^i_jk = (D^i_jk + D^j_ki - D^k_ij) / 2 is the closed-form solution
    of the skew linear system; the structure-equation residual is computed
    on every call as a self-check.
    """
    dim = frame.chart.dim
    D = _structure_coeffs(frame)
    gamma = [[[(D[i][j][k] + D[j][k][i] - D[k][i][j]) * 0.5
               for k in range(dim)] for j in range(dim)] for i in range(dim)]
    conn = ConnectionMatrix(frame, gamma)
    conn.structure_residual = conn.residual()
    return conn


@dataclass
class CurvatureMatrix:
    """Skew matrix of curvature 2-forms Theta^i_j = d omega^i_j +
    omega^i_k ^ omega^k_j, with coefficients in the coframe basis."""

    frame: Coframe
    connection: ConnectionMatrix
    theta: list
    coeffs: list = field(default=None)

    def entry(self, i: int, j: int) -> PForm:
        return self.theta[i][j]

    def coefficient(self, i: int, j: int, a: int, b: int) -> Jet:
        """[Theta^i_j]_ab with Theta^i_j = sum_{a<b} [..]_ab omega^a ^ omega^b."""
        c = self.coeffs[i][j]
        return c[(a, b)] if a < b else -c[(b, a)]


def curvature(conn: ConnectionMatrix) -> CurvatureMatrix:
    dim = conn.frame.chart.dim
    theta = [[None] * dim for _ in range(dim)]
    coeffs = [[None] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            if j <= i:
                continue
            t = ext_d(conn.form(i, j), stage="curvature(d connection)")
            for k in range(dim):
                t = t + wedge(conn.form(i, k), conn.form(k, j))
            theta[i][j] = t
            theta[j][i] = -t
            coeffs[i][j] = two_form_coeffs(t, conn.frame)
            coeffs[j][i] = {key: -c for key, c in coeffs[i][j].items()}
    curv = CurvatureMatrix(conn.frame, conn, theta)
    curv.coeffs = coeffs
    return curv


def scalar_curvature(curv: CurvatureMatrix) -> Jet:
    """Twice the sum of the diagonal sectional pairings Theta^i_j(e_i, e_j)."""
    dim = curv.frame.chart.dim
    total = None
    for i in range(dim):
        for j in range(i + 1, dim):
            c = curv.coefficient(i, j, i, j)
            total = c if total is None else total + c
    return total * 2.0


def pfaffian_coefficient(curv: CurvatureMatrix) -> Jet:
    """Pf(Theta) / volume for a 4D frame: Theta^1_2^Theta^3_4
    - Theta^1_3^Theta^2_4 + Theta^1_4^Theta^2_3."""
    if curv.frame.chart.dim != 4:
        raise ValueError("Pfaffian needs a 4D frame")
    pf = wedge(curv.entry(0, 1), curv.entry(2, 3)) \
        - wedge(curv.entry(0, 2), curv.entry(1, 3)) \
        + wedge(curv.entry(0, 3), curv.entry(1, 2))
    return top_ratio(pf, curv.frame.volume())


# ---------------------------------------------------------------------------
# geometry of the leaves of one coframe direction

@dataclass
class LeafGeometry:
    """Second fundamental form data of the foliation ker(omega^normal)."""

    shape: list            # tangential values Gamma^normal_{i j}
    H: float               # mean curvature (average of the diagonal)
    trace: float
    K_leaf: float | None   # leaf Gauss curvature (2D leaves only)
    defect: float          # integrability defect of the normal covector


def _integrability_defect(frame: Coframe, normal: int) -> float:
    alpha = frame.omega(normal + 1)
    if frame.chart.dim == 3:
        d = frobenius_defect(alpha)
        return abs(d.value) if hasattr(d, "value") else abs(d)
    prod = wedge(alpha, ext_d(alpha, stage="leaf_geometry(defect)"))
    return prod.max_abs_value()


def leaf_geometry(frame: Coframe, conn: ConnectionMatrix | None = None,
                  curv: CurvatureMatrix | None = None,
                  tol: float = 1e-8, normal: int | None = None) -> LeafGeometry:
    """Shape operator, mean curvature, and (3D) leaf Gauss curvature.

    ``normal`` picks the coframe covector (0-based) whose kernel is foliated;
    default is the last one.  It must be integrable; its leaves carry the
    induced metric of the remaining covectors.  The leaf curvature solves the
    pullback of the ambient curvature identity: tangential curvature pairing
    plus the shape-operator determinant.
    """
    dim = frame.chart.dim
    if normal is None:
        normal = dim - 1
    tangent = [i for i in range(dim) if i != normal]
    dval = _integrability_defect(frame, normal)
    if dval > tol:
        raise NotIntegrable(
            f"omega^{normal + 1} is not integrable: defect {dval!r}")
    if conn is None:
        conn = levi_civita(frame)
    shape = [[conn.gamma[normal][i][j].value for j in tangent] for i in tangent]
    m = len(tangent)
    trace = sum(shape[i][i] for i in range(m))
    H = trace / m
    K_leaf = None
    if dim == 3:
        if curv is None:
            curv = curvature(conn)
        i, j = tangent
        det = shape[0][0] * shape[1][1] - shape[0][1] * shape[1][0]
        K_leaf = curv.coefficient(i, j, i, j).value + det
    return LeafGeometry(shape=shape, H=H, trace=trace, K_leaf=K_leaf,
                        defect=dval)

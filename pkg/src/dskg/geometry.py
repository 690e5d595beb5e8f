"""Embedding geometry of the unit hyperboloid and its rectifying charts.

Each catalog entry comes with a local chart (q, u) -> x in R^{1,3} that
rectifies the subalgebra orbits: generators act only along the q coordinates
and the u coordinates label the orbits.  The charts are hard coded; the
algebraic construction behind them (products of matrix exponentials applied
to a transversal section) is implemented in :func:`rectify` and validated on
the three-dimensional boost-rotation example whose closed form is known.

Metrics are always induced from the ambient Minkowski form
eta = diag(1,-1,-1,-1); every closed-form metric used elsewhere is checked
against this embedding computation, which is the single source of truth for
signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import dual
from .dual import Dual
from .lie_core import CaseId, PARAMETERIZED_CASES, subalgebra

ETA = (1.0, -1.0, -1.0, -1.0)
HYPERBOLOID_TOL = 1e-12
PUSHFORWARD_TOL = 1e-10


class RankDeficientError(RuntimeError):
    """Chart Jacobian lost rank (the point sits on the chart boundary)."""


@dataclass(frozen=True)
class AmbientPoint:
    x0: float
    x1: float
    x2: float
    x3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    def hyperboloid_residual(self) -> float:
        return abs(self.x0 ** 2 - self.x1 ** 2 - self.x2 ** 2 - self.x3 ** 2 + 1.0)

    def on_hyperboloid(self, tol: float = HYPERBOLOID_TOL) -> bool:
        return self.hyperboloid_residual() < tol


@dataclass(frozen=True)
class Chart:
    case_id: CaseId
    r: int
    coord_names: tuple[str, ...]
    domain: tuple[tuple[float, float], ...]
    map_fn: Callable[[Sequence], list]
    parameter_a: Optional[float] = None

    def embed(self, point: Sequence[float]) -> AmbientPoint:
        x = self.map_fn(list(point))
        vals = [complex(v).real if not isinstance(v, Dual) else v.val.real for v in x]
        return AmbientPoint(*vals)

    def map_dual(self, coords: Sequence) -> list:
        return self.map_fn(list(coords))


_HALF_PI = math.pi / 2.0


def chart_for(case_id: CaseId, parameter_a: Optional[float] = None) -> Chart:
    """The rectifying chart of one catalog entry (hard-coded closed forms)."""
    case_id = CaseId(case_id)
    a = parameter_a
    if case_id in PARAMETERIZED_CASES:
        if a is None or a <= 0:
            raise ValueError(f"{case_id} requires parameter a > 0")
    elif a is not None:
        a = None

    if case_id == CaseId.G11:
        def m(c):
            q1, u1, u2 = c
            s12 = dual.sin(u1) * dual.sin(u2)
            return [-s12 * dual.sinh(q1), dual.cos(u2), dual.cos(u1) * dual.sin(u2),
                    s12 * dual.cosh(q1)]
        return Chart(case_id, 1, ("q1", "u1", "u2"),
                     ((-1.5, 1.5), (0.2, math.pi - 0.2), (0.2, math.pi - 0.2)), m)

    if case_id in (CaseId.G12, CaseId.G13a):
        aa = a if case_id == CaseId.G13a else 0.0

        def m(c):
            q1, u1, u2 = c
            cc = dual.cosh(u1) * dual.cos(u2)
            if case_id == CaseId.G12:
                x3 = dual.cosh(u1) * dual.sin(u2)
                x0 = dual.sinh(u1)
            else:
                x3 = dual.cosh(u1) * dual.sin(u2) * dual.cosh(q1 * aa) \
                    - dual.sinh(u1) * dual.sinh(q1 * aa)
                x0 = -dual.cosh(u1) * dual.sin(u2) * dual.sinh(q1 * aa) \
                    + dual.sinh(u1) * dual.cosh(q1 * aa)
            return [x0, -cc * dual.sin(q1), cc * dual.cos(q1), x3]
        return Chart(case_id, 1, ("q1", "u1", "u2"),
                     ((-1.5, 1.5), (-1.2, 1.2), (-_HALF_PI + 0.2, _HALF_PI - 0.2)), m, a)

    if case_id == CaseId.G14:
        def m(c):
            q1, u1, u2 = c
            w = dual.sinh(u1) - dual.cosh(u1) * dual.sin(u2)
            half = q1 * q1 * w * 0.5
            return [half + dual.sinh(u1), -q1 * w, dual.cosh(u1) * dual.cos(u2),
                    half + dual.cosh(u1) * dual.sin(u2)]
        return Chart(case_id, 1, ("q1", "u1", "u2"),
                     ((-1.5, 1.5), (0.35, 1.4), (-0.25, 0.25)), m)

    if case_id in (CaseId.G21, CaseId.G32):
        def m(c):
            q1, q2, u1 = c
            e = dual.exp(-u1)
            half = e * (q1 * q1 + q2 * q2) * 0.5
            return [dual.sinh(u1) - half, q1 * e, q2 * e, dual.cosh(u1) - half]
        return Chart(case_id, 2, ("q1", "q2", "u1"),
                     ((-1.5, 1.5), (-1.5, 1.5), (-1.0, 1.0)), m)

    if case_id == CaseId.G22:
        def m(c):
            q1, q2, u1 = c
            return [-dual.sin(u1) * dual.sinh(q2), dual.cos(u1) * dual.cos(q1),
                    dual.cos(u1) * dual.sin(q1), dual.sin(u1) * dual.cosh(q2)]
        return Chart(case_id, 2, ("q1", "q2", "u1"),
                     ((-2.0, 2.0), (-1.5, 1.5), (0.2, _HALF_PI - 0.2)), m)

    if case_id == CaseId.G23:
        def m(c):
            q1, q2, u1 = c
            e = dual.exp(q2)
            half = q1 * q1 * e * 0.5
            return [-dual.cos(u1) * (dual.sinh(q2) + half), q1 * e * dual.cos(u1),
                    dual.sin(u1), dual.cos(u1) * (dual.cosh(q2) - half)]
        return Chart(case_id, 2, ("q1", "q2", "u1"),
                     ((-1.5, 1.5), (-1.2, 1.2), (-1.2, 1.2)), m)

    if case_id in (CaseId.G31, CaseId.G41, CaseId.G33a):
        aa = a if case_id == CaseId.G33a else 1.0

        def m(c):
            q1, q2, q3 = c
            e = dual.exp(q3 * aa)
            half = e * (q1 * q1 + q2 * q2) * 0.5
            return [-dual.sinh(q3 * aa) - half, q1 * e, q2 * e, dual.cosh(q3 * aa) - half]
        return Chart(case_id, 3, ("q1", "q2", "q3"),
                     ((-1.5, 1.5), (-1.5, 1.5), (-1.0, 1.0)), m, a)

    if case_id == CaseId.G34:
        def m(c):
            q1, q2, u1 = c
            ch = dual.cosh(u1)
            return [dual.sinh(u1), -ch * dual.sin(q1) * dual.cos(q2),
                    ch * dual.cos(q1) * dual.cos(q2), ch * dual.sin(q2)]
        return Chart(case_id, 2, ("q1", "q2", "u1"),
                     ((-2.0, 2.0), (-_HALF_PI + 0.15, _HALF_PI - 0.15), (-1.2, 1.2)), m)

    if case_id == CaseId.G35:
        def m(c):
            q1, q2, u1 = c
            s = dual.sin(u1)
            return [-s * dual.sinh(q1) * dual.cos(q2), s * dual.cosh(q1) * dual.cos(q2),
                    s * dual.sin(q2), dual.cos(u1)]
        return Chart(case_id, 2, ("q1", "q2", "u1"),
                     ((-1.5, 1.5), (-_HALF_PI + 0.15, _HALF_PI - 0.15), (0.2, math.pi - 0.2)), m)

    raise KeyError(case_id)


def sample_domain(chart: Chart, n: int, rng: np.random.Generator,
                  margin: float = 0.1) -> np.ndarray:
    """Uniform interior samples of the chart box, shrunk by a relative margin."""
    lo = np.array([d[0] for d in chart.domain])
    hi = np.array([d[1] for d in chart.domain])
    pad = (hi - lo) * margin
    return rng.uniform(lo + pad, hi - pad, size=(n, 3))


# ----------------------------------------------------------------------
# rectified generator components (closed forms matching the charts)
# ----------------------------------------------------------------------

def rect_components(case_id: CaseId, parameter_a: Optional[float] = None):
    """Chart components of every generator as dual-evaluable callables.

    Returns a list (one entry per generator) of 3-component callable lists
    over the full coordinate triple; u-direction components are identically
    zero.
    """
    case_id = CaseId(case_id)
    zero = lambda c: 0.0
    one = lambda c: 1.0
    if case_id in (CaseId.G11, CaseId.G12, CaseId.G13a, CaseId.G14):
        return [[one, zero, zero]]
    if case_id in (CaseId.G21, CaseId.G22):
        return [[one, zero, zero], [zero, one, zero]]
    if case_id == CaseId.G23:
        return [[one, zero, zero], [lambda c: -c[0], one, zero]]
    if case_id == CaseId.G31:
        return [[one, zero, zero], [zero, one, zero],
                [lambda c: -c[0], lambda c: -c[1], one]]
    if case_id == CaseId.G32:
        return [[one, zero, zero], [zero, one, zero],
                [lambda c: -c[1], lambda c: c[0], zero]]
    if case_id == CaseId.G33a:
        a = parameter_a
        if a is None or a <= 0:
            raise ValueError("G33a requires parameter a > 0")
        return [[one, zero, zero], [zero, one, zero],
                [lambda c: -(a * c[0] + c[1]), lambda c: c[0] - a * c[1], one]]
    if case_id == CaseId.G34:
        return [
            [one, zero, zero],
            [lambda c: dual.sin(c[0]) * dual.tan(c[1]), lambda c: dual.cos(c[0]), zero],
            [lambda c: dual.cos(c[0]) * dual.tan(c[1]), lambda c: -dual.sin(c[0]), zero],
        ]
    if case_id == CaseId.G35:
        return [
            [one, zero, zero],
            [lambda c: dual.sinh(c[0]) * dual.tan(c[1]), lambda c: dual.cosh(c[0]), zero],
            [lambda c: dual.cosh(c[0]) * dual.tan(c[1]), lambda c: dual.sinh(c[0]), zero],
        ]
    if case_id == CaseId.G41:
        return [[one, zero, zero], [zero, one, zero],
                [lambda c: -c[1], lambda c: c[0], zero],
                [lambda c: -c[0], lambda c: -c[1], one]]
    raise KeyError(case_id)


# ----------------------------------------------------------------------
# matrix exponential and the rectification construction
# ----------------------------------------------------------------------

def matexp(y: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring matrix exponential for small dense matrices."""
    y = np.asarray(y, dtype=float)
    norm = np.linalg.norm(y, ord=np.inf)
    squarings = max(0, int(math.ceil(math.log2(norm / 0.25))) if norm > 0.25 else 0)
    z = y / (2.0 ** squarings)
    term = np.eye(y.shape[0])
    total = term.copy()
    for k in range(1, 40):
        term = term @ z / k
        total += term
        if np.max(np.abs(term)) < 1e-20:
            break
    for _ in range(squarings):
        total = total @ total
    return total


@dataclass(frozen=True)
class RepMatrix:
    rho: np.ndarray

    def commutator_residual(self, others: "list[RepMatrix]",
                            structure: np.ndarray) -> float:
        worst = 0.0
        for A, ma in enumerate(others):
            for B, mb in enumerate(others):
                br = ma.rho @ mb.rho - mb.rho @ ma.rho
                target = sum(structure[A, B, C] * others[C].rho for C in range(len(others)))
                worst = max(worst, float(np.max(np.abs(br - target))))
        return worst


def rep_matrices(case_id: CaseId, parameter_a: Optional[float] = None) -> list[RepMatrix]:
    """Representation matrices rho_A with X_A = -rho_A x for a catalog entry."""
    sub = subalgebra(case_id, parameter_a)
    return [RepMatrix(-m) for m in sub.generator_matrices()]


def rectify(generators: Sequence[RepMatrix], section: Callable[[Sequence[float]], np.ndarray],
            q: Sequence[float], u: Sequence[float]) -> AmbientPoint:
    """Point of the rectifying chart built from exponentials of the first r generators."""
    x = np.asarray(section(list(u)), dtype=float)
    for qa, g in zip(reversed(list(q)), reversed(list(generators[: len(q)]))):
        x = matexp(-qa * g.rho) @ x
    return AmbientPoint(*x)


def so12_section(u: Sequence[float]) -> np.ndarray:
    """Transversal section of the boost-rotation worked example, in ambient order."""
    ut1, ut2 = u
    return np.array([0.0, ut2 + 1.0, 0.0, ut1])


def so12_generators() -> list[RepMatrix]:
    """Generators of the worked example, ordered with the two transversal ones first."""
    return rep_matrices(CaseId.G35)


# ----------------------------------------------------------------------
# Jacobians, pushforwards, metrics
# ----------------------------------------------------------------------

def chart_jets(chart: Chart, point: Sequence[float]):
    """Ambient 2-jet of the chart map: values, Jacobian (4x3), second derivatives."""
    seeds = Dual.seed([complex(p) for p in point])
    x = chart.map_dual(seeds)
    vals = np.empty(4)
    jac = np.empty((4, 3))
    hes = np.empty((4, 3, 3))
    for i in range(4):
        xi = x[i] if isinstance(x[i], Dual) else Dual.constant(x[i], 3)
        vals[i] = xi.val.real
        jac[i] = [g.real for g in xi.grad]
        hes[i] = [[h.real for h in row] for row in xi.hess]
    return vals, jac, hes


def hyperboloid_residual(chart: Chart, point: Sequence[float]) -> float:
    return chart.embed(point).hyperboloid_residual()


def pushforward(case_id: CaseId, generator: int, point: Sequence[float],
                parameter_a: Optional[float] = None) -> np.ndarray:
    """Chart components of one ambient generator at a chart point.

    Solves J v = X(x(q, u)) for the full 3-component vector; a valid
    rectification has vanishing u-components.
    """
    chart = chart_for(case_id, parameter_a)
    vals, jac, _ = chart_jets(chart, point)
    if np.linalg.matrix_rank(jac, tol=1e-8) < 3:
        raise RankDeficientError(f"chart Jacobian rank-deficient at {point}")
    mats = subalgebra(case_id, parameter_a).generator_matrices()
    amb = mats[generator] @ vals
    sol, res, *_ = np.linalg.lstsq(jac, amb, rcond=None)
    if np.max(np.abs(jac @ sol - amb)) > 1e-8:
        raise RankDeficientError(f"ambient generator not tangent at {point}")
    return sol


@dataclass(frozen=True)
class MetricSample:
    g: np.ndarray
    g_inv: np.ndarray
    sqrt_abs_det: float
    point: tuple[float, ...]

    def signature_counts(self) -> tuple[int, int]:
        ev = np.linalg.eigvalsh(0.5 * (self.g + self.g.T))
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))

    def identity_residual(self) -> float:
        return float(np.max(np.abs(self.g @ self.g_inv - np.eye(3))))


def metric_jet(case_id: CaseId, point: Sequence[float],
               parameter_a: Optional[float] = None):
    """Induced metric with first derivatives, from the exact chart 2-jet.

    Returns (g, dg, g_inv, sqrtg, dsqrtg, d_ginv) with dg[c][a][b] the
    coordinate derivative d_c g_ab.
    """
    chart = chart_for(case_id, parameter_a)
    _, jac, hes = chart_jets(chart, point)
    g = np.einsum("i,ia,ib->ab", ETA, jac, jac)
    dg = np.einsum("i,iac,ib->cab", ETA, hes, jac) \
        + np.einsum("i,ia,ibc->cab", ETA, jac, hes)
    ginv = np.linalg.inv(g)
    det = np.linalg.det(g)
    sqrtg = math.sqrt(abs(det))
    # d(det)/dx_c = det * tr(ginv dg); d sqrt|det| = sqrt|det| tr(ginv dg)/2
    tr = np.einsum("ab,cba->c", ginv, dg)
    dsqrtg = 0.5 * sqrtg * tr
    dginv = -np.einsum("ae,ceb,bf->caf", ginv, dg, ginv)
    return g, dg, ginv, sqrtg, dsqrtg, dginv


def induced_metric(case_id: CaseId, point: Sequence[float],
                   parameter_a: Optional[float] = None) -> MetricSample:
    g, _, ginv, sqrtg, _, _ = metric_jet(case_id, point, parameter_a)
    sample = MetricSample(g, ginv, sqrtg, tuple(float(p) for p in point))
    pos, neg = sample.signature_counts()
    if (pos, neg) != (1, 2):
        raise RankDeficientError(
            f"induced metric signature {(pos, neg)} at {point}; outside chart domain")
    return sample


def killing_residual(case_id: CaseId, point: Sequence[float],
                     parameter_a: Optional[float] = None) -> float:
    """Max |(L_X g)_ab| over the entry's generators, in chart coordinates."""
    g, dg, *_ = metric_jet(case_id, point, parameter_a)
    comps = rect_components(case_id, parameter_a)
    worst = 0.0
    for comp in comps:
        seeds = Dual.seed([complex(p) for p in point])
        xval = np.zeros(3)
        dx = np.zeros((3, 3))  # dx[a][c] = d_c X^a
        for a_idx, fn in enumerate(comp):
            out = fn(seeds)
            if isinstance(out, Dual):
                xval[a_idx] = out.val.real
                dx[a_idx] = [gr.real for gr in out.grad]
            else:
                xval[a_idx] = complex(out).real
        # dx[c, a] = d_a X^c; (L_X g)_ab = X^c d_c g_ab + g_cb d_a X^c + g_ac d_b X^c
        lie = np.einsum("c,cab->ab", xval, dg) \
            + np.einsum("cb,ca->ab", g, dx) \
            + np.einsum("ac,cb->ab", g, dx)
        worst = max(worst, float(np.max(np.abs(lie))))
    return worst


def orbit_rank(case_id: CaseId, n_points: int = 60, seed: int = 4801,
               parameter_a: Optional[float] = None) -> int:
    """Generic rank of the ambient generator components over sampled points."""
    chart = chart_for(case_id, parameter_a)
    mats = subalgebra(case_id, parameter_a).generator_matrices()
    rng = np.random.default_rng(seed)
    pts = sample_domain(chart, n_points, rng)
    best = 0
    for p in pts:
        x = chart.embed(p).as_array()
        rows = np.array([m @ x for m in mats])
        sv = np.linalg.svd(rows, compute_uv=False)
        if sv.size and sv[0] > 0:
            best = max(best, int(np.sum(sv > 1e-10 * sv[0])))
    return best

"""First-order symmetry operators and the Klein-Gordon operator.

Operators are represented by dual-evaluable coefficient callables, so
commutators, operator compositions and all residuals come out of exact
forward-mode differentiation.  The wave operator exists in two independent
builds that are required to agree: a hard-coded closed form per integrable
entry, and the generic divergence-form assembly from the chart metric and
gauge potential.  The embedding metric is the arbiter for every sign that
enters the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import dual
from .dual import Dual
from .fields import FieldConfig, gauge_one_form, solve_chi
from .geometry import metric_jet, rect_components
from .lie_core import CaseId, INTEGRABLE_CASES


def _as_value(x):
    return x.val if isinstance(x, Dual) else complex(x)


def _const(value):
    return lambda coords, v=value: v


class DiffOp1:
    """First-order operator sum_u a^u(x) d_u + b(x) in ``nvars`` variables."""

    def __init__(self, coeffs: Sequence[Callable], scalar: Callable, nvars: Optional[int] = None):
        self.coeffs = list(coeffs)
        self.scalar = scalar
        self.nvars = nvars if nvars is not None else len(self.coeffs)

    def apply(self, f: Callable, point: Sequence[complex]):
        seeds = Dual.seed([complex(p) for p in point])
        fv = f(seeds)
        grad = fv.grad if isinstance(fv, Dual) else (0j,) * self.nvars
        val = _as_value(fv)
        total = _as_value(self.scalar(list(point))) * val
        for u, a in enumerate(self.coeffs):
            total += _as_value(a(list(point))) * grad[u]
        return total

    def as_function(self, f) -> Callable:
        """The function (op f), evaluable at dual points; f must expose .partial."""
        partials = [f.partial(u) for u in range(self.nvars)]

        def g(coords):
            total = self.scalar(coords) * f(coords)
            for u, a in enumerate(self.coeffs):
                total = total + a(coords) * partials[u](coords)
            return total
        return g

    def coeff_values(self, point):
        pt = list(point)
        return [_as_value(a(pt)) for a in self.coeffs] + [_as_value(self.scalar(pt))]


class DiffOp2:
    """Second-order operator with symmetric leading coefficients."""

    def __init__(self, second: Sequence[Sequence[Callable]], first: Sequence[Callable],
                 scalar: Callable, nvars: int = 3):
        self.second = [list(row) for row in second]
        self.first = list(first)
        self.scalar = scalar
        self.nvars = nvars

    def apply(self, f: Callable, point: Sequence[complex]):
        value, _ = self.apply_scaled(f, point)
        return value

    def apply_scaled(self, f: Callable, point: Sequence[complex]):
        """(value, scale): scale sums the magnitudes of the individual terms."""
        seeds = Dual.seed([complex(p) for p in point])
        fv = f(seeds)
        if isinstance(fv, Dual):
            val, grad, hess = fv.val, fv.grad, fv.hess
        else:
            k = self.nvars
            val, grad, hess = complex(fv), (0j,) * k, ((0j,) * k,) * k
        pt = list(point)
        total = 0j
        scale = 0.0
        for a in range(self.nvars):
            for b in range(self.nvars):
                c = _as_value(self.second[a][b](pt))
                if c != 0:
                    term = c * hess[a][b]
                    total += term
                    scale += abs(term)
        for a in range(self.nvars):
            c = _as_value(self.first[a](pt))
            if c != 0:
                term = c * grad[a]
                total += term
                scale += abs(term)
        term = _as_value(self.scalar(pt)) * val
        total += term
        scale += abs(term)
        return total, scale

    def as_function(self, f) -> Callable:
        partials = [f.partial(u) for u in range(self.nvars)]
        second_partials = [[partials[a].partial(b) for b in range(self.nvars)]
                           for a in range(self.nvars)]

        def g(coords):
            total = self.scalar(coords) * f(coords)
            for a in range(self.nvars):
                total = total + self.first[a](coords) * partials[a](coords)
                for b in range(self.nvars):
                    fn = self.second[a][b]
                    total = total + fn(coords) * second_partials[a][b](coords)
            return total
        return g


def apply(op, f: Callable, point: Sequence[complex]):
    """Apply a first- or second-order operator to f at a point, exactly."""
    return op.apply(f, point)


@dataclass(frozen=True)
class CommutatorSample:
    coeffs: np.ndarray
    scalar: complex


def commutator(op_a: DiffOp1, op_b: DiffOp1, point: Sequence[complex]) -> CommutatorSample:
    """Coefficients and scalar part of [A, B] at one point."""
    k = op_a.nvars
    seeds = Dual.seed([complex(p) for p in point])

    def jets(op):
        vals = np.zeros(k + 1, dtype=complex)
        grads = np.zeros((k + 1, k), dtype=complex)
        for i, fn in enumerate(list(op.coeffs) + [op.scalar]):
            out = fn(seeds)
            if isinstance(out, Dual):
                vals[i] = out.val
                grads[i] = out.grad
            else:
                vals[i] = complex(out)
        return vals, grads

    av, ag = jets(op_a)
    bv, bg = jets(op_b)
    coeffs = np.zeros(k, dtype=complex)
    for mu in range(k):
        coeffs[mu] = np.dot(av[:k], bg[mu]) - np.dot(bv[:k], ag[mu])
    scalar = np.dot(av[:k], bg[k]) - np.dot(bv[:k], ag[k])
    return CommutatorSample(coeffs, scalar)


@dataclass(frozen=True)
class TableFit:
    structure: np.ndarray      # fitted C_AB^C
    central: np.ndarray        # fitted central charges F_AB
    residual: float
    closed: bool


def commutation_table_fit(ops: Sequence[DiffOp1], probes: Sequence[Sequence[complex]],
                          central_scalar: complex, tol: float = 1e-9) -> TableFit:
    """Least-squares fit of every commutator into span(ops, central)."""
    n = len(ops)
    k = ops[0].nvars if n else 0
    structure = np.zeros((n, n, n))
    central = np.zeros((n, n))
    worst = 0.0
    basis_rows = {}
    for pt in probes:
        cols = [op.coeff_values(pt) for op in ops]
        cols.append([0j] * k + [central_scalar])
        basis_rows[tuple(pt)] = np.array(cols, dtype=complex).T  # (k+1) x (n+1)
    for A in range(n):
        for B in range(A + 1, n):
            mats, rhs = [], []
            for pt in probes:
                sample = commutator(ops[A], ops[B], pt)
                mats.append(basis_rows[tuple(pt)])
                rhs.append(np.concatenate([sample.coeffs, [sample.scalar]]))
            m = np.vstack(mats)
            b = np.concatenate(rhs)
            sol, *_ = np.linalg.lstsq(m, b, rcond=None)
            res = float(np.max(np.abs(m @ sol - b)))
            worst = max(worst, res)
            if float(np.max(np.abs(sol.imag))) > max(tol, 1e-9):
                worst = max(worst, float(np.max(np.abs(sol.imag))))
            structure[A, B] = sol[:n].real
            structure[B, A] = -sol[:n].real
            central[A, B] = sol[n].real
            central[B, A] = -sol[n].real
    return TableFit(structure, central, worst, worst <= tol)


def representation_residual(ops: Sequence[DiffOp1], structure: np.ndarray,
                            central: np.ndarray, central_scalar: complex,
                            probes: Sequence[Sequence[complex]]) -> float:
    """max |[A,B] - C_AB^C op_C - F_AB op_0| sampled at probe points.

    Unlike the least-squares fit this works even when the operator set is
    pointwise linearly dependent (it checks the known table directly).
    """
    n = len(ops)
    k = ops[0].nvars if n else 0
    worst = 0.0
    for pt in probes:
        vals = [np.array(op.coeff_values(pt)) for op in ops]
        for A in range(n):
            for B in range(A + 1, n):
                sample = commutator(ops[A], ops[B], pt)
                target = np.zeros(k + 1, dtype=complex)
                for C in range(n):
                    if structure[A, B, C] != 0:
                        target += structure[A, B, C] * vals[C]
                target[k] += central[A, B] * central_scalar
                got = np.concatenate([sample.coeffs, [sample.scalar]])
                worst = max(worst, float(np.max(np.abs(got - target))))
    return worst


# ----------------------------------------------------------------------
# symmetry operators of the catalog entries
# ----------------------------------------------------------------------

def symmetry_operators(case_id: CaseId, config: FieldConfig,
                       chi_constants: Optional[Sequence[float]] = None,
                       chi_extra: Optional[Sequence[Optional[Callable]]] = None) -> list[DiffOp1]:
    """Explicit first-order symmetry operators X^a d_a + i e (chi - X.A).

    ``chi_constants`` adds constant shifts lambda_A to the chi functions (the
    central-charge transformation law); ``chi_extra`` adds arbitrary evaluable
    perturbations, used to demonstrate detection of broken defining equations.
    """
    case_id = CaseId(case_id)
    comps = rect_components(case_id, config.parameter_a)
    chis = solve_chi(case_id, config)
    gauge = gauge_one_form(case_id, config)
    e = config.e
    ops = []
    for A, comp in enumerate(comps):
        chi = chis[A]
        shift = 0.0 if chi_constants is None else chi_constants[A]
        extra = None if chi_extra is None else chi_extra[A]

        def scalar(coords, comp=comp, chi=chi, shift=shift, extra=extra):
            total = chi(coords) + shift
            if extra is not None:
                total = total + extra(coords)
            avals = gauge.values(coords)
            for u in range(3):
                xu = comp[u](coords)
                if isinstance(xu, Dual) or xu != 0.0:
                    total = total - xu * avals[u]
            return total * (1j * e)

        ops.append(DiffOp1(list(comp), scalar, 3))
    return ops


def central_operator(config: FieldConfig) -> DiffOp1:
    """The trivial symmetry operator, multiplication by i e."""
    return DiffOp1([_const(0.0)] * 3, _const(1j * config.e), 3)


# ----------------------------------------------------------------------
# Klein-Gordon operator: closed forms and generic assembly
# ----------------------------------------------------------------------

def kg_operator(case_id: CaseId, config: FieldConfig) -> DiffOp2:
    """Hard-coded wave operator of an integrable entry, in its reference gauge."""
    case_id = CaseId(case_id)
    if case_id not in INTEGRABLE_CASES:
        raise ValueError(f"no closed-form wave operator for {case_id}")
    e = config.e
    mt = config.mass_term
    zero = _const(0.0)

    if case_id == CaseId.G31:
        mu1, mu2 = config.mu1, config.mu2
        h = lambda c: dual.exp(c[2]) * (mu1 * c[0] + mu2 * c[1])
        second = [[lambda c: -dual.exp(c[2] * (-2.0)), zero, zero],
                  [zero, lambda c: -dual.exp(c[2] * (-2.0)), zero],
                  [zero, zero, _const(1.0)]]
        first = [zero, zero, lambda c: 2.0 - 2j * e * h(c)]
        scalar = lambda c: -3j * e * h(c) - (e * h(c)) ** 2 + mt
        return DiffOp2(second, first, scalar)

    if case_id == CaseId.G32:
        mu = config.mu
        second = [[lambda c: -dual.exp(c[2] * 2.0), zero, zero],
                  [zero, lambda c: -dual.exp(c[2] * 2.0), zero],
                  [zero, zero, _const(1.0)]]
        first = [lambda c: -1j * e * mu * dual.exp(c[2] * 2.0) * c[1],
                 lambda c: 1j * e * mu * dual.exp(c[2] * 2.0) * c[0],
                 _const(-2.0)]
        scalar = lambda c: 0.25 * (e * mu) ** 2 * dual.exp(c[2] * 2.0) \
            * (c[0] * c[0] + c[1] * c[1]) + mt
        return DiffOp2(second, first, scalar)

    if case_id == CaseId.G33a:
        a = config.parameter_a
        mu1, mu2 = config.mu1, config.mu2
        P = lambda c: dual.exp(c[2] * a) * (mu1 * dual.cos(c[2]) + mu2 * dual.sin(c[2]))
        Q = lambda c: dual.exp(c[2] * a) * (mu1 * dual.sin(c[2]) - mu2 * dual.cos(c[2]))
        W = lambda c: c[0] * P(c) + c[1] * Q(c)
        second = [[lambda c: -dual.exp(c[2] * (-2.0 * a)), zero, zero],
                  [zero, lambda c: -dual.exp(c[2] * (-2.0 * a)), zero],
                  [zero, zero, _const(1.0 / a ** 2)]]
        first = [zero, zero,
                 lambda c: 2.0 / a - (2j * e / a ** 2) * W(c)]
        scalar = lambda c: -(1j * e / a ** 2) * (3.0 * a * W(c) + c[1] * P(c) - c[0] * Q(c)) \
            - (e / a) ** 2 * W(c) ** 2 + mt
        return DiffOp2(second, first, scalar)

    if case_id == CaseId.G34:
        mu = config.mu
        ch2 = lambda c: dual.cosh(c[2]) ** 2
        second = [[lambda c: -1.0 / (ch2(c) * dual.cos(c[1]) ** 2), zero, zero],
                  [zero, lambda c: -1.0 / ch2(c), zero],
                  [zero, zero, _const(1.0)]]
        first = [lambda c: -2j * e * mu * dual.tan(c[1]) / (ch2(c) * dual.cos(c[1])),
                 lambda c: dual.tan(c[1]) / ch2(c),
                 lambda c: 2.0 * dual.tanh(c[2])]
        scalar = lambda c: (e * mu * dual.tan(c[1])) ** 2 / ch2(c) + mt
        return DiffOp2(second, first, scalar)

    if case_id == CaseId.G35:
        mu = config.mu
        s2 = lambda c: dual.sin(c[2]) ** 2
        second = [[lambda c: 1.0 / (s2(c) * dual.cos(c[1]) ** 2), zero, zero],
                  [zero, lambda c: -1.0 / s2(c), zero],
                  [zero, zero, _const(-1.0)]]
        first = [lambda c: 2j * e * mu * dual.tan(c[1]) / (s2(c) * dual.cos(c[1])),
                 lambda c: dual.tan(c[1]) / s2(c),
                 lambda c: -2.0 * dual.cos(c[2]) / dual.sin(c[2])]
        scalar = lambda c: -((e * mu * dual.tan(c[1])) ** 2) / s2(c) + mt
        return DiffOp2(second, first, scalar)

    raise KeyError(case_id)


def kg_apply_generic(case_id: CaseId, config: FieldConfig, f: Callable,
                     point: Sequence[float]) -> complex:
    """Divergence-form assembly of the wave operator applied to f at a point.

    Independent of the closed forms above: uses only the chart metric jet and
    the gauge potential,
        (1/sqrt g) D_a ( sqrt g g^{ab} D_b f ) + (6 zeta + m^2) f.
    """
    case_id = CaseId(case_id)
    g, dg, ginv, sqrtg, dsqrtg, dginv = metric_jet(case_id, point, config.parameter_a)
    gauge = gauge_one_form(case_id, config)
    e = config.e
    seeds = Dual.seed([complex(p) for p in point])
    avals_d = gauge.values(seeds)
    aval = np.array([_as_value(v) for v in avals_d])
    agrad = np.array([list(v.grad) if isinstance(v, Dual) else [0j, 0j, 0j]
                      for v in avals_d])  # agrad[b][c] = d_c A_b
    fv = f(seeds)
    if isinstance(fv, Dual):
        val, grad, hess = fv.val, np.array(fv.grad), np.array(fv.hess)
    else:
        val, grad, hess = complex(fv), np.zeros(3, complex), np.zeros((3, 3), complex)

    total = np.einsum("ab,ab->", ginv, hess)
    drift = (np.einsum("a,ab->b", dsqrtg, ginv) / sqrtg
             + np.einsum("aab->b", dginv))
    aup = ginv @ aval
    total += np.dot(drift - 2j * e * aup, grad)
    # div A = (1/sqrt g) d_c (sqrt g g^{cb} A_b)
    div_a = (np.dot(dsqrtg, aup) / sqrtg
             + np.einsum("ccb,b->", dginv, aval)
             + np.einsum("cb,bc->", ginv, agrad))
    total += (-1j * e * div_a - e * e * np.dot(aup, aval) + config.mass_term) * val
    return complex(total)


def kg_cross_residual(case_id: CaseId, config: FieldConfig, f: Callable,
                      point: Sequence[float]) -> float:
    """|closed-form - generic| of the wave operator acting on f at one point."""
    op = kg_operator(case_id, config)
    direct, scale = op.apply_scaled(f, point)
    generic = kg_apply_generic(case_id, config, f, point)
    return abs(direct - generic) / (1.0 + scale)


# ----------------------------------------------------------------------
# probe functions (polynomial x exponential, closed under differentiation)
# ----------------------------------------------------------------------

class PolyExpProbe:
    """sum_m c_m x^m * exp(d . x) with exact symbolic partial derivatives."""

    def __init__(self, terms: dict[tuple[int, ...], complex], dvec: tuple[complex, ...]):
        self.terms = dict(terms)
        self.dvec = tuple(dvec)

    def __call__(self, coords):
        expo = 0.0
        for d, c in zip(self.dvec, coords):
            expo = c * d + expo
        poly = 0.0
        for powers, coeff in self.terms.items():
            term = coeff
            for p, c in zip(powers, coords):
                for _ in range(p):
                    term = term * c
            poly = poly + term
        return poly * dual.exp(expo)

    def partial(self, i: int) -> "PolyExpProbe":
        new: dict[tuple[int, ...], complex] = {}

        def add(powers, coeff):
            if coeff != 0:
                new[powers] = new.get(powers, 0j) + coeff

        for powers, coeff in self.terms.items():
            if powers[i] > 0:
                lowered = list(powers)
                lowered[i] -= 1
                add(tuple(lowered), coeff * powers[i])
            add(powers, coeff * self.dvec[i])
        return PolyExpProbe(new, self.dvec)


def random_probe(rng: np.random.Generator, nvars: int = 3) -> PolyExpProbe:
    terms = {}
    for _ in range(rng.integers(2, 5)):
        powers = tuple(int(p) for p in rng.integers(0, 3, nvars))
        terms[powers] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    dvec = tuple(complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
                 for _ in range(nvars))
    return PolyExpProbe(terms, dvec)


def symmetry_check(case_id: CaseId, config: FieldConfig, points: Sequence[Sequence[float]],
                   n_probes: int = 5, seed: int = 7130,
                   chi_extra: Optional[Sequence[Optional[Callable]]] = None) -> float:
    """max over operators, probe functions and points of the normalized
    commutator residual |H(X f) - X(H f)| / (1 + |H(X f)| + |X(H f)|)."""
    case_id = CaseId(case_id)
    rng = np.random.default_rng(seed)
    h = kg_operator(case_id, config)
    ops = symmetry_operators(case_id, config, chi_extra=chi_extra)
    worst = 0.0
    for _ in range(n_probes):
        f = random_probe(rng)
        hf = h.as_function(f)
        for op in ops:
            xf = op.as_function(f)
            for pt in points:
                lhs = h.apply(xf, pt)
                rhs = op.apply(hf, pt)
                res = abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs))
                worst = max(worst, res)
    return worst

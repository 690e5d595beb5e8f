"""Invariant electromagnetic data on the rectifying charts.

For every catalog entry this module provides the generic closed 2-form left
invariant by the entry's generators, a gauge potential with dA = F, and the
scalar functions chi_A solving d chi_A = -i_{X_A} F.  The chi normalization
constants are fixed so the resulting symmetry operators reproduce the
tabulated commutation relations, including the central charges.

Arbitrary profile functions f1, f2 (allowed for the low-dimensional entries)
are supplied by the caller as dual-evaluable callables; defaults suitable for
tests are installed automatically.  Where a gauge needs an antiderivative of
a profile, the config carries it alongside.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import dual
from .dual import Dual
from .geometry import rect_components
from .lie_core import CaseId, Cocycle, PARAMETERIZED_CASES, subalgebra

ZETA_CONFORMAL = 1.0 / 6.0
FORM_TOL = 1e-10


def _zero(coords):
    return 0.0


def _partial(jet, index):
    """First-derivative 1-jet of a 2-jet (Hessian content is dropped)."""
    if not isinstance(jet, Dual):
        raise TypeError("partial of a non-dual value")
    k = len(jet.grad)
    z = (0j,) * k
    return Dual(jet.grad[index], jet.hess[index], (z,) * k)


def _default_f1_1dim(u1, u2):
    return u1 + 0.5 * u2


def _default_f2_1dim(u1, u2):
    return 1.0


def _default_f1(u1):
    return u1


def _default_f1_antideriv(u1):
    return 0.5 * u1 * u1


def _default_f2(u1):
    return 1.0


def _default_f2_antideriv(u1):
    return u1 * 1.0


def _default_f2_antideriv_1dim(u1, u2):
    return u1 * 1.0


@dataclass
class FieldConfig:
    """Electromagnetic data for one catalog entry."""

    case_id: CaseId
    mu: float = 0.3
    mu1: float = 0.3
    mu2: float = 0.3
    e: float = 0.1
    m: float = 0.5
    zeta: float = 0.0
    parameter_a: Optional[float] = None
    f1: Optional[Callable] = None
    f2: Optional[Callable] = None
    f1_antideriv: Optional[Callable] = None
    f2_antideriv: Optional[Callable] = None

    def __post_init__(self):
        self.case_id = CaseId(self.case_id)
        if not (abs(self.zeta) < 1e-14 or abs(self.zeta - ZETA_CONFORMAL) < 1e-14):
            raise ValueError("zeta must be 0 (minimal) or 1/6 (conformal coupling)")
        if self.case_id in PARAMETERIZED_CASES:
            if self.parameter_a is None or self.parameter_a <= 0:
                raise ValueError(f"{self.case_id} requires parameter_a > 0")
        else:
            self.parameter_a = None
        one_dim = self.case_id in (CaseId.G11, CaseId.G12, CaseId.G13a, CaseId.G14)
        if self.f1 is None:
            self.f1 = _default_f1_1dim if one_dim else _default_f1
            if self.f1_antideriv is None and not one_dim:
                self.f1_antideriv = _default_f1_antideriv
        if self.f2 is None:
            self.f2 = _default_f2_1dim if one_dim else _default_f2
            if self.f2_antideriv is None:
                self.f2_antideriv = _default_f2_antideriv_1dim if one_dim else _default_f2_antideriv

    @property
    def mass_term(self) -> float:
        # scalar curvature of the unit hyperboloid is 6
        return self.m ** 2 + 6.0 * self.zeta

    def to_dict(self) -> dict:
        return {
            "case": self.case_id.value,
            "mu": self.mu, "mu1": self.mu1, "mu2": self.mu2,
            "e": self.e, "m": self.m, "zeta": self.zeta,
            "parameter_a": self.parameter_a,
            "gauge": "reference",
        }


class TwoForm:
    """Antisymmetric field tensor; entries are dual-evaluable callables."""

    def __init__(self, entries: dict[tuple[int, int], Callable]):
        self.entries = dict(entries)

    def component(self, a: int, b: int, coords):
        if a == b:
            return 0.0
        if (a, b) in self.entries:
            return self.entries[(a, b)](coords)
        if (b, a) in self.entries:
            return -self.entries[(b, a)](coords)
        return 0.0

    def matrix(self, point: Sequence[float]) -> np.ndarray:
        seeds = Dual.seed([complex(p) for p in point])
        m = np.zeros((3, 3), dtype=complex)
        for a in range(3):
            for b in range(3):
                m[a, b] = dual.value(self.component(a, b, seeds))
        return m

    def exterior_derivative(self, coords):
        """The single independent component (dF)_{012} at possibly-dual coords."""
        permutations = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
        total = 0.0
        for c, a, b in permutations:
            val = self.component(a, b, coords)
            if isinstance(val, Dual):
                total = total + _partial(val, c)
            # constant entries contribute nothing
        return total

    def closedness_residual(self, point: Sequence[float]) -> float:
        seeds = Dual.seed([complex(p) for p in point])
        return abs(dual.value(self.exterior_derivative(seeds)))

    def antisymmetry_residual(self, point: Sequence[float]) -> float:
        m = self.matrix(point)
        return float(np.max(np.abs(m + m.T)))

    def perturbed(self, entry: tuple[int, int], extra: Callable) -> "TwoForm":
        new = dict(self.entries)
        base = new.get(entry)
        if base is None:
            new[entry] = extra
        else:
            new[entry] = lambda c, b=base, x=extra: b(c) + x(c)
        return TwoForm(new)


class OneForm:
    """Gauge potential; components are dual-evaluable callables."""

    def __init__(self, components: Sequence[Callable]):
        self.components = list(components)

    def values(self, coords):
        return [c(coords) for c in self.components]

    def d(self, point: Sequence[float]) -> np.ndarray:
        """(dA)_ab at a real point, by exact differentiation."""
        seeds = Dual.seed([complex(p) for p in point])
        vals = self.values(seeds)
        grads = []
        for v in vals:
            if isinstance(v, Dual):
                grads.append(v.grad)
            else:
                grads.append((0j, 0j, 0j))
        m = np.zeros((3, 3), dtype=complex)
        for a in range(3):
            for b in range(3):
                m[a, b] = grads[b][a] - grads[a][b]
        return m


def invariant_two_form(case_id: CaseId, config: FieldConfig) -> TwoForm:
    """The generic closed invariant 2-form of one catalog entry."""
    case_id = CaseId(case_id)
    cfg = config
    mu, mu1, mu2 = cfg.mu, cfg.mu1, cfg.mu2
    if case_id in (CaseId.G11, CaseId.G12, CaseId.G13a, CaseId.G14):
        f1, f2 = cfg.f1, cfg.f2
        return TwoForm({
            (0, 1): lambda c: _partial(f1(c[1], c[2]), 1),
            (0, 2): lambda c: _partial(f1(c[1], c[2]), 2),
            (1, 2): lambda c: f2(c[1], c[2]),
        })
    if case_id in (CaseId.G21, CaseId.G22):
        f1, f2 = cfg.f1, cfg.f2
        return TwoForm({
            (0, 1): lambda c: mu,
            (0, 2): lambda c: f1(c[2]),
            (1, 2): lambda c: f2(c[2]),
        })
    if case_id == CaseId.G23:
        f1, f2 = cfg.f1, cfg.f2
        return TwoForm({
            (0, 1): lambda c: dual.exp(c[1]) * f1(c[2]),
            (0, 2): lambda c: dual.exp(c[1]) * _partial(f1(c[2]), 2),
            (1, 2): lambda c: f2(c[2]),
        })
    if case_id == CaseId.G31:
        return TwoForm({
            (0, 2): lambda c: mu1 * dual.exp(c[2]),
            (1, 2): lambda c: mu2 * dual.exp(c[2]),
        })
    if case_id == CaseId.G32:
        return TwoForm({(0, 1): lambda c: mu})
    if case_id == CaseId.G33a:
        a = cfg.parameter_a
        return TwoForm({
            (0, 2): lambda c: dual.exp(c[2] * a) * (mu1 * dual.cos(c[2]) + mu2 * dual.sin(c[2])),
            (1, 2): lambda c: dual.exp(c[2] * a) * (mu1 * dual.sin(c[2]) - mu2 * dual.cos(c[2])),
        })
    if case_id in (CaseId.G34, CaseId.G35):
        return TwoForm({(0, 1): lambda c: mu * dual.cos(c[1])})
    if case_id == CaseId.G41:
        return TwoForm({})
    raise KeyError(case_id)


def gauge_one_form(case_id: CaseId, config: FieldConfig) -> OneForm:
    """A gauge potential with dA = F for any catalog entry."""
    case_id = CaseId(case_id)
    cfg = config
    mu, mu1, mu2 = cfg.mu, cfg.mu1, cfg.mu2
    if case_id in (CaseId.G11, CaseId.G12, CaseId.G13a, CaseId.G14):
        f1, F2 = cfg.f1, cfg.f2_antideriv
        return OneForm([lambda c: -f1(c[1], c[2]), _zero, lambda c: F2(c[1], c[2])])
    if case_id in (CaseId.G21, CaseId.G22):
        F1, F2 = cfg.f1_antideriv, cfg.f2_antideriv
        return OneForm([
            lambda c: -0.5 * mu * c[1] - F1(c[2]),
            lambda c: 0.5 * mu * c[0] - F2(c[2]),
            _zero,
        ])
    if case_id == CaseId.G23:
        f1, F2 = cfg.f1, cfg.f2_antideriv
        return OneForm([
            lambda c: -dual.exp(c[1]) * f1(c[2]),
            lambda c: -F2(c[2]),
            _zero,
        ])
    if case_id == CaseId.G31:
        return OneForm([_zero, _zero,
                        lambda c: dual.exp(c[2]) * (mu1 * c[0] + mu2 * c[1])])
    if case_id == CaseId.G32:
        return OneForm([lambda c: -0.5 * mu * c[1], lambda c: 0.5 * mu * c[0], _zero])
    if case_id == CaseId.G33a:
        a = cfg.parameter_a
        return OneForm([_zero, _zero, lambda c: dual.exp(c[2] * a) * (
            (mu1 * c[0] - mu2 * c[1]) * dual.cos(c[2])
            + (mu2 * c[0] + mu1 * c[1]) * dual.sin(c[2]))])
    if case_id in (CaseId.G34, CaseId.G35):
        return OneForm([lambda c: -mu * dual.sin(c[1]), _zero, _zero])
    if case_id == CaseId.G41:
        return OneForm([_zero, _zero, _zero])
    raise KeyError(case_id)


def potential(case_id: CaseId, config: FieldConfig) -> OneForm:
    """The reference gauge of the five integrable entries."""
    case_id = CaseId(case_id)
    if case_id not in (CaseId.G31, CaseId.G32, CaseId.G33a, CaseId.G34, CaseId.G35):
        raise ValueError(f"no reference potential for {case_id}")
    return gauge_one_form(case_id, config)


def solve_chi(case_id: CaseId, config: FieldConfig) -> list[Callable]:
    """Closed-form chi_A with d chi_A = -i_{X_A} F, one per generator."""
    case_id = CaseId(case_id)
    cfg = config
    mu, mu1, mu2 = cfg.mu, cfg.mu1, cfg.mu2
    if case_id in (CaseId.G11, CaseId.G12, CaseId.G13a, CaseId.G14):
        f1 = cfg.f1
        return [lambda c: -f1(c[1], c[2])]
    if case_id in (CaseId.G21, CaseId.G22):
        F1, F2 = cfg.f1_antideriv, cfg.f2_antideriv
        return [
            lambda c: -mu * c[1] - F1(c[2]),
            lambda c: mu * c[0] - F2(c[2]),
        ]
    if case_id == CaseId.G23:
        f1, F2 = cfg.f1, cfg.f2_antideriv
        return [
            lambda c: -dual.exp(c[1]) * f1(c[2]),
            lambda c: c[0] * dual.exp(c[1]) * f1(c[2]) - F2(c[2]),
        ]
    if case_id == CaseId.G31:
        return [
            lambda c: -mu1 * dual.exp(c[2]),
            lambda c: -mu2 * dual.exp(c[2]),
            lambda c: dual.exp(c[2]) * (mu1 * c[0] + mu2 * c[1]),
        ]
    if case_id == CaseId.G32:
        return [
            lambda c: -mu * c[1],
            lambda c: mu * c[0],
            lambda c: 0.5 * mu * (c[0] * c[0] + c[1] * c[1]),
        ]
    if case_id == CaseId.G33a:
        a = cfg.parameter_a
        den = 1.0 + a * a
        al = (a * mu1 - mu2) / den
        be = (mu1 + a * mu2) / den
        return [
            lambda c: -dual.exp(c[2] * a) * (al * dual.cos(c[2]) + be * dual.sin(c[2])),
            lambda c: dual.exp(c[2] * a) * (be * dual.cos(c[2]) - al * dual.sin(c[2])),
            lambda c: dual.exp(c[2] * a) * ((mu1 * c[0] - mu2 * c[1]) * dual.cos(c[2])
                                            + (mu2 * c[0] + mu1 * c[1]) * dual.sin(c[2])),
        ]
    if case_id == CaseId.G34:
        return [
            lambda c: -mu * dual.sin(c[1]),
            lambda c: mu * dual.sin(c[0]) * dual.cos(c[1]),
            lambda c: mu * dual.cos(c[0]) * dual.cos(c[1]),
        ]
    if case_id == CaseId.G35:
        return [
            lambda c: -mu * dual.sin(c[1]),
            lambda c: mu * dual.sinh(c[0]) * dual.cos(c[1]),
            lambda c: mu * dual.cosh(c[0]) * dual.cos(c[1]),
        ]
    if case_id == CaseId.G41:
        return [_zero, _zero, _zero, _zero]
    raise KeyError(case_id)


# ----------------------------------------------------------------------
# pointwise checks
# ----------------------------------------------------------------------

def interior_product(x_comp: Sequence[Callable], f: TwoForm, coords):
    """(i_X F)_b = F_ab X^a as a list of three dual scalars."""
    xv = [fn(coords) for fn in x_comp]
    out = []
    for b in range(3):
        total = 0.0
        for a in range(3):
            comp = f.component(a, b, coords)
            if isinstance(comp, Dual) or comp != 0.0:
                total = total + comp * xv[a]
        out.append(total)
    return out


def lie_derivative(x_comp: Sequence[Callable], f: TwoForm,
                   point: Sequence[float]) -> np.ndarray:
    """(L_X F)_ab = d(i_X F)_ab + (i_X dF)_ab at a real point."""
    seeds = Dual.seed([complex(p) for p in point])
    w = interior_product(x_comp, f, seeds)
    grads = [v.grad if isinstance(v, Dual) else (0j, 0j, 0j) for v in w]
    m = np.zeros((3, 3), dtype=complex)
    for a in range(3):
        for b in range(3):
            m[a, b] = grads[b][a] - grads[a][b]
    t = dual.value(f.exterior_derivative(seeds))
    if t != 0:
        xv = [dual.value(fn(seeds)) for fn in x_comp]
        # (i_X dF)_{bc} = T eps_{abc} X^a with T = (dF)_{012}
        m[1, 2] += t * xv[0]
        m[2, 1] -= t * xv[0]
        m[2, 0] += t * xv[1]
        m[0, 2] -= t * xv[1]
        m[0, 1] += t * xv[2]
        m[1, 0] -= t * xv[2]
    return m


def invariance_residual(case_id: CaseId, config: FieldConfig,
                        point: Sequence[float], f: Optional[TwoForm] = None) -> float:
    """Max |L_{X_A} F| over the entry's generators at one point."""
    f = f or invariant_two_form(case_id, config)
    comps = rect_components(case_id, config.parameter_a)
    worst = 0.0
    for comp in comps:
        worst = max(worst, float(np.max(np.abs(lie_derivative(comp, f, point)))))
    return worst


def chi_residual(case_id: CaseId, config: FieldConfig, point: Sequence[float]) -> float:
    """Max |d chi_A + i_{X_A} F| over generators at one point."""
    f = invariant_two_form(case_id, config)
    comps = rect_components(case_id, config.parameter_a)
    chis = solve_chi(case_id, config)
    seeds = Dual.seed([complex(p) for p in point])
    worst = 0.0
    for comp, chi in zip(comps, chis):
        w = interior_product(comp, f, seeds)
        cv = chi(seeds)
        grad = cv.grad if isinstance(cv, Dual) else (0j, 0j, 0j)
        for b in range(3):
            worst = max(worst, abs(grad[b] + dual.value(w[b])))
    return worst


def gauge_residual(case_id: CaseId, config: FieldConfig, point: Sequence[float],
                   one_form: Optional[OneForm] = None) -> float:
    """|dA - F| at one point for the entry's gauge."""
    a = one_form or gauge_one_form(case_id, config)
    f = invariant_two_form(case_id, config)
    return float(np.max(np.abs(a.d(point) - f.matrix(point))))


def cocycle_from_config(case_id: CaseId, config: FieldConfig,
                        points: Sequence[Sequence[float]],
                        tol: float = FORM_TOL) -> Cocycle:
    """Central-charge matrix F(X_A, X_B) - C_AB^C chi_C, checked constant."""
    case_id = CaseId(case_id)
    sub = subalgebra(case_id, config.parameter_a)
    f = invariant_two_form(case_id, config)
    comps = rect_components(case_id, config.parameter_a)
    chis = solve_chi(case_id, config)
    n = sub.dim
    samples = []
    for point in points:
        seeds = Dual.seed([complex(p) for p in point])
        xv = [[dual.value(fn(seeds)) for fn in comp] for comp in comps]
        chiv = [dual.value(chi(seeds)) for chi in chis]
        fm = f.matrix(point)
        mat = np.zeros((n, n), dtype=complex)
        for A in range(n):
            for B in range(n):
                pair = np.dot(np.array(xv[A]), fm @ np.array(xv[B]))
                shift = np.dot(sub.algebra.structure_constants[A, B], chiv)
                mat[A, B] = pair - shift
        samples.append(mat)
    stack = np.array(samples)
    spread = float(np.max(np.abs(stack - stack[0]))) if len(samples) > 1 else 0.0
    if spread > tol:
        raise RuntimeError(f"cocycle candidates vary across points by {spread:.3e}")
    mean = stack.mean(axis=0)
    if float(np.max(np.abs(mean.imag))) > tol:
        raise RuntimeError("cocycle has a spurious imaginary part")
    return Cocycle(mean.real)

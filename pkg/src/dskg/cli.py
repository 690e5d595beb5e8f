"""Command-line surface: catalog emission, verification, solving, chart export.

Exit codes are a stable contract: 0 success, 1 verification failure,
2 usage error.  Reports are deterministic for a fixed seed and flag set
(sorted keys, default float repr, cases ordered by id).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from . import dual, integrate, lie_core, operators
from .dual import Dual
from .fields import (FieldConfig, chi_residual, gauge_residual,
                     invariance_residual, invariant_two_form)
from .geometry import (chart_for, hyperboloid_residual, induced_metric,
                       killing_residual, sample_domain)
from .integrate import (CASE_RUN_DEFAULTS, ansatz, default_grid, joint_system_residual,
                        lambda_rep, reduced_ode, reduction_coefficients, solution_basis)
from .lie_core import (ALL_CASES, CaseId, INTEGRABLE_CASES, PARAMETERIZED_CASES,
                       TABLE3_REFERENCE, case_extension, integrability_check, subalgebra,
                       table3_diff)
from .operators import (commutation_table_fit, kg_operator, symmetry_check,
                        symmetry_operators)

SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "hyperboloid": 1e-12,
    "metric_identity": 1e-10,
    "killing": 1e-8,
    "field_closedness": 1e-10,
    "field_invariance": 1e-10,
    "gauge_consistency": 1e-10,
    "chi_gradient": 1e-10,
    "commutation_table": 1e-9,
    "central_charge": 1e-9,
    "lambda_commutation": 1e-10,
    "joint_system": 1e-8,
    "reduced_coefficients": 1e-9,
    "wave_residual": 1e-6,
}

FIELD_TEMPLATES = {
    CaseId.G11: "dq1 ^ d f1(u1,u2) + f2(u1,u2) du1 ^ du2",
    CaseId.G12: "dq1 ^ d f1(u1,u2) + f2(u1,u2) du1 ^ du2",
    CaseId.G13a: "dq1 ^ d f1(u1,u2) + f2(u1,u2) du1 ^ du2",
    CaseId.G14: "dq1 ^ d f1(u1,u2) + f2(u1,u2) du1 ^ du2",
    CaseId.G21: "mu dq1 ^ dq2 + f1(u1) dq1 ^ du1 + f2(u1) dq2 ^ du1",
    CaseId.G22: "mu dq1 ^ dq2 + f1(u1) dq1 ^ du1 + f2(u1) dq2 ^ du1",
    CaseId.G23: "exp(q2) dq1 ^ (f1(u1) dq2 + d f1(u1)) + f2(u1) dq2 ^ du1",
    CaseId.G31: "exp(q3) (mu1 dq1 + mu2 dq2) ^ dq3",
    CaseId.G32: "mu dq1 ^ dq2",
    CaseId.G33a: "exp(a q3) [(mu1 cos q3 + mu2 sin q3) dq1 + (mu1 sin q3 - mu2 cos q3) dq2] ^ dq3",
    CaseId.G34: "mu cos(q2) dq1 ^ dq2",
    CaseId.G35: "mu cos(q2) dq1 ^ dq2",
    CaseId.G41: "0",
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    case: Optional[str] = None
    e: float = 0.1
    m: float = 0.5
    zeta: float = 0.0
    mu: float = 0.3
    mu1: float = 0.3
    mu2: float = 0.3
    a: Optional[float] = None
    J: float = 1.0
    lam: Optional[complex] = None
    grid: tuple[int, int, int] = (10, 10, 10)
    seed: int = 20813
    fmt: str = "json"
    tolerances: dict = dc_field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    perturb: Optional[tuple[str, float]] = None

    def __post_init__(self):
        if not (abs(self.zeta) < 1e-14 or abs(self.zeta - 1.0 / 6.0) < 1e-14):
            raise UsageError("zeta must be 0 or 1/6")
        if self.a is not None and self.a <= 0:
            raise UsageError("a must be positive")
        if any(n < 2 for n in self.grid):
            raise UsageError("grid counts must be >= 2")


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' with both parts required (also accepts 'a-bi')."""
    t = text.strip().replace(" ", "")
    if not (t.endswith("i") or t.endswith("j")):
        raise UsageError(f"complex value '{text}' must end in i with both parts, e.g. 0.4+0.2i")
    body = t[:-1]
    split_at = None
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            split_at = k
            break
    if split_at is None:
        raise UsageError(f"complex value '{text}' must carry both real and imaginary parts")
    try:
        return complex(float(body[:split_at]), float(body[split_at:]))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex value '{text}'") from exc


def _field_config(case: CaseId, run: RunConfig) -> FieldConfig:
    a = run.a
    if case in PARAMETERIZED_CASES and a is None:
        raise UsageError(f"case {case.value} requires --a")
    return FieldConfig(case, mu=run.mu, mu1=run.mu1, mu2=run.mu2, e=run.e,
                       m=run.m, zeta=run.zeta,
                       parameter_a=a if case in PARAMETERIZED_CASES else None)


def _resolve_case(text: str) -> CaseId:
    try:
        return CaseId(text)
    except ValueError:
        raise UsageError(f"unknown case '{text}'; choose from "
                         + ", ".join(c.value for c in ALL_CASES))


# ----------------------------------------------------------------------
# catalog
# ----------------------------------------------------------------------

def cmd_catalog(run: RunConfig, out) -> int:
    a = run.a if run.a is not None else 1.0
    entries = []
    for case in ALL_CASES:
        sub = subalgebra(case, a if case in PARAMETERIZED_CASES else None)
        rec = integrability_check(case_extension(case, mu=run.mu or 1.0, a=a))
        d = sub.to_dict()
        if case in PARAMETERIZED_CASES:
            d["parameter"] = {"name": "a", "value": a}
        d["field_template"] = FIELD_TEMPLATES[case]
        d["table3"] = {
            "dim": rec.dim, "ind": rec.ind, "s": rec.s, "l": rec.l,
            "m_tilde": rec.m_tilde, "integrable": rec.integrable,
        }
        d["table3_reference"] = list(TABLE3_REFERENCE[case])
        entries.append(d)
    diff = {c.value: v for c, v in table3_diff(mu=run.mu or 1.0, a=a).items()}
    doc = {"schema": SCHEMA_VERSION, "entries": entries, "table3_diff": diff}
    if run.fmt == "csv":
        w = csv.writer(out)
        w.writerow(["case", "dim", "ind", "s", "l", "m_tilde", "integrable"])
        for d in entries:
            t = d["table3"]
            w.writerow([d["id"], t["dim"], t["ind"], t["s"], t["l"],
                        t["m_tilde"], int(t["integrable"])])
    else:
        json.dump(doc, out, indent=2, sort_keys=True)
        out.write("\n")
    return 0


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

def _verify_case(case: CaseId, run: RunConfig) -> dict:
    cfg = _field_config(case, run)
    rng = np.random.default_rng(run.seed)
    chart = chart_for(case, cfg.parameter_a)
    pts = sample_domain(chart, 40, rng)
    res: dict[str, float] = {}

    res["hyperboloid"] = max(hyperboloid_residual(chart, p) for p in pts)
    res["metric_identity"] = max(induced_metric(case, p, cfg.parameter_a).identity_residual()
                                 for p in pts[:15])
    res["killing"] = max(killing_residual(case, p, cfg.parameter_a) for p in pts[:15])

    f2 = invariant_two_form(case, cfg)
    res["field_closedness"] = max(f2.closedness_residual(p) for p in pts[:15])
    res["field_invariance"] = max(invariance_residual(case, cfg, p, f2) for p in pts[:15])
    res["gauge_consistency"] = max(gauge_residual(case, cfg, p) for p in pts[:15])
    res["chi_gradient"] = max(chi_residual(case, cfg, p) for p in pts[:15])

    chi_extra = None
    if run.perturb is not None:
        kind, eps = run.perturb
        if kind != "chi":
            raise UsageError(f"unknown perturbation target '{kind}'")
        n = subalgebra(case, cfg.parameter_a).dim
        chi_extra = [lambda c, s=eps: s * c[0]] + [None] * (n - 1)

    ops = symmetry_operators(case, cfg, chi_extra=chi_extra)
    fit = commutation_table_fit(ops, [tuple(p) for p in pts[:12]], 1j * cfg.e)
    res["commutation_table"] = fit.residual
    sub = subalgebra(case, cfg.parameter_a)
    expected_central = lie_core.standard_cocycle(case, cfg.mu, sub.dim).F
    res["central_charge"] = float(np.max(np.abs(fit.central - expected_central))) \
        if sub.dim > 1 else 0.0
    res["structure_vs_catalog"] = float(
        np.max(np.abs(fit.structure - sub.algebra.structure_constants))) if sub.dim > 1 else 0.0

    if case in INTEGRABLE_CASES:
        rep = lambda_rep(case, run.J, cfg)
        lam_pts = [(0.35,), (0.8,), (-0.6,), (1.1,)]
        res["lambda_commutation"] = operators.representation_residual(
            rep.ops, sub.algebra.structure_constants, expected_central,
            rep.ell0, lam_pts)
        lam = run.lam if run.lam is not None else CASE_RUN_DEFAULTS[case]["lam"]
        ans = ansatz(case, cfg, run.J, lam)
        box = CASE_RUN_DEFAULTS[case]["grid"]
        jpts = [[rng.uniform(lo, hi) for lo, hi in box] for _ in range(8)]
        res["joint_system"] = joint_system_residual(ans, rep, jpts)
        ode = reduced_ode(case, cfg, run.J)
        worst = 0.0
        for p in jpts[:5]:
            pv, qv, v = reduction_coefficients(case, cfg, run.J, lam, p)
            worst = max(worst, abs(pv - ode.p(v)), abs(qv - ode.q(v)))
        res["reduced_coefficients"] = worst
        basis = solution_basis(case, cfg, run.J)
        grid = default_grid(case, (4, 4, 4))
        res["wave_residual"] = integrate.reduction_residual(case, cfg, run.J, lam,
                                                            basis.phi1, grid)
        if run.perturb is not None:
            # a perturbed chi must break the symmetry commutators detectably
            sym = symmetry_check(case, cfg, [tuple(p) for p in pts[:10]],
                                 n_probes=2, chi_extra=chi_extra)
            res["symmetry_commutator"] = sym
        else:
            res["symmetry_commutator"] = symmetry_check(
                case, cfg, [tuple(p) for p in pts[:6]], n_probes=2)

    tol = run.tolerances
    checks = {}
    ok = True
    for key, val in res.items():
        limit = tol.get(key, tol.get("commutation_table"))
        if key == "symmetry_commutator":
            limit = tol.get("joint_system", 1e-8)
        passed = bool(val <= limit)
        checks[key] = {"residual": float(val), "tolerance": limit, "pass": passed}
        ok = ok and passed
    return {"residuals": checks, "pass": ok}


def cmd_verify(run: RunConfig, out) -> int:
    if run.case in (None, "all"):
        cases = [c for c in ALL_CASES]
    else:
        cases = [_resolve_case(run.case)]
    if run.a is None:
        run.a = 1.0
    workers = int(os.environ.get("THREADS", "1"))
    results: dict[str, dict] = {}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = {case: pool.submit(_verify_case, case, run) for case in cases}
            for case, fut in futs.items():
                results[case.value] = fut.result()
    else:
        for case in cases:
            results[case.value] = _verify_case(case, run)
    overall = all(r["pass"] for r in results.values())
    report = {
        "schema": SCHEMA_VERSION,
        "seed": run.seed,
        "parameters": {"e": run.e, "m": run.m, "zeta": run.zeta, "mu": run.mu,
                       "mu1": run.mu1, "mu2": run.mu2, "a": run.a, "J": run.J},
        "cases": {k: results[k] for k in sorted(results)},
        "pass": overall,
    }
    json.dump(report, out, indent=2, sort_keys=True)
    out.write("\n")
    return 0 if overall else 1


# ----------------------------------------------------------------------
# solve
# ----------------------------------------------------------------------

def _format_record(rec: dict) -> dict:
    out = {}
    for k, v in rec.items():
        if isinstance(v, complex):
            out[k] = {"re": v.real, "im": v.imag}
        else:
            out[k] = v
    return out


def cmd_solve(run: RunConfig, out, err) -> int:
    if run.case is None:
        raise UsageError("solve requires --case")
    case = _resolve_case(run.case)
    if case == CaseId.G41:
        raise UsageError("free-field case out of scope")
    if case not in INTEGRABLE_CASES:
        raise UsageError(f"case {case.value} is not integrable; "
                         "choose one of " + ", ".join(c.value for c in INTEGRABLE_CASES))
    cfg = _field_config(case, run)
    lam = run.lam if run.lam is not None else CASE_RUN_DEFAULTS[case]["lam"]
    basis = solution_basis(case, cfg, run.J)
    ans = ansatz(case, cfg, run.J, lam)
    h = kg_operator(case, cfg)
    f = ans.assemble(basis.phi1)
    grid = default_grid(case, run.grid)
    chart = chart_for(case, cfg.parameter_a)
    writer = csv.writer(out)
    writer.writerow(list(chart.coord_names) + ["re_phi", "im_phi", "residual"])
    dropped = 0
    worst = 0.0
    for pt in grid:
        try:
            val, scale = h.apply_scaled(f, pt)
            phi = dual.value(f(Dual.seed([complex(c) for c in pt])))
        except integrate.BranchPointError:
            dropped += 1
            continue
        r = abs(val) / (1.0 + scale)
        worst = max(worst, r)
        writer.writerow([f"{c:.12g}" for c in pt]
                        + [f"{phi.real:.15g}", f"{phi.imag:.15g}", f"{r:.3e}"])
    summary = {
        "schema": SCHEMA_VERSION,
        "case": case.value,
        "parameters": cfg.to_dict(),
        "J": run.J,
        "lambda": {"re": complex(lam).real, "im": complex(lam).imag},
        "special_function": _format_record(basis.record),
        "max_residual": worst,
        "dropped_branch_points": dropped,
        "grid": list(run.grid),
    }
    if dropped:
        err.write(f"warning: dropped {dropped} grid nodes at branch points\n")
    err.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0 if worst <= run.tolerances["wave_residual"] else 1


# ----------------------------------------------------------------------
# chart
# ----------------------------------------------------------------------

def cmd_chart(run: RunConfig, out) -> int:
    if run.case is None:
        raise UsageError("chart requires --case")
    case = _resolve_case(run.case)
    if case in PARAMETERIZED_CASES and run.a is None:
        raise UsageError(f"case {case.value} requires --a")
    a = run.a if case in PARAMETERIZED_CASES else None
    chart = chart_for(case, a)
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(chart.domain, run.grid)]
    writer = csv.writer(out)
    writer.writerow(["case"] + list(chart.coord_names)
                    + ["x0", "x1", "x2", "x3", "hyperboloid_residual"])
    for c1 in axes[0]:
        for c2 in axes[1]:
            for c3 in axes[2]:
                pt = (float(c1), float(c2), float(c3))
                amb = chart.embed(pt)
                writer.writerow([case.value]
                                + [f"{c:.12g}" for c in pt]
                                + [f"{v:.15g}" for v in amb.as_array()]
                                + [f"{amb.hyperboloid_residual():.3e}"])
    return 0


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dskg",
        description="Symmetry algebras and noncommutative integration of the "
                    "charged wave equation on the 3D de Sitter hyperboloid.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_phys=True):
        p.add_argument("--seed", type=int, default=20813)
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)
        p.add_argument("--grid", default=None,
                       help="comma-separated axis counts, e.g. 10,10,10")
        if with_phys:
            p.add_argument("--e", type=float, default=0.1)
            p.add_argument("--m", type=float, default=0.5)
            p.add_argument("--zeta", type=float, default=0.0)
            p.add_argument("--mu", type=float, default=0.3)
            p.add_argument("--mu1", type=float, default=0.3)
            p.add_argument("--mu2", type=float, default=0.3)
            p.add_argument("--a", type=float, default=None)
            p.add_argument("--J", type=float, default=1.0)
            p.add_argument("--lambda", dest="lam", default=None,
                           help="complex value as a+bi, both parts required")

    p = sub.add_parser("catalog", help="emit the subalgebra catalog with the "
                                       "computed classification table")
    common(p)
    p = sub.add_parser("verify", help="run the per-case verification suite")
    common(p)
    p.add_argument("--case", default="all")
    p.add_argument("--perturb", default=None, help="inject a fault, e.g. chi:1e-3")
    p.add_argument("--tol", action="append", default=[],
                   help="tolerance override KEY=VALUE (repeatable)")
    p = sub.add_parser("solve", help="sample a solution family and its residuals")
    common(p)
    p.add_argument("--case", required=True)
    p = sub.add_parser("chart", help="export embedding samples of one chart")
    common(p, with_phys=False)
    p.add_argument("--case", required=True)
    p.add_argument("--a", type=float, default=None)
    return ap


def _run_config_from(ns: argparse.Namespace) -> RunConfig:
    grid = (10, 10, 10) if ns.command != "chart" else (5, 5, 5)
    if getattr(ns, "grid", None):
        parts = [int(x) for x in ns.grid.split(",")]
        if len(parts) == 1:
            parts = parts * 3
        if len(parts) != 3:
            raise UsageError("grid spec needs 1 or 3 counts")
        grid = tuple(parts)
    lam = None
    if getattr(ns, "lam", None):
        lam = parse_complex(ns.lam)
    tol = dict(DEFAULT_TOLERANCES)
    for item in getattr(ns, "tol", []) or []:
        if "=" not in item:
            raise UsageError(f"bad tolerance override '{item}'")
        key, val = item.split("=", 1)
        if key not in tol:
            raise UsageError(f"unknown tolerance key '{key}'")
        tol[key] = float(val)
    perturb = None
    if getattr(ns, "perturb", None):
        spec = ns.perturb
        if ":" not in spec:
            raise UsageError(f"bad perturbation spec '{spec}'")
        kind, eps = spec.split(":", 1)
        perturb = (kind, float(eps))
    return RunConfig(
        command=ns.command,
        case=getattr(ns, "case", None),
        e=getattr(ns, "e", 0.1), m=getattr(ns, "m", 0.5),
        zeta=getattr(ns, "zeta", 0.0),
        mu=getattr(ns, "mu", 0.3), mu1=getattr(ns, "mu1", 0.3),
        mu2=getattr(ns, "mu2", 0.3),
        a=getattr(ns, "a", None), J=getattr(ns, "J", 1.0), lam=lam,
        grid=grid, seed=ns.seed, fmt=ns.fmt or "json",
        tolerances=tol, perturb=perturb,
    )


def main(argv: Optional[Sequence[str]] = None,
         stdout=None, stderr=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        run = _run_config_from(ns)
        if run.command == "catalog":
            return cmd_catalog(run, out)
        if run.command == "verify":
            return cmd_verify(run, out)
        if run.command == "solve":
            return cmd_solve(run, out, err)
        if run.command == "chart":
            return cmd_chart(run, out)
        raise UsageError(f"unknown command {run.command}")
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except (ValueError, KeyError) as exc:
        err.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

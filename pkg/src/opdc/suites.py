"""Seeded randomized verification suites shared by the CLI and the test-suite.

Each suite draws parameters, rejects draws that hit a pole or a degenerate
factor, runs its identity checks and records the first counterexample with
its exact inputs.  A check that raises :class:`IdentityViolation` counts as
a failure, never as a rejected draw.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import families as fam
from .cmv import Tridiagonal, build_lm
from .core import format_rational
from .dressing import (
    cholesky_darboux,
    chain_report,
    intertwining_residuals,
    lu_darboux,
    quad_algebra_singular_values,
    quad_algebra_solve,
)
from .errors import DegenerateRecursion, IdentityViolation, PoleInParameters, ZeroAtTheta
from .opuc import ReflectionSequence
from .transforms import (
    ThreeTermRecurrence,
    christoffel,
    chihara_polynomial_check,
    chihara_split,
    geronimus_reconstruct,
    sdg_closed_form,
    sdg_step,
    rescale,
    ustar,
)

REJECT = (PoleInParameters, DegenerateRecursion, ZeroAtTheta, ZeroDivisionError)


@dataclass
class SuiteResult:
    name: str
    trials: int
    seed: int
    checks: dict = field(default_factory=dict)
    counterexample: dict | None = None
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def record(self, check: str, ok: bool, inputs: dict | None = None, detail: str | None = None):
        self.checks[check] = self.checks.get(check, 0) + bool(ok)
        if not ok and self.counterexample is None:
            self.counterexample = {"check": check, "inputs": inputs or {}, "detail": detail}

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "seed": self.seed,
            "trials": self.trials,
            "pass": self.passed,
            "checks": dict(self.checks),
            "counterexample": self.counterexample,
        }


def _first_diff(xs, ys):
    for i, (x, y) in enumerate(zip(xs, ys)):
        if x != y:
            return i
    return None if len(xs) == len(ys) else min(len(xs), len(ys))


# -- Bannai-Ito chain -------------------------------------------------------------


def bi_admissible(p: fam.BIParameters, n: int) -> bool:
    """Pole- and degeneracy-freedom for every bi-chain check at depth ``n``.

    Indices run over ``0..n`` inclusive; the SDG step needs one extra term.
    """
    m = n + 1
    bi = fam.bi_coeffs(p, m + 1)
    if any(a == 0 for a in bi.A):
        return False
    fam.cbi_coeffs(p, m + 1)
    fam.bi_seed(p)
    a = fam.bi_reflection(p, m + 1)
    if any(v == 1 or v == -1 for v in a):
        return False
    fam.bi_reflection(p, m, mode="recursive")
    if p.rho2 == p.rho1 or p.rho2 == -p.rho1:
        return False
    q = fam.subs1(p)
    fam.bi_seed(q)
    fam.bi_reflection(q, m)
    for k in range(m):
        fam.q_reflection_term(p, k)
    return True


def draw_bi(rng: random.Random, n: int, bound: int = 20) -> fam.BIParameters:
    def ok(p):
        try:
            return bi_admissible(p, n)
        except REJECT:
            return False

    return fam.random_bi_parameters(rng, bound, admissible=ok)


def check_bi_chain(p: fam.BIParameters, n: int, result: SuiteResult):
    """All exact Bannai-Ito identities for one parameter pack, indices ``0..n``."""
    m = n + 1
    inputs = {"params": p.to_json(), "n": n}

    closed = fam.bi_reflection(p, m)
    recursive = fam.bi_reflection(p, m, mode="recursive")
    k = _first_diff(closed, recursive)
    result.record("reflection closed == recursive", k is None, inputs, f"first mismatch at a_{k}")

    seed = fam.bi_seed(p)
    ok = seed.lambda0 * seed.sqrt_lambda_bi - 1 / seed.sqrt_lambda_bi == p.rho2 \
        and seed.lambda_bi == seed.sqrt_lambda_bi ** 2 and closed[0] == seed.a0
    result.record("seed identity", ok, inputs)

    bi = fam.bi_coeffs(p, m + 1)
    cbi = fam.cbi_coeffs(p, m)
    try:
        tr = christoffel(bi.rec, p.rho1).transformed
        k = _first_diff(tr.b, cbi.rec.b) or _first_diff(tr.u, cbi.rec.u)
        result.record("companion identity", k is None, inputs, f"first mismatch at n={k}")
    except IdentityViolation as exc:
        result.record("companion identity", False, inputs, str(exc))

    v = cbi.v
    ok = all(v[k] == seed.lambda0 * (1 + (closed[k - 1] if k else -1)) * (1 - closed[k]) for k in range(m))
    result.record("v_n = lambda0 u*_n", ok, inputs)

    try:
        seq = ReflectionSequence.from_list(fam.bi_reflection(p, m + 1))
        sdg = sdg_step(seq, seed.lambda0 * seed.lambda_bi, m)
        res = rescale(sdg, seed.lambda_bi, seed.sqrt_lambda_bi, seed.lambda0)
        k = _first_diff(res.recurrence.b, cbi.rec.b) or _first_diff(res.recurrence.u, cbi.rec.u)
        result.record("SDG closure", res.chi == p.rho2 and k is None, inputs, f"first mismatch at n={k}")
    except IdentityViolation as exc:
        result.record("SDG closure", False, inputs, str(exc))

    rep = fam.bi_identify_q(p, m)
    result.record("Q identification", rep.passed, inputs, rep.failure)


def bi_chain_suite(seed: int = 7, trials: int = 100, n: int = 50, bound: int = 20) -> SuiteResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    result = SuiteResult("bi-chain", trials, seed)
    for _ in range(trials):
        check_bi_chain(draw_bi(rng, n, bound), n, result)
    result.elapsed = time.perf_counter() - t0
    return result


# -- Racah-Wilson bridge ------------------------------------------------------------


def rw_admissible(p: fam.BIParameters, n: int) -> bool:
    m = n + 1
    beta = fam.beta_map(p)
    fam.rw_coeffs(beta, (m + 1) // 2 + 1)
    fam.rw_reflection(beta, m)
    fam.cbi_coeffs(p, m)
    fam.bi_reflection(p, m)
    return True


def check_rw_bridge(p: fam.BIParameters, n: int, result: SuiteResult):
    m = n + 1
    inputs = {"params": p.to_json(), "n": n}
    beta = fam.beta_map(p)
    result.record("sigma = g + 2", beta.sigma == p.g + 2, inputs)
    A, C = fam.rw_coeffs(beta, (m + 1) // 2 + 1)
    S = chihara_split(A, C, 0, m)
    cbi = fam.cbi_coeffs(p, m)
    k = _first_diff(S.u, cbi.v)
    result.record("chihara(RW) == complementary BI", k is None and all(b == 0 for b in S.b), inputs,
                  f"first mismatch at v_{k}")
    k = _first_diff(fam.rw_reflection(beta, m), fam.bi_reflection(p, m))
    result.record("RW reflection == BI reflection", k is None, inputs, f"first mismatch at a_{k}")


def rw_bridge_suite(seed: int = 7, trials: int = 100, n: int = 50, bound: int = 20) -> SuiteResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    result = SuiteResult("rw-bridge", trials, seed)

    def ok(p):
        try:
            return rw_admissible(p, n)
        except REJECT:
            return False

    for _ in range(trials):
        check_rw_bridge(fam.random_bi_parameters(rng, bound, admissible=ok), n, result)
    result.elapsed = time.perf_counter() - t0
    return result


# -- generic recurrences ---------------------------------------------------------------


def random_recurrence(rng: random.Random, n: int, bound: int = 20) -> ThreeTermRecurrence:
    b = [fam.random_rational(rng, bound) for _ in range(n)]
    u = [Fraction(0)] + [fam.random_rational(rng, bound) for _ in range(n - 1)]
    return ThreeTermRecurrence(tuple(b), tuple(u))


def random_reflections(rng: random.Random, n: int, bound: int = 20, classical: bool = False):
    out = []
    while len(out) < n:
        a = fam.random_rational(rng, bound)
        if abs(a) == 1 or (classical and abs(a) >= 1):
            continue
        out.append(a)
    return ReflectionSequence.from_list(out)


def roundtrip_suite(seed: int = 7, trials: int = 100, depth: int = 20, bound: int = 20,
                    chihara_depth: int = 6) -> SuiteResult:
    """Christoffel -> Geronimus roundtrip and the Chihara polynomial identity."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    result = SuiteResult("roundtrip", trials, seed)
    done = 0
    while done < trials:
        rec = random_recurrence(rng, depth + 1, bound)
        theta = fam.random_rational(rng, bound)
        try:
            res = christoffel(rec, theta)
            back = geronimus_reconstruct(res)
        except REJECT + (DegenerateRecursion,):
            continue
        done += 1
        inputs = {"b": [format_rational(v) for v in rec.b], "u": [format_rational(v) for v in rec.u],
                  "theta": format_rational(theta)}
        result.record("christoffel/geronimus roundtrip", back.same_coefficients(rec.truncate(depth)), inputs)

        chi = fam.random_rational(rng, bound)
        alpha = fam.random_rational(rng, bound)
        c2 = chi * chi + alpha - theta
        P = res.original.truncate(chihara_depth + 1)
        tP = res.transformed
        rep = chihara_polynomial_check(P, tP, alpha, c2, chi, chihara_depth)
        result.record("chihara polynomial identity", rep.passed,
                      dict(inputs, chi=format_rational(chi), alpha=format_rational(alpha)), rep.first_failure)
    result.elapsed = time.perf_counter() - t0
    return result


def sdg_suite(seed: int = 7, trials: int = 100, n: int = 30, bound: int = 20) -> SuiteResult:
    """Generic Christoffel path vs closed forms of the SDG step, and lambda-invariance of u*."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    result = SuiteResult("sdg", trials, seed)
    done = 0
    while done < trials:
        seq = random_reflections(rng, n + 2, bound)
        lam1, lam2 = fam.random_rational(rng, bound), fam.random_rational(rng, bound)
        if 0 in (lam1, lam2) or lam1 == lam2:
            continue
        inputs = {"a": [format_rational(v) for v in seq.prefix(n + 2)],
                  "lambda": [format_rational(lam1), format_rational(lam2)]}
        try:
            r1, r2 = sdg_step(seq, lam1, n), sdg_step(seq, lam2, n)
        except REJECT:
            continue
        except IdentityViolation as exc:
            done += 1
            result.record("closed form == christoffel", False, inputs, str(exc))
            continue
        done += 1
        A, C = sdg_closed_form(seq, lam1, n + 1)
        result.record("closed form == christoffel", r1.christoffel.A == A and r1.christoffel.C == C, inputs)
        result.record("u* formula", r1.ustar == ustar(seq, n) and r1.ustar[0] == 0, inputs)
        result.record("u* lambda-invariant", r1.ustar == r2.ustar, inputs)
    result.elapsed = time.perf_counter() - t0
    return result


# -- floating-point suites ----------------------------------------------------------------


def random_pd_jacobi(rng: np.random.Generator, n: int) -> Tridiagonal:
    off = rng.uniform(0.1, 1.0, n - 1)
    pad = np.concatenate([[0.0], off, [0.0]])
    diag = pad[:-1] + pad[1:] + rng.uniform(0.1, 2.0, n)
    return Tridiagonal.symmetric(diag, off)


def darboux_suite(seed: int = 7, trials: int = 20, n: int = 20) -> SuiteResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    result = SuiteResult("darboux", trials, seed)
    for _ in range(trials):
        J = random_pd_jacobi(rng, n)
        inputs = {"diag": J.diag.tolist(), "off": J.off.tolist()}
        Jt, L = cholesky_darboux(J)
        gap = float(np.max(np.abs(np.sort(J.eigvalsh()) - np.sort(Jt.eigvalsh()))))
        result.record("isospectral", gap < 1e-10, inputs, f"spectral gap {gap:.3e}")
        res = float(np.max(intertwining_residuals(J, Jt, L)))
        result.record("eigenvector intertwining", res < 1e-9, inputs, f"residual {res:.3e}")

        theta = float(np.min(J.eigvalsh())) - 1.0
        lu = lu_darboux(J, theta)
        rec = ThreeTermRecurrence(tuple(Fraction(v) for v in J.diag),
                                  tuple([Fraction(0)] + [Fraction(v) ** 2 for v in J.off]))
        ch = christoffel(rec, Fraction(theta), check_depth=0)
        diag_ref = np.array([float(v) for v in ch.transformed.b])
        prod_ref = np.array([float(v) for v in ch.transformed.u[1:]])
        err = max(float(np.max(np.abs(lu.diag[:-1] - diag_ref))),
                  float(np.max(np.abs(lu.upper[:-1] * lu.lower[:-1] - prod_ref))))
        result.record("LU Darboux == Christoffel", err < 1e-12, inputs, f"max deviation {err:.3e}")
    result.elapsed = time.perf_counter() - t0
    return result


def quad_algebra_suite(seed: int = 7, trials: int = 10, n: int = 32, bound: int = 20) -> SuiteResult:
    t0 = time.perf_counter()
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    result = SuiteResult("quad-algebra", trials, seed)
    e1 = np.array([1, 0, 0, 0, 0, 0, -1]) / np.sqrt(2)
    e2 = np.array([0, 1, 0, 0, 0, 0, -1]) / np.sqrt(2)
    for _ in range(trials):
        seq = random_reflections(rng, n, bound, classical=True)
        inputs = {"a": [format_rational(v) for v in seq.prefix(n)]}
        L, M = build_lm(seq, n)
        sols = quad_algebra_solve(L.matrix, M.matrix)
        basis = np.array([s.vector for s in sols]) if sols else np.zeros((0, 7))
        in_span = len(sols) >= 2 and all(np.linalg.norm(e - basis.T @ (basis @ e)) < 1e-8 for e in (e1, e2))
        result.record("involution relations found", in_span, inputs, f"nullspace dimension {len(sols)}")
        worst = max((s.residual for s in sols), default=np.inf)
        result.record("relation residuals < 1e-10", worst < 1e-10, inputs, f"worst {worst:.3e}")

        A = random_pd_jacobi(nrng, n).dense()
        B = random_pd_jacobi(nrng, n).dense()
        smin = float(quad_algebra_singular_values(A, B)[-1])
        empty = not quad_algebra_solve(A, B) and smin > 1e-6
        result.record("random pair has no relation", empty, {}, f"smallest singular value {smin:.3e}")
    result.elapsed = time.perf_counter() - t0
    return result


def chain_suite(seed: int = 7, trials: int = 10, n: int = 24) -> tuple[SuiteResult, list[dict]]:
    """Chain-step reports on seeded (lam, x, lam_t) triples; only the trivial family is asserted."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    result = SuiteResult("chain", trials, seed)
    seq = ReflectionSequence.from_generator(lambda k: Fraction((-1) ** k * (k + 2), 3 * k + 7))
    reports = []
    for _ in range(trials):
        lam = float(rng.uniform(0.3, 2.0) * rng.choice([-1, 1]))
        x = float(rng.uniform(-1.5, 1.5))
        lam_t = float(rng.uniform(0.3, 2.0) * rng.choice([-1, 1]))
        inputs = {"lambda": lam, "x": x, "lambda_t": lam_t}
        rep = chain_report(seq, lam, x, lam_t, n=n)
        reports.append(rep)
        triv = [s for s in rep["solutions"] if s["trivial_flag"]]
        ok = bool(triv) and all(s["residual"] < 1e-10 for s in triv)
        result.record("trivial family residual < 1e-10", ok, inputs)
    result.elapsed = time.perf_counter() - t0
    return result, reports

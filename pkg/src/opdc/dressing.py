"""Finite-matrix Darboux transformations, quadratic-algebra relations and 1-periodic chain steps.

Sign convention: the generic pencil ``A - lam B - x I`` corresponds to the
reflection pencil ``L + lam M - x I`` through ``(A, B) = (L, -M)``.  Chain
steps below are written directly in terms of L and M.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, null_space
from scipy.optimize import minimize_scalar

from .cmv import (
    DOUBLE_PRODUCT_MARGIN,
    Tridiagonal,
    build_lm,
    build_pencil_matrix,
    interior,
    interior_residual,
    valid_dimension,
)
from .errors import NoSolution, NotPositiveDefinite, SingularPivot
from .opuc import ReflectionSequence

SIGN_CONVENTION = "A = L, B = -M  (A - lam*B - x*I == L + lam*M - x*I)"


# -- Cholesky / LU Darboux -----------------------------------------------------


@dataclass(frozen=True)
class Bidiagonal:
    """Lower bidiagonal factor: ``diag`` on the diagonal, ``sub`` below it."""

    diag: np.ndarray
    sub: np.ndarray

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1)


def cholesky_darboux(J: Tridiagonal) -> tuple[Tridiagonal, Bidiagonal]:
    """``J = L L^T  ->  J~ = L^T L`` for a positive definite Jacobi matrix.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is not strictly positive.
    """
    d, e = np.asarray(J.diag, float), np.asarray(J.off, float)
    n = len(d)
    ld = np.empty(n)
    ls = np.empty(max(n - 1, 0))
    for k in range(n):
        pivot = d[k] - (ls[k - 1] ** 2 if k else 0.0)
        if not pivot > 0:
            raise NotPositiveDefinite(f"pivot {pivot!r} at row {k}")
        ld[k] = math.sqrt(pivot)
        if k < n - 1:
            ls[k] = e[k] / ld[k]
    new_diag = ld ** 2
    new_diag[:-1] += ls ** 2
    new_off = ls * ld[1:]
    return Tridiagonal.symmetric(new_diag, new_off), Bidiagonal(ld, ls)


def lu_darboux(J: Tridiagonal, theta: float) -> Tridiagonal:
    """``J - theta = L U`` (L unit lower bidiagonal)  ->  ``J~ = U L + theta``.

    The result is tridiagonal but in general not symmetric; its diagonal
    and the products ``super_k * sub_k`` are those of the Christoffel
    transform at ``theta``.  The last diagonal entry is a truncation artefact
    (``interior_margin = 1``).
    """
    d = np.asarray(J.diag, float) - theta
    up, lo = np.asarray(J.upper, float), np.asarray(J.lower, float)
    n = len(d)
    u = np.empty(n)
    ell = np.zeros(n)
    for k in range(n):
        u[k] = d[k] - (ell[k] * up[k - 1] if k else 0.0)
        if u[k] == 0:
            raise SingularPivot(f"zero pivot at row {k}")
        if k < n - 1:
            ell[k + 1] = lo[k] / u[k]
    diag = u.copy()
    diag[:-1] += up * ell[1:]
    return Tridiagonal(diag + theta, up.copy(), u[1:] * ell[1:], interior_margin=1)


def intertwining_residuals(J: Tridiagonal, Jt: Tridiagonal, L: Bidiagonal) -> np.ndarray:
    """``||(J~ - mu) L^T f|| / ||L^T f||`` for every eigenpair ``(mu, f)`` of J."""
    mu, F = eigh_tridiagonal(J.diag, J.off)
    G = L.dense().T @ F
    R = Jt.dense() @ G - G * mu
    return np.linalg.norm(R, axis=0) / np.linalg.norm(G, axis=0)


# -- quadratic algebra ----------------------------------------------------------

QUAD_TERMS = ("A^2", "B^2", "AB", "BA", "A", "B", "I")


@dataclass(frozen=True)
class QuadraticAlgebraSolution:
    xi1: float
    xi2: float
    xi3: float
    xi4: float
    eta1: float
    eta2: float
    zeta: float
    residual: float

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.xi1, self.xi2, self.xi3, self.xi4, self.eta1, self.eta2, self.zeta])


def quad_algebra_system(A: np.ndarray, B: np.ndarray, margin: int = DOUBLE_PRODUCT_MARGIN) -> np.ndarray:
    """Columns: vectorized interior blocks of A^2, B^2, AB, BA, A, B, I."""
    n = A.shape[0]
    I = np.eye(n)
    terms = (A @ A, B @ B, A @ B, B @ A, A, B, I)
    return np.column_stack([interior(t, margin).ravel() for t in terms])


def quad_algebra_solve(A: np.ndarray, B: np.ndarray, n: int | None = None, rel_tol: float = 1e-8,
                       margin: int = DOUBLE_PRODUCT_MARGIN) -> list[QuadraticAlgebraSolution]:
    """Orthonormal basis of relations ``xi1 A^2 + xi2 B^2 + xi3 AB + xi4 BA + eta1 A + eta2 B + zeta I = 0``.

    Singular values below ``rel_tol`` times the largest count as null.  An
    empty list means no relation holds on the interior block.
    """
    A, B = np.asarray(A, float), np.asarray(B, float)
    if n is not None:
        A, B = A[:n, :n], B[:n, :n]
    if A.shape != B.shape or A.shape[0] < 2 * margin:
        raise ValueError(f"need equal square matrices of size >= {2 * margin}")
    Z = quad_algebra_system(A, B, margin)
    _, s, vt = np.linalg.svd(Z, full_matrices=True)
    null = [vt[i] for i in range(vt.shape[0]) if i >= len(s) or s[i] < rel_tol * s[0]]
    out = []
    for v in null:
        v = v / np.linalg.norm(v)
        k = int(np.argmax(np.abs(v)))
        v = v if v[k] > 0 else -v
        out.append(QuadraticAlgebraSolution(*map(float, v), residual=float(np.max(np.abs(Z @ v)))))
    return out


def quad_algebra_singular_values(A: np.ndarray, B: np.ndarray, margin: int = DOUBLE_PRODUCT_MARGIN) -> np.ndarray:
    return np.linalg.svd(quad_algebra_system(np.asarray(A, float), np.asarray(B, float), margin), compute_uv=False)


# -- 1-periodic chain steps -------------------------------------------------------

COEFF_NAMES = ("r0", "r1", "r2", "s0", "s1", "s2")


@dataclass(frozen=True)
class ChainStepSolution:
    """``D = r1 L + r2 M + r0 I``, ``K = s1 L + s2 M + s0 I`` with ``J~ D = K J``."""

    lambda_t: float
    x_t: float
    r0: float
    r1: float
    r2: float
    s0: float
    s1: float
    s2: float
    residual: float
    trivial_flag: bool

    def to_json(self) -> dict:
        return asdict(self)


def _chain_matrix(L, M, lam, x, lam_t, x_t, margin):
    n = L.shape[0]
    I = np.eye(n)
    J = L + lam * M - x * I
    Jt = L + lam_t * M - x_t * I
    cols = (Jt, Jt @ L, Jt @ M, -J, -(L @ J), -(M @ J))
    return np.column_stack([interior(c, margin).ravel() for c in cols])


def _trivial_vector(lam, x, lam_t, x_t):
    return np.array([-x, 1.0, lam, -x_t, 1.0, lam_t])


def _is_trivial(coeffs, lam, x, tol=1e-8) -> bool:
    r = np.array([coeffs[1], coeffs[2], coeffs[0]])
    t = np.array([1.0, lam, -x])
    if np.linalg.norm(r) == 0:
        return False
    return bool(np.linalg.norm(np.cross(r, t)) <= tol * np.linalg.norm(r) * np.linalg.norm(t))


def _normalize(coeffs):
    nr = np.linalg.norm(coeffs[:3])
    if nr == 0:
        return None
    v = coeffs / nr
    k = next(i for i in range(3) if abs(v[i]) > 1e-12)
    return v if v[k] > 0 else -v


def _solution(Z, coeffs, lam, x, lam_t, x_t):
    coeffs = _normalize(np.asarray(coeffs, float))
    if coeffs is None:
        return None
    residual = float(np.max(np.abs(Z @ coeffs)))
    return ChainStepSolution(float(lam_t), float(x_t), *map(float, coeffs), residual=residual,
                             trivial_flag=_is_trivial(coeffs, lam, x))


def _nontrivial_gap(L, M, lam, x, lam_t, x_t, margin):
    Z = _chain_matrix(L, M, lam, x, lam_t, x_t, margin)
    t = _trivial_vector(lam, x, lam_t, x_t)
    P = null_space(t[None, :])
    _, s, vt = np.linalg.svd(Z @ P, full_matrices=False)
    return s[-1], Z, P @ vt[-1], t


def default_search_radius(lam, x, lam_t) -> float:
    scale = (1 + abs(x)) * (1 + abs(lam_t) + abs(lam)) * (1 + 1 / abs(lam))
    return 2.0 + 2.0 * scale


def chain_step(seq: ReflectionSequence, lam: float, x: float, lambda_t: float, n: int = 24,
               grid: int = 801, search_radius: float | None = None, tol: float = 1e-6) -> list[ChainStepSolution]:
    """Solve ``J~ D = K J`` with ``J = L + lam M - x I``, ``J~ = L + lambda_t M - x_t I``.

    The trivial family ``D = J``, ``K = J~`` solves the system for every
    ``x_t``; it is returned once (at ``x_t = x``) with ``trivial_flag``
    set.  Nontrivial solutions need a second null direction of the linear
    system in ``(r0, r1, r2, s0, s1, s2)``; they are located by a multi-start
    scan over ``x_t`` of the smallest singular value on the complement of the
    trivial direction, then refined.  Nontrivial coefficients are reported
    in the representative with ``r1 = 0``, normalized to ``||(r0, r1, r2)|| = 1``.
    Results are ordered by ``(residual, coefficients)``.

    Raises
    ------
    NoSolution
        If even the best solution has residual above ``tol``.
    """
    lam, x, lambda_t = float(lam), float(x), float(lambda_t)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    L, M = build_lm(seq, n)
    L, M = L.matrix, M.matrix
    margin = DOUBLE_PRODUCT_MARGIN

    found = []
    Z0 = _chain_matrix(L, M, lam, x, lambda_t, x, margin)
    triv = _solution(Z0, _trivial_vector(lam, x, lambda_t, x), lam, x, lambda_t, x)
    found.append(triv)

    R = default_search_radius(lam, x, lambda_t) if search_radius is None else float(search_radius)
    xs = np.linspace(-R, R, grid)
    gaps = np.array([_nontrivial_gap(L, M, lam, x, lambda_t, xt, margin)[0] for xt in xs])
    candidates = [i for i in range(len(xs))
                  if (i == 0 or gaps[i] <= gaps[i - 1]) and (i == len(xs) - 1 or gaps[i] <= gaps[i + 1])]
    for i in candidates:
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
        opt = minimize_scalar(lambda xt: _nontrivial_gap(L, M, lam, x, lambda_t, xt, margin)[0],
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
        x_t = float(opt.x)
        _, Z, w, t = _nontrivial_gap(L, M, lam, x, lambda_t, x_t, margin)
        w = w - w[1] * t / t[1]
        w[1] = 0.0
        sol = _solution(Z, w, lam, x, lambda_t, x_t)
        if sol is None or sol.residual > tol:
            continue
        if any(abs(sol.x_t - f.x_t) < 1e-6 and not f.trivial_flag for f in found):
            continue
        found.append(sol)

    found.sort(key=lambda s: (s.residual > tol, s.trivial_flag, s.x_t, s.r0, s.r2, s.s0, s.s1, s.s2))
    if min(s.residual for s in found) > tol:
        raise NoSolution(f"best residual {min(s.residual for s in found):.3e} exceeds {tol:g}")
    return found


def reference_quadratic_roots(lam: float, x: float, lambda_t: float) -> list[complex]:
    """Roots in ``x_t`` of ``lam x_t^2 - x (lam + lambda_t) x_t + lam x^2 = 0``."""
    return [complex(r) for r in np.roots([lam, -x * (lam + lambda_t), lam * x * x])]


def rank_condition_roots(lam: float, x: float, lambda_t: float) -> list[float]:
    """Real ``x_t`` with ``lam x_t^2 = lambda_t x^2 + (lambda_t - lam)(lam lambda_t - 1)``.

    This is where the 5x6 basis-matching system (over I, L, M, LM, ML)
    drops rank, i.e. where a solution independent of ``D = J`` exists.
    """
    rhs = (lambda_t * x * x + (lambda_t - lam) * (lam * lambda_t - 1)) / lam
    if rhs < 0:
        return []
    r = math.sqrt(rhs)
    return [-r, r] if r > 0 else [0.0]


def chain_report(seq: ReflectionSequence, lam: float, x: float, lambda_t: float, n: int = 24, **kw) -> dict:
    """Empirical chain-step solutions next to the two candidate closed-form predictions."""
    sols = chain_step(seq, lam, x, lambda_t, n=n, **kw)
    nontrivial = [s.x_t for s in sols if not s.trivial_flag]
    reference = reference_quadratic_roots(lam, x, lambda_t)
    rank = rank_condition_roots(lam, x, lambda_t)

    def matched(roots):
        real = [r.real for r in roots if abs(complex(r).imag) < 1e-9]
        return all(any(abs(r - xt) < 1e-6 * (1 + abs(r)) for r in real) for xt in nontrivial) and \
            all(any(abs(r - xt) < 1e-6 * (1 + abs(r)) for xt in nontrivial) for r in real)

    return {
        "lambda": lam,
        "x": x,
        "lambda_t": lambda_t,
        "n": valid_dimension(n),
        "interior": valid_dimension(n) - DOUBLE_PRODUCT_MARGIN,
        "sign_convention": SIGN_CONVENTION,
        "solutions": [s.to_json() for s in sols],
        "reference_quadratic_roots": [[r.real, r.imag] for r in reference],
        "rank_condition_roots": rank,
        "reference_quadratic_matches_empirical": matched(reference),
        "rank_condition_matches_empirical": matched([complex(r) for r in rank]),
    }


# -- matrix identity verification -------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    n: int
    interior: int
    max_residual: float
    tolerance: float
    informational: bool = False

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tolerance)

    def to_json(self) -> dict:
        out = {
            "identity": self.identity,
            "n": self.n,
            "interior": self.interior,
            "max_residual": self.max_residual,
            "pass": self.passed,
            "tolerance": self.tolerance,
        }
        if self.informational:
            out["informational"] = True
        return out


@dataclass(frozen=True)
class IdentityReport:
    sign_convention: str
    checks: tuple[IdentityCheck, ...]
    grid: dict | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def __getitem__(self, name: str) -> IdentityCheck:
        for c in self.checks:
            if c.identity == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "sign_convention": self.sign_convention,
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "uniform_grid": self.grid,
        }


def verify_identities(seq: ReflectionSequence, lam: float, lam0: float = 1.0, n: int = 64,
                      margin: int = DOUBLE_PRODUCT_MARGIN, tolerances: dict | None = None,
                      grid_params=None) -> IdentityReport:
    """Residuals of the involution, anticommutator and pencil-square identities.

    With ``t = lam * lam0`` and ``chi = lam0 sqrt(lam) - 1/sqrt(lam)``:

    * ``L^2 = I``, ``M^2 = I``
    * ``K(lam) K(-lam) + K(-lam) K(lam) = 2 (1 - lam^2) I``
    * ``K(t)^2 = (1 - t)^2 I + t (L + M)^2``
    * ``K(t)^2 = lam [chi^2 I + lam0 (L + M)^2]`` (``lam > 0`` only)

    The two uncorrected variants ``(1 - t)^2 I + lam (L + M)^2`` and
    ``(1/lam) [chi^2 I + lam0 (L + M)^2]`` are evaluated as informational
    checks; they only balance when ``lam0 = 1`` and ``lam = 1`` respectively.
    All residuals are max-norms on the leading ``n - margin`` block.
    """
    tol = {"involution": 1e-12, "anticommutator": 1e-12, "pencil_square": 1e-11}
    tol.update(tolerances or {})
    lam, lam0 = float(lam), float(lam0)
    L, M = build_lm(seq, n)
    n = L.n
    L, M = L.matrix, M.matrix
    I = np.eye(n)
    k = n - margin

    def K(mu):
        return L + mu * M

    S2 = (L + M) @ (L + M)
    t = lam * lam0
    checks = [
        IdentityCheck("L^2 = I", n, k, interior_residual(L @ L - I, margin), tol["involution"]),
        IdentityCheck("M^2 = I", n, k, interior_residual(M @ M - I, margin), tol["involution"]),
        IdentityCheck("K(l)K(-l) + K(-l)K(l) = 2(1-l^2)I", n, k,
                      interior_residual(K(lam) @ K(-lam) + K(-lam) @ K(lam) - 2 * (1 - lam ** 2) * I, margin),
                      tol["anticommutator"]),
        IdentityCheck("K(t)^2 = (1-t)^2 I + t(L+M)^2", n, k,
                      interior_residual(K(t) @ K(t) - (1 - t) ** 2 * I - t * S2, margin), tol["pencil_square"]),
        IdentityCheck("variant: K(t)^2 = (1-t)^2 I + l(L+M)^2", n, k,
                      interior_residual(K(t) @ K(t) - (1 - t) ** 2 * I - lam * S2, margin), tol["pencil_square"],
                      informational=True),
    ]
    if lam > 0:
        chi = lam0 * math.sqrt(lam) - 1 / math.sqrt(lam)
        checks.append(IdentityCheck("K(t)^2 = l[chi^2 I + l0(L+M)^2]", n, k,
                                    interior_residual(K(t) @ K(t) - lam * (chi ** 2 * I + lam0 * S2), margin),
                                    tol["pencil_square"]))
        checks.append(IdentityCheck("variant: K(t)^2 = (1/l)[chi^2 I + l0(L+M)^2]", n, k,
                                    interior_residual(K(t) @ K(t) - (chi ** 2 * I + lam0 * S2) / lam, margin),
                                    tol["pencil_square"], informational=True))
    grid = None
    if grid_params is not None:
        grid = uniform_grid_diagnostic(grid_params)
    return IdentityReport(SIGN_CONVENTION, tuple(checks), grid)


def spectral_mapping_gap(seq: ReflectionSequence, lam: float, lam0: float, n: int) -> float:
    """Largest distance from ``x^2`` (x an eigenvalue of K(lam lam0)) to ``lam (chi^2 + lam0 mu^2)``.

    ``mu`` ranges over eigenvalues of ``L + M``; requires ``lam > 0`` and a
    classical sequence (both matrices symmetric).  On truncations the two
    spectra differ by a low-rank corner perturbation, so the gap shrinks as
    the eigenvalues fill in.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    t = lam * lam0
    K = build_pencil_matrix(seq, t, 0.0, n)
    S = build_pencil_matrix(seq, 1.0, 0.0, n)
    x = K.eigvalsh()
    mu = S.eigvalsh()
    chi = lam0 * math.sqrt(lam) - 1 / math.sqrt(lam)
    targets = np.sort(lam * (chi ** 2 + lam0 * mu ** 2))
    sq = x ** 2
    idx = np.clip(np.searchsorted(targets, sq), 1, len(targets) - 1)
    dist = np.minimum(np.abs(sq - targets[idx - 1]), np.abs(sq - targets[idx]))
    return float(np.max(dist))


def uniform_grid_diagnostic(params, n: int | None = None) -> dict:
    """Fit the spectrum of a complementary Bannai-Ito Jacobi truncation to two arithmetic progressions.

    Eigenvalues are split by sign, each half sorted and fitted to
    ``c0 + c1 * j`` by least squares.  Heuristic: no grid formula is
    asserted; the report gives the fitted steps and the worst residual.
    """
    from .families import cbi_coeffs

    n = n or 40
    cbi = cbi_coeffs(params, n)
    diag = np.array([float(b) for b in cbi.rec.b])
    prod = np.array([float(v) for v in cbi.v[1:]])
    cut = next((i for i, v in enumerate(prod) if v == 0), None)
    if cut is not None:
        diag, prod = diag[: cut + 1], prod[:cut]
    if np.all(prod > 0):
        ev = eigh_tridiagonal(diag, np.sqrt(prod), eigvals_only=True).astype(complex)
    else:
        T = np.diag(diag) + np.diag(np.ones(len(prod)), 1) + np.diag(prod, -1)
        ev = np.linalg.eigvals(T)
    out = {"n": int(len(diag)), "finite_block": cut is not None, "real_spectrum": bool(np.all(np.abs(ev.imag) < 1e-8))}
    if not out["real_spectrum"]:
        out.update(max_residual=None, steps=None)
        return out
    ev = np.sort(ev.real)
    fits, worst = [], 0.0
    for part in (ev[ev < 0], ev[ev >= 0]):
        if len(part) < 2:
            fits.append(None)
            continue
        j = np.arange(len(part))
        c1, c0 = np.polyfit(j, part, 1)
        worst = max(worst, float(np.max(np.abs(part - (c0 + c1 * j)))))
        fits.append(float(c1))
    out.update(max_residual=worst, steps=fits, eigenvalues=[float(v) for v in ev])
    return out

"""Spectral radii of matrix tuples and positive maps.

Covers the plain spectral radius of a map, the outer spectral radius of a
tuple (square root of the spectral radius of the associated CP map), brute
force and tensor-power bounds for the joint spectral radius, scaled-norm and
eigenvalue-quotient evaluators, resolvent witnesses and similarity balancing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import AlgebraShape, in_algebra
from .cpmap import AlgebraMap, CpMap, SuperOperator, algebra_map, superop_matrix, superop_of
from .errors import BudgetExceededError, ConvergenceError, PreconditionError
from .mats import (
    PSD_TOL,
    RANK_TOL,
    as_matrix,
    inverse,
    kron,
    op_norm,
    psd_report,
    psd_sqrt,
    spectral_radius,
    unvec,
    vec,
)

__all__ = [
    "JsrEstimate",
    "BalanceResult",
    "NormAchievingResult",
    "spectral_radius_of",
    "positive_map_norm",
    "outer_radius",
    "outer_radius_gelfand",
    "jsr_brute",
    "jsr_tensor_approx",
    "scaled_outer_radius",
    "friedland_value",
    "neumann_witness",
    "conjugate_map",
    "norm_achieving_check",
    "balance_similarity",
    "singular_psd_combination",
]


def spectral_radius_of(op) -> float:
    """Spectral radius of a map given as CpMap / AlgebraMap / SuperOperator / matrix."""
    return spectral_radius(superop_matrix(op))


def positive_map_norm(op) -> float:
    """Norm of a positive map, ``||phi|| = ||phi(1)||``."""
    mat = superop_matrix(op)
    m = int(round(np.sqrt(mat.shape[0])))
    return op_norm(unvec(mat @ vec(np.eye(m, dtype=complex)), m))


def _checked_tuple(mats_list) -> list[np.ndarray]:
    mats = [as_matrix(a) for a in mats_list]
    if not mats:
        raise PreconditionError("tuple of matrices must be non-empty")
    m = mats[0].shape[0]
    for a in mats:
        if a.shape != (m, m):
            raise PreconditionError("all matrices in the tuple must share one square side")
    return mats


def _tuple_map(mats) -> CpMap:
    return CpMap(tuple(mats), AlgebraShape.full(mats[0].shape[0]))


def outer_radius(mats_list) -> float:
    """Outer spectral radius of a tuple: sqrt of the CP map's spectral radius."""
    mats = _checked_tuple(mats_list)
    return math.sqrt(spectral_radius_of(_tuple_map(mats)))


def outer_radius_gelfand(mats_list, n: int) -> float:
    """Gelfand-style estimate ``||tau^n(1)||^(1/2n)`` for the outer radius.

    Evaluated through superoperator powers (never by enumerating the d^n
    products); each multiply renormalizes and accumulates a log scale so that
    large ``n`` neither overflows nor underflows.
    """
    mats = _checked_tuple(mats_list)
    if n < 1:
        raise PreconditionError("outer_radius_gelfand requires n >= 1")
    m = mats[0].shape[0]
    s = superop_of(_tuple_map(mats)).matrix

    def _normalize(mat, log):
        scale = float(np.abs(mat).max())
        if scale == 0.0:
            return mat, log, True
        return mat / scale, log + math.log(scale), False

    acc = np.eye(m * m, dtype=complex)
    log_acc = 0.0
    base, log_base, base_zero = _normalize(s, 0.0)
    nn = n
    while nn:
        if nn & 1:
            if base_zero:
                return 0.0
            acc, log_acc, acc_zero = _normalize(acc @ base, log_acc + log_base)
            if acc_zero:
                return 0.0
        nn >>= 1
        if nn and not base_zero:
            base, log_base, base_zero = _normalize(base @ base, 2.0 * log_base)
    value = op_norm(unvec(acc @ vec(np.eye(m, dtype=complex)), m))
    if value == 0.0:
        return 0.0
    return math.exp((log_acc + math.log(value)) / (2.0 * n))


@dataclass(frozen=True)
class JsrEstimate:
    """Two-sided joint spectral radius estimate with its method tag."""

    lower: float
    upper: float
    method: str
    parameter: int

    def __post_init__(self):
        if self.lower > self.upper + 1e-12:
            raise ConvergenceError(
                f"inconsistent JSR bounds: lower {self.lower} > upper {self.upper}"
            )


def jsr_brute(mats_list, n_max: int, budget: int = 10**6) -> JsrEstimate:
    """Brute-force joint spectral radius bounds from words up to length n_max.

    upper = min over n of max over length-n words of ``||product||^(1/n)``;
    lower = max over enumerated words of ``r(product)^(1/|word|)``.  The
    enumeration size ``d + d^2 + ... + d^n_max`` must fit the budget.
    """
    mats = _checked_tuple(mats_list)
    if n_max < 1:
        raise PreconditionError("jsr_brute requires n_max >= 1")
    d = len(mats)
    total = sum(d**n for n in range(1, n_max + 1))
    if total > budget:
        raise BudgetExceededError(
            f"word enumeration size {total} exceeds the budget {budget}"
        )
    gens = np.stack(mats)
    level = gens
    lower, upper = 0.0, math.inf
    for n in range(1, n_max + 1):
        if n > 1:
            level = np.einsum("kij,ajl->kail", level, gens).reshape(
                -1, gens.shape[1], gens.shape[2]
            )
        svals = np.linalg.svd(level, compute_uv=False)
        norms_max = float(svals[:, 0].max())
        radii_max = float(np.abs(np.linalg.eigvals(level)).max())
        upper = min(upper, norms_max ** (1.0 / n))
        lower = max(lower, radii_max ** (1.0 / n))
    return JsrEstimate(lower, upper, "brute", n_max)


def _kron_power(a, k: int) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for _ in range(k):
        out = kron(out, a)
    return out


def jsr_tensor_approx(mats_list, k: int, max_side: int = 4096) -> JsrEstimate:
    """Joint spectral radius sandwich from k-fold Kronecker powers.

    With ``rho_k`` the outer radius of the tuple of k-th Kronecker powers,
    ``d^(-1/2k) * rho_k^(1/k) <= rho <= rho_k^(1/k)``.  Fails fast when the
    required superoperator side ``m^(2k)`` exceeds ``max_side``.
    """
    mats = _checked_tuple(mats_list)
    if k < 1:
        raise PreconditionError("jsr_tensor_approx requires k >= 1")
    m, d = mats[0].shape[0], len(mats)
    if m ** (2 * k) > max_side:
        raise BudgetExceededError(
            f"tensor-power superoperator side {m ** (2 * k)} exceeds {max_side}"
        )
    rho_k = outer_radius([_kron_power(a, k) for a in mats])
    upper = rho_k ** (1.0 / k)
    lower = d ** (-1.0 / (2.0 * k)) * upper
    return JsrEstimate(lower, upper, "tensor_power", k)


def scaled_outer_radius(mats_list, v, psd_tol: float = PSD_TOL) -> float:
    """Scaled-norm upper evaluator ``|| sum (v A v^-1)* (v A v^-1) ||^(1/2)``.

    Always at least the outer radius; equality is approached at Perron-type
    scalings.  ``v`` must be strictly positive.
    """
    mats = _checked_tuple(mats_list)
    v = as_matrix(v)
    if not psd_report(v, psd_tol).is_strictly_positive:
        raise PreconditionError("scaling matrix v must be strictly positive")
    vi = inverse(v)
    total = np.zeros_like(mats[0])
    for a in mats:
        b = v @ a @ vi
        total = total + b.conj().T @ b
    return math.sqrt(op_norm(total))


def friedland_value(phi, w, psd_tol: float = PSD_TOL) -> float:
    """Eigenvalue-quotient evaluator ``r(w^-1 phi(w))`` at a strictly positive w.

    Always at least the spectral radius of the (positive) map; equality holds
    at a Perron eigenvector.
    """
    phi = algebra_map(phi)
    w = as_matrix(w)
    if not in_algebra(w, phi.shape, psd_tol):
        raise PreconditionError("w must belong to the block algebra")
    if not psd_report(w, psd_tol).is_strictly_positive:
        raise PreconditionError("w must be strictly positive")
    return spectral_radius(inverse(w) @ phi(w))


def neumann_witness(phi, s: float, conv_tol: float = 1e-10, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Witness ``w = (id - phi/s)^(-1)(1)`` of ``r(phi) < s``.

    Satisfies ``phi(w) = s (w - 1)`` and ``w >= 1``.  Raises on ``s <= r`` and
    on near-singular solves whose residual exceeds ``conv_tol``.
    """
    phi = algebra_map(phi)
    r = spectral_radius_of(phi)
    if s <= r:
        raise PreconditionError(f"neumann_witness requires s > r(phi) = {r}")
    if s <= r + 10.0 * conv_tol * max(s, 1.0):
        raise ConvergenceError(
            f"resolvent at s = {s} is near-singular (spectral radius {r})"
        )
    m = phi.m
    ident = np.eye(m * m, dtype=complex)
    x = np.linalg.solve(ident - phi.superop.matrix / s, vec(np.eye(m, dtype=complex)))
    w = unvec(x, m)
    w = (w + w.conj().T) / 2.0
    residual = float(np.linalg.norm(phi(w) - s * (w - np.eye(m))))
    if residual >= conv_tol:
        raise ConvergenceError(
            f"resolvent solve is near-singular (residual {residual:.3e} >= {conv_tol})"
        )
    gap = psd_report(w - np.eye(m), psd_tol)
    if not gap.is_psd:
        raise ConvergenceError(
            f"negative witness: min eigenvalue of w - 1 is {gap.min_eigenvalue:.3e}"
        )
    return w


def conjugate_map(phi, v, psd_tol: float = PSD_TOL) -> AlgebraMap:
    """Similarity ``x -> v^-1 phi(v x v) v^-1`` for strictly positive v in the algebra.

    Preserves the spectral radius; its norm is ``||v^-1 phi(v^2) v^-1||``.
    """
    phi = algebra_map(phi)
    v = as_matrix(v)
    if not in_algebra(v, phi.shape, psd_tol):
        raise PreconditionError("v must belong to the block algebra")
    if not psd_report(v, psd_tol).is_strictly_positive:
        raise PreconditionError("v must be strictly positive")
    vi = inverse(v)
    outer_k = kron(v.T, v.conj().T)
    inner_k = kron(vi.T, vi.conj().T)
    mat = inner_k @ phi.superop.matrix @ outer_k
    return algebra_map(mat, phi.shape, positive=phi.positive)


@dataclass(frozen=True)
class NormAchievingResult:
    v: np.ndarray
    norm: float
    radius: float


def norm_achieving_check(phi, w, psd_tol: float = PSD_TOL, check_tol: float = 1e-8) -> NormAchievingResult:
    """Constructive check that conjugation by ``w^(1/2)`` achieves norm = radius.

    Requires ``phi(w) <= r w``; the violating eigenvalue is reported when the
    precondition fails.
    """
    phi = algebra_map(phi)
    w = as_matrix(w)
    if not psd_report(w, psd_tol).is_strictly_positive:
        raise PreconditionError("w must be strictly positive")
    r = spectral_radius_of(phi)
    slack = psd_report(r * w - phi(w), psd_tol)
    if not slack.is_psd:
        raise PreconditionError(
            f"phi(w) <= r*w fails: violating eigenvalue {slack.min_eigenvalue:.6e}"
        )
    v = psd_sqrt(w, psd_tol)
    norm = positive_map_norm(conjugate_map(phi, v, psd_tol))
    if abs(norm - r) > check_tol:
        raise ConvergenceError(
            f"conjugated norm {norm} misses the spectral radius {r} by {abs(norm - r):.3e}"
        )
    return NormAchievingResult(v=v, norm=norm, radius=r)


@dataclass(frozen=True)
class BalanceResult:
    p: np.ndarray
    norm: float
    radius: float


def balance_similarity(
    a,
    epsilon: float | None = None,
    *,
    horizon: int = 256,
    power_bound: float = 1e3,
    growth_ratio: float = 1.5,
    cluster_tol: float = 1e-8,
    slack: float = 1e-6,
) -> BalanceResult:
    """Invertible P with ``||P a P^-1|| <= r(a) * (1 + slack)``.

    Exists exactly when the normalized powers ``(a/r)^n`` stay bounded, which
    is screened empirically up to ``horizon`` (absolute bound plus a growth
    ratio test between the last and an earlier window).  Construction: Schur
    form ordered so peripheral eigenvalues come first, Sylvester decoupling of
    the interior block, eigenvector diagonalization of the (semisimple)
    peripheral block, and a geometric diagonal scaling of the interior block.
    No Jordan form is ever computed.
    """
    a = as_matrix(a)
    n = a.shape[0]
    r = spectral_radius(a)
    if r <= 1e-300:
        raise PreconditionError("balance_similarity requires a positive spectral radius")
    b = a / r

    norms = np.empty(horizon)
    cur = np.eye(n, dtype=complex)
    for i in range(horizon):
        cur = cur @ b
        norms[i] = op_norm(cur)
    early = float(norms[horizon // 4 : horizon // 2].max())
    late = float(norms[3 * horizon // 4 :].max())
    if norms.max() > power_bound or late > growth_ratio * max(early, 1.0):
        raise PreconditionError(
            "unbounded normalized powers (peripheral Jordan block detected)"
        )

    t, q, sdim = scipy.linalg.schur(
        b, output="complex", sort=lambda z: abs(z) >= 1.0 - 10.0 * cluster_tol
    )
    p_count = int(sdim)
    if p_count == 0:
        raise ConvergenceError("no peripheral eigenvalue found at the spectral radius")

    t11 = t[:p_count, :p_count]
    lam, vmat = np.linalg.eig(t11)
    if np.linalg.cond(vmat) > 1e8:
        raise PreconditionError(
            "unbounded normalized powers (peripheral Jordan block detected)"
        )
    vmat = vmat / np.linalg.norm(vmat, axis=0, keepdims=True)

    if p_count == n:
        p_full = np.linalg.solve(vmat, q.conj().T)
        norm = op_norm(p_full @ a @ np.linalg.inv(p_full))
        if norm > r * (1.0 + slack):
            raise ConvergenceError(f"balanced norm {norm} exceeds the target {r}")
        return BalanceResult(p=p_full, norm=norm, radius=r)

    t12 = t[:p_count, p_count:]
    t22 = t[p_count:, p_count:]
    z = scipy.linalg.solve_sylvester(t11, -t22, -t12)
    q_int = n - p_count
    mu = float(np.abs(np.diag(t22)).max()) if q_int else 0.0
    off = np.abs(np.triu(t22, 1)).max() if q_int > 1 else 0.0
    eps = epsilon if epsilon is not None else (1.0 - mu) / (2.0 * max(1.0, q_int * max(off, 1.0)))

    for _ in range(80):
        scale = eps ** np.arange(q_int, 0, -1)
        if not np.all(scale > 0.0):
            raise ConvergenceError("interior scaling underflowed")
        c = np.diag(scale)
        c_inv = np.diag(1.0 / scale)
        t22_scaled = c @ t22 @ c_inv
        if op_norm(t22_scaled) <= (1.0 + mu) / 2.0:
            w_inv = np.eye(n, dtype=complex)
            w_inv[:p_count, p_count:] = -z
            g_inv = np.eye(n, dtype=complex)
            g_inv[:p_count, :p_count] = np.linalg.inv(vmat)
            f = np.eye(n, dtype=complex)
            f[p_count:, p_count:] = c
            p_full = f @ g_inv @ w_inv @ q.conj().T
            norm = op_norm(p_full @ a @ np.linalg.inv(p_full))
            if norm <= r * (1.0 + slack):
                return BalanceResult(p=p_full, norm=norm, radius=r)
        eps /= 2.0
    raise ConvergenceError("interior scaling failed to reach the target norm")


def singular_psd_combination(w1, w2, psd_tol: float = PSD_TOL, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Non-zero singular PSD element of span{w1, w2} for independent PSD inputs.

    If either input is already singular it is returned directly; otherwise
    the combination ``w1 - w2/d`` with ``d = r(w1^-1/2 w2 w1^-1/2)`` is
    singular and PSD.
    """
    w1, w2 = as_matrix(w1), as_matrix(w2)
    rep1, rep2 = psd_report(w1, psd_tol), psd_report(w2, psd_tol)
    if not rep1.is_psd or not rep2.is_psd:
        raise PreconditionError("inputs must both be PSD")
    v1, v2 = vec(w1), vec(w2)
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if n1 == 0.0 or n2 == 0.0 or abs(np.vdot(v1, v2)) >= (1.0 - 1e-12) * n1 * n2:
        raise PreconditionError("inputs must be linearly independent")
    if not rep1.is_strictly_positive:
        return w1
    if not rep2.is_strictly_positive:
        return w2
    root_inv = inverse(psd_sqrt(w1, psd_tol), rank_tol)
    d = spectral_radius(root_inv @ w2 @ root_inv)
    w3 = w1 - w2 / d
    return (w3 + w3.conj().T) / 2.0

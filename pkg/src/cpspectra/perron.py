"""Constructive Perron theory for positive maps on block-diagonal algebras.

Degeneracy indices come from tolerant rank plateaus of powers of ``T - lambda``;
Jordan bases are never formed.  The maximal part of a map is computed along
two independent routes and cross-checked:

* projection route: ``(T - r)^(d-1)`` composed with the spectral projector at
  the eigenvalue ``r``, obtained from a clustered Schur form plus a Sylvester
  solve;
* Cesaro route: the averaged normalized powers
  ``(1/N) sum_n T^n / (binom(n, d-1) r^(n-d+1))``, evaluated by exact
  partial-sum doubling (``d = 1``) or chunked power stacks (``d > 1``).

The same machinery yields Perron eigenvectors, the rank-one factorization of
the maximal part of irreducible CP maps, irreducibility tests through
canonical extensions, and bases of the algebra generated by a matrix tuple.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .cpmap import (
    AlgebraMap,
    CoefficientSpace,
    CpMap,
    SuperOperator,
    algebra_map,
    canonical_extension,
    choi_of_superop,
    kraus_of_choi,
    superop_matrix,
    superop_of,
)
from .errors import ConvergenceError, PreconditionError
from .mats import (
    PSD_TOL,
    RANK_TOL,
    as_matrix,
    eigenvalues,
    numerical_rank,
    op_norm,
    psd_report,
    unvec,
    vec,
)

__all__ = [
    "EigenCluster",
    "SpectralStructure",
    "MaximalPart",
    "Factorization",
    "IrreducibilityReport",
    "GeneratedAlgebra",
    "IdealCheck",
    "spectral_structure",
    "maximal_part",
    "perron_vector",
    "maximal_factorization",
    "irreducible_cp",
    "algebra_basis",
    "resolvent_gamma",
    "exp_eta",
    "maximal_ideal_check",
]


@dataclass(frozen=True)
class EigenCluster:
    value: complex
    multiplicity: int
    degeneracy: int


@dataclass(frozen=True)
class SpectralStructure:
    """Clustered eigenvalues with degeneracy indices and the maximal spectrum."""

    clusters: tuple[EigenCluster, ...]
    radius: float
    d_max: int
    maximal_spectrum: tuple[complex, ...]


def _operator_matrix(op) -> np.ndarray:
    mat = superop_matrix(op)
    if mat.shape[0] != mat.shape[1]:
        raise PreconditionError("operator matrix must be square")
    return mat


def spectral_structure(op, cluster_tol: float = 1e-8, rank_tol: float = RANK_TOL) -> SpectralStructure:
    """Eigenvalue clusters, degeneracy indices, and the maximal spectrum.

    The degeneracy index of a cluster value is the smallest ``k`` with
    ``rank((T - value)^k) == rank((T - value)^(k+1))`` under the tolerant
    rank; clustering merges eigenvalues within ``cluster_tol * max(r, 1)``.
    """
    mat = _operator_matrix(op)
    n = mat.shape[0]
    eig = eigenvalues(mat)
    radius = float(np.abs(eig).max()) if n else 0.0
    delta = cluster_tol * max(radius, 1.0)

    order = sorted(range(n), key=lambda i: (-abs(eig[i]), eig[i].real, eig[i].imag))
    taken = np.zeros(n, dtype=bool)
    clusters = []
    for idx in order:
        if taken[idx]:
            continue
        members = [j for j in range(n) if not taken[j] and abs(eig[j] - eig[idx]) <= delta]
        for j in members:
            taken[j] = True
        value = complex(np.mean(eig[members]))
        clusters.append((value, len(members)))

    scale = max(op_norm(mat), 1.0)
    out = []
    for value, mult in clusters:
        base = (mat - value * np.eye(n)) / scale
        deg = mult
        cur = base
        prev_rank = numerical_rank(cur, rank_tol)
        for k in range(1, mult + 1):
            nxt = cur @ base
            nxt_rank = numerical_rank(nxt, rank_tol)
            if nxt_rank == prev_rank:
                deg = k
                break
            cur, prev_rank = nxt, nxt_rank
        out.append(EigenCluster(value=value, multiplicity=mult, degeneracy=deg))

    peripheral = [c for c in out if abs(c.value) >= radius - delta]
    d_max = max((c.degeneracy for c in peripheral), default=0)
    maximal = tuple(c.value for c in peripheral if c.degeneracy == d_max)
    return SpectralStructure(
        clusters=tuple(out), radius=radius, d_max=d_max, maximal_spectrum=maximal
    )


def _spectral_projector(mat: np.ndarray, center: float, delta: float) -> np.ndarray:
    """Riesz projection onto the generalized eigenspace of the cluster at ``center``."""
    n = mat.shape[0]
    t, q, sdim = scipy.linalg.schur(
        mat, output="complex", sort=lambda z: abs(z - center) <= delta
    )
    sdim = int(sdim)
    if sdim == 0:
        raise PreconditionError(f"no eigenvalue within {delta:.2e} of {center}")
    if sdim == n:
        return np.eye(n, dtype=complex)
    t11, t12, t22 = t[:sdim, :sdim], t[:sdim, sdim:], t[sdim:, sdim:]
    y = scipy.linalg.solve_sylvester(t11, -t22, -t12)
    core = np.zeros((n, n), dtype=complex)
    core[:sdim, :sdim] = np.eye(sdim)
    core[:sdim, sdim:] = -y
    return q @ core @ q.conj().T


def _cesaro_limit(
    mat: np.ndarray,
    radius: float,
    degeneracy: int,
    tol: float,
    max_terms: int = 2**26,
) -> np.ndarray:
    """Averaged normalized powers, stopping when consecutive doublings agree."""
    mnorm = mat / radius
    if degeneracy == 1:
        # 1/binom(n, 0) = 1, so partial sums obey an exact doubling recursion.
        # The doubling count is capped well below the regime where the
        # 1-ulp uncertainty of the computed spectral radius makes M^N drift.
        partial = mnorm.copy()
        power = mnorm.copy()
        count = 1
        prev = partial / count
        for _ in range(48):
            partial = partial + power @ partial
            power = power @ power
            count *= 2
            cur = partial / count
            scale = max(1.0, float(np.abs(cur).max()))
            if float(np.abs(cur - prev).max()) <= tol * scale:
                return cur
            prev = cur
        raise ConvergenceError("Cesaro mean did not converge within the doubling budget")

    n0 = degeneracy - 1
    side = mat.shape[0]
    chunk = max(64, min(2048, (32 << 20) // max(1, 16 * side * side)))
    stack = np.empty((chunk, side, side), dtype=complex)
    stack[0] = np.eye(side)
    for j in range(1, chunk):
        stack[j] = stack[j - 1] @ mnorm
    step = stack[-1] @ mnorm
    macc = np.linalg.matrix_power(mnorm, n0)
    acc = np.zeros((side, side), dtype=complex)

    def weights(start: int) -> np.ndarray:
        ns = np.arange(start, start + chunk, dtype=float)
        k = degeneracy - 1
        return np.exp(-(gammaln(ns + 1.0) - gammaln(k + 1.0) - gammaln(ns - k + 1.0)))

    prev = None
    next_check = 1024
    n_start = n0
    while n_start <= max_terms:
        acc = acc + macc @ np.tensordot(weights(n_start), stack, axes=1)
        macc = macc @ step
        n_start += chunk
        n_done = n_start - 1
        if n_done >= next_check:
            cur = (radius ** (degeneracy - 1)) * acc / n_done
            scale = max(1.0, float(np.abs(cur).max()))
            if prev is not None and float(np.abs(cur - prev).max()) <= tol * scale:
                return cur
            prev = cur
            next_check *= 2
    raise ConvergenceError("Cesaro mean did not converge within the term budget")


@dataclass(frozen=True)
class MaximalPart:
    """The dominant (Cesaro-limit) part of a positive map."""

    superop: SuperOperator
    radius: float
    degeneracy: int
    idempotent: bool
    route_gap: float | None = None


def _phi_matrix(phi) -> tuple[np.ndarray, int]:
    if isinstance(phi, (CpMap, AlgebraMap)):
        phi = algebra_map(phi)
        return phi.superop.matrix, phi.m
    mat = _operator_matrix(phi)
    return mat, int(round(np.sqrt(mat.shape[0])))


def maximal_part(
    phi,
    cluster_tol: float = 1e-8,
    rank_tol: float = RANK_TOL,
    route_tol: float = 1e-6,
    cesaro_tol: float = 2.5e-7,
    cross_check: bool = True,
    max_terms: int = 2**26,
) -> MaximalPart:
    """Maximal part of a positive map with non-zero spectral radius.

    Primary route is the spectral projection ``(T - r)^(d-1) P_r``; when
    ``cross_check`` is on (default), the Cesaro average of normalized powers
    is evaluated independently and both must agree within ``route_tol``
    (relative to the result's largest entry once that exceeds 1, since an
    ill-conditioned spectral projector inflates both routes alike).

    Raises on maps with zero spectral radius (nilpotent, no maximal part)
    and on maps whose spectral radius is not an eigenvalue or does not carry
    a largest Jordan block (the claimed positivity is then false).
    """
    mat, m = _phi_matrix(phi)
    struct = spectral_structure(mat, cluster_tol, rank_tol)
    r = struct.radius
    if r <= 1e-300:
        raise PreconditionError(
            "maximal part is undefined when the spectral radius is zero"
        )
    delta = cluster_tol * max(r, 1.0)
    target = next((c for c in struct.clusters if abs(c.value - r) <= delta), None)
    if target is None:
        raise PreconditionError(
            "spectral radius is not an eigenvalue; the map cannot be positive"
        )
    d = target.degeneracy
    if d < struct.d_max:
        raise PreconditionError(
            "a peripheral eigenvalue away from the spectral radius has a larger "
            "Jordan block; the map cannot be positive"
        )

    proj = _spectral_projector(mat, r, delta)
    if d == 1:
        hat = proj
    else:
        hat = np.linalg.matrix_power(mat - r * np.eye(mat.shape[0]), d - 1) @ proj

    gap = None
    if cross_check:
        ces = _cesaro_limit(mat, r, d, cesaro_tol, max_terms=max_terms)
        gap = float(np.abs(hat - ces).max())
        # relative beyond unit scale: ill-conditioned eigenbases inflate both
        # routes' entries by the same factor
        if gap > route_tol * max(1.0, float(np.abs(hat).max())):
            raise ConvergenceError(
                f"projection and Cesaro routes disagree by {gap:.3e} (> {route_tol})"
            )

    sq = hat @ hat
    idem_gap = float(np.abs(sq - hat).max())
    nil_gap = float(np.abs(sq).max())
    if idem_gap < 1e-8:
        idempotent = True
    elif nil_gap < 1e-8:
        idempotent = False
    else:
        raise ConvergenceError(
            "maximal part is neither idempotent nor nilpotent within tolerance"
        )
    if idempotent != (d == 1):
        raise ConvergenceError(
            f"idempotency branch contradicts degeneracy index {d}"
        )
    return MaximalPart(
        superop=SuperOperator(m, hat),
        radius=r,
        degeneracy=d,
        idempotent=idempotent,
        route_gap=gap,
    )


def perron_vector(phi, psd_tol: float = PSD_TOL, check_tol: float = 1e-8, **kwargs) -> np.ndarray:
    """Positive eigenvector ``L = maximal_part(phi)(1)`` at the spectral radius."""
    mat, m = _phi_matrix(phi)
    mp = maximal_part(phi, **kwargs)
    ell = mp.superop(np.eye(m, dtype=complex))
    ell = (ell + ell.conj().T) / 2.0
    norm = float(np.linalg.norm(ell))
    if norm <= psd_tol:
        raise ConvergenceError("maximal part annihilates the identity")
    if not psd_report(ell, psd_tol * max(1.0, norm)).is_psd:
        raise ConvergenceError("computed Perron vector is not PSD")
    residual = float(np.linalg.norm(unvec(mat @ vec(ell), m) - mp.radius * ell))
    if residual > check_tol * norm:
        raise ConvergenceError(
            f"Perron eigenvector residual {residual:.3e} exceeds {check_tol} * ||L||"
        )
    return ell


@dataclass(frozen=True)
class Factorization:
    """Rank-one factorization ``X -> trace(state @ X) * eigenvector`` of a maximal part."""

    radius: float
    eigenvector: np.ndarray
    state: np.ndarray
    residuals: dict


def maximal_factorization(
    tau: CpMap,
    rank_tol: float = RANK_TOL,
    psd_tol: float = PSD_TOL,
    check_tol: float = 1e-8,
    **kwargs,
) -> Factorization:
    """Factor the maximal part of an irreducible CP map.

    Returns the spectral radius ``r``, the strictly positive eigenvector ``L``
    (with ``tau(L) = r L``), and the strictly positive density matrix ``R`` of
    the invariant faithful state (``trace(R L) = 1``; the adjoint superoperator
    fixes ``vec(R)`` up to the factor ``r``).  The maximal part must be
    numerically rank one; anything else signals reducibility or a tolerance
    failure.
    """
    report = irreducible_cp(tau, rank_tol=rank_tol, psd_tol=psd_tol)
    if not report.irreducible:
        raise PreconditionError(
            f"map is reducible (generated algebra has dimension {report.dimension} "
            f"< {tau.m ** 2})"
        )
    ext = canonical_extension(tau)
    mat = superop_of(ext).matrix
    mp = maximal_part(algebra_map(ext), rank_tol=rank_tol, **kwargs)
    hat = mp.superop.matrix
    m, r = tau.m, mp.radius

    svals = np.linalg.svd(hat, compute_uv=False)
    rank_gap = float(svals[1] / svals[0]) if svals.size > 1 and svals[0] > 0 else 0.0
    if svals[0] == 0.0 or rank_gap > rank_tol:
        raise ConvergenceError(
            f"maximal part is not numerically rank one (sigma2/sigma1 = {rank_gap:.3e})"
        )

    ell = perron_vector(algebra_map(ext), psd_tol=psd_tol, check_tol=check_tol, **kwargs)
    if not psd_report(ell, psd_tol).is_strictly_positive:
        raise ConvergenceError("Perron eigenvector of an irreducible map must be strictly positive")

    vl = vec(ell)
    raw_state = unvec(hat.conj().T @ vl / float(np.vdot(vl, vl).real), m)
    herm_gap = float(np.linalg.norm(raw_state - raw_state.conj().T))
    if herm_gap > check_tol * max(1.0, float(np.linalg.norm(raw_state))):
        raise ConvergenceError(
            f"recovered state is not Hermitian (gap {herm_gap:.3e}); not silently fixed"
        )
    state = (raw_state + raw_state.conj().T) / 2.0
    trace_raw = float(np.trace(state @ ell).real)
    state = state / trace_raw
    if not psd_report(state, psd_tol).is_strictly_positive:
        raise ConvergenceError("recovered state is not strictly positive")

    resid_eig = float(np.linalg.norm(unvec(mat @ vl, m) - r * ell))
    resid_adj = float(np.linalg.norm(mat.conj().T @ vec(state) - r * vec(state)))
    resid_trace = abs(trace_raw - 1.0)
    residuals = {
        "eigenvector": resid_eig,
        "adjoint": resid_adj,
        "state_trace": resid_trace,
        "rank_gap": rank_gap,
    }
    scale = max(1.0, float(np.linalg.norm(ell)))
    if resid_eig > check_tol * scale or resid_adj > check_tol or resid_trace > check_tol:
        raise ConvergenceError(f"factorization residuals too large: {residuals}")
    return Factorization(radius=r, eigenvector=ell, state=state, residuals=residuals)


@dataclass(frozen=True)
class GeneratedAlgebra:
    """Orthonormal basis of the (unital or not) algebra generated by a tuple."""

    space: CoefficientSpace
    unital: bool
    stabilization_index: int

    @property
    def dimension(self) -> int:
        return self.space.dimension

    @property
    def basis(self) -> tuple[np.ndarray, ...]:
        return self.space.basis


def algebra_basis(mats_list, unital: bool, rank_tol: float = RANK_TOL) -> GeneratedAlgebra:
    """Burnside-style closure: iterate left multiplication until the span stabilizes.

    Starts from span{1} (unital) or span{A_i} (non-unital) and adds products
    ``A_i @ B`` over the current basis until one full sweep adds nothing.
    Stabilization is guaranteed no later than word length m^2; the reported
    ``stabilization_index`` is the word length at which the span last grew.

    Orthonormalization is modified Gram-Schmidt with re-orthogonalization in
    the Hilbert-Schmidt inner product.
    """
    mats = [as_matrix(a) for a in mats_list]
    if not mats:
        raise PreconditionError("tuple of matrices must be non-empty")
    m = mats[0].shape[0]
    for a in mats:
        if a.shape != (m, m):
            raise PreconditionError("all matrices must share one square side")

    basis_vecs: list[np.ndarray] = []
    max_norm = max(float(np.linalg.norm(a)) for a in mats) or 1.0

    def try_add(candidate: np.ndarray) -> np.ndarray | None:
        nonlocal max_norm
        v = vec(candidate)
        nrm = float(np.linalg.norm(v))
        max_norm = max(max_norm, nrm)
        if nrm <= rank_tol * max_norm:
            return None
        for _ in range(2):  # re-orthogonalize to keep the basis clean
            for b in basis_vecs:
                v = v - np.vdot(b, v) * b
        res = float(np.linalg.norm(v))
        if res <= rank_tol * nrm:
            return None
        v = v / res
        basis_vecs.append(v)
        return unvec(v, m)

    if unital:
        seeds = [np.eye(m, dtype=complex)]
        length = 0
    else:
        seeds = mats
        length = 1
    frontier = [mat for mat in (try_add(s) for s in seeds) if mat is not None]
    stabilization = length if frontier else 0

    for _ in range(m * m + 1):
        if not frontier:
            break
        new = []
        for g in mats:
            for b in frontier:
                added = try_add(g @ b)
                if added is not None:
                    new.append(added)
        if new:
            length += 1
            stabilization = length
        frontier = new

    space = CoefficientSpace(m, tuple(unvec(v, m) for v in basis_vecs))
    return GeneratedAlgebra(space=space, unital=unital, stabilization_index=stabilization)


@dataclass(frozen=True)
class IrreducibilityReport:
    irreducible: bool
    dimension: int
    witness: np.ndarray | None
    strict_probes: int
    probes: int
    probes_consistent: bool


def irreducible_cp(
    tau: CpMap,
    rank_tol: float = RANK_TOL,
    psd_tol: float = PSD_TOL,
    rng: np.random.Generator | None = None,
    probes: int = 64,
) -> IrreducibilityReport:
    """Deterministic irreducibility test for a CP map on a block algebra.

    The verdict is the algebra-dimension criterion applied to a Kraus list of
    the canonical extension: the map is irreducible iff that list generates
    the full matrix algebra (dimension m^2).  When reducible, a witness
    matrix HS-orthogonal to the generated algebra is returned.

    A randomized corroborator additionally applies ``(1 + ext)^(m-1)`` to
    random rank-one PSD probes; for an irreducible map every probe must come
    out strictly positive.  The probes can refute but never certify
    irreducibility, so ``probes_consistent`` only flags the contradictory
    case.  Pass a seeded ``rng`` for reproducibility (default seed 0).
    """
    ext = canonical_extension(tau)
    gen = algebra_basis(ext.kraus, unital=False, rank_tol=rank_tol)
    m = tau.m
    verdict = gen.dimension == m * m

    witness = None
    if not verdict:
        stacked = np.column_stack([vec(b) for b in gen.basis]) if gen.basis else np.zeros(
            (m * m, 0), dtype=complex
        )
        u, _, _ = np.linalg.svd(stacked, full_matrices=True) if stacked.size else (
            np.eye(m * m, dtype=complex),
            None,
            None,
        )
        witness = unvec(u[:, gen.dimension], m)

    rng = rng if rng is not None else np.random.default_rng(0)
    one_plus = np.eye(m * m, dtype=complex) + superop_of(ext).matrix
    powered = np.linalg.matrix_power(one_plus, m - 1)
    strict = 0
    for _ in range(probes):
        h = rng.normal(size=m) + 1j * rng.normal(size=m)
        h /= np.linalg.norm(h)
        y = unvec(powered @ vec(np.outer(h, h.conj())), m)
        y = (y + y.conj().T) / 2.0
        if psd_report(y, psd_tol).is_strictly_positive:
            strict += 1
    return IrreducibilityReport(
        irreducible=verdict,
        dimension=gen.dimension,
        witness=witness,
        strict_probes=strict,
        probes=probes,
        probes_consistent=not (verdict and strict < probes),
    )


def resolvent_gamma(tau: CpMap, b: float | None = None) -> tuple[SuperOperator, SuperOperator]:
    """Resolvent pair ``gamma0 = (1 - b tau)^(-1)`` and ``gamma1 = gamma0 - 1``.

    Both are CP when ``b > 0`` and ``b * r(tau) < 1``; their Choi ranks equal
    the dimensions of the unital / non-unital generated algebras of any Kraus
    list of ``tau``.  Default ``b = 1 / (2 max(1, r))``.
    """
    s = superop_of(tau).matrix
    r = float(np.abs(eigenvalues(s)).max())
    if b is None:
        b = 1.0 / (2.0 * max(1.0, r))
    if b <= 0.0 or b * r >= 1.0:
        raise PreconditionError(f"resolvent requires b > 0 and b * r < 1 (b={b}, r={r})")
    n = s.shape[0]
    g0 = np.linalg.solve(np.eye(n, dtype=complex) - b * s, np.eye(n, dtype=complex))
    m = tau.m
    return SuperOperator(m, g0), SuperOperator(m, g0 - np.eye(n))


def exp_eta(tau: CpMap, d: float = 1.0) -> tuple[SuperOperator, SuperOperator]:
    """Exponential pair ``eta0 = exp(d tau)`` and ``eta1 = eta0 - 1`` (both CP for d > 0)."""
    if d <= 0.0:
        raise PreconditionError("exp_eta requires d > 0")
    s = superop_of(tau).matrix
    e0 = scipy.linalg.expm(d * s)
    return SuperOperator(tau.m, e0), SuperOperator(tau.m, e0 - np.eye(s.shape[0]))


@dataclass(frozen=True)
class IdealCheck:
    is_subalgebra: bool
    is_ideal: bool
    subalgebra_residual: float
    ideal_residual: float
    dimension: int


def maximal_ideal_check(tau: CpMap, tol: float = 1e-8, **kwargs) -> IdealCheck:
    """Closure checks for the Kraus span of the maximal part.

    With ``A_i`` a Kraus list of the canonical extension and ``B_j`` a Kraus
    list of its maximal part, span{B_j} must be closed under multiplication
    (a subalgebra) and under left/right multiplication by the ``A_i`` (an
    ideal in the generated algebra).  Residuals are HS projection gaps.
    """
    ext = canonical_extension(tau)
    mp = maximal_part(algebra_map(ext), **kwargs)
    b_list = kraus_of_choi(choi_of_superop(mp.superop))
    a_list = ext.kraus

    stacked = np.column_stack([vec(b) for b in b_list])
    u, svals, _ = np.linalg.svd(stacked, full_matrices=False)
    keep = u[:, svals > RANK_TOL * svals[0]]

    def residual(x) -> float:
        v = vec(x)
        return float(np.linalg.norm(v - keep @ (keep.conj().T @ v)))

    sub_res = max(residual(bi @ bj) for bi in b_list for bj in b_list)
    ideal_res = max(
        max(residual(a @ b) for a in a_list for b in b_list),
        max(residual(b @ a) for a in a_list for b in b_list),
    )
    return IdealCheck(
        is_subalgebra=sub_res <= tol,
        is_ideal=ideal_res <= tol,
        subalgebra_residual=sub_res,
        ideal_residual=ideal_res,
        dimension=len(b_list),
    )

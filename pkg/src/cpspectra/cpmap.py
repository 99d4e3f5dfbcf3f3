"""Completely positive maps: Kraus lists, Choi matrices, superoperators.

A :class:`CpMap` carries a Kraus list of side-``m`` matrices together with the
shape of the block-diagonal algebra it acts on.  The three views are related
by fixed conventions (see :mod:`cpspectra.mats`):

* superoperator of ``X -> sum_i A_i* X A_i`` is ``sum_i kron(A_i.T, A_i.conj().T)``;
* Choi matrix is ``sum_i outer(conj(vec A_i), vec A_i)``, equivalently
  assembled from the map's action on the elementary matrices;
* the conjugated Choi matrix has range ``vec(span{A_i})``, which is what makes
  coefficient spaces computable from any one Kraus list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraShape, compress_superop
from .errors import FormatError, PreconditionError
from .mats import (
    PSD_TOL,
    RANK_TOL,
    as_matrix,
    hs_norm,
    kron,
    numerical_rank,
    psd_report,
    unvec,
    vec,
)

__all__ = [
    "CpMap",
    "SuperOperator",
    "AlgebraMap",
    "CoefficientSpace",
    "MembershipResult",
    "superop_of",
    "compose",
    "map_power",
    "choi_of",
    "choi_of_superop",
    "kraus_of_choi",
    "choi_rank",
    "is_cp",
    "coefficient_space",
    "dominates",
    "membership",
    "canonical_extension",
    "algebra_map",
    "preserves_algebra",
]


@dataclass(frozen=True)
class SuperOperator:
    """An m^2 x m^2 matrix acting on ``vec`` of m x m matrices."""

    m: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = as_matrix(self.matrix)
        if mat.shape != (self.m**2, self.m**2):
            raise FormatError(
                f"superoperator matrix {mat.shape} does not match side {self.m}^2"
            )
        object.__setattr__(self, "matrix", mat)

    def __call__(self, x) -> np.ndarray:
        return unvec(self.matrix @ vec(x), self.m)

    def identity_like(self) -> "SuperOperator":
        return SuperOperator(self.m, np.eye(self.m**2, dtype=complex))


@dataclass(frozen=True)
class CpMap:
    """CP map ``X -> sum_i A_i* X A_i`` on the algebra described by ``shape``.

    The Kraus list is non-empty and all operators share side ``shape.m``.
    The induced Choi matrix is automatically PSD for any Kraus list.
    """

    kraus: tuple[np.ndarray, ...]
    shape: AlgebraShape

    def __post_init__(self):
        mats = tuple(as_matrix(a) for a in self.kraus)
        if not mats:
            raise FormatError("Kraus list must be non-empty")
        m = self.shape.m
        for a in mats:
            if a.shape != (m, m):
                raise FormatError(
                    f"Kraus operator of shape {a.shape} does not match side {m}"
                )
        object.__setattr__(self, "kraus", mats)

    @property
    def m(self) -> int:
        return self.shape.m

    def __call__(self, x) -> np.ndarray:
        x = as_matrix(x)
        out = np.zeros((self.m, self.m), dtype=complex)
        for a in self.kraus:
            out += a.conj().T @ x @ a
        return out

    def to_json(self) -> dict:
        from .mats import matrix_to_json

        return {
            "shape": self.shape.to_json(),
            "kraus": [matrix_to_json(a) for a in self.kraus],
        }

    @classmethod
    def from_json(cls, obj, shape: AlgebraShape | None = None) -> "CpMap":
        from .mats import matrix_from_json

        if not isinstance(obj, dict) or "kraus" not in obj:
            raise FormatError('CP map JSON must contain a "kraus" list')
        if "shape" in obj:
            parsed = AlgebraShape.from_json(obj["shape"])
            if shape is not None and parsed.blocks != shape.blocks:
                raise FormatError(
                    f"shape {parsed.blocks} in file conflicts with {shape.blocks}"
                )
            shape = parsed
        kraus = tuple(matrix_from_json(k) for k in obj["kraus"])
        if shape is None:
            if not kraus:
                raise FormatError("empty Kraus list")
            shape = AlgebraShape.full(kraus[0].shape[0])
        return cls(kraus, shape)


@dataclass(frozen=True)
class AlgebraMap:
    """A general linear map on a block-diagonal algebra, as a superoperator.

    The superoperator is canonical in the sense that it annihilates the
    off-block complement (it represents ``iota o phi o compress``); use
    :func:`algebra_map` to construct one.  ``positive`` is a claim, not a
    verified property.
    """

    superop: SuperOperator
    shape: AlgebraShape
    positive: bool = True

    @property
    def m(self) -> int:
        return self.shape.m

    def __call__(self, x) -> np.ndarray:
        return self.superop(x)


def algebra_map(op, shape: AlgebraShape | None = None, positive: bool = True) -> AlgebraMap:
    """Build an :class:`AlgebraMap` from a CpMap, SuperOperator or raw matrix.

    The superoperator is right-composed with the block compression so the
    resulting map never sees off-block input components.
    """
    if isinstance(op, AlgebraMap):
        return op
    if isinstance(op, CpMap):
        shape = op.shape
        mat = superop_of(op).matrix
    elif isinstance(op, SuperOperator):
        if shape is None:
            shape = AlgebraShape.full(op.m)
        mat = op.matrix
    else:
        mat = as_matrix(op)
        if shape is None:
            raise PreconditionError("a shape is required for a raw superoperator")
        if mat.shape != (shape.m**2, shape.m**2):
            raise FormatError(
                f"superoperator {mat.shape} does not match algebra side {shape.m}"
            )
    if not shape.is_full:
        mat = mat @ compress_superop(shape)
    return AlgebraMap(SuperOperator(shape.m, mat), shape, positive)


def superop_matrix(op) -> np.ndarray:
    """The m^2 x m^2 matrix of a CpMap / SuperOperator / AlgebraMap / ndarray."""
    if isinstance(op, CpMap):
        return superop_of(op).matrix
    if isinstance(op, SuperOperator):
        return op.matrix
    if isinstance(op, AlgebraMap):
        return op.superop.matrix
    return as_matrix(op)


def superop_of(tau: CpMap) -> SuperOperator:
    """Superoperator of a CP map under the package's vec convention."""
    m = tau.m
    out = np.zeros((m * m, m * m), dtype=complex)
    for a in tau.kraus:
        out += kron(a.T, a.conj().T)
    return SuperOperator(m, out)


def compose(outer_map, inner_map) -> SuperOperator:
    """Superoperator of ``outer o inner`` (matrix product of superoperators)."""
    a, b = superop_matrix(outer_map), superop_matrix(inner_map)
    if a.shape != b.shape:
        raise PreconditionError("composed maps act on different sides")
    m = int(round(np.sqrt(a.shape[0])))
    return SuperOperator(m, a @ b)


def map_power(op, n: int) -> SuperOperator:
    """n-th power of a map, by repeated squaring of its superoperator."""
    mat = superop_matrix(op)
    if n < 0:
        raise PreconditionError("map_power requires n >= 0")
    m = int(round(np.sqrt(mat.shape[0])))
    return SuperOperator(m, np.linalg.matrix_power(mat, n))


def choi_of(tau: CpMap) -> np.ndarray:
    """Choi matrix of a CP map, PSD of side m^2 and linear in the map."""
    m = tau.m
    out = np.zeros((m * m, m * m), dtype=complex)
    for a in tau.kraus:
        v = vec(a)
        out += np.outer(v.conj(), v)
    return out


def choi_of_superop(s: SuperOperator) -> np.ndarray:
    """Choi matrix assembled from a superoperator's action on the E_ij basis."""
    m = s.m
    out = np.zeros((m * m, m * m), dtype=complex)
    basis = np.eye(m)
    for i in range(m):
        for j in range(m):
            e = np.outer(basis[i], basis[j])
            out += kron(s(e), e)
    return out


def kraus_of_choi(c, rank_tol: float = RANK_TOL, psd_tol: float = PSD_TOL) -> list[np.ndarray]:
    """Kraus operators of a PSD Choi matrix, one per retained eigenpair.

    Eigenpairs with eigenvalue ``<= psd_tol * max eigenvalue`` are discarded
    (numerical Choi matrices of exact low-rank maps carry round-off tails).
    Each retained pair ``(lam, u)`` yields ``sqrt(lam) * unvec(conj(u))``.
    """
    c = as_matrix(c)
    side = c.shape[0]
    if c.shape[0] != c.shape[1]:
        raise FormatError("Choi matrix must be square")
    m = int(round(np.sqrt(side)))
    if m * m != side:
        raise FormatError(f"Choi side {side} is not a perfect square")
    rep = psd_report(c, psd_tol * max(1.0, float(np.linalg.norm(c))))
    if not rep.is_hermitian:
        raise PreconditionError("Choi matrix is not Hermitian")
    w, u = np.linalg.eigh((c + c.conj().T) / 2.0)
    top = float(w.max(initial=0.0))
    if float(w.min(initial=0.0)) < -psd_tol * max(1.0, top):
        raise PreconditionError(
            f"Choi matrix is not PSD (min eigenvalue {w.min():.3e})"
        )
    keep = w > psd_tol * max(top, 0.0)
    if not np.any(keep):
        # zero map; represent it with a single zero Kraus operator
        return [np.zeros((m, m), dtype=complex)]
    return [
        unvec(np.sqrt(w[k]) * u[:, k].conj(), m) for k in np.flatnonzero(keep)
    ]


def choi_rank(tau: CpMap, rank_tol: float = RANK_TOL) -> int:
    """Rank of the Choi matrix = dimension of the coefficient space."""
    return numerical_rank(choi_of(tau), rank_tol)


def is_cp(s: SuperOperator, psd_tol: float = PSD_TOL) -> bool:
    """Whether a superoperator represents a CP map (Choi matrix PSD)."""
    c = choi_of_superop(s)
    return psd_report(c, psd_tol * max(1.0, float(np.linalg.norm(c)))).is_psd


@dataclass(frozen=True)
class CoefficientSpace:
    """Orthonormal Hilbert-Schmidt basis of the span of a map's Kraus operators."""

    m: int
    basis: tuple[np.ndarray, ...] = field(default=())

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def projector(self) -> np.ndarray:
        """m^2 x m^2 orthogonal projector onto vec of the space."""
        p = np.zeros((self.m**2, self.m**2), dtype=complex)
        for b in self.basis:
            v = vec(b)
            p += np.outer(v, v.conj())
        return p

    def project(self, x) -> np.ndarray:
        x = as_matrix(x)
        out = np.zeros_like(x)
        for b in self.basis:
            out += complex(np.vdot(b, x)) * b
        return out

    def residual(self, x) -> float:
        return float(np.linalg.norm(as_matrix(x) - self.project(x)))

    def contains(self, x, tol: float = 1e-8) -> bool:
        x = as_matrix(x)
        return self.residual(x) <= tol * max(1.0, float(np.linalg.norm(x)))


def coefficient_space(tau: CpMap, rank_tol: float = RANK_TOL) -> CoefficientSpace:
    """span{A_i} computed from the range of the conjugated Choi matrix.

    Independent of the particular Kraus list: any two lists of the same map
    span the same space, and the dimension equals the Choi rank.
    """
    c = choi_of(tau).conj()
    w, u = np.linalg.eigh((c + c.conj().T) / 2.0)
    top = float(w.max(initial=0.0))
    keep = np.flatnonzero(w > rank_tol * max(top, 0.0)) if top > 0 else []
    basis = tuple(unvec(u[:, k], tau.m) for k in keep)
    return CoefficientSpace(tau.m, basis)


def dominates(tau: CpMap, eta: CpMap, psd_tol: float = PSD_TOL) -> bool:
    """Whether ``tau - eta`` is CP, i.e. Choi(tau) - Choi(eta) is PSD."""
    if tau.m != eta.m:
        raise PreconditionError("maps act on different sides")
    diff = choi_of(tau) - choi_of(eta)
    return psd_report(diff, psd_tol * max(1.0, float(np.linalg.norm(diff)))).is_psd


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    residual: float
    q: float | None = None


def membership(a, tau: CpMap, tol: float = 1e-8) -> MembershipResult:
    """Decide whether ``a`` lies in the coefficient space of ``tau``.

    Decided by subspace projection.  For members, also return the scalar
    certificate ``q = ||lambda||^2 + 1`` built from least-squares expansion
    coefficients of ``a`` in the given Kraus list; ``q * tau - alpha_a`` is
    then CP, which cross-checks the verdict through :func:`dominates`.
    """
    a = as_matrix(a)
    if a.shape != (tau.m, tau.m):
        raise PreconditionError("matrix side does not match the map")
    space = coefficient_space(tau)
    residual = space.residual(a)
    member = residual <= tol * max(1.0, float(np.linalg.norm(a)))
    if not member:
        return MembershipResult(False, residual)
    stacked = np.column_stack([vec(k) for k in tau.kraus])
    lam, *_ = np.linalg.lstsq(stacked, vec(a), rcond=None)
    q = float(np.linalg.norm(lam) ** 2 + 1.0)
    return MembershipResult(True, residual, q)


def canonical_extension(tau: CpMap) -> CpMap:
    """Extension of a CP map on the block algebra to the full matrix algebra.

    The extension first compresses onto the block diagonal and then applies
    the map; its Kraus list is recovered from the Choi matrix, so the result
    does not depend on how the input Kraus list acts off the algebra.
    """
    s = superop_of(tau).matrix
    if not tau.shape.is_full:
        s = s @ compress_superop(tau.shape)
    choi = choi_of_superop(SuperOperator(tau.m, s))
    kraus = kraus_of_choi(choi)
    return CpMap(tuple(kraus), AlgebraShape.full(tau.m))


def preserves_algebra(tau: CpMap, tol: float = 1e-10) -> bool:
    """Whether the Kraus action maps the block algebra into itself."""
    from .algebra import compress

    m, shape = tau.m, tau.shape
    if shape.is_full:
        return True
    for sl in shape.slices():
        for i in range(sl.start, sl.stop):
            for j in range(sl.start, sl.stop):
                e = np.zeros((m, m), dtype=complex)
                e[i, j] = 1.0
                y = tau(e)
                if np.linalg.norm(y - compress(y, shape)) > tol * max(1.0, hs_norm(y)):
                    return False
    return True

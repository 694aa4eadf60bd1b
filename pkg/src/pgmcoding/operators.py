"""Finite-dimensional Hermitian linear algebra.

Operators are carried as complex ``numpy`` arrays.  Every public function
accepts any array-like (including :class:`HermitianOperator`), checks
hermiticity to an absolute tolerance of ``1e-10``, symmetrizes, and returns
a plain ``ndarray``.

Multipartite operators use A-major (``numpy.kron``) ordering: the index of
the first factor varies slowest.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from .errors import (
    DimMismatch,
    DomainError,
    EmptyKeepSet,
    NonHermitian,
    NotPSD,
    NumericalFailure,
    ShapeMismatch,
    ValidationError,
)

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-10
RELATIVE_CUTOFF = 1e-12

SPECTRAL_FUNCTIONS = ("abs", "positive_part", "power", "pseudo_inv_sqrt", "log")


def as_hermitian(a: ArrayLike, name: str = "operator") -> np.ndarray:
    """Validate a square matrix as Hermitian and return its symmetrization.

    Args:
        a: square array-like.
        name: label used in error messages.

    Returns:
        ``(a + a^dagger) / 2`` as a fresh complex array.

    Raises:
        NonHermitian: if ``max |a - a^dagger| > 1e-10``.
        ValidationError: if ``a`` is not a finite square matrix.
    """
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValidationError(f"{name} must be a nonempty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    diff = np.abs(m - m.conj().T)
    dev = float(diff.max())
    if dev > HERMITICITY_TOL:
        i, j = np.unravel_index(int(diff.argmax()), diff.shape)
        raise NonHermitian(f"{name} is not Hermitian", path=f"{name}[{i}][{j}]", deviation=dev)
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True)
class HermitianOperator:
    """Validated, immutable Hermitian matrix.

    Converts to an ``ndarray`` via ``np.asarray`` so it can be passed to any
    function in the library.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_hermitian(self.matrix)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if copy:
            return np.array(self.matrix, dtype=dtype)
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition ``H = U diag(eigenvalues) U^dagger``.

    Eigenvalues are ascending; ``eigenvectors`` holds them as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_dim: int

    def reconstruct(self, values: ArrayLike | None = None) -> np.ndarray:
        """Rebuild ``U diag(values) U^dagger`` (defaults to the eigenvalues)."""
        w = self.eigenvalues if values is None else np.asarray(values)
        u = self.eigenvectors
        return (u * w) @ u.conj().T


@dataclass(frozen=True)
class SubsystemShape:
    """Factor dimensions of a multipartite space, in tensor order."""

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise ShapeMismatch(f"factor dimensions must be positive, got {dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.factor_dims))

    def __len__(self) -> int:
        return len(self.factor_dims)


ShapeLike = Union[SubsystemShape, Sequence[int]]


def _as_shape(shape: ShapeLike) -> SubsystemShape:
    return shape if isinstance(shape, SubsystemShape) else SubsystemShape(tuple(shape))


def default_cutoff(eigenvalues: np.ndarray) -> float:
    """Scale-relative rank threshold ``dim * max|lambda| * 1e-12``."""
    if eigenvalues.size == 0:
        return 0.0
    return eigenvalues.size * float(np.max(np.abs(eigenvalues))) * RELATIVE_CUTOFF


def _eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        w, u = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(u))):
        raise NumericalFailure("eigensolver returned non-finite values")
    return w, u


def spectral_decompose(h: ArrayLike) -> Spectrum:
    """Eigendecomposition of a Hermitian operator.

    Examples:
        >>> spectral_decompose(np.array([[0, 1], [1, 0]])).eigenvalues
        array([-1.,  1.])
    """
    m = as_hermitian(h)
    w, u = _eigh(m)
    return Spectrum(w, u, m.shape[0])


def _map_eigenvalues(w: np.ndarray, f: str, p: float | None, cutoff: float) -> np.ndarray:
    if f == "abs":
        return np.abs(w)
    if f == "positive_part":
        return np.where(w > cutoff, w, 0.0)
    if f == "pseudo_inv_sqrt":
        f, p = "power", -0.5
    if f == "log":
        if np.any(w < -cutoff):
            raise DomainError("log of an operator with a negative eigenvalue",
                              deviation=float(-w.min()))
        out = np.zeros_like(w)
        pos = w > cutoff
        out[pos] = np.log(w[pos])
        return out
    if f == "power":
        if p is None:
            raise ValueError("power requires an exponent p")
        if float(p).is_integer() and p > 0:
            return w ** int(p)
        if np.any(w < -cutoff):
            raise DomainError(f"power {p} of an operator with a negative eigenvalue",
                              deviation=float(-w.min()))
        out = np.zeros_like(w)
        pos = w > cutoff
        out[pos] = w[pos] ** p
        return out
    raise ValueError(f"unknown spectral function {f!r}; expected one of {SPECTRAL_FUNCTIONS}")


def apply_spectral_function(h: ArrayLike, f: str, p: float | None = None,
                            zero_cutoff: float | None = None) -> np.ndarray:
    """Apply a real function to the spectrum of a Hermitian operator.

    Args:
        h: Hermitian operator.
        f: one of ``"abs"``, ``"positive_part"``, ``"power"``,
            ``"pseudo_inv_sqrt"``, ``"log"``.
        p: exponent for ``"power"``.  Positive integer exponents are applied
            exactly to every eigenvalue; any other exponent is a pseudo-power
            that maps eigenvalues with ``|lambda| <= zero_cutoff`` to zero.
        zero_cutoff: eigenvalues with magnitude at most this are treated as
            zero.  Defaults to :func:`default_cutoff`.

    Returns:
        ``U f(Lambda) U^dagger``.

    Raises:
        DomainError: ``log`` or a non-integer power of an operator with an
            eigenvalue below ``-zero_cutoff``.
    """
    spec = spectral_decompose(h)
    cutoff = default_cutoff(spec.eigenvalues) if zero_cutoff is None else zero_cutoff
    if cutoff < 0:
        raise ValueError("zero_cutoff must be nonnegative")
    return spec.reconstruct(_map_eigenvalues(spec.eigenvalues, f, p, cutoff))


def psd_spectrum(a: ArrayLike, name: str = "operator") -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a PSD operator with roundoff clipping.

    Eigenvalues in ``[-1e-10, 0)`` are clipped to zero.

    Returns:
        ``(eigenvalues, eigenvectors)`` with nonnegative eigenvalues.

    Raises:
        NotPSD: if an eigenvalue is below ``-1e-10``.
    """
    w, u = _eigh(as_hermitian(a, name))
    if w[0] < -PSD_TOL:
        raise NotPSD(f"{name} is not positive semidefinite", deviation=float(-w[0]))
    return np.clip(w, 0.0, None), u


def as_psd(a: ArrayLike, name: str = "operator") -> np.ndarray:
    """Validate a PSD operator and return it with clipped spectrum."""
    w, u = psd_spectrum(a, name)
    return (u * w) @ u.conj().T


def support_projector(a: ArrayLike, zero_cutoff: float | None = None) -> np.ndarray:
    """Projector onto the eigenvectors whose eigenvalue exceeds the cutoff."""
    w, u = _eigh(as_hermitian(a))
    cutoff = default_cutoff(w) if zero_cutoff is None else zero_cutoff
    v = u[:, w > cutoff]
    return v @ v.conj().T


def positive_projector(h: ArrayLike, zero_cutoff: float | None = None) -> np.ndarray:
    """Projector ``{H > 0}`` onto the strictly positive eigenspace."""
    return support_projector(h, zero_cutoff)


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimMismatch(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def nc_min(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Noncommutative minimum ``(A + B - |A - B|) / 2``.

    Its trace is the optimal error of discriminating the weighted operators
    ``A`` and ``B``.  Inputs need only be Hermitian.

    Examples:
        >>> np.real(np.diag(nc_min(np.diag([0.6, 0.4]), np.diag([0.4, 0.6]))))
        array([0.4, 0.4])
    """
    a, b = as_hermitian(a, "A"), as_hermitian(b, "B")
    _same_dim(a, b)
    w, u = _eigh(a - b)
    return 0.5 * (a + b - (u * np.abs(w)) @ u.conj().T)


def nc_max(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Noncommutative maximum ``(A + B + |A - B|) / 2``."""
    a, b = as_hermitian(a, "A"), as_hermitian(b, "B")
    _same_dim(a, b)
    w, u = _eigh(a - b)
    return 0.5 * (a + b + (u * np.abs(w)) @ u.conj().T)


def trace_nc_min(a: ArrayLike, b: ArrayLike) -> float:
    """``Tr[A ∧ B] = (Tr A + Tr B - ||A - B||_1) / 2`` without forming the operator."""
    a, b = as_hermitian(a, "A"), as_hermitian(b, "B")
    _same_dim(a, b)
    try:
        w = np.linalg.eigvalsh(a - b)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    return 0.5 * float(np.trace(a).real + np.trace(b).real - np.abs(w).sum())


def trace_nc_max(a: ArrayLike, b: ArrayLike) -> float:
    """``Tr[A ∨ B] = (Tr A + Tr B + ||A - B||_1) / 2``."""
    a, b = as_hermitian(a, "A"), as_hermitian(b, "B")
    return float(np.trace(a).real + np.trace(b).real) - trace_nc_min(a, b)


def nc_quotient(a: ArrayLike, b: ArrayLike, zero_cutoff: float | None = None) -> np.ndarray:
    """Noncommutative quotient ``B^{-1/2} A B^{-1/2}`` on the support of ``B``.

    Args:
        a, b: PSD operators of equal dimension.
        zero_cutoff: rank threshold for the pseudo-inverse of ``B``.

    Raises:
        NotPSD: if either input has an eigenvalue below ``-1e-10``.
        DimMismatch: on unequal dimensions.
    """
    a = as_psd(a, "A")
    wb, ub = psd_spectrum(b, "B")
    _same_dim(a, ub)
    cutoff = default_cutoff(wb) if zero_cutoff is None else zero_cutoff
    s = ub * _map_eigenvalues(wb, "power", -0.5, cutoff)
    q = s.conj().T @ a @ s
    q = ub @ q @ ub.conj().T
    return 0.5 * (q + q.conj().T)


def tensor_product(*ops: ArrayLike) -> np.ndarray:
    """Kronecker product in A-major order.

    Examples:
        >>> np.real(np.diag(tensor_product(np.diag([1, 0]), np.diag([0, 1]))))
        array([0., 1., 0., 0.])
    """
    if not ops:
        raise ValueError("tensor_product needs at least one operator")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def partial_trace(a: ArrayLike, shape: ShapeLike, keep: Iterable[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    Args:
        a: operator on the composite space.
        shape: factor dimensions, e.g. ``(d_R, d_B)``.
        keep: indices of factors to keep; their relative order is preserved.

    Raises:
        ShapeMismatch: if ``shape`` does not match ``a`` or ``keep`` is out of range.
        EmptyKeepSet: if ``keep`` is empty.
    """
    m = np.asarray(a, dtype=complex)
    shape = _as_shape(shape)
    if m.ndim != 2 or m.shape != (shape.dim, shape.dim):
        raise ShapeMismatch(f"shape {shape.factor_dims} does not match operator of shape {m.shape}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise EmptyKeepSet("keep must name at least one factor")
    n = len(shape)
    if keep[0] < 0 or keep[-1] >= n:
        raise ShapeMismatch(f"keep indices {keep} out of range for {n} factors")
    if 2 * n > len(_LETTERS):
        raise ShapeMismatch("too many factors")
    rows = list(_LETTERS[:n])
    cols = [rows[k] if k not in keep else _LETTERS[n + k] for k in range(n)]
    out = [rows[k] for k in keep] + [cols[k] for k in keep]
    t = m.reshape(shape.factor_dims * 2)
    r = np.einsum("".join(rows + cols) + "->" + "".join(out), t)
    d = int(np.prod([shape.factor_dims[k] for k in keep]))
    return r.reshape(d, d)


def permute_subsystems(a: ArrayLike, shape: ShapeLike, order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors; output factor ``i`` is input factor ``order[i]``."""
    m = np.asarray(a, dtype=complex)
    shape = _as_shape(shape)
    n = len(shape)
    if sorted(order) != list(range(n)):
        raise ShapeMismatch(f"{list(order)} is not a permutation of {n} factors")
    if m.shape != (shape.dim, shape.dim):
        raise ShapeMismatch(f"shape {shape.factor_dims} does not match operator of shape {m.shape}")
    t = m.reshape(shape.factor_dims * 2)
    t = t.transpose(list(order) + [n + k for k in order])
    return t.reshape(shape.dim, shape.dim)


def direct_sum(*ops: ArrayLike) -> np.ndarray:
    """Block-diagonal direct sum."""
    mats = [np.atleast_2d(np.asarray(o, dtype=complex)) for o in ops]
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for m in mats:
        k = m.shape[0]
        out[i:i + k, i:i + k] = m
        i += k
    return out

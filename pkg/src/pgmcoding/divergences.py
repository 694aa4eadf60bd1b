"""Closed-form divergences (natural logarithms throughout).

Infinite values are tagged through :class:`DivergenceValue` rather than
represented by a bare float; ``float(value)`` yields ``math.inf`` when a
numeric sentinel is convenient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from numpy.typing import ArrayLike

from .errors import AlphaOutOfRange, POutOfRange, SupportViolation
from .models import CQState
from .operators import _eigh, as_psd, default_cutoff, psd_spectrum

SUPPORT_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-12

KINDS = ("petz", "sandwiched2", "max", "kl", "variance", "ht", "is")


@dataclass(frozen=True)
class DivergenceValue:
    """A divergence value together with its kind and order.

    Attributes:
        value: the value in nats, ``math.inf`` when ``infinite`` is set.
        order: Renyi order, or ``None`` for orderless quantities.
        kind: one of ``KINDS``.
        infinite: tag for divergences that are infinite because of supports.
    """

    value: float
    order: float | None
    kind: str
    infinite: bool = False

    @classmethod
    def inf(cls, kind: str, order: float | None = None) -> "DivergenceValue":
        return cls(math.inf, order, kind, True)

    def __float__(self) -> float:
        return math.inf if self.infinite else float(self.value)

    def __str__(self) -> str:
        return "inf" if self.infinite else repr(self.value)


def _spectrum_parts(a: ArrayLike, name: str):
    w, u = psd_spectrum(a, name)
    cutoff = default_cutoff(w)
    pos = w > cutoff
    return w[pos], u[:, pos]


def _leakage(rho_parts, sigma_parts) -> float:
    """``Tr[rho (I - supp sigma)]``."""
    wr, ur = rho_parts
    _, us = sigma_parts
    overlap = np.abs(us.conj().T @ ur) ** 2
    return float(wr.sum() - (overlap.sum(axis=0) * wr).sum())


def _petz_q(rho_parts, sigma_parts, alpha: float) -> float:
    """``Tr[rho^alpha sigma^(1-alpha)]`` with pseudo-powers on supports."""
    wr, ur = rho_parts
    ws, us = sigma_parts
    overlap = np.abs(ur.conj().T @ us) ** 2
    return float(np.einsum("i,ij,j->", wr ** alpha, overlap, ws ** (1.0 - alpha)))


def _check_alpha(alpha: float) -> None:
    if not (0 < alpha < 1 or 1 < alpha <= 2):
        raise AlphaOutOfRange(f"order must lie in (0,1) or (1,2], got {alpha}")


def petz_renyi(rho: ArrayLike, sigma: ArrayLike, alpha: float) -> DivergenceValue:
    """Petz-Renyi divergence ``log Tr[rho^a sigma^(1-a)] / (a - 1)``.

    Accepts any PSD pair, so it also serves conditional entropies where the
    second argument is not normalized.

    Examples:
        >>> float(petz_renyi(np.diag([.5, .5]), np.diag([.9, .1]), 2.0))  # doctest: +ELLIPSIS
        1.0216512...
    """
    _check_alpha(alpha)
    rp, sp = _spectrum_parts(rho, "rho"), _spectrum_parts(sigma, "sigma")
    if alpha > 1 and _leakage(rp, sp) > SUPPORT_TOL:
        return DivergenceValue.inf("petz", alpha)
    if alpha < 1 and _overlap_weight(rp, sp) <= ORTHOGONALITY_TOL:
        return DivergenceValue.inf("petz", alpha)
    q = _petz_q(rp, sp, alpha)
    return DivergenceValue(math.log(q) / (alpha - 1.0), alpha, "petz")


def _overlap_weight(rho_parts, sigma_parts) -> float:
    """``Tr[supp(rho) supp(sigma)]``; zero exactly for orthogonal supports."""
    _, ur = rho_parts
    _, us = sigma_parts
    return float((np.abs(ur.conj().T @ us) ** 2).sum())


def _log_on_support(parts, dim: int) -> np.ndarray:
    w, u = parts
    return (u * np.log(w)) @ u.conj().T if w.size else np.zeros((dim, dim), dtype=complex)


def relative_entropy(rho: ArrayLike, sigma: ArrayLike) -> DivergenceValue:
    """Umegaki relative entropy ``Tr[rho (log rho - log sigma)]``."""
    rp, sp = _spectrum_parts(rho, "rho"), _spectrum_parts(sigma, "sigma")
    if _leakage(rp, sp) > SUPPORT_TOL:
        return DivergenceValue.inf("kl")
    wr, ur = rp
    ws, us = sp
    overlap = np.abs(ur.conj().T @ us) ** 2
    d = float(wr @ np.log(wr) - np.einsum("i,ij,j->", wr, overlap, np.log(ws)))
    return DivergenceValue(d, None, "kl")


def relative_entropy_variance(rho: ArrayLike, sigma: ArrayLike) -> DivergenceValue:
    """``Tr[rho (log rho - log sigma)^2] - D(rho||sigma)^2``.

    Raises:
        SupportViolation: if the relative entropy is infinite.
    """
    rho_m = as_psd(rho, "rho")
    rp, sp = _spectrum_parts(rho_m, "rho"), _spectrum_parts(sigma, "sigma")
    if _leakage(rp, sp) > SUPPORT_TOL:
        raise SupportViolation("variance undefined: supp(rho) is not inside supp(sigma)")
    dim = rho_m.shape[0]
    diff = _log_on_support(rp, dim) - _log_on_support(sp, dim)
    d = float(np.trace(rho_m @ diff).real)
    second = float(np.trace(rho_m @ diff @ diff).real)
    return DivergenceValue(second - d * d, None, "variance")


def collision_divergence(a: ArrayLike, b: ArrayLike) -> DivergenceValue:
    """Sandwiched order-2 divergence ``log Tr[(B^{-1/4} A B^{-1/4})^2]``."""
    a = as_psd(a, "A")
    ap, bp = _spectrum_parts(a, "A"), _spectrum_parts(b, "B")
    if _leakage(ap, bp) > SUPPORT_TOL:
        return DivergenceValue.inf("sandwiched2", 2.0)
    wb, ub = bp
    s = ub * wb ** -0.25
    x = s.conj().T @ a @ s
    return DivergenceValue(math.log(float(np.sum(np.abs(x) ** 2))), 2.0, "sandwiched2")


def max_relative_entropy(rho: ArrayLike, sigma: ArrayLike) -> DivergenceValue:
    """``D_max = log lambda_max(sigma^{-1/2} rho sigma^{-1/2})``."""
    rho = as_psd(rho, "rho")
    rp, sp = _spectrum_parts(rho, "rho"), _spectrum_parts(sigma, "sigma")
    if _leakage(rp, sp) > SUPPORT_TOL:
        return DivergenceValue.inf("max")
    ws, us = sp
    s = us * ws ** -0.5
    w, _ = _eigh(s.conj().T @ rho @ s)
    return DivergenceValue(math.log(float(w[-1])), None, "max")


def cq_mutual_renyi(state: CQState, alpha: float) -> DivergenceValue:
    """``I_alpha(X:B) = D_alpha(rho_XB || rho_X (x) rho_B)`` evaluated blockwise.

    Uses ``Tr[(p rho_x)^a (p rho_B)^(1-a)] = p^(1-a) Tr[block^a rho_B^(1-a)]``.
    """
    _check_alpha(alpha)
    sp = _spectrum_parts(state.marginal_b, "rho_B")
    q = sum(p ** (1.0 - alpha) * _petz_q(_spectrum_parts(blk, "block"), sp, alpha)
            for p, blk in zip(state.prior, state.blocks))
    return DivergenceValue(math.log(q) / (alpha - 1.0), alpha, "petz")


def cq_conditional_renyi(state: CQState, alpha: float) -> float:
    """``H_alpha(X|B) = -D_alpha(rho_XB || 1_X (x) rho_B)`` evaluated blockwise."""
    _check_alpha(alpha)
    sp = _spectrum_parts(state.marginal_b, "rho_B")
    q = sum(_petz_q(_spectrum_parts(blk, "block"), sp, alpha) for blk in state.blocks)
    return -math.log(q) / (alpha - 1.0)


def cq_mutual_information(state: CQState) -> float:
    """``I(X:B)`` as the relative entropy of the joint to the product of marginals."""
    return float(relative_entropy(state.joint_matrix(), state.product_matrix()))


def cq_information_variance(state: CQState) -> float:
    """Relative entropy variance of ``rho_XB`` against ``rho_X (x) rho_B``."""
    return float(relative_entropy_variance(state.joint_matrix(), state.product_matrix()))


def cq_conditional_entropy(state: CQState) -> float:
    """``H(X|B) = -D(rho_XB || 1_X (x) rho_B)``."""
    ones = np.kron(np.eye(len(state)), state.marginal_b)
    return -float(relative_entropy(state.joint_matrix(), ones))


_STANDARD_NORMAL = NormalDist()


def inverse_normal_cdf(p: float) -> float:
    """Standard normal quantile function.

    Raises:
        POutOfRange: unless ``0 < p < 1``.
    """
    if not 0 < p < 1:
        raise POutOfRange(f"probability must lie in (0, 1), got {p}")
    return _STANDARD_NORMAL.inv_cdf(p)

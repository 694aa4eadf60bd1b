"""State discrimination: Helstrom tests, pretty-good measurements,
Neyman-Pearson tests and the divergences defined through them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike

from .divergences import DivergenceValue, collision_divergence, petz_renyi
from .errors import (
    AllZero,
    DomainError,
    EpsOutOfRange,
    NotNormalized,
    NotPSD,
    NumericalFailure,
    OrderOutOfRange,
    SpectrumOutOfRange,
    SupportFailure,
    ValidationError,
    ZeroTrace,
)
from .models import TRACE_TOL
from .operators import (
    PSD_TOL,
    _eigh,
    as_hermitian,
    as_psd,
    default_cutoff,
    direct_sum,
    nc_quotient,
    positive_projector,
    support_projector,
    trace_nc_max,
    trace_nc_min,
)

TEST_TOL = 1e-9
POVM_TOL = 1e-8
COMPLETION_POLICY = "complement-to-first"
MU_CAP = 1e18
MAX_BISECTIONS = 200


def _tr(a: np.ndarray, b: np.ndarray) -> float:
    """``Tr[a b]`` for Hermitian ``a``, ``b``."""
    return float(np.einsum("ij,ji->", a, b).real)


@dataclass(frozen=True)
class TwoOutcomeTest:
    """Operator ``0 <= T <= I``; spectra within 1e-9 of ``[0, 1]`` are clipped."""

    T: np.ndarray

    def __post_init__(self):
        w, u = _eigh(as_hermitian(self.T, "T"))
        if w[0] < -TEST_TOL or w[-1] > 1 + TEST_TOL:
            raise SpectrumOutOfRange("test spectrum leaves [0, 1]",
                                     deviation=float(max(-w[0], w[-1] - 1)))
        t = (u * np.clip(w, 0.0, 1.0)) @ u.conj().T
        t.flags.writeable = False
        object.__setattr__(self, "T", t)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.T, dtype=dtype) if copy else np.asarray(self.T, dtype=dtype)


@dataclass(frozen=True)
class POVM:
    """Measurement elements summing to the identity."""

    elements: tuple[np.ndarray, ...]
    completion_policy: str = COMPLETION_POLICY

    def __post_init__(self):
        total = sum(self.elements)
        dev = float(np.linalg.norm(total - np.eye(total.shape[0])))
        if dev > POVM_TOL:
            raise NumericalFailure(f"POVM elements do not sum to the identity (deviation {dev:.3g})")


@dataclass(frozen=True)
class NPResult:
    """Neyman-Pearson test with its threshold and error probabilities.

    ``mu`` is ``math.inf`` when the test lives on the kernel of ``sigma``
    (type-II error exactly zero).
    """

    mu: float
    test: TwoOutcomeTest
    type1: float
    type2: float


@dataclass(frozen=True)
class HoeffdingResult:
    type1_bound: float
    type2_bound: float
    type1_actual: float
    type2_actual: float
    mu: float


@dataclass(frozen=True)
class SteinResult:
    """Type-I/II errors of the threshold PGM tuned to a target type-I error."""

    mu: float
    ht_divergence: float
    type1: float
    type2: float
    type1_bound: float
    type2_bound: float


def helstrom(a: ArrayLike, b: ArrayLike) -> tuple[float, TwoOutcomeTest]:
    """Optimal error ``min_T Tr[A(I-T)] + Tr[BT] = Tr[A ∧ B]`` and its test.

    The optimal test is the projector onto the positive part of ``A - B``.

    Examples:
        >>> err, _ = helstrom(np.diag([.5, 0]), np.diag([0, .5]))
        >>> round(err, 12)
        0.0
    """
    a, b = as_psd(a, "A"), as_psd(b, "B")
    return trace_nc_min(a, b), TwoOutcomeTest(positive_projector(a - b))


def _stack_psd(states: Sequence[ArrayLike]) -> np.ndarray:
    if len(states) == 0:
        raise ValidationError("need at least one state")
    mats = [as_hermitian(s, f"states[{i}]") for i, s in enumerate(states)]
    if len({m.shape for m in mats}) != 1:
        raise ValidationError("states have different dimensions")
    stack = np.stack(mats)
    mins = np.linalg.eigvalsh(stack)[:, 0]
    if mins.min() < -PSD_TOL:
        i = int(mins.argmin())
        raise NotPSD("state is not positive semidefinite", path=f"states[{i}]",
                     deviation=float(-mins[i]))
    return stack


def _gram_inverse_sqrt(stack: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """``S^{-1/2}``, the support projector of ``S`` and the trace leaking off it."""
    s = stack.sum(axis=0)
    w, u = _eigh(0.5 * (s + s.conj().T))
    if w[-1] <= 0:
        raise AllZero("the states sum to zero")
    cutoff = default_cutoff(w)
    pos = w > cutoff
    v = u[:, pos]
    x = (v * w[pos] ** -0.5) @ v.conj().T
    return x, v @ v.conj().T, float(np.abs(w[~pos]).sum())


def pgm(weighted_states: Sequence[ArrayLike]) -> POVM:
    """Pretty-good measurement ``Pi_m = S^{-1/2} rho_m S^{-1/2}``, ``S = sum rho_m``.

    The complement of ``supp(S)`` is added to the first element.
    """
    stack = _stack_psd(weighted_states)
    x, proj, _ = _gram_inverse_sqrt(stack)
    elements = [x @ s @ x for s in stack]
    elements = [0.5 * (e + e.conj().T) for e in elements]
    elements[0] = elements[0] + (np.eye(proj.shape[0]) - proj)
    return POVM(tuple(elements))


def pgm_error(weighted_states: Sequence[ArrayLike], *, require_normalized: bool = True) -> float:
    """Average error ``sum_m Tr[rho_m (I - Pi_m)]`` of the pretty-good measurement.

    Args:
        weighted_states: operators ``p_m rho_m`` with priors folded in.
        require_normalized: insist that the traces sum to one.  Disable to
            evaluate sub-normalized families such as one bin of a binning code.

    Raises:
        NotNormalized: total trace differs from one by more than 1e-9.
        NumericalFailure: a state leaks outside the Gram support (cannot
            happen in exact arithmetic; guards against roundoff).
    """
    stack = _stack_psd(weighted_states)
    total = float(np.einsum("mii->", stack).real)
    if require_normalized and abs(total - 1.0) > TRACE_TOL:
        raise NotNormalized("weighted states must have total trace 1",
                            deviation=abs(total - 1.0))
    x, _, leak = _gram_inverse_sqrt(stack)
    if leak > 1e-9:
        raise NumericalFailure(f"states leak {leak:.3g} outside the Gram support")
    y = x @ stack
    hits = float(np.einsum("mij,mji->", y, y).real)
    return max(0.0, total - hits)


def _check_eps(eps: float, name: str = "eps") -> None:
    if not 0 < eps < 1:
        raise EpsOutOfRange(f"{name} must lie in (0, 1), got {eps}")


def _projectors(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto the strictly positive and the numerically zero eigenspaces."""
    w, u = _eigh(h)
    cutoff = default_cutoff(w)
    vp = u[:, w > cutoff]
    v0 = u[:, np.abs(w) <= cutoff]
    return vp @ vp.conj().T, v0 @ v0.conj().T


def neyman_pearson(rho: ArrayLike, sigma: ArrayLike, eps: float,
                   bisect_tol: float = 1e-10) -> NPResult:
    """Optimal test minimizing ``Tr[sigma T]`` subject to ``Tr[rho T] >= 1 - eps``.

    The optimum has the form ``{rho - mu sigma > 0} + t P_0`` where ``P_0``
    projects onto the kernel of ``rho - mu sigma``.  The threshold ``mu`` is
    found by bisection; ``Tr[rho {rho - mu sigma > 0}]`` is nonincreasing in
    ``mu`` because ``lambda -> Tr[(lambda rho - sigma)_+]`` is convex.  When
    the final bracket straddles a jump whose kernel is not resolved
    numerically, the tests at the two ends are mixed.

    Args:
        rho: null hypothesis, a density operator.
        sigma: alternative, a PSD operator.
        eps: type-I error budget in ``(0, 1)``.
        bisect_tol: tolerance on the constraint ``Tr[rho T] = 1 - eps``.

    Raises:
        EpsOutOfRange: unless ``0 < eps < 1``.
        SupportFailure: if no feasible test is found (roundoff guard).
    """
    _check_eps(eps)
    if bisect_tol <= 0:
        raise ValueError("bisect_tol must be positive")
    rho, sigma = as_psd(rho, "rho"), as_psd(sigma, "sigma")
    tr = float(np.trace(rho).real)
    if abs(tr - 1) > TRACE_TOL:
        raise NotNormalized("rho must have unit trace", deviation=abs(tr - 1))
    target = 1.0 - eps
    dim = rho.shape[0]

    def result(mu: float, t: np.ndarray) -> NPResult:
        test = TwoOutcomeTest(t)
        type2 = max(0.0, _tr(sigma, test.T))
        if math.isinf(mu):
            type2 = 0.0
        return NPResult(mu, test, max(0.0, 1.0 - _tr(rho, test.T)), type2)

    kernel = np.eye(dim) - support_projector(sigma)
    mass_k = _tr(rho, kernel)
    if mass_k >= target - 1e-12:
        return result(math.inf, min(1.0, target / mass_k) * kernel)

    def evaluate(mu: float):
        p_pos, p_zero = _projectors(rho - mu * sigma)
        return p_pos, p_zero, _tr(rho, p_pos), _tr(rho, p_zero)

    def settle(mu, p_pos, p_zero, f_pos, f_zero):
        if f_zero > 0:
            t = min(1.0, max(0.0, (target - f_pos) / f_zero))
        else:
            t = 0.0
        return result(mu, p_pos + t * p_zero)

    def hits(f_pos, f_zero) -> bool:
        return f_pos <= target + bisect_tol and f_pos + f_zero >= target - bisect_tol

    wq = np.linalg.eigvalsh(nc_quotient(rho, sigma))
    hi = min(max(float(wq[-1]), 1e-300), MU_CAP)
    hi_eval = evaluate(hi)
    while hi_eval[2] > target + bisect_tol and hi < MU_CAP:
        hi = min(2 * hi, MU_CAP)
        hi_eval = evaluate(hi)
    if hits(*hi_eval[2:]):
        return settle(hi, *hi_eval)
    if hi_eval[2] > target:
        # threshold cap reached; scale the positive projector down to feasibility
        return result(hi, (target / hi_eval[2]) * hi_eval[0])

    lo = 0.0
    lo_eval = evaluate(lo)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        mid_eval = evaluate(mid)
        if hits(*mid_eval[2:]):
            return settle(mid, *mid_eval)
        if mid_eval[2] > target:
            lo, lo_eval = mid, mid_eval
        else:
            hi, hi_eval = mid, mid_eval

    # mix the feasible low-threshold test with the infeasible high-threshold one
    t_lo = lo_eval[0] + lo_eval[1]
    t_hi = hi_eval[0] + hi_eval[1]
    a_lo, a_hi = _tr(rho, t_lo), _tr(rho, t_hi)
    if a_lo < target - bisect_tol:
        raise SupportFailure("no feasible test found")
    w = 1.0 if a_lo == a_hi else min(1.0, max(0.0, (target - a_hi) / (a_lo - a_hi)))
    return result(hi, w * t_lo + (1 - w) * t_hi)


def ht_divergence(rho: ArrayLike, sigma: ArrayLike, eps: float,
                  bisect_tol: float = 1e-10) -> DivergenceValue:
    """Hypothesis-testing divergence ``-log min{Tr[sigma T] : Tr[rho T] >= 1 - eps}``.

    Examples:
        >>> round(float(ht_divergence(np.diag([.5, .5]), np.diag([.9, .1]), .5)), 6)
        2.302585
    """
    res = neyman_pearson(rho, sigma, eps, bisect_tol)
    if math.isinf(res.mu) or res.type2 <= 0:
        return DivergenceValue.inf("ht")
    return DivergenceValue(-math.log(res.type2), None, "ht")


def is_divergence(rho: ArrayLike, sigma: ArrayLike, eps: float,
                  bisect_tol: float = 1e-10) -> DivergenceValue:
    """Information-spectrum divergence ``sup{g : Tr[rho {rho <= e^g sigma}] <= eps}``.

    Bisects over ``g`` on the nondecreasing map
    ``g -> Tr[rho Proj{rho - e^g sigma <= 0}]`` and returns the largest
    point known to satisfy the constraint.
    """
    _check_eps(eps)
    rho, sigma = as_psd(rho, "rho"), as_psd(sigma, "sigma")
    dim = rho.shape[0]

    def below(g: float) -> float:
        h = rho - math.exp(g) * sigma
        w, u = _eigh(h)
        v = u[:, w <= default_cutoff(w)]
        return _tr(rho, v @ v.conj().T)

    kernel = np.eye(dim) - support_projector(sigma)
    if 1.0 - _tr(rho, kernel) <= eps:
        return DivergenceValue.inf("is")
    wq = np.linalg.eigvalsh(nc_quotient(rho, sigma))
    hi = math.log(max(float(wq[-1]), 1e-300)) + 1.0
    while below(hi) <= eps:
        if hi > math.log(MU_CAP):
            return DivergenceValue.inf("is")
        hi += 10.0
    lo = min(-1.0, hi - 10.0)
    while below(lo) > eps:
        if lo < -700:
            raise SupportFailure("information-spectrum bisection found no lower bracket")
        lo -= 10.0
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= bisect_tol:
            break
        mid = 0.5 * (lo + hi)
        if below(mid) <= eps:
            lo = mid
        else:
            hi = mid
    return DivergenceValue(lo, None, "is")


def check_hn_inequality(a: ArrayLike, b: ArrayLike, c: float) -> float:
    """Margin of the operator inequality
    ``I - A/(A+B) <= (1+c)(I-A) + (2+c+1/c) B``.

    Returns:
        Smallest eigenvalue of right side minus left side; the inequality
        holds iff it is nonnegative.

    Raises:
        SpectrumOutOfRange: if ``A`` leaves ``[0, I]`` or ``B`` is not PSD,
            or ``c <= 0``.
    """
    a = as_hermitian(a, "A")
    wa = np.linalg.eigvalsh(a)
    if wa[0] < -PSD_TOL or wa[-1] > 1 + PSD_TOL:
        raise SpectrumOutOfRange("A must satisfy 0 <= A <= I",
                                 deviation=float(max(-wa[0], wa[-1] - 1)))
    b = as_hermitian(b, "B")
    wb = np.linalg.eigvalsh(b)
    if wb[0] < -PSD_TOL:
        raise SpectrumOutOfRange("B must be positive semidefinite", deviation=float(-wb[0]))
    if not c > 0:
        raise SpectrumOutOfRange(f"c must be positive, got {c}")
    eye = np.eye(a.shape[0])
    gap = (1 + c) * (eye - a) + (2 + c + 1 / c) * b - (eye - nc_quotient(a, a + b))
    return float(np.linalg.eigvalsh(0.5 * (gap + gap.conj().T))[0])


def check_trace_chain(a: ArrayLike, b: ArrayLike) -> tuple[float, float, float]:
    """The chain ``Tr[A B/(A+B)] <= Tr[A∨B] Tr[A∧B] / Tr[A+B] <= Tr[A∧B]``.

    Returns:
        ``(lhs, mid, rhs)``.

    Raises:
        ZeroTrace: if ``Tr[A + B] = 0``.
    """
    a, b = as_psd(a, "A"), as_psd(b, "B")
    total = float(np.trace(a + b).real)
    if total <= 0:
        raise ZeroTrace("Tr[A + B] must be positive")
    lhs = _tr(a, nc_quotient(b, a + b))
    rhs = trace_nc_min(a, b)
    mid = trace_nc_max(a, b) * rhs / total
    return lhs, mid, rhs


def collision_step(a: ArrayLike, b: ArrayLike) -> tuple[float, float]:
    """Both sides of the data-processing step used to prove the trace chain.

    Compares ``exp D2*(A⊕B || (A+B)⊕(A+B))`` with the same quantity after
    the measure-and-prepare map built from the Helstrom projectors of
    ``A`` versus ``B``.

    Returns:
        ``(before, after)``; data processing asserts ``before >= after``.
    """
    a, b = as_psd(a, "A"), as_psd(b, "B")
    s = a + b
    pa = positive_projector(a - b)
    meas = direct_sum(pa, np.eye(a.shape[0]) - pa)
    joint, ref = direct_sum(a, b), direct_sum(s, s)

    def prepare(x):
        hit = _tr(x, meas)
        return np.diag([hit, float(np.trace(x).real) - hit])

    before = collision_divergence(joint, ref)
    after = collision_divergence(prepare(joint), prepare(ref))
    return math.exp(float(before)), math.exp(float(after))


def _threshold_pgm(rho: np.ndarray, sigma: np.ndarray, mu: float) -> tuple[float, float]:
    """Type-I and type-II errors of ``{rho/(rho+mu sigma), mu sigma/(rho+mu sigma)}``."""
    s = rho + mu * sigma
    accept = nc_quotient(rho, s)
    reject = nc_quotient(mu * sigma, s)
    return _tr(rho, reject), _tr(sigma, accept)


def hoeffding_pgm(rho: ArrayLike, sigma: ArrayLike, order: float, r: float) -> HoeffdingResult:
    """Threshold-PGM test achieving the one-shot Hoeffding trade-off.

    With ``mu = exp((order-1)/order * D_order + r/order)`` the test
    ``{rho/(rho+mu sigma), mu sigma/(rho+mu sigma)}`` has
    type-I error at most ``exp(-(1-order)/order (D_order - r))`` and
    type-II error at most ``exp(-r)``.  Vacuous bounds are reported as is.

    Raises:
        OrderOutOfRange: unless ``0 < order < 1``.
    """
    if not 0 < order < 1:
        raise OrderOutOfRange(f"order must lie in (0, 1), got {order}")
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    rho, sigma = as_psd(rho, "rho"), as_psd(sigma, "sigma")
    d = petz_renyi(rho, sigma, order)
    type2_bound = math.exp(-r)
    if d.infinite:
        t1, t2 = _threshold_pgm(rho, sigma, 0.0)
        return HoeffdingResult(0.0, type2_bound, t1, t2, 0.0)
    mu = math.exp((order - 1) / order * d.value + r / order)
    t1, t2 = _threshold_pgm(rho, sigma, mu)
    type1_bound = math.exp(-(1 - order) / order * (d.value - r))
    return HoeffdingResult(type1_bound, type2_bound, t1, t2, mu)


def stein_pgm(rho: ArrayLike, sigma: ArrayLike, eps: float, delta: float) -> SteinResult:
    """Threshold-PGM test whose type-I error is at most ``eps``.

    Chooses ``mu = delta exp(D_h^{eps-delta})`` so that
    ``Tr[rho ∧ mu sigma] <= eps - delta + mu exp(-D_h^{eps-delta}) = eps``;
    the type-II error is then at most ``1/mu = exp(-D_h^{eps-delta} + log(1/delta))``.

    Raises:
        DomainError: if ``D_h^{eps-delta}`` is infinite.
    """
    _check_eps(eps)
    if not 0 < delta < eps:
        raise EpsOutOfRange(f"delta must lie in (0, eps), got {delta}")
    rho, sigma = as_psd(rho, "rho"), as_psd(sigma, "sigma")
    dh = ht_divergence(rho, sigma, eps - delta)
    if dh.infinite:
        raise DomainError("hypothesis-testing divergence is infinite; no finite threshold")
    mu = delta * math.exp(dh.value)
    t1, t2 = _threshold_pgm(rho, sigma, mu)
    return SteinResult(mu, dh.value, t1, t2, eps, 1.0 / mu)

"""One-shot achievability bounds for pretty-good-measurement decoding.

Every error bound here has the form ``Tr[rho ∧ sigma]`` for a protocol
specific pair, evaluated blockwise whenever the operators are
block diagonal in a classical register.  Rates and exponents are in nats.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .discrimination import ht_divergence, is_divergence
from .divergences import (
    cq_conditional_entropy,
    cq_conditional_renyi,
    cq_mutual_information,
    cq_mutual_renyi,
    inverse_normal_cdf,
    max_relative_entropy,
)
from .errors import (
    BadM,
    DeltaOutOfRange,
    DomainError,
    EpsOutOfRange,
    GridEmpty,
    MarginalConstraintViolated,
    NonProductPrior,
    ShapeMismatch,
    ValidationError,
)
from .models import (
    PRIOR_TOL,
    CQChannel,
    CQState,
    KrausChannel,
    Precoder,
    apply_kraus,
    build_cq_joint,
    join_label,
    split_label,
)
from .operators import ShapeLike, _as_shape, as_psd, partial_trace, permute_subsystems, tensor_product, trace_nc_min

GRID_STEPS = 99
GRID_INSET = 1e-3
MARGINAL_TOL = 1e-8
TRIVIAL_TOL = 1e-10


@dataclass(frozen=True)
class BoundReport:
    """Result of a bound evaluation.

    Attributes:
        protocol: protocol tag such as ``"cq"`` or ``"mac"``.
        bound: the raw bound; never clamped.
        strengthened_bound: ``(1 - bound/M) bound`` where available.
        diagnostics: ``trivial`` flags a bound that is vacuous because the
            max-relative entropy does not exceed the log message budget;
            ``components`` holds named intermediate traces.
        inputs_digest: short hash of the inputs.
    """

    protocol: str
    bound: float
    strengthened_bound: float | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)
    inputs_digest: str = ""

    @property
    def effective(self) -> float:
        return min(self.bound, 1.0)


@dataclass(frozen=True)
class ExponentReport:
    """Error exponent optimized over a grid of Renyi parameters.

    Attributes:
        rate: coding rate ``R`` in nats.
        grid: ``(alpha, integrand)`` pairs.
        best_alpha: grid point attaining the maximum.
        exponent: maximum integrand.
        information: ``I(X:B)`` for channel coding or ``H(X|B)`` for
            source coding; the exponent is positive iff the rate is on the
            achievable side of it.
    """

    rate: float
    grid: tuple[tuple[float, float], ...]
    best_alpha: float
    exponent: float
    information: float
    inputs_digest: str = ""

    @property
    def positive(self) -> bool:
        return self.exponent > 0


@dataclass(frozen=True)
class RateReport:
    """One-shot rate lower bounds ``log M`` at error ``eps``.

    ``ours`` uses the pretty-good measurement analysis.  ``hayashi_nagaoka``
    is the weaker bound from the operator inequality checked by
    :func:`~pgmcoding.discrimination.check_hn_inequality`, and
    ``beigi_gohari`` the bound from the information-spectrum divergence.
    """

    ours: float
    hayashi_nagaoka: float
    beigi_gohari: float
    ht_divergence: float
    is_divergence: float
    eps: float
    delta: float
    inputs_digest: str = ""

    @property
    def effective(self) -> float:
        return max(0.0, self.ours)


def inputs_digest(*items: Any) -> str:
    """Short SHA-256 digest of numbers, strings and arrays."""
    h = hashlib.sha256()
    for item in items:
        if isinstance(item, np.ndarray):
            a = np.ascontiguousarray(item, dtype=complex)
            h.update(repr(a.shape).encode())
            h.update(a.tobytes())
        elif isinstance(item, (list, tuple)):
            h.update(inputs_digest(*item).encode())
        else:
            h.update(repr(item).encode())
        h.update(b"\x00")
    return h.hexdigest()[:16]


def _channel_digest(protocol: str, ch: CQChannel, *extra: Any) -> str:
    return inputs_digest(protocol, ch.alphabet, ch.prior, *ch.outputs, *extra)


def _check_m(m: int, name: str = "M") -> int:
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise BadM(f"{name} must be a positive integer, got {m}")
    return int(m)


def _block_bound(blocks: Sequence[np.ndarray], refs: Sequence[np.ndarray]) -> list[float]:
    # a zero reference means M = 1, where the bound is exactly 0
    return [trace_nc_min(b, r) if np.any(r) else 0.0 for b, r in zip(blocks, refs)]


def _max_dmax(pairs) -> float:
    return max(float(max_relative_entropy(a, b)) for a, b in pairs)


def cq_bound(ch: CQChannel, m: int) -> BoundReport:
    """Random-coding PGM error bound ``Tr[rho_XB ∧ (M-1) rho_X (x) rho_B]``.

    Evaluated blockwise as ``sum_x p(x) Tr[rho_x ∧ (M-1) rho_B]``.  The
    strengthened bound is ``(1 - bound/M) bound``.

    Examples:
        >>> noiseless = CQChannel.from_states([np.diag([1, 0]), np.diag([0, 1])])
        >>> cq_bound(noiseless, 2).bound
        0.5
    """
    m = _check_m(m)
    ch = ch.supported()
    state = build_cq_joint(ch)
    rho_b = state.marginal_b
    refs = [p * (m - 1) * rho_b for p in state.prior]
    comps = _block_bound(state.blocks, refs)
    bound = float(sum(comps))
    d_max = _max_dmax((o, rho_b) for o in ch.outputs)
    trivial = m >= 2 and math.log(m - 1) >= d_max - TRIVIAL_TOL
    return BoundReport(
        "cq", bound, (1 - bound / m) * bound,
        {"trivial": trivial, "max_relative_entropy": d_max,
         "components": dict(zip(ch.alphabet, comps))},
        _channel_digest("cq", ch, m))


def _alpha_grid(steps: int, inset: float) -> np.ndarray:
    if steps < 1:
        raise GridEmpty("the alpha grid needs at least one point")
    if not 0 < inset < 0.25:
        raise GridEmpty(f"grid inset must lie in (0, 0.25), got {inset}")
    return np.linspace(0.5 + inset, 1 - inset, steps)


def _exponent_report(rate, alphas, values, information, digest) -> ExponentReport:
    values = np.asarray(values)
    k = int(np.argmax(values))
    grid = tuple((float(a), float(v)) for a, v in zip(alphas, values))
    return ExponentReport(float(rate), grid, float(alphas[k]), float(values[k]), information, digest)


def cq_exponent(ch: CQChannel, rate: float, grid_steps: int = GRID_STEPS,
                inset: float = GRID_INSET) -> ExponentReport:
    """Exponent ``max_alpha (1-alpha)/alpha (I_{2-1/alpha}(X:B) - R)`` on a grid in (1/2, 1)."""
    if not rate > 0:
        raise DomainError(f"rate must be positive, got {rate}")
    alphas = _alpha_grid(grid_steps, inset)
    state = build_cq_joint(ch)
    values = [(1 - a) / a * (float(cq_mutual_renyi(state, 2 - 1 / a)) - rate) for a in alphas]
    return _exponent_report(rate, alphas, values, cq_mutual_information(state),
                            _channel_digest("cq-exponent", ch, rate, grid_steps, inset))


def cq_renyi_relaxation(ch: CQChannel, m: int, grid_steps: int = GRID_STEPS,
                        inset: float = GRID_INSET) -> float:
    """``min_alpha (M-1)^s exp(-s I_{2-1/alpha})`` with ``s = (1-alpha)/alpha``.

    This upper bounds :func:`cq_bound` through the Chernoff-type trace
    inequality ``Tr[A ∧ B] <= Tr[A^{1-s} B^s]``.
    """
    m = _check_m(m)
    if m == 1:
        return 0.0
    state = build_cq_joint(ch)
    alphas = _alpha_grid(grid_steps, inset)
    return min((m - 1) ** s * math.exp(-s * float(cq_mutual_renyi(state, 2 - 1 / a)))
               for a in alphas for s in [(1 - a) / a])


def cq_rate(ch: CQChannel, eps: float, delta: float) -> RateReport:
    """One-shot rate bounds at error ``eps`` with slack ``delta``.

    ``ours = D_h^{eps-delta} - log(1/delta)``,
    ``hayashi_nagaoka = D_h^{eps-delta} - log(4/delta^2)`` and
    ``beigi_gohari = D_s^{eps-delta} - log((1-eps)/delta)``, all computed on
    ``rho_XB`` against ``rho_X (x) rho_B``.
    """
    if not 0 < eps < 1:
        raise EpsOutOfRange(f"eps must lie in (0, 1), got {eps}")
    if not 0 < delta < eps:
        raise DeltaOutOfRange(f"delta must lie in (0, eps), got {delta}")
    state = build_cq_joint(ch)
    rho, sigma = state.joint_matrix(), state.product_matrix()
    dh = float(ht_divergence(rho, sigma, eps - delta))
    ds = float(is_divergence(rho, sigma, eps - delta))
    return RateReport(
        dh - math.log(1 / delta),
        dh - math.log(4 / delta ** 2),
        ds - math.log((1 - eps) / delta),
        dh, ds, eps, delta,
        _channel_digest("rate", ch, eps, delta))


def second_order_rate(information: float, variance: float, eps: float, n: int) -> float:
    """Normal approximation ``n I + sqrt(n V) Phi^{-1}(eps) - log(n)/2``.

    The unknown constant-order term is omitted, so the value is an
    approximation rather than a guaranteed achievable rate.
    """
    if variance < 0:
        raise DomainError(f"variance must be nonnegative, got {variance}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not 0 < eps < 1:
        raise EpsOutOfRange(f"eps must lie in (0, 1), got {eps}")
    return n * information + math.sqrt(n * variance) * inverse_normal_cdf(eps) - 0.5 * math.log(n)


def _bipartite(shape: ShapeLike, rho: np.ndarray, name: str) -> tuple[int, int]:
    shape = _as_shape(shape)
    if len(shape) != 2:
        raise ShapeMismatch(f"{name} shape must have two factors, got {shape.factor_dims}")
    if rho.shape != (shape.dim, shape.dim):
        raise ShapeMismatch(f"{name} shape {shape.factor_dims} does not match dimension {rho.shape[0]}")
    return shape.factor_dims


def packing_bound(rho_rb: ArrayLike, shape: ShapeLike, tau_r: ArrayLike, m: int,
                  protocol: str = "packing") -> BoundReport:
    """Packing-lemma bound ``Tr[rho_RB ∧ (M-1) tau_R (x) rho_B]``.

    Args:
        rho_rb: bipartite state on ``R (x) B``.
        shape: ``(d_R, d_B)``.
        tau_r: reference state on ``R`` placed in the unused slots.
        m: number of messages.
    """
    m = _check_m(m)
    rho = as_psd(rho_rb, "rho_RB")
    d_r, _ = _bipartite(shape, rho, "rho_RB")
    tau = as_psd(tau_r, "tau_R")
    if tau.shape != (d_r, d_r):
        raise ShapeMismatch(f"tau_R has dimension {tau.shape[0]}, expected {d_r}")
    ref = tensor_product(tau, partial_trace(rho, shape, [1]))
    bound = trace_nc_min(rho, (m - 1) * ref)
    d_max = float(max_relative_entropy(rho, ref))
    return BoundReport(protocol, bound, None,
                       {"trivial": m >= 2 and math.log(m - 1) >= d_max - TRIVIAL_TOL,
                        "max_relative_entropy": d_max, "components": {}},
                       inputs_digest(protocol, rho, tuple(_as_shape(shape).factor_dims), tau, m))


def ea_bound(ch: KrausChannel, theta_ra: ArrayLike, shape: ShapeLike, m: int) -> BoundReport:
    """Entanglement-assisted bound: the packing bound of ``(id (x) N)(theta_RA)`` with ``tau = theta_R``."""
    theta = as_psd(theta_ra, "theta_RA")
    d_r, _ = _bipartite(shape, theta, "theta_RA")
    rho_rb = apply_kraus(ch, theta, shape, 1)
    return packing_bound(rho_rb, (d_r, ch.out_dim), partial_trace(theta, shape, [0]), m, "ea")


def cqsw_bound(state: CQState, m: int) -> BoundReport:
    """Binning bound ``Tr[rho_XB ∧ (1/M) 1_X (x) rho_B]`` for compression with side information."""
    m = _check_m(m)
    _require_full_support(state)
    rho_b = state.marginal_b
    comps = _block_bound(state.blocks, [rho_b / m] * len(state))
    d_max = _max_dmax((blk, rho_b) for blk in state.blocks)
    return BoundReport(
        "cqsw", float(sum(comps)), None,
        {"trivial": d_max <= -math.log(m) + TRIVIAL_TOL, "max_relative_entropy": d_max,
         "components": dict(zip(state.labels, comps))},
        inputs_digest("cqsw", state.labels, *state.blocks, m))


def _require_full_support(state: CQState) -> None:
    zero = [i for i, p in enumerate(state.prior) if p <= 0]
    if zero:
        raise ValidationError("source prior must have full support", path=f"prior[{zero[0]}]")


def cq_exponent_cqsw(state: CQState, rate: float, grid_steps: int = GRID_STEPS,
                     inset: float = GRID_INSET) -> ExponentReport:
    """Exponent ``max_alpha (1-alpha)/alpha (R - H_{2-1/alpha}(X|B))`` for binning."""
    if not rate > 0:
        raise DomainError(f"rate must be positive, got {rate}")
    _require_full_support(state)
    alphas = _alpha_grid(grid_steps, inset)
    values = [(1 - a) / a * (rate - cq_conditional_renyi(state, 2 - 1 / a)) for a in alphas]
    return _exponent_report(rate, alphas, values, cq_conditional_entropy(state),
                            inputs_digest("cqsw-exponent", state.labels, *state.blocks,
                                          rate, grid_steps, inset))


@dataclass(frozen=True)
class ProductGrid:
    """A c-q state over a product alphabet ``X x Y`` with product prior."""

    x_labels: tuple[str, ...]
    y_labels: tuple[str, ...]
    px: np.ndarray
    py: np.ndarray
    states: tuple[tuple[np.ndarray, ...], ...]  # states[i][j] = rho^{x_i y_j}


def product_grid(state: CQState | CQChannel) -> ProductGrid:
    """Split a c-q state with labels ``"x|y"`` into marginals and conditional states.

    Raises:
        NonProductPrior: if the prior does not factorize within 1e-12 or
            some pair of positive-mass symbols is missing.
    """
    if isinstance(state, CQChannel):
        state = build_cq_joint(state)
    cells = {}
    for label, p, blk in zip(state.labels, state.prior, state.blocks):
        parts = split_label(label)
        if len(parts) != 2:
            raise ValidationError(f"label {label!r} is not of the form 'x|y'")
        if p > 0:
            cells[parts] = (float(p), blk / p)
    xs = tuple(dict.fromkeys(x for x, _ in cells))
    ys = tuple(dict.fromkeys(y for _, y in cells))
    for x in xs:
        for y in ys:
            if (x, y) not in cells:
                raise NonProductPrior(f"pair ({x}, {y}) has zero mass although both marginals are positive")
    px = np.array([sum(cells[(x, y)][0] for y in ys) for x in xs])
    py = np.array([sum(cells[(x, y)][0] for x in xs) for y in ys])
    dev = max(abs(cells[(x, y)][0] - px[i] * py[j]) for i, x in enumerate(xs) for j, y in enumerate(ys))
    if dev > PRIOR_TOL:
        raise NonProductPrior("prior does not factorize as p_X p_Y", deviation=dev)
    states = tuple(tuple(cells[(x, y)][1] for y in ys) for x in xs)
    return ProductGrid(xs, ys, px, py, states)


def mac_bound(state: CQState | CQChannel, m_a: int, m_b: int) -> BoundReport:
    """Multiple-access bound
    ``Tr[rho_XYC ∧ ((M_A-1) rho_X rho_YC + (M_B-1) rho_Y rho_XC + (M_A-1)(M_B-1) rho_X rho_Y rho_C)]``.
    """
    m_a, m_b = _check_m(m_a, "M_A"), _check_m(m_b, "M_B")
    g = product_grid(state)
    nx, ny = len(g.x_labels), len(g.y_labels)
    rho_c_given_y = [sum(g.px[i] * g.states[i][j] for i in range(nx)) for j in range(ny)]
    rho_c_given_x = [sum(g.py[j] * g.states[i][j] for j in range(ny)) for i in range(nx)]
    rho_c = sum(g.px[i] * rho_c_given_x[i] for i in range(nx))
    comps = {}
    for i in range(nx):
        for j in range(ny):
            w = g.px[i] * g.py[j]
            ref = w * ((m_a - 1) * rho_c_given_y[j] + (m_b - 1) * rho_c_given_x[i]
                       + (m_a - 1) * (m_b - 1) * rho_c)
            comps[join_label((g.x_labels[i], g.y_labels[j]))] = trace_nc_min(w * g.states[i][j], ref)
    digest = inputs_digest("mac", g.x_labels, g.y_labels, g.px, g.py,
                           *[s for row in g.states for s in row], m_a, m_b)
    return BoundReport("mac", float(sum(comps.values())), None,
                       {"trivial": False, "components": comps}, digest)


def _induced_channel(labels: Sequence[str], prior: np.ndarray, outputs: Sequence[np.ndarray]) -> CQChannel:
    outs = [0.5 * (o + o.conj().T) / np.trace(o).real for o in outputs]
    return CQChannel(tuple(labels), prior, tuple(outs))


def _precoded_output(ch: CQChannel, x: str, path: str) -> np.ndarray:
    if x not in ch.alphabet:
        raise ValidationError(f"precoder output {x!r} is not a channel symbol", path=path)
    return ch.output(x)


def broadcast_channels(ch: CQChannel, shape: ShapeLike, precoder: Precoder) -> tuple[CQChannel, CQChannel]:
    """Induced channels ``u -> rho_B^u`` and ``v -> rho_C^v`` of a precoded broadcast channel.

    ``rho_B^u = sum_v p(v) Tr_C rho_BC^{x(u,v)}`` and symmetrically for ``C``.
    The prior of ``ch`` itself is ignored.
    """
    shape = _as_shape(shape)
    if len(shape) != 2 or shape.dim != ch.dim:
        raise ShapeMismatch(f"output shape {shape.factor_dims} does not match d = {ch.dim}")
    out = {k: _precoded_output(ch, x, f"map[{join_label(k)}]") for k, x in precoder.mapping.items()}
    rho_b, rho_c = {}, {}
    for key, o in out.items():
        rho_b[key] = partial_trace(o, shape, [0])
        rho_c[key] = partial_trace(o, shape, [1])
    b_states = [sum(pv * rho_b[(u, v)] for v, pv in zip(precoder.v_labels, precoder.v_prior))
                for u in precoder.u_labels]
    c_states = [sum(pu * rho_c[(u, v)] for u, pu in zip(precoder.u_labels, precoder.u_prior))
                for v in precoder.v_labels]
    return (_induced_channel(precoder.u_labels, precoder.u_prior, b_states),
            _induced_channel(precoder.v_labels, precoder.v_prior, c_states))


def broadcast_bounds(ch: CQChannel, shape: ShapeLike, precoder: Precoder,
                     m_b: int, m_c: int) -> tuple[BoundReport, BoundReport]:
    """Bounds ``Tr[rho_UB ∧ (M_B-1) rho_U rho_B]`` and ``Tr[rho_VC ∧ (M_C-1) rho_V rho_C]``."""
    m_b, m_c = _check_m(m_b, "M_B"), _check_m(m_c, "M_C")
    ch_b, ch_c = broadcast_channels(ch, shape, precoder)
    reports = []
    for tag, induced, m in (("broadcast-B", ch_b, m_b), ("broadcast-C", ch_c, m_c)):
        r = cq_bound(induced, m)
        reports.append(BoundReport(tag, r.bound, None, r.diagnostics,
                                   _channel_digest(tag, ch, precoder.mapping, m_b, m_c)))
    return reports[0], reports[1]


def state_info_channel(ch: CQChannel, precoder: Precoder) -> CQChannel:
    """Induced channel ``u -> sum_s p(s) rho^{x(u,s), s}``.

    ``ch`` is indexed by composite labels ``"x|s"``; its prior is ignored.
    The precoder's second variable is the channel state.
    """
    states = []
    for u in precoder.u_labels:
        acc = 0
        for s, ps in zip(precoder.v_labels, precoder.v_prior):
            x = precoder(u, s)
            acc = acc + ps * _precoded_output(ch, join_label((x, s)), f"map[{join_label((u, s))}]")
        states.append(acc)
    return _induced_channel(precoder.u_labels, precoder.u_prior, states)


def state_info_bound(ch: CQChannel, precoder: Precoder, m: int) -> BoundReport:
    """Bound for coding with causal state information: :func:`cq_bound` of the induced channel."""
    r = cq_bound(state_info_channel(ch, precoder), m)
    return BoundReport("state-info", r.bound, r.strengthened_bound, r.diagnostics,
                       _channel_digest("state-info", ch, precoder.mapping, m))


def _check_product_marginal(theta: np.ndarray, shape, keep_a, keep_b, name: str) -> None:
    joint = partial_trace(theta, shape, sorted(keep_a + keep_b))
    prod = tensor_product(partial_trace(theta, shape, keep_a), partial_trace(theta, shape, keep_b))
    dev = float(np.linalg.norm(joint - prod))
    if dev > MARGINAL_TOL:
        raise MarginalConstraintViolated(f"{name} marginal is not a product state", deviation=dev)


def ea_mac_bound(ch: KrausChannel, theta_a: ArrayLike, shape_a: ShapeLike,
                 theta_b: ArrayLike, shape_b: ShapeLike, m_a: int, m_b: int) -> BoundReport:
    """Entanglement-assisted multiple-access bound.

    ``ch`` maps ``A (x) B`` to ``C``; ``theta_a`` lives on ``R_A (x) A`` and
    ``theta_b`` on ``R_B (x) B``.
    """
    m_a, m_b = _check_m(m_a, "M_A"), _check_m(m_b, "M_B")
    ta, tb = as_psd(theta_a, "theta_A"), as_psd(theta_b, "theta_B")
    dra, da = _bipartite(shape_a, ta, "theta_A")
    drb, db = _bipartite(shape_b, tb, "theta_B")
    if ch.in_dim != da * db:
        raise ShapeMismatch(f"channel input dimension {ch.in_dim} differs from d_A d_B = {da * db}")
    theta = permute_subsystems(tensor_product(ta, tb), (dra, da, drb, db), [0, 2, 1, 3])
    rho = apply_kraus(ch, theta, (dra, drb, da * db), 2)
    shape = (dra, drb, ch.out_dim)
    r_a, r_b, c = (partial_trace(rho, shape, [k]) for k in range(3))
    rb_c = partial_trace(rho, shape, [1, 2])
    ra_c = partial_trace(rho, shape, [0, 2])
    term_b = permute_subsystems(tensor_product(r_b, ra_c), (drb, dra, ch.out_dim), [1, 0, 2])
    ref = ((m_a - 1) * tensor_product(r_a, rb_c) + (m_b - 1) * term_b
           + (m_a - 1) * (m_b - 1) * tensor_product(r_a, r_b, c))
    return BoundReport("ea-mac", trace_nc_min(rho, ref), None, {"trivial": False, "components": {}},
                       inputs_digest("ea-mac", *ch.kraus, ta, tb, m_a, m_b))


def ea_broadcast_bounds(ch: KrausChannel, theta: ArrayLike, shape: ShapeLike,
                        out_shape: ShapeLike, m_b: int, m_c: int) -> tuple[BoundReport, BoundReport]:
    """Entanglement-assisted broadcast bounds.

    ``theta`` lives on ``R_B (x) R_C (x) A`` with a product marginal on
    ``R_B R_C``; ``ch`` maps ``A`` to ``B (x) C`` with ``out_shape = (d_B, d_C)``.
    """
    m_b, m_c = _check_m(m_b, "M_B"), _check_m(m_c, "M_C")
    th = as_psd(theta, "theta")
    shape, out_shape = _as_shape(shape), _as_shape(out_shape)
    if len(shape) != 3 or shape.dim != th.shape[0]:
        raise ShapeMismatch("theta shape must be (d_RB, d_RC, d_A)")
    if len(out_shape) != 2 or out_shape.dim != ch.out_dim:
        raise ShapeMismatch("output shape must be (d_B, d_C) with d_B d_C = out_dim")
    _check_product_marginal(th, shape, [0], [1], "R_B R_C")
    d_rb, d_rc, _ = shape.factor_dims
    rho = apply_kraus(ch, th, shape, 2)
    full = (d_rb, d_rc) + out_shape.factor_dims
    reports = []
    for tag, keep, m in (("ea-broadcast-B", [0, 2], m_b), ("ea-broadcast-C", [1, 3], m_c)):
        joint = partial_trace(rho, full, keep)
        sub = (full[keep[0]], full[keep[1]])
        ref = tensor_product(partial_trace(joint, sub, [0]), partial_trace(joint, sub, [1]))
        reports.append(BoundReport(tag, trace_nc_min(joint, (m - 1) * ref), None,
                                   {"trivial": False, "components": {}},
                                   inputs_digest(tag, *ch.kraus, th, m_b, m_c)))
    return reports[0], reports[1]


def ea_state_info_bound(ch: KrausChannel, theta: ArrayLike, shape: ShapeLike, m: int) -> BoundReport:
    """Entanglement-assisted bound with causal state information.

    ``theta`` lives on ``R (x) A (x) S`` with ``theta_RS = theta_R (x) theta_S``;
    ``ch`` maps ``A (x) S`` to ``B``.
    """
    m = _check_m(m)
    th = as_psd(theta, "theta")
    shape = _as_shape(shape)
    if len(shape) != 3 or shape.dim != th.shape[0]:
        raise ShapeMismatch("theta shape must be (d_R, d_A, d_S)")
    _check_product_marginal(th, shape, [0], [2], "R S")
    d_r, d_a, d_s = shape.factor_dims
    if ch.in_dim != d_a * d_s:
        raise ShapeMismatch(f"channel input dimension {ch.in_dim} differs from d_A d_S = {d_a * d_s}")
    rho_rb = apply_kraus(ch, th, (d_r, d_a * d_s), 1)
    r = packing_bound(rho_rb, (d_r, ch.out_dim), partial_trace(th, shape, [0]), m, "ea-state-info")
    return BoundReport("ea-state-info", r.bound, None, r.diagnostics,
                       inputs_digest("ea-state-info", *ch.kraus, th, m))


EA_TASKS = ("ea_mac", "ea_broadcast", "ea_state_info")


def ea_network_bounds(task: str, channel: KrausChannel, **kwargs) -> list[BoundReport]:
    """Dispatch to the entanglement-assisted network bounds by task tag.

    Keyword arguments are those of :func:`ea_mac_bound`,
    :func:`ea_broadcast_bounds` or :func:`ea_state_info_bound`.
    """
    if task == "ea_mac":
        return [ea_mac_bound(channel, **kwargs)]
    if task == "ea_broadcast":
        return list(ea_broadcast_bounds(channel, **kwargs))
    if task == "ea_state_info":
        return [ea_state_info_bound(channel, **kwargs)]
    raise ValidationError(f"unknown task {task!r}; expected one of {EA_TASKS}")

"""Exact and Monte-Carlo random-coding error of pretty-good-measurement decoders.

Each protocol is described by an :class:`Ensemble`: a list of independent
random codebooks (each ``M`` i.i.d. draws from a prior) and a function that
returns the decoding error of one realization.  Exact mode enumerates all
realizations; when the error is invariant under relabelling the messages of
a codebook, realizations are enumerated as multisets with multinomial
weights.  Monte-Carlo mode draws trial ``i`` from a Philox stream keyed by
``(seed, i)``, so results do not depend on how trials are scheduled.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

from .bounds import (
    broadcast_bounds,
    broadcast_channels,
    cq_bound,
    cqsw_bound,
    mac_bound,
    packing_bound,
    product_grid,
    state_info_bound,
    state_info_channel,
    _check_m,
)
from .discrimination import pgm, pgm_error
from .errors import DimensionTooLarge, EnumerationTooLarge, NumericalFailure, ShapeMismatch, ValidationError
from .models import CQChannel, CQState, Precoder
from .operators import ShapeLike, _as_shape, as_psd, partial_trace, permute_subsystems, tensor_product

ENUMERATION_CAP = 4096
DIMENSION_CAP = 64
CERTIFY_TOL = 1e-9
SYMMETRY_TOL = 1e-9
SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class SimulationResult:
    """Expected decoding error with the bound it is checked against.

    Attributes:
        mean_error: exact expectation or Monte-Carlo mean.
        mode: ``"exact"`` or ``"monte_carlo"``.
        trials: number of sampled codebooks (0 for exact).
        std_error: standard error of the mean (0 for exact).
        seed: Monte-Carlo seed, ``None`` for exact.
        bound_checked: the closed-form bound for the same instance.
    """

    mean_error: float
    mode: str
    trials: int
    std_error: float
    seed: int | None
    bound_checked: float

    @property
    def certified(self) -> bool:
        return self.mean_error <= self.bound_checked + 3 * self.std_error + CERTIFY_TOL


@dataclass(frozen=True)
class Codebook:
    """``size`` i.i.d. draws from ``prior``; ``exchangeable`` marks errors
    that are invariant under permuting the draws."""

    prior: np.ndarray
    size: int
    exchangeable: bool = True


@dataclass(frozen=True)
class Ensemble:
    codebooks: tuple[Codebook, ...]
    error: Callable[[tuple[tuple[int, ...], ...]], np.ndarray]


def _realizations(cb: Codebook):
    n = len(cb.prior)
    if cb.exchangeable:
        for combo in itertools.combinations_with_replacement(range(n), cb.size):
            counts = np.bincount(combo, minlength=n)
            mult = math.factorial(cb.size) // math.prod(math.factorial(int(c)) for c in counts)
            yield combo, mult * float(np.prod(cb.prior ** counts))
    else:
        for combo in itertools.product(range(n), repeat=cb.size):
            yield combo, float(np.prod(cb.prior[list(combo)]))


def _enumeration_size(ens: Ensemble) -> int:
    return math.prod(len(cb.prior) ** cb.size for cb in ens.codebooks)


def run_exact(ens: Ensemble, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Exact expected error over all codebook realizations.

    Raises:
        EnumerationTooLarge: if the number of i.i.d. codebooks exceeds ``cap``.
    """
    size = _enumeration_size(ens)
    if size > cap:
        raise EnumerationTooLarge(f"{size} codebooks exceed the enumeration cap {cap}; "
                                  "use Monte-Carlo mode")
    total = 0.0
    for combo in itertools.product(*(list(_realizations(cb)) for cb in ens.codebooks)):
        weight = math.prod(w for _, w in combo)
        if weight > 0:
            total = total + weight * ens.error(tuple(c for c, _ in combo))
    return np.atleast_1d(total)


def _trial(ens: Ensemble, seed: int, i: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, i], dtype=np.uint64)))
    draws = tuple(tuple(int(k) for k in rng.choice(len(cb.prior), size=cb.size, p=cb.prior))
                  for cb in ens.codebooks)
    return np.atleast_1d(ens.error(draws))


def run_mc(ens: Ensemble, trials: int, seed: int, threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo mean and standard error.

    Trial ``i`` is drawn from a Philox generator keyed by ``(seed, i)``;
    per-trial errors are stored by index and reduced in index order.
    """
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise ValidationError(f"trials must be a positive integer, got {trials}")
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < SEED_LIMIT:
        raise ValidationError(f"seed must be an integer in [0, 2**64), got {seed}")
    if threads < 1:
        raise ValidationError(f"threads must be positive, got {threads}")
    if threads == 1:
        rows = [_trial(ens, seed, i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda i: _trial(ens, seed, i), range(trials)))
    values = np.stack(rows)
    mean = values.mean(axis=0)
    std = values.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros_like(mean)
    return mean, std


def _exact_result(value: float, bound: float) -> SimulationResult:
    return SimulationResult(float(value), "exact", 0, 0.0, None, float(bound))


def _mc_result(mean: float, std: float, trials: int, seed: int, bound: float) -> SimulationResult:
    return SimulationResult(float(mean), "monte_carlo", int(trials), float(std), int(seed), float(bound))


# ---------------------------------------------------------------- c-q channel coding

def cq_ensemble(ch: CQChannel, m: int) -> Ensemble:
    """``M`` i.i.d. codewords decoded with the PGM over ``rho_{x(m)} / M``."""
    m = _check_m(m)
    ch = ch.supported()
    outs = np.stack(ch.outputs) / m

    def error(draws):
        (cb,) = draws
        return pgm_error(outs[list(cb)])

    return Ensemble((Codebook(ch.prior, m),), error)


def cq_random_coding_exact(ch: CQChannel, m: int, cap: int = ENUMERATION_CAP) -> SimulationResult:
    """Exact i.i.d. random-coding PGM error, checked against :func:`cq_bound`."""
    (value,) = run_exact(cq_ensemble(ch, m), cap)
    return _exact_result(value, cq_bound(ch, m).bound)


def cq_random_coding_mc(ch: CQChannel, m: int, trials: int, seed: int,
                        threads: int = 1) -> SimulationResult:
    """Monte-Carlo estimate of the random-coding PGM error."""
    mean, std = run_mc(cq_ensemble(ch, m), trials, seed, threads)
    return _mc_result(mean[0], std[0], trials, seed, cq_bound(ch, m).bound)


# ---------------------------------------------------------------- packing

def packing_states(rho_rb: ArrayLike, shape: ShapeLike, tau_r: ArrayLike, m: int) -> list[np.ndarray]:
    """States ``omega^m`` on ``R_1 ... R_M (x) B``: ``rho`` in slot ``m``, ``tau`` elsewhere."""
    rho = as_psd(rho_rb, "rho_RB")
    shape = _as_shape(shape)
    d_r, d_b = shape.factor_dims
    tau = as_psd(tau_r, "tau_R")
    base = tensor_product(rho, *([tau] * (m - 1)))
    in_dims = (d_r, d_b) + (d_r,) * (m - 1)
    states = []
    for k in range(m):
        others = iter(range(2, m + 1))
        order = [0 if slot == k else next(others) for slot in range(m)] + [1]
        states.append(permute_subsystems(base, in_dims, order))
    return states


def packing_exact(rho_rb: ArrayLike, shape: ShapeLike, tau_r: ArrayLike, m: int,
                  dim_cap: int = DIMENSION_CAP) -> SimulationResult:
    """Exact PGM error of position-based decoding, checked against :func:`packing_bound`.

    Raises:
        DimensionTooLarge: if ``d_R^M d_B`` exceeds ``dim_cap``.
        NumericalFailure: if per-message errors differ (they are equal by symmetry).
    """
    m = _check_m(m)
    shape = _as_shape(shape)
    if len(shape) != 2:
        raise ShapeMismatch("shape must be (d_R, d_B)")
    d_r, d_b = shape.factor_dims
    if d_r ** m * d_b > dim_cap:
        raise DimensionTooLarge(f"dimension {d_r ** m * d_b} exceeds the cap {dim_cap}")
    bound = packing_bound(rho_rb, shape, tau_r, m).bound
    states = [s / m for s in packing_states(rho_rb, shape, tau_r, m)]
    povm = pgm(states)
    errs = [float(np.trace(s).real - np.einsum("ij,ji->", s, e).real)
            for s, e in zip(states, povm.elements)]
    if max(errs) - min(errs) > SYMMETRY_TOL:
        raise NumericalFailure(f"per-message errors differ by {max(errs) - min(errs):.3g}")
    return _exact_result(max(0.0, sum(errs)), bound)


# ---------------------------------------------------------------- source coding with side information

def cqsw_ensemble(state: CQState, m: int) -> Ensemble:
    """Uniform random binning of each source symbol, decoded by a PGM per bin."""
    m = _check_m(m)
    blocks = np.stack(state.blocks)

    def error(draws):
        (bins,) = draws
        bins = np.asarray(bins)
        total = 0.0
        for b in set(bins.tolist()):
            members = np.flatnonzero(bins == b)
            if len(members) > 1:
                total += pgm_error(blocks[members], require_normalized=False)
        return total

    return Ensemble((Codebook(np.full(m, 1.0 / m), len(state), exchangeable=False),), error)


def cqsw_exact(state: CQState, m: int, cap: int = ENUMERATION_CAP) -> SimulationResult:
    """Exact expected binning error, checked against :func:`cqsw_bound`."""
    bound = cqsw_bound(state, m).bound
    (value,) = run_exact(cqsw_ensemble(state, m), cap)
    return _exact_result(value, bound)


def cqsw_mc(state: CQState, m: int, trials: int, seed: int, threads: int = 1) -> SimulationResult:
    bound = cqsw_bound(state, m).bound
    mean, std = run_mc(cqsw_ensemble(state, m), trials, seed, threads)
    return _mc_result(mean[0], std[0], trials, seed, bound)


# ---------------------------------------------------------------- multiple access

def mac_ensemble(state: CQState | CQChannel, m_a: int, m_b: int) -> Ensemble:
    """Independent codebooks for both senders, joint PGM over all ``M_A M_B`` outputs."""
    m_a, m_b = _check_m(m_a, "M_A"), _check_m(m_b, "M_B")
    g = product_grid(state)
    grid = np.stack([np.stack(row) for row in g.states]) / (m_a * m_b)

    def error(draws):
        xa, yb = draws
        return pgm_error(grid[np.ix_(list(xa), list(yb))].reshape(-1, *grid.shape[2:]))

    return Ensemble((Codebook(g.px, m_a), Codebook(g.py, m_b)), error)


def mac_exact(state: CQState | CQChannel, m_a: int, m_b: int,
              cap: int = ENUMERATION_CAP) -> SimulationResult:
    """Exact multiple-access random-coding error, checked against :func:`mac_bound`."""
    (value,) = run_exact(mac_ensemble(state, m_a, m_b), cap)
    return _exact_result(value, mac_bound(state, m_a, m_b).bound)


def mac_mc(state: CQState | CQChannel, m_a: int, m_b: int, trials: int, seed: int,
           threads: int = 1) -> SimulationResult:
    mean, std = run_mc(mac_ensemble(state, m_a, m_b), trials, seed, threads)
    return _mc_result(mean[0], std[0], trials, seed, mac_bound(state, m_a, m_b).bound)


# ---------------------------------------------------------------- broadcast

def broadcast_ensemble(ch: CQChannel, shape: ShapeLike, precoder: Precoder,
                       m_b: int, m_c: int) -> Ensemble:
    """Superposition-free precoded broadcast code.

    Bob decodes with the PGM over ``(1/M_C) sum_{m_C} Tr_C rho^{x(u(m_B), v(m_C))}``;
    Charlie symmetrically.  The error function returns ``(err_B, err_C)``.
    """
    m_b, m_c = _check_m(m_b, "M_B"), _check_m(m_c, "M_C")
    broadcast_channels(ch, shape, precoder)  # validates shape and precoder symbols
    shape = _as_shape(shape)
    us, vs = precoder.u_labels, precoder.v_labels
    rb = np.stack([np.stack([partial_trace(ch.output(precoder(u, v)), shape, [0]) for v in vs])
                   for u in us])
    rc = np.stack([np.stack([partial_trace(ch.output(precoder(u, v)), shape, [1]) for v in vs])
                   for u in us])

    def error(draws):
        cu, cv = list(draws[0]), list(draws[1])
        bob = rb[np.ix_(cu, cv)].mean(axis=1) / m_b
        charlie = rc[np.ix_(cu, cv)].mean(axis=0) / m_c
        return np.array([pgm_error(bob), pgm_error(charlie)])

    return Ensemble((Codebook(precoder.u_prior, m_b), Codebook(precoder.v_prior, m_c)), error)


def broadcast_exact(ch: CQChannel, shape: ShapeLike, precoder: Precoder, m_b: int, m_c: int,
                    cap: int = ENUMERATION_CAP) -> tuple[SimulationResult, SimulationResult]:
    """Exact errors of both receivers, checked against :func:`broadcast_bounds`."""
    eb, ec = run_exact(broadcast_ensemble(ch, shape, precoder, m_b, m_c), cap)
    bb, bc = broadcast_bounds(ch, shape, precoder, m_b, m_c)
    return _exact_result(eb, bb.bound), _exact_result(ec, bc.bound)


def broadcast_mc(ch: CQChannel, shape: ShapeLike, precoder: Precoder, m_b: int, m_c: int,
                 trials: int, seed: int, threads: int = 1) -> tuple[SimulationResult, SimulationResult]:
    mean, std = run_mc(broadcast_ensemble(ch, shape, precoder, m_b, m_c), trials, seed, threads)
    bb, bc = broadcast_bounds(ch, shape, precoder, m_b, m_c)
    return (_mc_result(mean[0], std[0], trials, seed, bb.bound),
            _mc_result(mean[1], std[1], trials, seed, bc.bound))


# ---------------------------------------------------------------- causal state information

def state_info_exact(ch: CQChannel, precoder: Precoder, m: int,
                     cap: int = ENUMERATION_CAP) -> SimulationResult:
    """Exact error with the PGM over state-averaged outputs, checked against :func:`state_info_bound`."""
    (value,) = run_exact(cq_ensemble(state_info_channel(ch, precoder), m), cap)
    return _exact_result(value, state_info_bound(ch, precoder, m).bound)


def state_info_mc(ch: CQChannel, precoder: Precoder, m: int, trials: int, seed: int,
                  threads: int = 1) -> SimulationResult:
    mean, std = run_mc(cq_ensemble(state_info_channel(ch, precoder), m), trials, seed, threads)
    return _mc_result(mean[0], std[0], trials, seed, state_info_bound(ch, precoder, m).bound)

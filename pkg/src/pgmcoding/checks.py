"""Randomized property batteries for the noncommutative minimum.

Each battery reports, per property, the worst margin observed; a property
holds when its margin is at least ``-tolerance``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discrimination import check_hn_inequality, check_trace_chain, collision_step
from .ensembles import random_effect, random_psd, random_unitary
from .operators import (
    apply_spectral_function,
    direct_sum,
    nc_max,
    nc_min,
    nc_quotient,
    partial_trace,
    trace_nc_min,
)

FACT_TOL = 1e-9
HN_TOL = 1e-8
CHAIN_TOL = 1e-9
HN_CONSTANTS = (0.1, 1.0, 10.0)
CHERNOFF_S = tuple(np.round(np.arange(0.1, 1.0, 0.1), 1))


@dataclass
class CheckReport:
    name: str
    dim: int
    trials: int
    seed: int
    tolerance: float
    margins: dict[str, float] = field(default_factory=dict)

    def record(self, prop: str, margin: float) -> None:
        self.margins[prop] = min(self.margins.get(prop, np.inf), float(margin))

    @property
    def worst_margin(self) -> float:
        return min(self.margins.values()) if self.margins else 0.0

    @property
    def passed(self) -> bool:
        return self.worst_margin >= -self.tolerance


def _factorizations(d: int) -> list[tuple[int, int]]:
    return [(a, d // a) for a in range(2, d) if d % a == 0]


def _scaled_pair(d: int, rng: np.random.Generator, full_rank: bool = False):
    ranks = [d] if full_rank else list(range(1, d + 1))
    a = random_psd(d, rng, int(rng.choice(ranks)), rng.uniform(0.2, 1.5))
    b = random_psd(d, rng, int(rng.choice(ranks)), rng.uniform(0.2, 1.5))
    return a, b


def _tr(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", a, b).real)


def fact_battery(dim: int, trials: int, seed: int) -> CheckReport:
    """Monotonicity, data processing, concavity, direct sums, the Chernoff
    trace inequality and the PGM lower bound for ``Tr[A ∧ B]``."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("facts", dim, trials, seed, FACT_TOL)
    basis = random_unitary(dim, rng)
    shapes = _factorizations(dim)
    for _ in range(trials):
        a, b = _scaled_pair(dim, rng)
        t = trace_nc_min(a, b)

        rep.record("identity", -np.linalg.norm(nc_min(a, b) + nc_max(a, b) - a - b))

        a2 = a + random_psd(dim, rng, None, rng.uniform(0, 0.5))
        b2 = b + random_psd(dim, rng, None, rng.uniform(0, 0.5))
        rep.record("loewner_monotone", trace_nc_min(a2, b2) - t)

        def dephase(x):
            y = basis.conj().T @ x @ basis
            return basis @ np.diag(np.diag(y)) @ basis.conj().T
        rep.record("data_processing", trace_nc_min(dephase(a), dephase(b)) - t)
        for shape in shapes:
            for keep in ([0], [1]):
                rep.record("data_processing", trace_nc_min(partial_trace(a, shape, keep),
                                                           partial_trace(b, shape, keep)) - t)

        c, d = _scaled_pair(dim, rng)
        tc = trace_nc_min(c, d)
        for lam in (0.25, 0.5, 0.75):
            mixed = trace_nc_min(lam * a + (1 - lam) * c, lam * b + (1 - lam) * d)
            rep.record("concavity", mixed - (lam * t + (1 - lam) * tc))

        lhs = nc_min(direct_sum(a, c), direct_sum(b, d))
        rep.record("direct_sum", -np.linalg.norm(lhs - direct_sum(nc_min(a, b), nc_min(c, d))))

        fa, fb = _scaled_pair(dim, rng, full_rank=True)
        tf = trace_nc_min(fa, fb)
        for s in CHERNOFF_S:
            chern = _tr(apply_spectral_function(fa, "power", 1 - s), apply_spectral_function(fb, "power", s))
            rep.record("chernoff", chern - tf)

        rep.record("pgm_lower_bound", t - _tr(a, nc_quotient(b, a + b)))
    return rep


def hn_battery(dim: int, trials: int, seed: int) -> CheckReport:
    """Operator inequality ``I - A/(A+B) <= (1+c)(I-A) + (2+c+1/c)B`` for ``0 <= A <= I``."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("hn", dim, trials, seed, HN_TOL)
    for k in range(trials):
        a = random_effect(dim, rng)
        b = random_psd(dim, rng, int(rng.integers(1, dim + 1)), rng.uniform(0, 2))
        c = HN_CONSTANTS[k % len(HN_CONSTANTS)]
        rep.record(f"c={c:g}", check_hn_inequality(a, b, c))
    return rep


def trace_chain_battery(dim: int, trials: int, seed: int) -> CheckReport:
    """``Tr[A B/(A+B)] <= Tr[A∨B] Tr[A∧B]/Tr[A+B] <= Tr[A∧B]`` and the
    collision-divergence data-processing step behind it."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("trace-chain", dim, trials, seed, CHAIN_TOL)
    for _ in range(trials):
        a, b = _scaled_pair(dim, rng)
        lhs, mid, rhs = check_trace_chain(a, b)
        rep.record("lhs<=mid", mid - lhs)
        rep.record("mid<=rhs", rhs - mid)
        before, after = collision_step(a, b)
        rep.record("collision_step", before - after)
    return rep


BATTERIES = {"facts": fact_battery, "hn": hn_battery, "trace-chain": trace_chain_battery}

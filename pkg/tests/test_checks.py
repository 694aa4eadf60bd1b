import pytest

from pgmcoding.checks import BATTERIES, CheckReport, fact_battery, hn_battery, trace_chain_battery

FACT_PROPS = {"identity", "loewner_monotone", "data_processing", "concavity", "direct_sum", "chernoff",
              "pgm_lower_bound"}


@pytest.mark.parametrize("dim", [2, 3, 4, 6])
def test_fact_battery(dim):
    rep = fact_battery(dim, 40, seed=dim)
    assert rep.passed, rep.margins
    assert FACT_PROPS <= set(rep.margins)


@pytest.mark.parametrize("dim", [1, 2, 5])
def test_hn_battery(dim):
    rep = hn_battery(dim, 60, seed=1)
    assert rep.passed and rep.worst_margin >= -rep.tolerance


@pytest.mark.parametrize("dim", [2, 4])
def test_trace_chain_battery(dim):
    rep = trace_chain_battery(dim, 60, seed=2)
    assert rep.passed
    assert set(rep.margins) == {"lhs<=mid", "mid<=rhs", "collision_step"}


def test_reproducible():
    assert fact_battery(3, 10, 5).margins == fact_battery(3, 10, 5).margins


def test_report_keeps_minimum():
    rep = CheckReport("x", 2, 1, 0, 1e-9)
    rep.record("p", 0.5)
    rep.record("p", -2e-9)
    rep.record("p", 1.0)
    assert rep.margins == {"p": -2e-9} and not rep.passed
    assert CheckReport("y", 2, 1, 0, 1e-9).passed


def test_registry():
    assert set(BATTERIES) == {"facts", "hn", "trace-chain"}

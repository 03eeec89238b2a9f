"""Utility oracle: truncation, floor, ledger accounting."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from splitedge.bundled import default_problem, default_surface
from splitedge.system_model import Budget, CostBreakdown, SplitConfig
from splitedge.utility import (BudgetExhausted, EvalLedger, UtilitySurface, load_surface,
                               skipped_tail_layers, utility, write_surface)

BUDGET = Budget(5.0, 5.0)


def cost(energy=1.0, delay=4.0):
    feasible = energy <= 5.0 and delay <= 5.0
    return CostBreakdown(e_compute_j=energy, e_transmit_j=0.0, tau_device_s=delay,
                         tau_transmit_s=0.0, tau_server_s=0.0, feasible=feasible)


def test_feasible_returns_base():
    surf = default_surface()
    assert utility(SplitConfig(7, 0.4), cost(), surf, BUDGET, EvalLedger(1)) == 0.875


def test_energy_overrun_is_floor():
    surf = default_surface()
    assert utility(SplitConfig(7, 0.4), cost(energy=5.1), surf, BUDGET, EvalLedger(1)) == 0.01


def test_huge_delay_hits_floor():
    surf = default_surface()
    assert utility(SplitConfig(7, 0.4), cost(delay=1e6), surf, BUDGET, EvalLedger(1)) == 0.01
    assert utility(SplitConfig(7, 0.4), cost(delay=math.inf), surf, BUDGET, EvalLedger(1)) == 0.01


def test_bundled_mid_overrun_hand_value():
    """Layer 7 at 0.2 W on the bundled benchmark.

    Independent recomputation gives delay 7.34157 s, so the overrun
    fraction is 2.34157/7.34157 = 0.3189 of 37 layers -> ceil(11.8) = 12
    skipped, and 0.875 - 12 * 0.03 = 0.515.
    """
    prob = default_problem()
    c = prob.cost(SplitConfig(7, 0.2))
    assert c.delay_s == pytest.approx(7.34156829540417934840831314798, rel=1e-12)
    assert skipped_tail_layers(c.delay_s, 5.0, 37) == 12
    assert utility(SplitConfig(7, 0.2), c, prob.surface, BUDGET, EvalLedger(1)) == \
        pytest.approx(0.515, abs=1e-12)


def test_skipped_rounds_up():
    # overrun fraction 1/6 of 12 layers is exactly 2
    assert skipped_tail_layers(6.0, 5.0, 12) == 2
    assert skipped_tail_layers(6.0, 5.0, 13) == 3
    assert skipped_tail_layers(5.0, 5.0, 13) == 0


@given(st.integers(1, 37), st.floats(0, 20), st.floats(0, 10))
def test_bounds(layer, delay, energy):
    surf = default_surface()
    u = utility(SplitConfig(layer, 0.3), cost(energy, delay), surf, BUDGET, EvalLedger(1))
    assert surf.floor <= u <= surf.base_accuracy[layer - 1]


def test_ledger_caps():
    ledger = EvalLedger(2)
    surf = default_surface()
    for _ in range(2):
        utility(SplitConfig(7, 0.4), cost(), surf, BUDGET, ledger)
    assert ledger.count == 2 and ledger.remaining == 0
    with pytest.raises(BudgetExhausted):
        utility(SplitConfig(7, 0.4), cost(), surf, BUDGET, ledger)
    assert ledger.count == 2


def test_surface_validation():
    with pytest.raises(ValueError):
        UtilitySurface((0.5, 1.2))
    with pytest.raises(ValueError):
        UtilitySurface((0.5, 0.005), floor=0.01)


def test_bundled_surface_shape():
    acc = default_surface().base_accuracy
    assert len(acc) == 37
    assert max(acc) == 0.875 and acc.index(0.875) == 6
    assert set(acc) == {0.875, 0.84375}


def test_surface_roundtrip(tmp_path):
    surf = default_surface()
    write_surface(surf, tmp_path / "s.csv")
    assert load_surface(tmp_path / "s.csv").base_accuracy == surf.base_accuracy

from fractions import Fraction

import pytest

from bsregen.model import (
    CostLedger,
    InvalidParams,
    RepairVariables,
    SystemParams,
    as_fraction,
    require_valid,
    selector,
    validate_params,
    variable_violations,
)


def test_decimal_inputs_become_exact():
    assert as_fraction(1.1) == Fraction(11, 10)
    assert as_fraction("2/3") == Fraction(2, 3)
    assert as_fraction(Fraction(5, 7)) == Fraction(5, 7)


def test_as_fraction_rejects_non_finite():
    with pytest.raises((ValueError, OverflowError)):
        as_fraction(float("inf"))


def test_two_layer_params_are_valid(two_layer):
    assert validate_params(two_layer) == []
    assert two_layer.M == 2
    assert two_layer.w == (Fraction(11, 10), Fraction(17, 10))


def test_too_many_helpers_flagged():
    p = SystemParams(4, 2, 3, 2, (1.1, 1.7), (1, 1), 4)
    assert "d <= n - t" in validate_params(p)


def test_descending_weights_flagged():
    p = SystemParams(4, 2, 2, 2, (1.4, 1.2), (1, 1), 4)
    assert "w non-descending" in validate_params(p)


@pytest.mark.parametrize("kwargs, problem", [
    (dict(n=4, k=3, d=2, t=1), "k <= d"),
    (dict(n=4, k=2, d=2, t=0), "t >= 1"),
    (dict(n=4, k=2, d=2, t=2, F=0), "F > 0"),
    (dict(n=4, k=2, d=2, t=2, w=(0.5,), b=(1,)), "w_l >= 1"),
    (dict(n=4, k=2, d=2, t=2, w=(1,), b=(-1,)), "b_l >= 0"),
])
def test_each_invariant_reported(kwargs, problem):
    assert problem in validate_params(SystemParams(**kwargs))


def test_require_valid_raises_with_all_problems():
    with pytest.raises(InvalidParams) as info:
        require_valid(SystemParams(4, 3, 2, 3, (2, 1), (1, 1)))
    assert len(info.value.problems) >= 3


def test_mismatched_layer_lengths():
    with pytest.raises(ValueError):
        SystemParams(4, 2, 2, 2, (1, 2), (1,))


@pytest.mark.parametrize("rho, M, s", [(0, 3, (0, 0, 0)), (2, 4, (1, 1, 0, 0)), (4, 4, (1, 1, 1, 1))])
def test_selector_prefix(rho, M, s):
    assert selector(rho, M).s == s


def test_selector_range():
    with pytest.raises(ValueError):
        selector(3, 2)


def test_make_derives_rho_from_last_nonzero():
    v = RepairVariables.make(1, 1, (1, 0, "1/2", 0))
    assert v.selector.rho == 3
    assert v.used_r() == (1, 0, Fraction(1, 2), 0)


def test_variable_violations(two_layer):
    ok = RepairVariables.make(0.5, 0.5, (1, 1))
    assert variable_violations(two_layer, ok) == []
    assert variable_violations(two_layer, RepairVariables.make(3, 0, (0, 0))) == ["0 <= beta <= F/d"]
    assert "0 <= r_l <= b_l" in variable_violations(two_layer, RepairVariables.make(1, 1, (2, 0)))
    off = RepairVariables(Fraction(1), Fraction(1), (Fraction(1), Fraction(0)), selector(0, 2))
    assert "r_l = 0 where s_l = 0" in variable_violations(two_layer, off)


def test_ledger_prices_bs_symbols_by_weight():
    led = CostLedger((Fraction(11, 10), Fraction(17, 10)), Fraction(1, 2), 2, 1, [1, 1])
    assert led.total_symbols == 5
    assert led.data_moved == Fraction(5, 2)
    assert led.total_cost == Fraction(29, 10)
    led.merge(CostLedger(led.weights, led.symbol_size, 2, 1, [1, 1]))
    assert led.total_cost == Fraction(29, 5)


def test_ledger_merge_rejects_other_prices():
    a = CostLedger((1,), 1)
    with pytest.raises(ValueError):
        a.merge(CostLedger((2,), 1))

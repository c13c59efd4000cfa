import pytest

from graypool import (
    Address,
    BudgetExhaustedError,
    InfeasibleError,
    balance_of,
    balance_penalty,
    balance_target,
    bba,
    length_bound,
    validate,
)


def test_balance_target_spreads_remainder():
    assert balance_target(5, 2, 7) == (3, 3, 3, 3, 2)
    assert balance_target(6, 2, 15) == (5, 5, 5, 5, 5, 5)
    assert sum(balance_target(13, 3, 271)) == 3 * 271
    assert max(balance_target(13, 3, 271)) - min(balance_target(13, 3, 271)) <= 1


def test_balance_penalty_values():
    assert balance_penalty((2, 2, 2), (2, 2, 2)) == 0.0
    # Shift-invariant: a uniformly missed target still scores zero.
    assert balance_penalty((4, 4, 4), (2, 2, 2)) == 0.0
    assert balance_penalty((1, 0, 1, 0), (0, 0, 0, 0)) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        balance_penalty((1, 2), (1, 2, 3))


def test_constructs_full_length_code():
    first = Address.from_index_set(5, (2, 3))
    code = bba(5, 2, 10, first, seed=0)
    report = validate(code)
    assert report.is_valid
    assert report.meets_bound
    assert code.addresses[0] == first
    assert report.balance.deviation == 0


def test_single_address_request():
    first = Address.from_index_set(6, (1, 4))
    code = bba(6, 2, 1, first, seed=3)
    assert code.addresses == (first,)


def test_infeasible_length_rejected():
    with pytest.raises(InfeasibleError):
        bba(4, 2, 6)


def test_parameter_errors():
    with pytest.raises(ValueError):
        bba(4, 4, 1)
    with pytest.raises(ValueError):
        bba(4, 2, 0)
    with pytest.raises(ValueError):
        bba(5, 2, 4, Address.from_index_set(5, (1, 2, 3)))
    with pytest.raises(ValueError):
        bba(5, 2, 4, target_balance=(1, 1))
    with pytest.raises(ValueError):
        bba(5, 2, 4, target_balance=(90, 90, 90, 90, 90))


def test_budget_exhaustion_raises():
    with pytest.raises(BudgetExhaustedError):
        bba(5, 2, 10, budget=5)


def test_deterministic_across_runs():
    a = bba(10, 3, 60, seed=7)
    b = bba(10, 3, 60, seed=7)
    assert a == b
    c = bba(10, 3, 60, seed=8)
    assert validate(c).is_valid


def test_random_first_address_is_seeded():
    a = bba(8, 3, 30, seed=5)
    b = bba(8, 3, 30, seed=5)
    assert a.addresses[0] == b.addresses[0]


def test_union_penalty_variants_both_valid():
    include = bba(9, 3, 50, seed=1, union_bits_in_penalty=True)
    exclude = bba(9, 3, 50, seed=1, union_bits_in_penalty=False)
    assert validate(include).is_valid
    assert validate(exclude).is_valid


def test_full_enumeration_codes_reach_perfect_balance():
    # Any valid code using every weight-r address has equal pool counts.
    for m, r in [(5, 2), (6, 2)]:
        code = bba(m, r, length_bound(m, r), seed=0)
        assert balance_of(code).deviation == 0


def test_respects_supplied_target():
    target = (6, 6, 6, 6, 3, 3)
    code = bba(6, 2, 15, target_balance=target, seed=0)
    assert validate(code).is_valid


@pytest.mark.parametrize("m,r,n", [(10, 4, 150), (12, 3, 150), (14, 4, 350)])
def test_moderate_instances_stay_balanced(m, r, n):
    code = bba(m, r, n, seed=0, budget=10**7)
    report = validate(code)
    assert report.is_valid
    assert code.n == n
    assert report.balance.deviation <= 8

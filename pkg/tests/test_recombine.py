import pytest

from graypool import (
    Address,
    CombinePreconditionError,
    ClosingUnionNotFoundError,
    ConstructionError,
    GrayCode,
    InfeasibleError,
    apply_row_permutation,
    augment,
    balance_of,
    build_maximal,
    combine_pair,
    consecutive_unions,
    find_closing_union,
    flip_complement,
    length_bound,
    rcbba,
    rcbba_detailed,
    to_incidence,
    validate,
)


def test_augment_appends_constant_rows(code_5_1_5):
    aug = augment(code_5_1_5, "+--")
    assert aug.plus_rows == 1 and aug.minus_rows == 2
    out = aug.code
    assert out.m == 8 and out.r == 2
    mat = to_incidence(out)
    assert mat.rows[5] == (1,) * 5
    assert mat.rows[6] == (0,) * 5
    assert mat.rows[7] == (0,) * 5
    assert validate(out).is_valid


def test_augment_single_plus_on_vector():
    one = GrayCode.from_index_sets(6, 3, [(1, 2, 6)])
    out = augment(one, "+").code
    assert out.addresses[0].bit_vector() == (1, 1, 0, 0, 0, 1, 1)


def test_augment_empty_spec_is_identity(code_5_2_10):
    assert augment(code_5_2_10, "").code == code_5_2_10


def test_augment_rejects_unknown_op(code_5_2_10):
    with pytest.raises(ValueError):
        augment(code_5_2_10, "+x")


def test_combine_pair_reproduces_known_matrix(code_5_1_5, code_5_2_10, code_6_2_15):
    combined = combine_pair(code_5_1_5, code_5_2_10)
    assert combined == code_6_2_15
    report = validate(combined)
    assert report.is_valid
    assert report.meets_bound
    assert report.balance.deviation == 0


def test_combine_pair_equals_augmented_concatenation(code_5_1_5, code_5_2_10):
    combined = combine_pair(code_5_1_5, code_5_2_10)
    plus = augment(code_5_1_5, "+").code
    minus = augment(code_5_2_10, "-").code
    assert combined.addresses == plus.addresses + minus.addresses


def test_combine_pair_checks_subset_condition(code_5_1_5, code_5_2_10):
    reordered = GrayCode(5, 2, code_5_2_10.addresses[::-1])
    with pytest.raises(CombinePreconditionError, match="subset"):
        combine_pair(code_5_1_5, reordered)


def test_combine_pair_checks_union_freshness():
    light = GrayCode.from_index_sets(4, 1, [(2,), (3,), (1,)])
    heavy = GrayCode.from_index_sets(4, 2, [(1, 3), (3, 4), (2, 4)])
    # The joining union {1,3} duplicates a consecutive union of the light code.
    with pytest.raises(CombinePreconditionError, match="union"):
        combine_pair(light, heavy)


def test_combine_pair_checks_shapes(code_5_1_5, code_5_2_10):
    with pytest.raises(CombinePreconditionError, match="weights"):
        combine_pair(code_5_2_10, code_5_2_10)
    with pytest.raises(CombinePreconditionError, match="pool counts"):
        combine_pair(code_5_1_5, augment(code_5_2_10, "-").code)


def test_row_permutation_identity_and_reversal(code_5_2_10):
    assert apply_row_permutation(code_5_2_10, [1, 2, 3, 4, 5]) == code_5_2_10
    reversed_code = apply_row_permutation(code_5_2_10, [5, 4, 3, 2, 1])
    assert validate(reversed_code).is_valid
    assert reversed_code != code_5_2_10


def test_row_permutation_moves_balance_counts():
    code = GrayCode.from_index_sets(4, 2, [(1, 2), (1, 3), (1, 4)])
    permuted = apply_row_permutation(code, [4, 1, 2, 3])
    assert balance_of(code).counts == (3, 1, 1, 1)
    assert balance_of(permuted).counts == (1, 1, 1, 3)


def test_row_permutation_rejects_non_bijection(code_5_2_10):
    with pytest.raises(ValueError):
        apply_row_permutation(code_5_2_10, [1, 1, 2, 3, 4])


def test_closing_union_of_full_length_code_is_exhausted(code_5_2_10):
    # All three weight-3 supersets of the last address already occur as unions.
    with pytest.raises(ClosingUnionNotFoundError):
        find_closing_union(code_5_2_10)


def test_closing_union_prefers_smallest_index_set():
    single = GrayCode.from_index_sets(5, 2, [(2, 4)])
    assert find_closing_union(single).index_set == (1, 2, 4)


def test_closing_union_skips_used_unions(code_5_1_5):
    assert find_closing_union(code_5_1_5).index_set == (1, 3)


def test_flip_complement_builds_heavy_code(code_5_1_5):
    closing = find_closing_union(code_5_1_5)
    flipped = flip_complement(code_5_1_5, closing)
    assert (flipped.m, flipped.r, flipped.n) == (5, 3, 5)
    assert validate(flipped).is_valid
    assert all(a.weight == 3 for a in flipped.addresses)


def test_flip_complement_is_an_involution_on_the_path(code_5_1_5):
    closing = find_closing_union(code_5_1_5)
    path = [u.bits for u in consecutive_unions(code_5_1_5)] + [closing.bits]
    flipped = flip_complement(code_5_1_5, closing)
    full = (1 << 5) - 1
    assert [full ^ a.bits for a in flipped.addresses] == path


def test_flip_complement_rejects_bad_closing(code_5_1_5):
    with pytest.raises(ValueError):
        flip_complement(code_5_1_5, Address.from_index_set(5, (1, 2)))


def test_rcbba_constructs_valid_code_with_trace():
    code, trace = rcbba_detailed(6, 2, 12, seed=0)
    report = validate(code)
    assert report.is_valid and code.n == 12
    # First block is placed without relabeling, so it fills the last pool.
    assert trace.consumed_pools[0] == 6
    assert sum(trace.component_lengths) == 12
    assert trace.component_lengths[-1] == 12 - sum(trace.component_lengths[:-1])
    assert trace.deviation_bound is not None
    assert balance_of(code).deviation <= trace.deviation_bound


def test_rcbba_rejects_overlong_request():
    with pytest.raises(InfeasibleError):
        rcbba(5, 2, 11)


def test_rcbba_near_bound_requests_can_exhaust():
    # The block lengths are pinned to pool targets, so the closing regime is
    # left needing 6 addresses where only 5 fit; the run must fail, not
    # return a short code.
    with pytest.raises(ConstructionError):
        rcbba(6, 2, 15, budget=10**5)


def test_rcbba_degenerate_regimes():
    narrow = rcbba(4, 2, 5, seed=1)  # m <= 2r: one targeted search
    assert validate(narrow).is_valid and narrow.n == 5
    chain = rcbba(7, 1, 6, seed=1)  # weight 1 has no lighter blocks
    assert validate(chain).is_valid and chain.n == 6
    tiny = rcbba(9, 2, 3, seed=1)  # n*r < m starves the residuals
    assert validate(tiny).is_valid and tiny.n == 3


def test_rcbba_is_deterministic():
    a = rcbba(12, 4, 150, seed=11)
    b = rcbba(12, 4, 150, seed=11)
    assert a == b


def test_rcbba_deviation_stays_within_trace_bound():
    code, trace = rcbba_detailed(18, 6, 1000, seed=0)
    assert validate(code).is_valid
    dev = balance_of(code).deviation
    assert dev <= trace.deviation_bound
    assert dev <= 8


def test_rcbba_trace_serializes():
    _, trace = rcbba_detailed(10, 4, 150, seed=0)
    obj = trace.to_json_dict()
    assert obj["component_lengths"] == list(trace.component_lengths)
    assert obj["deviation_bound"] == trace.deviation_bound


def test_rcbba_runs_that_close_early_skip_the_final_block():
    # With this seed the last iterative block lands exactly on the target
    # length, so no closing block runs and no deviation bound is available.
    code, trace = rcbba_detailed(14, 3, 150, seed=4)
    assert validate(code).is_valid and code.n == 150
    assert trace.deviation_bound is None
    assert sum(trace.component_lengths) == 150


def test_rcbba_every_prefix_is_a_valid_code():
    code, trace = rcbba_detailed(10, 4, 150, seed=3)
    cut = 0
    for length in trace.component_lengths:
        cut += length
        prefix = GrayCode(code.m, code.r, code.addresses[:cut])
        assert validate(prefix).is_valid


def test_rcbba_consumed_pools_land_on_their_targets():
    # Each iterative block tops its consumed pool up to the near-uniform
    # target, so those pools end within one of the floored average.
    m, r, n = 12, 4, 350
    code, trace = rcbba_detailed(m, r, n, seed=0)
    counts = balance_of(code).counts
    floor_avg = (r * n) // m
    for pool in trace.consumed_pools:
        assert counts[pool - 1] in (floor_avg, floor_avg + 1)


@pytest.mark.parametrize(
    "m,r,expected_n",
    [(5, 2, 10), (6, 2, 15), (4, 2, 5), (5, 3, 6), (6, 3, 16), (3, 2, 2)],
)
def test_build_maximal_meets_bound(m, r, expected_n):
    assert length_bound(m, r) == expected_n
    code = build_maximal(m, r, seed=0)
    report = validate(code)
    assert report.is_valid
    assert report.meets_bound
    assert code.n == expected_n


def test_build_maximal_full_enumeration_is_perfectly_balanced():
    assert balance_of(build_maximal(5, 2)).deviation == 0
    assert balance_of(build_maximal(6, 2)).deviation == 0


def test_build_maximal_rejects_bad_parameters():
    with pytest.raises(ValueError):
        build_maximal(3, 3)
    with pytest.raises(ValueError):
        build_maximal(4, 0)

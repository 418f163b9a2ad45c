import pytest

from grandkit.patterns import (PatternBudget, count_queries, lambda_max,
                               max_feasible_size, partitions_of, pattern_stream)


def brute_distinct_partitions(m, p_max, max_part):
    """Independent oracle: choose the largest part first, recurse on the rest."""
    out = []

    def rec(remaining, cap, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        if p_max is not None and len(acc) == p_max:
            return
        for first in range(min(remaining, cap, max_part), 0, -1):
            acc.append(first)
            rec(remaining - first, first - 1, acc)
            acc.pop()

    rec(m, m, [])
    return out


def test_lambda_max_pairs():
    # largest second part of a 2-part partition of 10 is 4, i.e. (6, 4)
    assert lambda_max(10, 2, ()) == 4


def test_lambda_max_triples():
    assert lambda_max(10, 3, ()) == 2  # (5, 3, 2)


def test_lambda_max_staircase():
    # brute force: the only 6-part distinct partition of 21 is (6,5,4,3,2,1)
    assert brute_distinct_partitions(21, 6, 21) and all(
        len(p) <= 6 for p in brute_distinct_partitions(21, 6, 21))
    only = [p for p in brute_distinct_partitions(21, 6, 21) if len(p) == 6]
    assert only == [(6, 5, 4, 3, 2, 1)]
    assert lambda_max(21, 6, ()) == 1


def test_lambda_max_rejects_position_one():
    with pytest.raises(ValueError):
        lambda_max(10, 1, ())


def test_partitions_of_pairs_order():
    assert list(partitions_of(10, 2, 100)) == [(9, 1), (8, 2), (7, 3), (6, 4)]


def test_partitions_of_quad():
    assert list(partitions_of(10, 4, 100)) == [(4, 3, 2, 1)]


def test_partitions_of_smallest():
    assert list(partitions_of(3, 2, 100)) == [(2, 1)]
    assert list(partitions_of(3, 3, 100)) == []


def test_partitions_of_triples_order():
    assert list(partitions_of(10, 3, 100)) == [(7, 2, 1), (6, 3, 1), (5, 4, 1), (5, 3, 2)]


def test_partitions_respect_max_part():
    got = list(partitions_of(12, 2, 7))
    assert got == [(7, 5)]
    assert set(got) == {p for p in brute_distinct_partitions(12, 2, 7) if len(p) == 2}


def test_stream_smallest_budget():
    got = list(pattern_stream(PatternBudget(3, None, 10)))
    assert got == [(0, ()), (1, (1,)), (2, (2,)), (3, (3,)), (3, (2, 1))]


def test_stream_lw10_matches_listing():
    stream = [parts for lw, parts in pattern_stream(PatternBudget(10, None, 64)) if lw == 10]
    assert stream == [(10,),
                      (9, 1), (8, 2), (7, 3), (6, 4),
                      (7, 2, 1), (6, 3, 1), (5, 4, 1), (5, 3, 2),
                      (4, 3, 2, 1)]


def test_stream_count_43():
    budget = PatternBudget(10, None, 64)
    stream = list(pattern_stream(budget))
    assert len(stream) == 43
    assert count_queries(budget) == 43


def test_stream_budget_caps():
    budget = PatternBudget(6, 2, 4)
    got = list(pattern_stream(budget))
    for _lw, parts in got:
        assert len(parts) <= 2
        assert all(1 <= x <= 4 for x in parts)
    flat = [parts for _lw, parts in got]
    assert (5,) not in flat and (6,) not in flat
    assert (4, 2) in flat


def test_stream_matches_brute_force():
    for lw_max, p_max, n in [(20, None, 30), (20, 3, 30), (18, 4, 6), (15, None, 5),
                             (25, 2, 25), (12, 6, 12)]:
        budget = PatternBudget(lw_max, p_max, n)
        got = list(pattern_stream(budget))
        assert len(set(got)) == len(got), "duplicates emitted"
        expect = {(sum(p), p) for m in range(1, lw_max + 1)
                  for p in brute_distinct_partitions(m, p_max, n)}
        expect.add((0, ()))
        assert set(got) == expect
        assert count_queries(budget) == len(got)


def test_stream_ordering_invariants():
    budget = PatternBudget(25, None, 25)
    last_lw = -1
    last_p = 0
    for lw, parts in pattern_stream(budget):
        assert lw >= last_lw
        if lw > last_lw:
            last_p = 0
        assert len(parts) >= last_p
        last_p = len(parts)
        last_lw = lw
        assert sum(parts) == lw
        assert list(parts) == sorted(parts, reverse=True)
        assert len(set(parts)) == len(parts)


def test_eq1_bound_holds_and_is_attained():
    for m in range(3, 31):
        for p in range(2, max_feasible_size(m) + 1):
            parts_list = list(partitions_of(m, p, 1000))
            assert parts_list
            best_last = 0
            for parts in parts_list:
                for i in range(2, p + 1):
                    suffix = parts[i:]
                    assert parts[i - 1] <= lambda_max(m, i, suffix)
                best_last = max(best_last, parts[-1])
            # the position-P bound with empty suffix is attained
            assert best_last == lambda_max(m, p, ())


def test_count_queries_paper_budgets():
    assert count_queries(PatternBudget(64, None, 128)) == 158745
    assert count_queries(PatternBudget(64, 6, 128)) == 116320


def test_count_queries_full_space_is_power_of_two():
    for n in (4, 8, 12):
        assert count_queries(PatternBudget(n * (n + 1) // 2, None, n)) == 2 ** n


def test_count_queries_degenerate():
    assert count_queries(PatternBudget(0, None, 8)) == 1
    assert count_queries(PatternBudget(1, None, 8)) == 2


def test_budget_validation():
    with pytest.raises(ValueError):
        PatternBudget(-1, None, 8)
    with pytest.raises(ValueError):
        PatternBudget(37, None, 8)  # > n(n+1)/2
    with pytest.raises(ValueError):
        PatternBudget(3, 0, 8)

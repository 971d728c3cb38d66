import random

import pytest

from fptmix.core import OrderedUniverse, ParameterError, WeightedSetFamily
from fptmix import oracles, wsp


def universe(n):
    return OrderedUniverse.from_labels([f"u{i}" for i in range(n)])


def random_family(rng, uni, count, wlo=0, whi=9):
    n = len(uni)
    sets = tuple((tuple(sorted(rng.sample(range(n), 3))), rng.randint(wlo, whi))
                 for _ in range(count))
    return WeightedSetFamily(uni, 3, sets, "max")


def test_schedule_trivial_and_hand_values():
    assert wsp.deletion_schedule(5, 1).values == (0, 0)
    # hand evaluation: R(2) = ceil(10 / ceil(15/5)) = 4
    assert wsp.deletion_schedule(10, 2).values == (0, 0, 4)
    # hand evaluation: R(2) = ceil(8/6) = 2; R(3) = 2 + ceil(14/3) = 7
    assert wsp.deletion_schedule(12, 3).values == (0, 0, 2, 7)


def test_schedule_monotone_and_bounded():
    for k in range(2, 30):
        for inv in range(1, 7):
            if k // inv < 1:
                continue
            values = wsp.deletion_schedule(k, inv).values
            ek = k // inv
            for j in range(1, len(values)):
                assert values[j] >= values[j - 1]
                assert values[j] <= 2 * (j - 1) * ek


def test_schedule_rejects_zero_piece():
    with pytest.raises(ParameterError):
        wsp.deletion_schedule(1, 2)


def test_cwsp_trivial_pair():
    uni = universe(6)
    fam = WeightedSetFamily(uni, 3, (((0, 1, 2), 1), ((3, 4, 5), 1)), "max")
    inst = wsp.CwspInstance(uni, fam, 2, 2, 1, (5,))
    res = wsp.solve_cwsp(inst, audit=True)
    assert res.accept and res.weight == 2
    wsp.verify_cwsp_witness(inst, res)
    assert not wsp.solve_cwsp(wsp.CwspInstance(uni, fam, 3, 2, 1, (5,))).accept


def test_cwsp_matches_oracle_with_enumerated_f():
    rng = random.Random(31)
    for trial in range(25):
        n = rng.randint(6, 9)
        uni = universe(n)
        fam = random_family(rng, uni, rng.randint(2, 9))
        k = rng.choice([1, 2, 2, 3])
        for inv in (1, 2):
            if k // inv < 1:
                continue
            for _ in range(3):
                ranks = sorted(rng.sample(range(n), inv))
                order = uni.by_rank()
                f = tuple(order[r] for r in ranks)
                W = rng.randint(0, 3 * k * 9)
                inst = wsp.CwspInstance(uni, fam, W, k, inv, f)
                want = oracles.oracle_cwsp(inst)
                got = wsp.solve_cwsp(inst, audit=True)
                assert got.accept == want, (fam.sets, k, inv, f, W)
                if got.accept:
                    wsp.verify_cwsp_witness(inst, got)


def test_cwsp_reduction_ab_decision_stable():
    rng = random.Random(37)
    for trial in range(20):
        n = rng.randint(6, 9)
        uni = universe(n)
        fam = random_family(rng, uni, rng.randint(3, 10))
        k = rng.choice([2, 3])
        inv = rng.choice([1, 2])
        order = uni.by_rank()
        ranks = sorted(rng.sample(range(n), inv))
        f = tuple(order[r] for r in ranks)
        W = rng.randint(1, 20)
        inst = wsp.CwspInstance(uni, fam, W, k, inv, f)
        on = wsp.solve_cwsp(inst, reduce=True)
        off = wsp.solve_cwsp(inst, reduce=False)
        assert on.accept == off.accept
        if on.accept:
            assert on.weight == off.weight


def test_closure_check_examples():
    uni = universe(8)
    fam = WeightedSetFamily(uni, 3, (((0, 1, 2), 1), ((3, 4, 5), 1), ((1, 6, 7), 1)), "max")
    assert wsp.smallest_element_closure_check(fam, ())
    # prefix {0,1,2}: set (1,6,7) has min u1 which is NOT beyond max(S_min)=u0...
    # pick a prefix whose minima get reused by an eligible later set
    fam2 = WeightedSetFamily(uni, 3, (((0, 5, 6), 1), ((1, 2, 3), 1)), "max")
    assert wsp.smallest_element_closure_check(fam2, (0,))
    assert wsp.smallest_element_closure_check(fam2, (0, 1))


def test_closure_check_detects_intersection():
    uni = universe(8)
    # later-eligible set (min u3 > max(S_min)=u2) reusing the minimum u2
    fam = WeightedSetFamily(uni, 3, (((2, 6, 7), 1), ((3, 4, 2), 1)), "max")
    assert not wsp.smallest_element_closure_check(fam, (0,))


def test_closure_check_matches_direct_scan():
    rng = random.Random(41)
    for _ in range(40):
        n = rng.randint(6, 10)
        uni = universe(n)
        fam = random_family(rng, uni, rng.randint(2, 8))
        prefix = tuple(rng.sample(range(len(fam)), rng.randint(0, min(2, len(fam)))))
        rank = uni.rank
        mins = {min(fam.members(p), key=lambda e: rank[e]) for p in prefix}
        expected = True
        if mins:
            top = max(rank[e] for e in mins)
            for pos in range(len(fam)):
                if pos in prefix:
                    continue
                mem = fam.members(pos)
                if min(rank[e] for e in mem) >= top and mins & set(mem):
                    expected = False
        assert wsp.smallest_element_closure_check(fam, prefix) == expected


def test_wsp_alg_trivial_one_stage():
    uni = universe(6)
    fam = WeightedSetFamily(uni, 3, (((0, 1, 2), 4), ((3, 4, 5), 2)), "max")
    res = wsp.wsp_alg(uni, fam, 6, 2, inv_eps=1)
    assert res.status == "accept" and res.weight == 6


def test_wsp_alg_vs_oracle():
    rng = random.Random(43)
    for trial in range(25):
        n = rng.randint(5, 8)
        uni = universe(n)
        fam = random_family(rng, uni, rng.randint(1, 9), wlo=-4)
        for k in (1, 2):
            opt = oracles.oracle_wsp(fam, k)
            for inv in (1, 2):
                if opt is None:
                    assert wsp.wsp_alg(uni, fam, -999, k, inv).status == "reject"
                else:
                    hit = wsp.wsp_alg(uni, fam, opt, k, inv)
                    assert hit.status == "accept" and hit.weight == opt
                    assert wsp.wsp_alg(uni, fam, opt + 1, k, inv).status == "reject"


def test_wsp_alg_budget_exceeded():
    uni = universe(30)
    rng = random.Random(1)
    fam = random_family(rng, uni, 10)
    res = wsp.wsp_alg(uni, fam, 1, 9, inv_eps=3, budget=10_000)
    assert res.status == "budget-exceeded"


def test_wsp_alg_small_k_guard():
    # floor(eps*k) = 0 at inv_eps=2, k=1: the driver must still answer
    uni = universe(5)
    fam = WeightedSetFamily(uni, 3, (((0, 1, 2), 3),), "max")
    res = wsp.wsp_alg(uni, fam, 3, 1, inv_eps=2)
    assert res.status == "accept"


def test_wsp_alg_k0():
    uni = universe(3)
    fam = WeightedSetFamily(uni, 3, (), "max")
    assert wsp.wsp_alg(uni, fam, 0, 0).status == "accept"
    assert wsp.wsp_alg(uni, fam, 1, 0).status == "reject"


def test_singleton_first_piece_regression():
    """With floor(eps*k) = 1 the needed first piece can be one element
    (the first set's minimum is the smallest universe element); the cut
    enumeration must include singleton spans to stay complete."""
    uni = universe(6)
    fam = WeightedSetFamily(uni, 3, (((0, 2, 3), 3), ((1, 2, 4), 2), ((0, 2, 4), 4),
                                     ((1, 3, 5), 4), ((2, 4, 5), 5)), "max")
    res = wsp.wsp_alg(uni, fam, 8, 2, inv_eps=2)
    assert res.status == "accept" and res.weight == 8
    assert wsp.wsp_alg(uni, fam, 9, 2, inv_eps=2).status == "reject"

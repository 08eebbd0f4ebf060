"""Checkers on honest runs, the injected-fault mutation suite, and the oracles."""

import pytest

from ringform import analysis, engine, verify
from ringform.engine import Move, RoundTrace
from ringform.generators import gen_adversarial_half, gen_p2_random, gen_random
from ringform.verify import (
    TraceError,
    check_cooperativeness,
    check_distance_decrease,
    check_distance_monotone,
    check_final,
    check_order_preserving,
    oracle_distance,
    replay,
    replay_result,
    sequential_phase_counts,
)

import faults
from helpers import make_p1, make_p2


@pytest.fixture(scope="module")
def small_run():
    inst = make_p1("RRBB", 2, 2, [[1, 1], [1, 1]])
    result = engine.run(inst)
    return inst, result, replay_result(result)


def test_all_checkers_pass_on_honest_run(small_run):
    inst, result, replayed = small_run
    verdicts = verify.run_checks(replayed, result.rounds_used, result.terminated)
    assert all(v.passed for v in verdicts), [str(v) for v in verdicts]
    names = {v.name for v in verdicts}
    assert "cooperativeness" in names  # even k


def test_verify_result_covers_many_kinds():
    for inst in (gen_random(4, 3, 2, 0), gen_random(5, 3, 2, 1),
                 gen_p2_random(4, 3, 2, 2), gen_random(4, 4, 3, 3)):
        result = engine.run(inst)
        for verdict in verify.verify_result(result):
            assert verdict.passed, str(verdict)


def test_checkers_are_pure(small_run):
    _, result, replayed = small_run
    first = verify.run_checks(replayed, result.rounds_used, result.terminated)
    second = verify.run_checks(replayed, result.rounds_used, result.terminated)
    assert first == second


# --- mutation suite: every checker must reject its corrupted trace ---------------


def test_order_fault_detected():
    verdict = faults.order_fault()
    assert not verdict.passed and verdict.round == 1


def test_suffix_fault_detected():
    verdict = faults.suffix_fault()
    assert not verdict.passed and "prefix" in verdict.detail


def test_wraparound_fault_detected():
    verdict = faults.wraparound_fault()
    assert not verdict.passed and "crossed" in verdict.detail


def test_distance_monotone_fault_detected():
    verdict = faults.monotone_fault()
    assert not verdict.passed and "rose" in verdict.detail


def test_distance_decrease_fault_detected():
    verdict = faults.decrease_fault()
    assert not verdict.passed


def test_final_fault_detected():
    verdict = faults.final_fault()
    assert not verdict.passed and "misses the target" in verdict.detail


def test_cooperativeness_fault_detected():
    verdict = faults.cooperativeness_fault()
    assert not verdict.passed and "class 1" in verdict.detail


def test_safety_fault_detected():
    assert not faults.safety_fault().passed
    assert not faults.counts_fault().passed


def test_quiescence_fault_detected():
    verdict = faults.quiescence_fault()
    assert not verdict.passed


def test_every_checker_has_a_failing_fault():
    for name, verdict in faults.fault_verdicts().items():
        assert not verdict.passed, name


# --- individual checker edges ------------------------------------------------------


def test_order_checker_accepts_cyclic_rotation():
    # a pure rotation of the blue order is still the same cyclic order
    inst = make_p1("BRBRBR", 3, 2, [[1, 1, 1], [1, 1, 1]])
    moves = tuple(
        Move(inst.initial.agents[src].id, src, (src + 2) % 6) for src in range(6)
    )
    _, rt = faults.fabricate_round(inst.initial, moves, 1, 1)
    run = replay(inst, [rt])
    assert check_order_preserving(run).passed


def test_distance_checkers_demand_distance_values():
    inst = gen_random(4, 4, 3, seed=5)  # many-colour trace has no distances
    replayed = replay_result(engine.run(inst))
    assert not check_distance_monotone(replayed).passed
    assert not check_distance_decrease(replayed, 2).passed


def test_cooperativeness_requires_even_k():
    inst = gen_random(3, 2, 2, seed=0)
    replayed = replay_result(engine.run(inst))
    assert not check_cooperativeness(replayed).passed


def test_single_round_windows_can_stall():
    # with the shifting offsets an inactive window can hold the distance for
    # one round, so a one-round decrease demand must fail somewhere
    candidates = [gen_random(4, 3, 2, seed) for seed in range(40)]
    candidates.append(gen_adversarial_half(4, 2))
    found = False
    for inst in candidates:
        oriented, _ = engine.orient_roles(inst)
        result = engine.run(oriented)
        replayed = replay_result(result)
        if not check_distance_decrease(replayed, 1).passed:
            found = True
            break
    assert found


def test_replay_rejects_inconsistent_moves():
    inst = make_p1("RRBB", 2, 2, [[1, 1], [1, 1]])
    bad = RoundTrace(index=1, offset=1, moves=(Move(0, 0, 2),),
                     counts=inst.initial.all_counts(), distance=0, checks=())
    with pytest.raises(TraceError):
        replay(inst, [bad])
    wrong_agent = RoundTrace(index=1, offset=1,
                             moves=(Move(7, 0, 2), Move(2, 2, 0)),
                             counts=inst.initial.all_counts(), distance=0, checks=())
    with pytest.raises(TraceError):
        replay(inst, [wrong_agent])


# --- distance oracle ---------------------------------------------------------------


def test_oracle_distance_examples():
    inst = make_p1("RRBB", 2, 2, [[1, 1], [1, 1]])
    assert oracle_distance(inst.initial, inst) == 1
    satisfied = make_p1("BRRB", 2, 2, [[1, 1], [1, 1]])
    assert oracle_distance(satisfied.initial, satisfied) == 0
    half = gen_adversarial_half(4, 2)
    assert oracle_distance(half.initial, half) == 4


def test_oracle_matches_analysis_on_reachable_configurations():
    checked = 0
    for k, p, seed in [(2, 2, 0), (3, 4, 1), (6, 3, 2), (8, 6, 3), (12, 5, 4)]:
        inst = gen_random(k, p, 2, seed)
        result = engine.run(inst)
        row = inst.spec.row(1)
        for cfg in replay_result(result).configs:
            assert analysis.distance_report(cfg, row).total == oracle_distance(cfg, inst)
            checked += 1
    assert checked > 50


# --- sequential phase oracle ---------------------------------------------------------


def test_sequential_phase_counts_settles_to_requirements():
    inst = gen_random(5, 4, 3, seed=8)
    final_counts = sequential_phase_counts(inst)
    assert final_counts == tuple(inst.spec.column(j) for j in range(1, inst.k + 1))


def test_sequential_phase_counts_rejects_other_kinds():
    with pytest.raises(ValueError):
        sequential_phase_counts(make_p2("BBBR", 2, 2, [[1, 1], [0, 0]]))


def test_final_checker_on_real_result(small_run):
    inst, result, _ = small_run
    assert check_final(result, inst).passed

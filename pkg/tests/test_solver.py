"""Solvers: pick-game oracle, exact search, skeleton solving, deviations."""

from __future__ import annotations

import random

import pytest

from conftest import WORKED_TARGET, WORKED_VECTOR
from hearthproof.compiler import PartitionInstance, chosen_sum, compile_instance
from hearthproof.engine import apply, legal_actions
from hearthproof.solver import (
    DRAW,
    LOSS,
    WIN,
    DeviationChecker,
    check_named_deviations,
    deviation_check,
    minimax,
    named_deviations,
    oracle_left_wins,
    oracle_line,
    skeleton_solve,
    terminal_value,
    value_verdict,
    walk_line,
)
from hearthproof.state import Outcome
from micro_positions import micro_positions


def naive_left_wins(pairs, target, i=0, acc=0):
    """Plain 2**n reference: no memo, no pruning."""
    if i == len(pairs):
        return acc == target
    x, y = pairs[i]
    if i % 2 == 0:
        return (naive_left_wins(pairs, target, i + 1, acc + x)
                or naive_left_wins(pairs, target, i + 1, acc + y))
    return (naive_left_wins(pairs, target, i + 1, acc + x)
            and naive_left_wins(pairs, target, i + 1, acc + y))


def random_instance(rng: random.Random) -> PartitionInstance:
    n = rng.randint(1, 7)
    pairs = tuple((rng.randint(0, 9), rng.randint(0, 9)) for _ in range(n))
    target = rng.randint(0, sum(max(x, y) for x, y in pairs))
    return PartitionInstance(pairs, target)


class TestOracle:
    def test_matches_naive_enumeration(self) -> None:
        rng = random.Random(20260823)
        for _ in range(400):
            inst = random_instance(rng)
            assert oracle_left_wins(inst) == naive_left_wins(inst.pairs, inst.target)

    def test_worked_instance_is_left_win(self, worked_instance) -> None:
        assert oracle_left_wins(worked_instance)

    def test_witness_vector(self) -> None:
        """The optimal line ends on target exactly when Left wins."""
        rng = random.Random(7)
        for _ in range(200):
            inst = random_instance(rng)
            won, vector = oracle_line(inst)
            assert won == oracle_left_wins(inst)
            assert len(vector) == inst.n
            assert set(vector) <= {"x", "y"}
            assert (chosen_sum(inst, vector) == inst.target) == won

    def test_swap_invariance(self) -> None:
        """Swapping a pair's two values never changes who wins."""
        rng = random.Random(11)
        for _ in range(100):
            inst = random_instance(rng)
            k = rng.randrange(inst.n)
            pairs = list(inst.pairs)
            pairs[k] = (pairs[k][1], pairs[k][0])
            swapped = PartitionInstance(tuple(pairs), inst.target)
            assert oracle_left_wins(inst) == oracle_left_wins(swapped)

    def test_verdict_names(self) -> None:
        assert value_verdict(WIN) == "win"
        assert value_verdict(DRAW) == "draw"
        assert value_verdict(LOSS) == "loss"
        assert value_verdict(None) == "unknown"


def exhaustive_value(state, depth: int = 6) -> int:
    """Memo-free full enumeration; the reference for the bounded searcher."""
    tv = terminal_value(state)
    if tv is not None:
        return tv
    assert depth > 0, "micro position deeper than expected"
    values = [exhaustive_value(apply(state, a), depth - 1)
              for a in legal_actions(state)]
    return max(values) if state.active == 0 else min(values)


class TestExactSearch:
    def test_micro_positions_match_exhaustive(self) -> None:
        for label, config, expected in micro_positions():
            state = config.to_state()
            assert exhaustive_value(state) == expected, label
            result = minimax(state)
            assert result.value == expected, label
            assert result.verdict == value_verdict(expected)
            assert not result.exhausted

    def test_node_budget_exhaustion(self) -> None:
        _, config, _ = micro_positions()[3]  # taunt_break_win
        result = minimax(config.to_state(), max_nodes=1)
        assert result.value is None
        assert result.exhausted
        assert result.verdict == "unknown"

    def test_transposition_table_reuse(self) -> None:
        _, config, expected = micro_positions()[3]
        tt: dict = {}
        first = minimax(config.to_state(), tt=tt)
        second = minimax(config.to_state(), tt=tt)
        assert first.value == second.value == expected
        assert second.tt_hits > 0
        assert second.nodes < first.nodes

    def test_principal_variation_reaches_the_win(self) -> None:
        label, config, expected = micro_positions()[0]  # weapon_race_win
        assert expected == WIN
        state = config.to_state()
        result = minimax(state)
        assert result.pv
        for action in result.pv:
            state = apply(state, action)
        assert state.outcome is Outcome.FRIENDLY_WINS


class TestSkeleton:
    def test_worked_instance_wins(self, worked_compiled) -> None:
        result = skeleton_solve(worked_compiled.config, worked_compiled.line)
        assert result.value == WIN
        assert result.verdict == "win"
        assert chosen_sum(worked_compiled.instance, result.vector) == WORKED_TARGET
        assert result.nodes > 0

    def test_agrees_with_oracle_on_small_instances(self) -> None:
        cases = [PartitionInstance(((x, y),), t)
                 for x in range(3) for y in range(3) for t in range(4)]
        rng = random.Random(3)
        for _ in range(8):
            pairs = tuple((rng.randint(0, 2), rng.randint(0, 2)) for _ in range(2))
            cases.append(PartitionInstance(pairs, rng.randint(0, 4)))
        for inst in cases:
            compiled = compile_instance(inst, validate="none")
            result = skeleton_solve(compiled.config, compiled.line)
            assert result.value in (WIN, LOSS), inst
            assert (result.value == WIN) == oracle_left_wins(inst), inst

    def test_losing_instance(self) -> None:
        inst = PartitionInstance(((1, 1),), 3)  # no choice reaches 3
        compiled = compile_instance(inst, validate="none")
        result = skeleton_solve(compiled.config, compiled.line)
        assert result.value == LOSS
        assert result.verdict == "loss"


class TestWalkLine:
    def test_worked_walk(self, worked_compiled) -> None:
        records, final = walk_line(
            worked_compiled.config, worked_compiled.line, WORKED_VECTOR)
        assert final.outcome is Outcome.FRIENDLY_WINS
        assert [r.index for r in records] == list(range(len(records)))
        turns = [r.turn for r in records]
        assert turns == sorted(turns)
        assert turns[0] == 1
        for rec in records:
            assert rec.state_before.outcome is Outcome.ONGOING
            assert rec.side == (0 if rec.turn % 2 == 1 else 1)

    def test_walk_is_repeatable(self, worked_compiled) -> None:
        from hearthproof.state import state_hash

        _, first = walk_line(worked_compiled.config, worked_compiled.line,
                             WORKED_VECTOR)
        _, second = walk_line(worked_compiled.config, worked_compiled.line,
                              WORKED_VECTOR)
        assert state_hash(first) == state_hash(second)


class TestDeviations:
    def test_named_probe_structure(self, worked_compiled) -> None:
        checker = DeviationChecker(
            worked_compiled.config, worked_compiled.line, WORKED_VECTOR)
        probes = named_deviations(checker)
        names = [name for name, _, _ in probes]
        assert names == ["skip_freeze", "carrier_position_0", "carrier_position_1",
                         "carrier_position_2", "carrier_position_3",
                         "carrier_position_4", "double_spend"]
        for _, rec, alternative in probes:
            assert alternative != rec.action
            assert alternative in legal_actions(rec.state_before)

    def test_named_probes_all_refuted(self, worked_compiled) -> None:
        report = deviation_check(
            worked_compiled.config, worked_compiled.line, WORKED_VECTOR)
        assert report.scripted_value == WIN
        assert len(report.findings) == 7
        assert report.refuted == 7
        assert report.unresolved == 0
        assert report.improved == 0
        assert report.checked_steps == 3
        for finding in report.findings:
            assert finding.status == "refuted"
            assert finding.reason in ("forced_loss", "derailed")

    def test_single_pair_line_has_no_freeze_probe(self) -> None:
        """A single-pair line opens on the verification turn, which casts
        no field-wide freeze, so that probe family is empty."""
        compiled = compile_instance(PartitionInstance(((1, 2),), 1),
                                    validate="none")
        checker = DeviationChecker(compiled.config, compiled.line, ("x",))
        names = [name for name, _, _ in named_deviations(checker)]
        assert "skip_freeze" not in names
        assert "double_spend" in names
        report = check_named_deviations(checker)
        assert report.unresolved == 0
        assert report.improved == 0
        for finding in report.findings:
            assert finding.status in ("refuted", "dominated")

"""Compile pick-one-from-each-pair sum games into battle setups.

Given pairs (x_i, y_i) and a target sum T, the compiler emits a game
configuration plus a scripted line with one two-way branch per pair.  The
first player wins the battle with the scripted line if and only if the values
chosen at the branches sum exactly to T.

Layout produced (player 0 moves first and owns the odd turns):

* The opposing board holds a huge-attack taunt accumulator whose hit points
  encode the target, flanked by spell-shield minions so that only freshly
  summoned carriers can ever be targeted by spells; a draw-engine minion sits
  at the end of each row.
* Turn i fields two carriers encoding 10*x_i and 10*y_i attack; a scripted
  branch delivers one into the accumulator (+2 from the charge buff) and
  destroys the other.  Even-indexed pairs are staged by the opponent and the
  survivor is stolen back across the board, which costs the same +2.
* After all pairs, a final unbuffed carrier delivers exactly 8, the built-in
  remainder of the accumulator's hit-point formula.  The accumulator dies on
  that hit exactly when the chosen values sum to T, freeing the way for a
  weapon swing at the 1-health enemy hero.

Decks are synthesised so that every card arrives exactly when needed: each
spell cast feeds one replacement draw through the caster's draw engine, extra
mana arrives as just-in-time mana-burst spells, and surplus draws are drained
by re-equipping cheap weapons.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Literal

from . import cards as C
from .cards import CardKind, EffectTag, Tribe, card
from .engine import apply, legal_actions, start_game
from .state import (
    Action,
    Attack,
    CharRef,
    EndTurn,
    EventLog,
    GameConfig,
    GameState,
    IllegalAction,
    Outcome,
    PlayCard,
    action_from_json_obj,
    action_to_json_obj,
    hero_ref,
    minion_ref,
    DEFAULT_TURN_LIMIT,
    FORMAT_VERSION,
    MAX_MANA,
)

# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


class InstanceError(ValueError):
    """Raised for malformed pair-sum game input."""


@dataclass(frozen=True)
class PartitionInstance:
    """A pick-one-from-each-pair sum game: pairs (x_i, y_i) and target T.

    Player 1 (``Left``) picks from odd-indexed pairs, player 2 (``Right``)
    from even-indexed ones, in index order; Left wins iff the picks sum to T.
    """

    pairs: tuple[tuple[int, int], ...]
    target: int

    def __post_init__(self):
        if len(self.pairs) < 1:
            raise InstanceError("need at least one pair")
        for x, y in self.pairs:
            if x < 0 or y < 0:
                raise InstanceError("pair values must be non-negative")
        if self.target < 0:
            raise InstanceError("target must be non-negative")

    @property
    def n(self) -> int:
        return len(self.pairs)

    def values(self) -> Iterable[int]:
        for x, y in self.pairs:
            yield x
            yield y

    @property
    def max_value(self) -> int:
        return max(self.values())

    @property
    def has_zero_value(self) -> bool:
        return any(v == 0 for v in self.values())

    @staticmethod
    def from_json_obj(obj: dict) -> "PartitionInstance":
        try:
            pairs = tuple((int(x), int(y)) for x, y in obj["pairs"])
            target = int(obj["target"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"malformed instance: {exc}") from exc
        return PartitionInstance(pairs, target)

    @staticmethod
    def from_json(text: str) -> "PartitionInstance":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid JSON: {exc}") from exc
        return PartitionInstance.from_json_obj(obj)

    def to_json_obj(self) -> dict:
        return {"pairs": [[x, y] for x, y in self.pairs], "target": self.target}


def shifted_instance(inst: PartitionInstance) -> tuple[PartitionInstance, int]:
    """Normalise away zero values.

    A zero-valued pick cannot be realised by a carrier (the smallest minion
    delivery is worth more than nothing), so when any value is zero the whole
    instance is shifted: every value up one, target up by n.  Each full choice
    vector gains exactly n, so the set of winning vectors is unchanged.
    """
    if not inst.has_zero_value:
        return inst, 0
    pairs = tuple((x + 1, y + 1) for x, y in inst.pairs)
    return PartitionInstance(pairs, inst.target + inst.n), 1


# ---------------------------------------------------------------------------
# Stat formulas
# ---------------------------------------------------------------------------


def leper_health(target: int, n: int) -> int:
    """Accumulator hit points: 10*T + 2n + 8.

    Each delivered carrier removes 10*value + 2; after n deliveries exactly
    8 remains iff the values sum to T, which the final 8-attack carrier
    removes precisely.
    """
    return 10 * target + 2 * n + 8


def big_attack(max_value: int) -> int:
    """Attack stat that dominates every carrier: max(1000, 20*max + 100)."""
    return max(1000, 20 * max_value + 100)


# ---------------------------------------------------------------------------
# Buff synthesis
# ---------------------------------------------------------------------------

BuffMode = Literal["demon", "beast_blessed", "beast_backstab"]


@dataclass(frozen=True)
class BuffSequence:
    """Cards that raise a carrier's attack from its base to exactly 10*value.

    ``buff_length`` counts only attack-affecting casts; repair heals that
    re-enable the damage-then-double step are included in ``cards`` but not
    in ``buff_length``.
    """

    cards: tuple[str, ...]
    final_attack: int
    buff_length: int
    mode: BuffMode


def _digits_after_leading(v: int) -> list[int]:
    bits = bin(v)[2:]
    return [int(b) for b in bits[1:]]


def synthesize_demon_buffs(v: int) -> BuffSequence:
    """Demon carrier (base 4): two +3/+3 fuses reach 10, then binary digits
    of v (after the leading 1, most significant first) via attack doubling,
    plus five +2/+2 marks per set digit."""
    if v < 1:
        raise InstanceError("carrier value must be at least 1 after normalisation")
    seq = [C.DEMONFUSE, C.DEMONFUSE]
    attack = 10
    for digit in _digits_after_leading(v):
        seq.append(C.BLESSED_CHAMPION)
        attack *= 2
        if digit:
            seq.extend([C.MARK_OF_YSHAARJ] * 5)
            attack += 10
    assert attack == 10 * v
    return BuffSequence(tuple(seq), attack, len(seq), "demon")


def synthesize_beast_buffs(v: int, mode: str = "blessed") -> BuffSequence:
    """Beast carrier (base 6): two +2/+2 marks reach 10, then binary digits.

    ``blessed`` doubles with the doubling spell.  ``backstab`` doubles by
    dealing 2 damage to the beast's own double-attack-when-damaged trigger;
    the target must be undamaged, so every doubling after the first is
    preceded by a 5-point repair heal (those heals do not count toward
    ``buff_length``).
    """
    if v < 1:
        raise InstanceError("carrier value must be at least 1 after normalisation")
    if mode not in ("blessed", "backstab"):
        raise ValueError(f"unknown beast buff mode {mode!r}")
    seq = [C.MARK_OF_YSHAARJ, C.MARK_OF_YSHAARJ]
    attack = 10
    buff_len = 2
    damaged = False
    for digit in _digits_after_leading(v):
        if mode == "blessed":
            seq.append(C.BLESSED_CHAMPION)
            buff_len += 1
        else:
            if damaged:
                seq.append(C.FLASH_HEAL)
            seq.append(C.BACKSTAB)
            buff_len += 1
            damaged = True
        attack *= 2
        if digit:
            seq.extend([C.MARK_OF_YSHAARJ] * 5)
            buff_len += 5
            attack += 10
    assert attack == 10 * v
    return BuffSequence(
        tuple(seq), attack, buff_len,
        "beast_blessed" if mode == "blessed" else "beast_backstab",
    )


# ---------------------------------------------------------------------------
# Script structures
# ---------------------------------------------------------------------------


class ScheduleInfeasible(Exception):
    """Raised when no legal card schedule exists for a turn of the line."""

    def __init__(self, reason: str, turn: int | None = None, step: int | None = None):
        self.reason = reason
        self.turn = turn
        self.step = step
        where = "" if turn is None else f" (turn {turn}" + (
            f", step {step})" if step is not None else ")"
        )
        super().__init__(reason + where)


@dataclass(frozen=True)
class ScriptStep:
    action: Action
    optional: bool = False

    def to_json_obj(self) -> dict:
        obj = {"action": action_to_json_obj(self.action)}
        if self.optional:
            obj["optional"] = True
        return obj

    @staticmethod
    def from_json_obj(obj: dict) -> "ScriptStep":
        return ScriptStep(action_from_json_obj(obj["action"]), bool(obj.get("optional")))


@dataclass(frozen=True)
class Branch:
    """Two-way scripted alternative realising one pair's choice."""

    decision: int
    x_steps: tuple[ScriptStep, ...]
    y_steps: tuple[ScriptStep, ...]

    def steps(self, choice: str) -> tuple[ScriptStep, ...]:
        if choice == "x":
            return self.x_steps
        if choice == "y":
            return self.y_steps
        raise ValueError(f"choice must be 'x' or 'y', got {choice!r}")

    def to_json_obj(self) -> dict:
        return {
            "decision": self.decision,
            "x": [s.to_json_obj() for s in self.x_steps],
            "y": [s.to_json_obj() for s in self.y_steps],
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "Branch":
        return Branch(
            int(obj["decision"]),
            tuple(ScriptStep.from_json_obj(s) for s in obj["x"]),
            tuple(ScriptStep.from_json_obj(s) for s in obj["y"]),
        )


TurnItem = ScriptStep | Branch


@dataclass(frozen=True)
class Decision:
    """Metadata for one pair's branch (original, unshifted values)."""

    index: int
    turn: int
    x_value: int
    y_value: int
    x_attack: int  # delivered attack if x is chosen (10*shifted_x + 2)
    y_attack: int
    x_destroyed: int  # stat the x carrier shows if destroyed instead (10*shifted_x)
    y_destroyed: int

    def to_json_obj(self) -> dict:
        return {
            "index": self.index,
            "turn": self.turn,
            "x": self.x_value,
            "y": self.y_value,
            "xAttack": self.x_attack,
            "yAttack": self.y_attack,
            "xDestroyed": self.x_destroyed,
            "yDestroyed": self.y_destroyed,
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "Decision":
        return Decision(
            int(obj["index"]), int(obj["turn"]), int(obj["x"]), int(obj["y"]),
            int(obj["xAttack"]), int(obj["yAttack"]),
            int(obj["xDestroyed"]), int(obj["yDestroyed"]),
        )


@dataclass(frozen=True)
class TurnScript:
    turn: int
    side: int
    items: tuple[TurnItem, ...]

    def to_json_obj(self) -> dict:
        items = []
        for item in self.items:
            if isinstance(item, Branch):
                items.append({"branch": item.to_json_obj()})
            else:
                items.append({"step": item.to_json_obj()})
        return {"turn": self.turn, "side": self.side, "items": items}

    @staticmethod
    def from_json_obj(obj: dict) -> "TurnScript":
        items: list[TurnItem] = []
        for entry in obj["items"]:
            if "branch" in entry:
                items.append(Branch.from_json_obj(entry["branch"]))
            else:
                items.append(ScriptStep.from_json_obj(entry["step"]))
        return TurnScript(int(obj["turn"]), int(obj["side"]), tuple(items))


@dataclass(frozen=True)
class FlatStep:
    """One concrete action of a fully chosen line."""

    action: Action
    optional: bool
    turn: int
    side: int
    decision: Decision | None = None  # set on the first step of a branch
    chosen: str | None = None


@dataclass(frozen=True)
class ScriptedLine:
    instance: PartitionInstance
    value_shift: int
    decisions: tuple[Decision, ...]
    turns: tuple[TurnScript, ...]

    @property
    def n(self) -> int:
        return self.instance.n

    def decision_for(self, index: int) -> Decision:
        return self.decisions[index - 1]

    def flatten(self, vector: tuple[str, ...]) -> list[FlatStep]:
        if len(vector) != self.n:
            raise ValueError(f"vector must have {self.n} entries")
        out: list[FlatStep] = []
        for turn in self.turns:
            for item in turn.items:
                if isinstance(item, Branch):
                    choice = vector[item.decision - 1]
                    meta = self.decision_for(item.decision)
                    for k, step in enumerate(item.steps(choice)):
                        out.append(
                            FlatStep(
                                step.action, step.optional, turn.turn, turn.side,
                                decision=meta if k == 0 else None,
                                chosen=choice if k == 0 else None,
                            )
                        )
                else:
                    out.append(FlatStep(item.action, item.optional, turn.turn, turn.side))
        return out

    def to_json_obj(self) -> dict:
        return {
            "formatVersion": FORMAT_VERSION,
            "kind": "line",
            "instance": self.instance.to_json_obj(),
            "valueShift": self.value_shift,
            "decisions": [d.to_json_obj() for d in self.decisions],
            "turns": [t.to_json_obj() for t in self.turns],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json_obj(obj: dict) -> "ScriptedLine":
        if obj.get("formatVersion") != FORMAT_VERSION:
            raise InstanceError("unsupported line formatVersion")
        return ScriptedLine(
            PartitionInstance.from_json_obj(obj["instance"]),
            int(obj.get("valueShift", 0)),
            tuple(Decision.from_json_obj(d) for d in obj["decisions"]),
            tuple(TurnScript.from_json_obj(t) for t in obj["turns"]),
        )

    @staticmethod
    def from_json(text: str) -> "ScriptedLine":
        return ScriptedLine.from_json_obj(json.loads(text))


# ---------------------------------------------------------------------------
# Phase 1: symbolic turn plans
# ---------------------------------------------------------------------------
#
# Plan entries are abstract; slots are known statically because the board
# choreography is fixed: the friendly core occupies slots 0-5 (newcomers at
# 6), the enemy core slots 0-3 (staged carriers at 4 and 5).

_F_CARRY = minion_ref(0, 5)  # carrier slot beside the 5-minion core
_F_SECOND = minion_ref(0, 6)  # second carrier while both are fielded
_E_LEPER = minion_ref(1, 0)
_E_STAGE0 = minion_ref(1, 4)
_E_STAGE1 = minion_ref(1, 5)
_F_HERO = hero_ref(0)
_E_HERO = hero_ref(1)
_F_TAUNT = minion_ref(0, 4)


@dataclass
class _Cast:
    card: str
    target: CharRef | None = None
    kills: bool = False  # the 1-damage ping is known to kill its target


@dataclass
class _Summon:
    card: str
    position: int


@dataclass
class _Equip:
    pass


@dataclass
class _Att:
    attacker: CharRef
    defender: CharRef
    optional: bool = False


@dataclass
class _End:
    pass


@dataclass
class _Window:
    """Branch point: execute either x_entries or y_entries."""

    decision: int
    x_entries: list = field(default_factory=list)
    y_entries: list = field(default_factory=list)
    pair_cards: tuple[str, ...] = ()  # drawn up-front, consumed by either branch


_PlanEntry = _Cast | _Summon | _Equip | _Att | _End | _Window


@dataclass
class _MarkCast(_Cast):
    target_is_beast: bool = False


def _mark(target: CharRef, beast: bool) -> _MarkCast:
    return _MarkCast(C.MARK_OF_YSHAARJ, target, target_is_beast=beast)


def _entry_draws(entry: _PlanEntry) -> int:
    """Cards the acting player draws while resolving this entry.

    Every spell feeds one draw through the caster's draw engine (each side
    keeps exactly one alive for the whole line); card effects add the rest.
    """
    if isinstance(entry, _MarkCast):
        return 2 if entry.target_is_beast else 1
    if isinstance(entry, _Cast):
        spec = card(entry.card)
        if spec.effect is EffectTag.DRAW_TWO:
            return 3
        if spec.effect is EffectTag.DEAL_ONE_DRAW_IF_KILL and entry.kills:
            return 2
        return 1
    if isinstance(entry, _Summon):
        return 1 if card(entry.card).effect is EffectTag.BATTLECRY_DRAW_ONE else 0
    return 0


def _buff_entries(seq: BuffSequence, target: CharRef, beast: bool) -> list[_PlanEntry]:
    out: list[_PlanEntry] = []
    for cid in seq.cards:
        if cid == C.MARK_OF_YSHAARJ:
            out.append(_mark(target, beast))
        else:
            out.append(_Cast(cid, target))
    return out


def _plan_odd_turn(
    i: int, n: int, x: int, y: int, is_last_pair_turn: bool
) -> list[_PlanEntry]:
    """Friendly turn i: deliver pair i (demon on slot 5, beast beside it)."""
    entries: list[_PlanEntry] = []
    if i >= 3:
        # Steal back the survivor of the previous pair, deliver it, then
        # recycle the staging slot with a ping-fodder engineer.
        entries += [
            _Cast(C.MIND_CONTROL, _E_STAGE0),
            _Cast(C.CHARGE, _F_CARRY),
            _Att(_F_CARRY, _E_LEPER),
            _Summon(C.NOVICE_ENGINEER, 5),
            _Cast(C.MORTAL_COIL, _F_CARRY, kills=True),
        ]
    entries += [_Cast(C.ARCANE_INTELLECT), _Summon(C.FLOATING_WATCHER, 5)]
    entries += _buff_entries(synthesize_demon_buffs(x), _F_CARRY, beast=False)
    entries.append(_Cast(C.ARCANE_INTELLECT))  # stocks the branch pair

    # Both carriers share the board inside the branch; the unchosen one is
    # destroyed before the chosen one attacks.  The two halves cast the same
    # cards at the same costs in the same order, so mana and draws align.
    x_entries: list[_PlanEntry] = [_Cast(C.CHARGE, _F_CARRY)]
    x_entries += [_Cast(C.ARCANE_INTELLECT), _Summon(C.GAHZRILLA, 6)]
    x_entries += _buff_entries(synthesize_beast_buffs(y, "blessed"), _F_SECOND, beast=True)
    x_entries += [_Cast(C.SHADOW_WORD_DEATH, _F_SECOND), _Att(_F_CARRY, _E_LEPER)]

    y_entries: list[_PlanEntry] = [_Cast(C.SHADOW_WORD_DEATH, _F_CARRY)]
    y_entries += [_Cast(C.ARCANE_INTELLECT), _Summon(C.GAHZRILLA, 5)]
    y_entries += _buff_entries(synthesize_beast_buffs(y, "blessed"), _F_CARRY, beast=True)
    y_entries += [_Cast(C.CHARGE, _F_CARRY), _Att(_F_CARRY, _E_LEPER)]

    window = _Window(
        decision=i,
        x_entries=x_entries,
        y_entries=y_entries,
        pair_cards=(C.CHARGE, C.SHADOW_WORD_DEATH),
    )
    entries.append(window)

    if not is_last_pair_turn:
        # Stage the next pair's demon seed, then refreeze the enemy core.
        entries += [
            _Cast(C.ARCANE_INTELLECT),
            _Summon(C.FLOATING_WATCHER, 5),
            _Cast(C.DEMONFUSE, _F_CARRY),
            _Cast(C.FROST_NOVA),
        ]
    else:
        entries += _plan_verification_tail()
    entries.append(_End())
    return entries


def _plan_verification_tail() -> list[_PlanEntry]:
    """Final delivery: an unbuffed beast hits for exactly 8 after the charge."""
    return [
        _Cast(C.ARCANE_INTELLECT),
        _Summon(C.GAHZRILLA, 5),
        _Cast(C.FLASH_HEAL, _F_HERO),
        _Cast(C.CHARGE, _F_CARRY),
        _Att(_F_CARRY, _E_LEPER),
        _Att(_F_HERO, _E_HERO, optional=True),
    ]


def _plan_even_turn(i: int, n: int, x: int, y: int) -> list[_PlanEntry]:
    """Enemy turn i: finish the staged demon to 10x, stage the beast to 10y,
    destroy one of the two, park the survivor on the stage slot."""
    entries: list[_PlanEntry] = [_Cast(C.DEMONFUSE, _F_CARRY)]
    demon = synthesize_demon_buffs(x)
    entries += _buff_entries(
        BuffSequence(demon.cards[2:], demon.final_attack, demon.buff_length - 2, "demon"),
        _F_CARRY, beast=False,
    )
    entries += [_Cast(C.MORTAL_COIL, _F_CARRY, kills=False)] * 6
    entries.append(_Cast(C.MIND_CONTROL, _F_CARRY))
    entries += [_Cast(C.ARCANE_INTELLECT), _Summon(C.GAHZRILLA, 5)]
    entries += _buff_entries(synthesize_beast_buffs(y, "backstab"), _E_STAGE1, beast=True)
    window = _Window(
        decision=i,
        x_entries=[_Cast(C.SHADOW_WORD_DEATH, _E_STAGE1)],  # keep the demon (x)
        y_entries=[_Cast(C.SHADOW_WORD_DEATH, _E_STAGE0)],  # keep the beast (y)
        pair_cards=(C.SHADOW_WORD_DEATH,),
    )
    entries += [window, _Cast(C.FROST_NOVA), _End()]
    return entries


def _plan_verification_turn(n: int) -> list[_PlanEntry]:
    """Standalone final friendly turn used when n is even."""
    entries: list[_PlanEntry] = [
        _Cast(C.MIND_CONTROL, _E_STAGE0),
        _Cast(C.CHARGE, _F_CARRY),
        _Att(_F_CARRY, _E_LEPER),
        _Summon(C.NOVICE_ENGINEER, 5),
        _Cast(C.MORTAL_COIL, _F_CARRY, kills=True),
    ]
    entries += _plan_verification_tail()
    entries.append(_End())
    return entries


def _plan_punishment_turn() -> list[_PlanEntry]:
    """Enemy cleanup if the sum missed the target: clear the taunt, go face."""
    return [
        _Att(_E_LEPER, _F_TAUNT, optional=True),
        _Att(minion_ref(1, 1), _F_HERO, optional=True),
        _Att(minion_ref(1, 2), _F_HERO, optional=True),
        _Att(minion_ref(1, 3), _F_HERO, optional=True),
        _End(),
    ]


def build_turn_plans(shifted: PartitionInstance) -> list[tuple[int, int, list[_PlanEntry]]]:
    """(turn number, side, entries) for every scripted turn of the line."""
    n = shifted.n
    plans: list[tuple[int, int, list[_PlanEntry]]] = []
    for i in range(1, n + 1):
        x, y = shifted.pairs[i - 1]
        if i % 2 == 1:
            plans.append((i, 0, _plan_odd_turn(i, n, x, y, is_last_pair_turn=(i == n))))
        else:
            plans.append((i, 1, _plan_even_turn(i, n, x, y)))
    if n % 2 == 0:
        plans.append((n + 1, 0, _plan_verification_turn(n)))
        plans.append((n + 2, 1, _plan_punishment_turn()))
    else:
        plans.append((n + 1, 1, _plan_punishment_turn()))
    return plans


# ---------------------------------------------------------------------------
# Phase 1b: weaving (mana bursts and weapon-equip drains)
# ---------------------------------------------------------------------------


def _cast_cost(entry: _PlanEntry) -> int:
    if isinstance(entry, _Cast):
        return card(entry.card).cost
    if isinstance(entry, _Summon):
        return card(entry.card).cost
    if isinstance(entry, _Equip):
        return card(C.LIGHTS_JUSTICE).cost
    return 0


def _gains_mana(entry: _PlanEntry) -> bool:
    return isinstance(entry, _Cast) and entry.card == C.INNERVATE


def _consumes_card(entry: _PlanEntry) -> bool:
    return isinstance(entry, (_Cast, _Summon, _Equip))


@dataclass
class _WeaveState:
    mana: int
    hand: int  # drawn-but-unplayed card count (model)


def _weave_entries(
    entries: list[_PlanEntry], st: _WeaveState, turn: int
) -> list[_PlanEntry]:
    """Insert mana bursts before under-funded plays and weapon-equip drains
    to keep the modelled hand small.  Mutates ``st`` to the exit state."""
    out: list[_PlanEntry] = []

    def burst_to(cost: int) -> None:
        while st.mana < cost:
            before = st.mana
            out.append(_Cast(C.INNERVATE))
            st.mana = min(st.mana + 2, MAX_MANA)
            st.hand += _entry_draws(out[-1]) - 1
            if st.mana == before:
                raise ScheduleInfeasible(
                    f"cannot fund cost {cost} at mana cap", turn=turn
                )

    def drain() -> None:
        while st.hand >= 4:
            cost = _cast_cost(_Equip())
            burst_to(cost)
            out.append(_Equip())
            st.mana -= cost
            st.hand -= 1

    for entry in entries:
        if isinstance(entry, _Window):
            entry_state = _WeaveState(st.mana, st.hand)
            wx = _weave_entries(entry.x_entries, entry_state, turn)
            y_state = _WeaveState(st.mana, st.hand)
            wy = _weave_entries(entry.y_entries, y_state, turn)
            if (entry_state.mana, entry_state.hand) != (y_state.mana, y_state.hand):
                raise ScheduleInfeasible(
                    "branch halves diverge in mana or hand flow", turn=turn
                )
            out.append(_Window(entry.decision, wx, wy, entry.pair_cards))
            st.mana, st.hand = entry_state.mana, entry_state.hand
            continue
        cost = _cast_cost(entry)
        if _consumes_card(entry) and not _gains_mana(entry):
            burst_to(cost)
        if isinstance(entry, _Cast) and entry.card == C.INNERVATE:
            st.mana = min(st.mana + 2, MAX_MANA)
        else:
            st.mana -= cost
        out.append(entry)
        if _consumes_card(entry):
            st.hand -= 1
        st.hand += _entry_draws(entry)
        if st.hand < 0:
            raise ScheduleInfeasible("hand flow underrun", turn=turn)
        if not isinstance(entry, (_Att, _End)):
            drain()
    return out


def weave_plans(
    plans: list[tuple[int, int, list[_PlanEntry]]]
) -> list[tuple[int, int, list[_PlanEntry]]]:
    hand_carry = {0: 0, 1: 0}
    woven: list[tuple[int, int, list[_PlanEntry]]] = []
    for turn, side, entries in plans:
        st = _WeaveState(mana=MAX_MANA, hand=hand_carry[side] + 1)  # +1 start draw
        woven.append((turn, side, _weave_entries(entries, st, turn)))
        hand_carry[side] = st.hand
    return woven


# ---------------------------------------------------------------------------
# Phase 1c: deck supply simulation
# ---------------------------------------------------------------------------


def _needs_of(entries: list[_PlanEntry]) -> list[str]:
    """Card ids in the order the deck must supply them.

    Branch cards are hoisted to the window start (both alternatives must be
    in hand before the branch is entered); shared cards inside a window are
    listed once, from the canonical (x) half.
    """
    needs: list[str] = []
    for entry in entries:
        if isinstance(entry, _Window):
            pair = Counter(entry.pair_cards)
            needs.extend(entry.pair_cards)
            inner = _needs_of(entry.x_entries)
            for cid in inner:
                if pair[cid] > 0:
                    pair[cid] -= 1
                else:
                    needs.append(cid)
        elif isinstance(entry, _Cast):
            needs.append(entry.card)
        elif isinstance(entry, _Summon):
            needs.append(entry.card)
        elif isinstance(entry, _Equip):
            needs.append(C.LIGHTS_JUSTICE)
    return needs


def _simulate_supply(
    plans: list[tuple[int, int, list[_PlanEntry]]], side: int, branch: str
) -> list[str]:
    """Walk one side's turns and derive the exact deck it must contain."""
    needs: list[str] = []
    for _, s, entries in plans:
        if s == side:
            needs.extend(_needs_of(entries))
    supply: list[str] = []
    frontier = 0
    hand: list[str] = []

    def draw() -> None:
        nonlocal frontier
        cid = needs[frontier] if frontier < len(needs) else C.LIGHTS_JUSTICE
        if frontier < len(needs):
            frontier += 1
        supply.append(cid)
        hand.append(cid)
        if len(hand) > 9:
            raise ScheduleInfeasible(f"hand model overflow on side {side}")

    def run(entries: list[_PlanEntry], turn: int) -> None:
        for k, entry in enumerate(entries):
            if isinstance(entry, _Window):
                run(entry.x_entries if branch == "x" else entry.y_entries, turn)
                continue
            if _consumes_card(entry):
                cid = entry.card if isinstance(entry, (_Cast, _Summon)) else C.LIGHTS_JUSTICE
                if cid not in hand:
                    raise ScheduleInfeasible(
                        f"{cid} not drawn in time", turn=turn, step=k
                    )
                hand.remove(cid)
            for _ in range(_entry_draws(entry)):
                draw()

    for turn, s, entries in plans:
        if s != side:
            continue
        draw()  # start-of-turn draw
        run(entries, turn)
    return supply


# ---------------------------------------------------------------------------
# Configuration assembly
# ---------------------------------------------------------------------------


def _board_entry(cid: str, attack=None, health=None, max_health=None, flags=()) -> dict:
    entry: dict = {"card": cid}
    if attack is not None:
        entry["attack"] = attack
    if health is not None:
        entry["health"] = health
    if max_health is not None:
        entry["maxHealth"] = max_health
    if flags:
        entry["flags"] = list(flags)
    return entry


def build_config(
    shifted: PartitionInstance,
    friendly_deck: list[str],
    enemy_deck: list[str],
    turn_limit: int,
) -> GameConfig:
    big = big_attack(shifted.max_value)
    hp = leper_health(shifted.target, shifted.n)
    hero = {
        "health": 1,
        "maxHealth": 30,
        "weapon": {"attack": 1, "durability": 4},
        "manaCrystals": 10,
    }
    friendly_board = [
        _board_entry(C.WEE_SPELLSTOPPER, flags=["frozen"]),
        _board_entry(C.WEE_SPELLSTOPPER, flags=["frozen"]),
        _board_entry(C.MISTRESS_OF_MIXTURES, flags=["frozen"]),
        _board_entry(C.WEE_SPELLSTOPPER, flags=["frozen"]),
        _board_entry(C.GADGETZAN_AUCTIONEER, attack=big, flags=["taunt", "frozen"]),
    ]
    enemy_board = [
        _board_entry(C.LEPER_GNOME, attack=big, health=hp, max_health=hp, flags=["taunt"]),
        _board_entry(C.WEE_SPELLSTOPPER),
        _board_entry(C.WEE_SPELLSTOPPER),
        _board_entry(C.GADGETZAN_AUCTIONEER),
    ]
    obj = {
        "formatVersion": FORMAT_VERSION,
        "players": [
            {"hero": dict(hero), "deck": list(friendly_deck), "hand": [], "board": friendly_board},
            {"hero": dict(hero), "deck": list(enemy_deck), "hand": [], "board": enemy_board},
        ],
        "active": 0,
        "turn": 1,
        "turnLimit": turn_limit,
    }
    return GameConfig.from_json_obj(obj)


# ---------------------------------------------------------------------------
# Phase 2: engine-driven script emission
# ---------------------------------------------------------------------------


class _Emitter:
    """Replays the woven plan through the real engine, producing concrete
    actions with live hand indices and checking every move is legal.

    Emission runs against a copy of the configuration whose accumulator has
    inflated hit points.  Hand, mana, deck and board choreography do not
    depend on the accumulator's exact health, and the inflation guarantees
    the walk never ends early even for overshooting canonical vectors, so
    every scripted step of the full line gets emitted.  Replays on the real
    configuration that end earlier simply truncate at the decided outcome.
    """

    def __init__(self, config: GameConfig):
        self.state = start_game(config)

    def _action_for(self, state: GameState, entry: _PlanEntry) -> Action:
        p = state.players[state.active]
        if isinstance(entry, _Cast):
            return PlayCard(p.hand.index(entry.card), entry.target)
        if isinstance(entry, _Summon):
            return PlayCard(p.hand.index(entry.card), None, entry.position)
        if isinstance(entry, _Equip):
            return PlayCard(p.hand.index(C.LIGHTS_JUSTICE))
        if isinstance(entry, _Att):
            return Attack(entry.attacker, entry.defender)
        if isinstance(entry, _End):
            return EndTurn()
        raise AssertionError(f"unexpected entry {entry!r}")

    def _run_entries(
        self, state: GameState, entries: list[_PlanEntry], turn: int
    ) -> tuple[GameState, list[ScriptStep]]:
        steps: list[ScriptStep] = []
        for k, entry in enumerate(entries):
            if isinstance(entry, _Window):
                raise AssertionError("nested windows are not supported")
            action = self._action_for(state, entry)
            optional = isinstance(entry, _Att) and entry.optional
            if state.outcome is not Outcome.ONGOING:
                steps.append(ScriptStep(action, optional))
                continue
            try:
                state = apply(state, action)
            except IllegalAction as exc:
                if optional:
                    steps.append(ScriptStep(action, True))
                    continue
                raise ScheduleInfeasible(
                    f"scripted action rejected: {exc.reason}", turn=turn, step=k
                ) from exc
            steps.append(ScriptStep(action, optional))
        return state, steps

    def emit(
        self, plans: list[tuple[int, int, list[_PlanEntry]]]
    ) -> tuple[TurnScript, ...]:
        turns: list[TurnScript] = []
        for turn, side, entries in plans:
            items: list[TurnItem] = []
            for entry in entries:
                if not isinstance(entry, _Window):
                    self.state, steps = self._run_entries(self.state, [entry], turn)
                    items.extend(steps)
                    continue
                fork = self.state.clone()
                self.state, x_steps = self._run_entries(self.state, entry.x_entries, turn)
                y_state, y_steps = self._run_entries(fork, entry.y_entries, turn)
                self._check_convergence(self.state, y_state, turn, entry.decision)
                items.append(Branch(entry.decision, tuple(x_steps), tuple(y_steps)))
            turns.append(TurnScript(turn, side, tuple(items)))
        return tuple(turns)

    def _check_convergence(
        self, sx: GameState, sy: GameState, turn: int, decision: int
    ) -> None:
        """Both branch halves must leave identical positions apart from the
        accumulator's hit points and, on enemy turns, the parked survivor."""
        def comparable(s: GameState) -> tuple:
            parts = []
            for side in (0, 1):
                p = s.players[side]
                board = []
                for slot, m in enumerate(p.board):
                    if side == 1 and slot == 0:
                        board.append(("accumulator", m.card_id))  # hp masked
                    elif side == 1 and slot == 4 and turn % 2 == 0:
                        board.append(("survivor",))  # differs by design
                    else:
                        board.append(m.canonical())
                parts.append(
                    (p.hero.canonical(), p.deck[p.deck_pos:], tuple(p.hand), tuple(board))
                )
            return (tuple(parts), s.active, s.turn, s.removed)
        if comparable(sx) != comparable(sy):
            raise ScheduleInfeasible(
                "branch halves fail to reconverge", turn=turn, step=decision
            )


def _decisions_meta(instance: PartitionInstance, shifted: PartitionInstance) -> tuple[Decision, ...]:
    out = []
    for i in range(1, instance.n + 1):
        rx, ry = instance.pairs[i - 1]
        sx, sy = shifted.pairs[i - 1]
        out.append(
            Decision(
                index=i, turn=i,
                x_value=rx, y_value=ry,
                x_attack=10 * sx + 2, y_attack=10 * sy + 2,
                x_destroyed=10 * sx, y_destroyed=10 * sy,
            )
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# Line running
# ---------------------------------------------------------------------------


def _emit_line_event(state: GameState, log: EventLog | None, kind: str, **data) -> None:
    if log is not None:
        log.emit(state.step, kind, **data)
    state.step += 1


def run_line(
    config: GameConfig,
    line: ScriptedLine,
    vector: tuple[str, ...],
    log: EventLog | None = None,
    on_step: Callable[[int, FlatStep, GameState], None] | None = None,
) -> GameState:
    """Replay the line under a full choice vector.

    Optional steps that are illegal in the current position are skipped; a
    decided outcome truncates the remainder.  Branch entry emits a
    ``decision`` event carrying the pair's values and carrier stats.
    ``on_step`` is called after every attempted step (applied or skipped)
    with the flattened step index and the resulting state.
    """
    state = start_game(config, log)
    for index, flat in enumerate(line.flatten(vector)):
        if state.outcome is not Outcome.ONGOING:
            break
        if flat.decision is not None:
            d = flat.decision
            destroyed = d.y_destroyed if flat.chosen == "x" else d.x_destroyed
            _emit_line_event(
                state, log, "decision",
                decision=d.index, turn=d.turn, chosen=flat.chosen,
                x_value=d.x_value, y_value=d.y_value,
                x_attack=d.x_attack, y_attack=d.y_attack,
                destroyed_at=destroyed,
            )
        try:
            state = apply(state, flat.action, log)
        except IllegalAction as exc:
            if flat.optional:
                _emit_line_event(
                    state, log, "skip",
                    turn=flat.turn, reason=exc.reason,
                    action=action_to_json_obj(flat.action),
                )
                if on_step is not None:
                    on_step(index, flat, state)
                continue
            raise IllegalAction(exc.reason, step=index) from exc
        if on_step is not None:
            on_step(index, flat, state)
    return state


def chosen_sum(instance: PartitionInstance, vector: tuple[str, ...]) -> int:
    total = 0
    for (x, y), choice in zip(instance.pairs, vector):
        total += x if choice == "x" else y
    return total


# ---------------------------------------------------------------------------
# Top-level compile
# ---------------------------------------------------------------------------


@dataclass
class CompileResult:
    instance: PartitionInstance
    shifted: PartitionInstance
    value_shift: int
    config: GameConfig
    line: ScriptedLine


def compile_instance(
    instance: PartitionInstance,
    *,
    turn_limit: int = DEFAULT_TURN_LIMIT,
    validate: str = "canonical",
) -> CompileResult:
    """Compile an instance into a game configuration and scripted line.

    ``validate`` controls post-compile replay checking: "canonical" replays
    the all-x and all-y vectors, "all" replays every vector (n <= 12 only),
    "none" skips replays.
    """
    if validate not in ("canonical", "all", "none"):
        raise ValueError(f"unknown validate mode {validate!r}")
    shifted, shift = shifted_instance(instance)
    plans = weave_plans(build_turn_plans(shifted))
    if turn_limit < len(plans):
        raise ScheduleInfeasible(
            f"line spans {len(plans)} turns but the turn limit is {turn_limit}"
        )

    friendly_deck = _simulate_supply(plans, side=0, branch="x")
    enemy_deck = _simulate_supply(plans, side=1, branch="x")
    for side, deck in ((0, friendly_deck), (1, enemy_deck)):
        alt = _simulate_supply(plans, side=side, branch="y")
        if alt != deck:
            raise ScheduleInfeasible(f"deck depends on branch choice (side {side})")

    config = build_config(shifted, friendly_deck, enemy_deck, turn_limit)
    emit_obj = config.to_json_obj()
    margin = 10 * sum(shifted.values()) + 10 * shifted.target + 10_000
    emit_obj["players"][1]["board"][0]["health"] += margin
    emit_obj["players"][1]["board"][0]["maxHealth"] += margin
    emitter = _Emitter(GameConfig.from_json_obj(emit_obj))
    turns = emitter.emit(plans)
    line = ScriptedLine(
        instance=instance,
        value_shift=shift,
        decisions=_decisions_meta(instance, shifted),
        turns=turns,
    )
    result = CompileResult(instance, shifted, shift, config, line)

    if validate != "none":
        vectors: list[tuple[str, ...]]
        if validate == "all":
            if instance.n > 12:
                raise ValueError("validate='all' limited to n <= 12")
            vectors = [
                tuple("x" if (mask >> k) & 1 == 0 else "y" for k in range(instance.n))
                for mask in range(1 << instance.n)
            ]
        else:
            vectors = [("x",) * instance.n, ("y",) * instance.n]
        for vec in vectors:
            final = run_line(config, line, vec)
            expected = (
                Outcome.FRIENDLY_WINS
                if chosen_sum(instance, vec) == instance.target
                else Outcome.ENEMY_WINS
            )
            if final.outcome is not expected:
                raise ScheduleInfeasible(
                    f"vector {''.join(vec)} ended {final.outcome.value}, "
                    f"expected {expected.value}"
                )
    return result

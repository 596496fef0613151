"""Deterministic battle rules: legality, resolution, turn structure, replay.

The engine is pure: ``apply`` clones the input state, resolves one action and
returns the successor.  Everything is integer arithmetic over ordered zones —
no randomness anywhere.  Resolution detail that the card text leaves open is
fixed here one way and kept stable:

* After damage or a destroy effect, dead minions are removed one at a time —
  scanning the active player's board left to right first, then the opponent's
  — and each death rattle resolves fully (including any further deaths it
  causes) before the next body is removed.
* A decided outcome (any hero at zero, or both) locks immediately and
  truncates all remaining resolution of the current action.
* Frozen characters thaw at the end of their controller's turn.
* "Spell-shielded" below means adjacent to a minion with the adjacent-spell-
  immunity trigger: such a minion cannot be targeted by any spell, friendly
  or hostile.  Untargeted spells and combat ignore the shield; heroes are
  never shielded.
"""
from __future__ import annotations

from typing import Iterable

from .cards import CardKind, CardSpec, EffectTag, Tribe, card
from .state import (
    Action,
    Attack,
    CharRef,
    EndTurn,
    EventLog,
    GameConfig,
    GameState,
    IllegalAction,
    MinionInstance,
    Outcome,
    PlayCard,
    PlayerState,
    Weapon,
    MAX_BOARD,
    MAX_HAND,
    MAX_MANA,
    hero_ref,
    minion_ref,
)

# ---------------------------------------------------------------------------
# Event emission
# ---------------------------------------------------------------------------


def _emit(state: GameState, log: EventLog | None, kind: str, **data) -> None:
    if log is not None:
        log.emit(state.step, kind, **data)
    state.step += 1


# ---------------------------------------------------------------------------
# Outcome locking
# ---------------------------------------------------------------------------


def _decided(state: GameState) -> bool:
    return state.outcome is not Outcome.ONGOING


def _check_outcome(state: GameState, log: EventLog | None) -> bool:
    """Lock the outcome if any hero is dead; return True once decided."""
    if _decided(state):
        return True
    h0 = state.players[0].hero.health
    h1 = state.players[1].hero.health
    if h0 <= 0 and h1 <= 0:
        state.outcome = Outcome.DRAW
    elif h0 <= 0:
        state.outcome = Outcome.ENEMY_WINS
    elif h1 <= 0:
        state.outcome = Outcome.FRIENDLY_WINS
    else:
        return False
    _emit(state, log, "outcome", result=state.outcome.value)
    return True


# ---------------------------------------------------------------------------
# Shared predicates
# ---------------------------------------------------------------------------


def spell_shielded(board: list[MinionInstance], slot: int) -> bool:
    """True if the minion at ``slot`` is protected from targeted spells."""
    for adj in (slot - 1, slot + 1):
        if 0 <= adj < len(board):
            if board[adj].effect is EffectTag.TRIGGER_ADJACENT_SPELL_IMMUNITY:
                return True
    return False


def _spell_target_ok(state: GameState, caster: int, effect: EffectTag, ref: CharRef) -> str | None:
    """Why ``ref`` is not a legal target for the spell, or None if it is."""
    if ref.is_hero:
        if effect is EffectTag.RESTORE_FIVE_HEALTH:
            return None
        return "spell cannot target a hero"
    owner = state.players[ref.side]
    if ref.slot is None or not (0 <= ref.slot < len(owner.board)):
        return "no minion at target slot"
    m = owner.board[ref.slot]
    if spell_shielded(owner.board, ref.slot):
        return "target is shielded from spells"
    if effect is EffectTag.DEAL_TWO_TO_UNDAMAGED_MINION and m.damaged:
        return "target must be undamaged"
    if effect is EffectTag.BUFF_DEMON_PLUS_3_3 and m.tribe is not Tribe.DEMON:
        return "target must be a demon"
    if effect is EffectTag.GIVE_CHARGE_PLUS_2 and ref.side != caster:
        return "target must be friendly"
    if effect is EffectTag.DESTROY_MINION_ATK_5_PLUS and m.attack < 5:
        return "target needs attack 5 or more"
    if effect is EffectTag.TAKE_CONTROL_ENEMY_MINION:
        if ref.side == caster:
            return "target must be an enemy minion"
        if len(state.players[caster].board) >= MAX_BOARD:
            return "own board is full"
    return None


_TARGETED_SPELLS = {
    EffectTag.DEAL_TWO_TO_UNDAMAGED_MINION,
    EffectTag.DEAL_ONE_DRAW_IF_KILL,
    EffectTag.BUFF_DEMON_PLUS_3_3,
    EffectTag.BUFF_PLUS_2_2_DRAW_IF_BEAST,
    EffectTag.DOUBLE_ATTACK,
    EffectTag.GIVE_CHARGE_PLUS_2,
    EffectTag.DESTROY_MINION_ATK_5_PLUS,
    EffectTag.TAKE_CONTROL_ENEMY_MINION,
    EffectTag.RESTORE_FIVE_HEALTH,
}


def _hero_can_attack(player: PlayerState) -> bool:
    hero = player.hero
    return (
        hero.weapon is not None
        and hero.weapon.durability >= 1
        and hero.weapon.attack >= 1
        and not hero.attacked
        and not hero.frozen
    )


def _defender_refs(state: GameState, side: int) -> list[CharRef]:
    """Legal defenders for the active ``side``: taunts restrict the choice."""
    opp_side = 1 - side
    opp = state.players[opp_side]
    taunts = [k for k, m in enumerate(opp.board) if m.taunt]
    if taunts:
        return [minion_ref(opp_side, k) for k in taunts]
    refs = [minion_ref(opp_side, k) for k in range(len(opp.board))]
    refs.append(hero_ref(opp_side))
    return refs


# ---------------------------------------------------------------------------
# Legal action enumeration
# ---------------------------------------------------------------------------


def legal_actions(state: GameState) -> list[Action]:
    """Every action the active player may take, in a stable canonical order."""
    if _decided(state):
        return []
    side = state.active
    p = state.players[side]
    acts: list[Action] = []

    for hi, cid in enumerate(p.hand):
        spec = card(cid)
        if spec.cost > p.hero.mana:
            continue
        if spec.kind is CardKind.MINION:
            if len(p.board) >= MAX_BOARD:
                continue
            for pos in range(len(p.board) + 1):
                acts.append(PlayCard(hi, None, pos))
        elif spec.kind is CardKind.WEAPON:
            acts.append(PlayCard(hi))
        elif spec.effect in _TARGETED_SPELLS:
            for ref in _candidate_targets(state):
                if _spell_target_ok(state, side, spec.effect, ref) is None:
                    acts.append(PlayCard(hi, ref))
        else:
            acts.append(PlayCard(hi))

    defenders = _defender_refs(state, side)
    for k, m in enumerate(p.board):
        if m.can_attack():
            for d in defenders:
                acts.append(Attack(minion_ref(side, k), d))
    if _hero_can_attack(p):
        for d in defenders:
            acts.append(Attack(hero_ref(side), d))

    acts.append(EndTurn())
    return acts


def _candidate_targets(state: GameState) -> Iterable[CharRef]:
    for side in (0, 1):
        yield hero_ref(side)
        for k in range(len(state.players[side].board)):
            yield minion_ref(side, k)


# ---------------------------------------------------------------------------
# Draws, damage, healing
# ---------------------------------------------------------------------------


def _draw_card(state: GameState, log: EventLog | None, side: int) -> None:
    if _decided(state):
        return
    p = state.players[side]
    if p.deck_pos < len(p.deck):
        cid = p.deck[p.deck_pos]
        p.deck_pos += 1
        if len(p.hand) >= MAX_HAND:
            state.removed += 1
            _emit(state, log, "burn", side=side, card=cid)
        else:
            p.hand.append(cid)
            _emit(state, log, "draw", side=side, card=cid)
    else:
        p.hero.fatigue += 1
        _emit(state, log, "fatigue", side=side, damage=p.hero.fatigue)
        p.hero.health -= p.hero.fatigue
        _emit(state, log, "damage", target={"hero": side}, amount=p.hero.fatigue)
        _check_outcome(state, log)


def _damage_minion(
    state: GameState, log: EventLog | None, side: int, m: MinionInstance, amount: int
) -> None:
    """Apply damage to a minion and fire its on-damage trigger if it survives."""
    if amount <= 0 or _decided(state):
        return
    m.health -= amount
    slot = state.players[side].board.index(m)
    _emit(state, log, "damage", target={"side": side, "slot": slot}, amount=amount)
    if m.health > 0 and m.effect is EffectTag.TRIGGER_DOUBLE_ATTACK_ON_DAMAGE:
        m.attack *= 2
        _emit(
            state, log, "trigger",
            card=m.card_id, effect=m.effect.value, attack=m.attack,
        )


def _damage_hero(state: GameState, log: EventLog | None, side: int, amount: int) -> None:
    if amount <= 0 or _decided(state):
        return
    state.players[side].hero.health -= amount
    _emit(state, log, "damage", target={"hero": side}, amount=amount)


def _heal_hero(state: GameState, log: EventLog | None, side: int, amount: int) -> None:
    if _decided(state):
        return
    hero = state.players[side].hero
    healed = min(amount, hero.max_health - hero.health)
    hero.health += healed
    _emit(state, log, "heal", target={"hero": side}, amount=healed)


def _heal_minion(
    state: GameState, log: EventLog | None, side: int, m: MinionInstance, amount: int
) -> None:
    if _decided(state):
        return
    healed = min(amount, m.max_health - m.health)
    m.health += healed
    slot = state.players[side].board.index(m)
    _emit(state, log, "heal", target={"side": side, "slot": slot}, amount=healed)


# ---------------------------------------------------------------------------
# Deaths and death rattles
# ---------------------------------------------------------------------------


def _first_dead(state: GameState) -> tuple[int, int] | None:
    """(side, slot) of the next body to remove; active side scans first."""
    for side in (state.active, 1 - state.active):
        for slot, m in enumerate(state.players[side].board):
            if m.health <= 0:
                return side, slot
    return None


def _process_deaths(state: GameState, log: EventLog | None) -> None:
    while not _decided(state):
        found = _first_dead(state)
        if found is None:
            return
        side, slot = found
        m = state.players[side].board.pop(slot)
        state.removed += 1
        _emit(state, log, "death", side=side, slot=slot, card=m.card_id)
        if m.effect is EffectTag.DEATHRATTLE_DAMAGE_ENEMY_HERO_2:
            _emit(state, log, "deathrattle", card=m.card_id)
            _damage_hero(state, log, 1 - side, 2)
            _check_outcome(state, log)
        elif m.effect is EffectTag.DEATHRATTLE_RESTORE_4_EACH_HERO:
            _emit(state, log, "deathrattle", card=m.card_id)
            _heal_hero(state, log, 0, 4)
            _heal_hero(state, log, 1, 4)


def _auctioneer_draws(state: GameState, log: EventLog | None, side: int) -> None:
    """One draw per surviving friendly draw-on-spell trigger minion."""
    if _decided(state):
        return
    count = sum(
        1
        for m in state.players[side].board
        if m.effect is EffectTag.TRIGGER_DRAW_ON_FRIENDLY_SPELL
    )
    for _ in range(count):
        if _decided(state):
            return
        _emit(state, log, "trigger", card="Gadgetzan Auctioneer",
              effect=EffectTag.TRIGGER_DRAW_ON_FRIENDLY_SPELL.value)
        _draw_card(state, log, side)


# ---------------------------------------------------------------------------
# Playing cards
# ---------------------------------------------------------------------------


def _resolve_spell(
    state: GameState, log: EventLog | None, side: int, spec: CardSpec, target: CharRef | None
) -> None:
    effect = spec.effect
    p = state.players[side]
    if effect is EffectTag.GAIN_TWO_MANA:
        p.hero.mana = min(p.hero.mana + 2, MAX_MANA)
        _emit(state, log, "mana", side=side, mana=p.hero.mana)
        return
    if effect is EffectTag.DRAW_TWO:
        _draw_card(state, log, side)
        _draw_card(state, log, side)
        return
    if effect is EffectTag.FREEZE_ENEMY_MINIONS:
        opp_side = 1 - side
        for slot, m in enumerate(state.players[opp_side].board):
            m.frozen = True
            _emit(state, log, "freeze", target={"side": opp_side, "slot": slot})
        return

    assert target is not None
    if target.is_hero:
        # Only the heal reaches heroes; target legality was checked upstream.
        _heal_hero(state, log, target.side, 5)
        return
    owner = state.players[target.side]
    m = owner.board[target.slot]
    if effect is EffectTag.DEAL_TWO_TO_UNDAMAGED_MINION:
        _damage_minion(state, log, target.side, m, 2)
    elif effect is EffectTag.DEAL_ONE_DRAW_IF_KILL:
        _damage_minion(state, log, target.side, m, 1)
        if m.health <= 0:
            _emit(state, log, "trigger", card=spec.card_id, effect=effect.value)
            _draw_card(state, log, side)
    elif effect is EffectTag.BUFF_DEMON_PLUS_3_3:
        m.attack += 3
        m.health += 3
        m.max_health += 3
        _emit(state, log, "buff", target=target.to_json_obj(),
              attack=m.attack, health=m.health)
    elif effect is EffectTag.BUFF_PLUS_2_2_DRAW_IF_BEAST:
        m.attack += 2
        m.health += 2
        m.max_health += 2
        _emit(state, log, "buff", target=target.to_json_obj(),
              attack=m.attack, health=m.health)
        if m.tribe is Tribe.BEAST:
            _emit(state, log, "trigger", card=spec.card_id, effect=effect.value)
            _draw_card(state, log, side)
    elif effect is EffectTag.DOUBLE_ATTACK:
        m.attack *= 2
        _emit(state, log, "buff", target=target.to_json_obj(),
              attack=m.attack, health=m.health)
    elif effect is EffectTag.GIVE_CHARGE_PLUS_2:
        m.charge = True
        m.attack += 2
        _emit(state, log, "buff", target=target.to_json_obj(),
              attack=m.attack, health=m.health)
    elif effect is EffectTag.DESTROY_MINION_ATK_5_PLUS:
        m.health = 0
    elif effect is EffectTag.TAKE_CONTROL_ENEMY_MINION:
        owner.board.remove(m)
        m.exhausted = True
        state.players[side].board.append(m)
        _emit(state, log, "steal", card=m.card_id, to=side,
              slot=len(state.players[side].board) - 1)
    elif effect is EffectTag.RESTORE_FIVE_HEALTH:
        _heal_minion(state, log, target.side, m, 5)
    else:  # pragma: no cover - the spell table above is exhaustive
        raise AssertionError(f"unhandled spell effect {effect}")


def _play_card(state: GameState, log: EventLog | None, action: PlayCard) -> None:
    side = state.active
    p = state.players[side]
    if not (0 <= action.hand < len(p.hand)):
        raise IllegalAction(f"no card in hand slot {action.hand}")
    cid = p.hand[action.hand]
    spec = card(cid)
    if spec.cost > p.hero.mana:
        raise IllegalAction(f"not enough mana for {cid} (have {p.hero.mana}, need {spec.cost})")

    if spec.kind is CardKind.MINION:
        if len(p.board) >= MAX_BOARD:
            raise IllegalAction("board is full")
        pos = action.position if action.position is not None else len(p.board)
        if not (0 <= pos <= len(p.board)):
            raise IllegalAction(f"bad summon position {pos}")
        if action.target is not None:
            raise IllegalAction(f"{cid} does not take a target")
        p.hero.mana -= spec.cost
        del p.hand[action.hand]
        _emit(state, log, "play", side=side, card=cid, position=pos)
        minion = MinionInstance.from_card(spec, state.next_iid)
        state.next_iid += 1
        minion.exhausted = True
        p.board.insert(pos, minion)
        _emit(state, log, "summon", side=side, card=cid, slot=pos)
        if spec.effect is EffectTag.BATTLECRY_DRAW_ONE:
            _emit(state, log, "trigger", card=cid, effect=spec.effect.value)
            _draw_card(state, log, side)
        if _check_outcome(state, log):
            return
        _process_deaths(state, log)
        return

    if spec.kind is CardKind.WEAPON:
        if action.target is not None or action.position is not None:
            raise IllegalAction(f"{cid} takes no target or position")
        p.hero.mana -= spec.cost
        del p.hand[action.hand]
        _emit(state, log, "play", side=side, card=cid)
        if p.hero.weapon is not None:
            state.removed += 1
            _emit(state, log, "weapon_break", side=side, replaced=True)
        p.hero.weapon = Weapon(spec.attack or 0, spec.health or 0)
        _emit(state, log, "equip", side=side, card=cid,
              attack=p.hero.weapon.attack, durability=p.hero.weapon.durability)
        return

    # Spell.
    if spec.effect in _TARGETED_SPELLS:
        if action.target is None:
            raise IllegalAction(f"{cid} needs a target")
        reason = _spell_target_ok(state, side, spec.effect, action.target)
        if reason is not None:
            raise IllegalAction(f"{cid}: {reason}")
    elif action.target is not None:
        raise IllegalAction(f"{cid} does not take a target")
    if action.position is not None:
        raise IllegalAction(f"{cid} takes no position")
    p.hero.mana -= spec.cost
    del p.hand[action.hand]
    state.removed += 1
    _emit(state, log, "play", side=side, card=cid,
          **({"target": action.target.to_json_obj()} if action.target else {}))
    _resolve_spell(state, log, side, spec, action.target)
    if _check_outcome(state, log):
        return
    _process_deaths(state, log)
    if _decided(state):
        return
    _auctioneer_draws(state, log, side)


# ---------------------------------------------------------------------------
# Combat
# ---------------------------------------------------------------------------


def _attack(state: GameState, log: EventLog | None, action: Attack) -> None:
    side = state.active
    atk_ref, def_ref = action.attacker, action.defender
    if atk_ref.side != side:
        raise IllegalAction("attacker must belong to the active player")
    if def_ref.side != 1 - side:
        raise IllegalAction("defender must belong to the opponent")
    p = state.players[side]
    opp = state.players[1 - side]

    attacker_minion: MinionInstance | None = None
    if atk_ref.is_hero:
        if not _hero_can_attack(p):
            raise IllegalAction("hero cannot attack (weapon, frozen or already attacked)")
        power = p.hero.weapon.attack
    else:
        if not (0 <= atk_ref.slot < len(p.board)):
            raise IllegalAction("no attacker at that slot")
        attacker_minion = p.board[atk_ref.slot]
        if not attacker_minion.can_attack():
            raise IllegalAction(
                f"{attacker_minion.card_id} cannot attack (frozen, exhausted or spent)"
            )
        power = attacker_minion.attack

    defender_minion: MinionInstance | None = None
    if def_ref.is_hero:
        if any(m.taunt for m in opp.board):
            raise IllegalAction("a taunt minion is in the way")
    else:
        if not (0 <= def_ref.slot < len(opp.board)):
            raise IllegalAction("no defender at that slot")
        defender_minion = opp.board[def_ref.slot]
        if any(m.taunt for m in opp.board) and not defender_minion.taunt:
            raise IllegalAction("a taunt minion is in the way")

    _emit(state, log, "attack",
          attacker=atk_ref.to_json_obj(), defender=def_ref.to_json_obj())

    retaliation = defender_minion.attack if defender_minion is not None else 0

    if attacker_minion is not None:
        attacker_minion.attacked = True
    else:
        p.hero.attacked = True
        p.hero.weapon.durability -= 1
        if p.hero.weapon.durability <= 0:
            p.hero.weapon = None
            state.removed += 1
            _emit(state, log, "weapon_break", side=side)

    # Both combat damages are simultaneous: amounts were fixed above.
    if defender_minion is not None:
        _damage_minion(state, log, 1 - side, defender_minion, power)
    else:
        _damage_hero(state, log, 1 - side, power)
    if attacker_minion is not None:
        _damage_minion(state, log, side, attacker_minion, retaliation)
    else:
        _damage_hero(state, log, side, retaliation)

    if _check_outcome(state, log):
        return
    _process_deaths(state, log)


# ---------------------------------------------------------------------------
# Turn structure
# ---------------------------------------------------------------------------


def _begin_turn(state: GameState, log: EventLog | None) -> None:
    """Start-of-turn sequence for the current active player."""
    side = state.active
    p = state.players[side]
    p.hero.attacked = False
    for m in p.board:
        m.exhausted = False
        m.attacked = False
    _emit(state, log, "start_turn", side=side, turn=state.turn, mana=p.hero.mana)
    _draw_card(state, log, side)


def _end_turn(state: GameState, log: EventLog | None) -> None:
    side = state.active
    _emit(state, log, "end_turn", side=side)
    # Thaw at the end of the owner's turn.
    p = state.players[side]
    p.hero.frozen = False
    for m in p.board:
        m.frozen = False
    state.active = 1 - side
    state.turn += 1
    if state.turn > state.turn_limit:
        state.outcome = Outcome.DRAW
        _emit(state, log, "outcome", result=state.outcome.value, reason="turn_limit")
        return
    nxt = state.players[state.active]
    nxt.hero.mana_crystals = min(nxt.hero.mana_crystals + 1, MAX_MANA)
    nxt.hero.mana = nxt.hero.mana_crystals
    _begin_turn(state, log)


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------


def apply(state: GameState, action: Action, log: EventLog | None = None) -> GameState:
    """Resolve one action; returns the successor state, never mutates input."""
    if _decided(state):
        raise IllegalAction("the game is already decided")
    s = state.clone()
    if isinstance(action, PlayCard):
        _play_card(s, log, action)
    elif isinstance(action, Attack):
        _attack(s, log, action)
    elif isinstance(action, EndTurn):
        _end_turn(s, log)
    else:
        raise IllegalAction(f"unknown action {action!r}")
    return s


def start_game(config: GameConfig, log: EventLog | None = None) -> GameState:
    """Build the initial state and run the first player's turn start (a draw).

    The configuration describes the position as the first turn begins: mana
    crystals are already at their for-turn value and are refilled, then the
    active player draws their start-of-turn card.
    """
    state = config.to_state()
    _begin_turn(state, log)
    return state


def replay(
    config: GameConfig, actions: Iterable[Action], log: EventLog | None = None
) -> GameState:
    """Run a fixed action sequence; stops early once the outcome is decided.

    Raises IllegalAction (annotated with the zero-based step index) if an
    action fails validation before the game is decided.
    """
    state = start_game(config, log)
    for idx, action in enumerate(actions):
        if _decided(state):
            break
        try:
            state = apply(state, action, log)
        except IllegalAction as exc:
            raise IllegalAction(exc.reason, step=idx) from None
    return state

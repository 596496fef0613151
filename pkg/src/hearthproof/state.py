"""Game state value types, configuration IO and canonical hashing.

States are cheap-to-clone value objects: the rules engine never mutates an
input state, it clones and returns.  Decks are shared immutable tuples with a
per-player draw cursor so cloning is O(board + hand), not O(deck).
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from enum import Enum
from hashlib import blake2b
from typing import Any, Iterable

from .cards import CardKind, CardSpec, EffectTag, Tribe, card

FORMAT_VERSION = 1

FRIENDLY = 0
ENEMY = 1

MAX_BOARD = 7
MAX_HAND = 10
MAX_MANA = 10
MAX_HERO_HEALTH = 30
DEFAULT_TURN_LIMIT = 500


class Outcome(str, Enum):
    ONGOING = "ongoing"
    FRIENDLY_WINS = "friendly_wins"
    ENEMY_WINS = "enemy_wins"
    DRAW = "draw"


class IllegalAction(Exception):
    """Raised when an action fails validation against the current state."""

    def __init__(self, reason: str, step: int | None = None):
        self.reason = reason
        self.step = step
        super().__init__(reason if step is None else f"step {step}: {reason}")


# ---------------------------------------------------------------------------
# Actions and character references
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharRef:
    """Reference to a character: ``slot`` is a board index, or None for the hero."""

    side: int
    slot: int | None

    @property
    def is_hero(self) -> bool:
        return self.slot is None

    def to_json_obj(self) -> dict:
        if self.slot is None:
            return {"hero": self.side}
        return {"side": self.side, "slot": self.slot}

    @staticmethod
    def from_json_obj(obj: dict) -> "CharRef":
        if "hero" in obj:
            return CharRef(int(obj["hero"]), None)
        return CharRef(int(obj["side"]), int(obj["slot"]))


def hero_ref(side: int) -> CharRef:
    return CharRef(side, None)


def minion_ref(side: int, slot: int) -> CharRef:
    return CharRef(side, slot)


@dataclass(frozen=True)
class PlayCard:
    hand: int
    target: CharRef | None = None
    position: int | None = None


@dataclass(frozen=True)
class Attack:
    attacker: CharRef
    defender: CharRef


@dataclass(frozen=True)
class EndTurn:
    pass


Action = PlayCard | Attack | EndTurn


def action_to_json_obj(action: Action) -> dict:
    if isinstance(action, PlayCard):
        play: dict[str, Any] = {"hand": action.hand}
        if action.target is not None:
            play["target"] = action.target.to_json_obj()
        if action.position is not None:
            play["position"] = action.position
        return {"play": play}
    if isinstance(action, Attack):
        return {
            "attack": {
                "attacker": action.attacker.to_json_obj(),
                "defender": action.defender.to_json_obj(),
            }
        }
    if isinstance(action, EndTurn):
        return {"end": True}
    raise TypeError(f"not an action: {action!r}")


def action_from_json_obj(obj: dict) -> Action:
    if "play" in obj:
        play = obj["play"]
        target = CharRef.from_json_obj(play["target"]) if "target" in play else None
        position = play.get("position")
        return PlayCard(int(play["hand"]), target, position)
    if "attack" in obj:
        atk = obj["attack"]
        return Attack(
            CharRef.from_json_obj(atk["attacker"]),
            CharRef.from_json_obj(atk["defender"]),
        )
    if obj.get("end"):
        return EndTurn()
    raise ValueError(f"unrecognised action object: {obj!r}")


# ---------------------------------------------------------------------------
# Events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    """One resolution step in the event log."""

    step: int
    kind: str
    data: dict

    def to_json_obj(self) -> dict:
        obj = {"step": self.step, "kind": self.kind}
        obj.update(self.data)
        return obj


class EventLog:
    """Append-only event collector; pass None to the engine to skip logging."""

    def __init__(self) -> None:
        self.events: list[Event] = []

    def emit(self, step: int, kind: str, **data: Any) -> None:
        self.events.append(Event(step, kind, data))

    def __iter__(self):
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)


# ---------------------------------------------------------------------------
# Mutable-by-the-engine building blocks (cloned before every mutation)
# ---------------------------------------------------------------------------


class Weapon:
    __slots__ = ("attack", "durability")

    def __init__(self, attack: int, durability: int):
        self.attack = attack
        self.durability = durability

    def clone(self) -> "Weapon":
        return Weapon(self.attack, self.durability)

    def canonical(self) -> tuple:
        return (self.attack, self.durability)


class MinionInstance:
    __slots__ = (
        "card_id",
        "effect",
        "tribe",
        "attack",
        "health",
        "max_health",
        "taunt",
        "frozen",
        "exhausted",
        "charge",
        "attacked",
        "iid",
    )

    def __init__(
        self,
        card_id: str,
        effect: EffectTag,
        tribe: Tribe,
        attack: int,
        health: int,
        max_health: int,
        taunt: bool = False,
        frozen: bool = False,
        exhausted: bool = False,
        charge: bool = False,
        attacked: bool = False,
        iid: int = 0,
    ):
        self.card_id = card_id
        self.effect = effect
        self.tribe = tribe
        self.attack = attack
        self.health = health
        self.max_health = max_health
        self.taunt = taunt
        self.frozen = frozen
        self.exhausted = exhausted
        self.charge = charge
        self.attacked = attacked
        self.iid = iid

    @staticmethod
    def from_card(spec: CardSpec, iid: int) -> "MinionInstance":
        assert spec.kind == CardKind.MINION
        return MinionInstance(
            card_id=spec.card_id,
            effect=spec.effect,
            tribe=spec.tribe,
            attack=spec.attack or 0,
            health=spec.health or 0,
            max_health=spec.health or 0,
            iid=iid,
        )

    @property
    def damaged(self) -> bool:
        return self.health < self.max_health

    def can_attack(self) -> bool:
        if self.attack < 1 or self.frozen or self.attacked:
            return False
        return (not self.exhausted) or self.charge

    def clone(self) -> "MinionInstance":
        m = MinionInstance.__new__(MinionInstance)
        m.card_id = self.card_id
        m.effect = self.effect
        m.tribe = self.tribe
        m.attack = self.attack
        m.health = self.health
        m.max_health = self.max_health
        m.taunt = self.taunt
        m.frozen = self.frozen
        m.exhausted = self.exhausted
        m.charge = self.charge
        m.attacked = self.attacked
        m.iid = self.iid
        return m

    def canonical(self) -> tuple:
        return (
            self.card_id,
            self.attack,
            self.health,
            self.max_health,
            self.taunt,
            self.frozen,
            self.exhausted,
            self.charge,
            self.attacked,
        )


class HeroState:
    __slots__ = (
        "health",
        "max_health",
        "weapon",
        "mana_crystals",
        "mana",
        "attacked",
        "frozen",
        "fatigue",
    )

    def __init__(
        self,
        health: int,
        max_health: int = MAX_HERO_HEALTH,
        weapon: Weapon | None = None,
        mana_crystals: int = MAX_MANA,
        mana: int = 0,
        attacked: bool = False,
        frozen: bool = False,
        fatigue: int = 0,
    ):
        self.health = health
        self.max_health = max_health
        self.weapon = weapon
        self.mana_crystals = mana_crystals
        self.mana = mana
        self.attacked = attacked
        self.frozen = frozen
        self.fatigue = fatigue

    def clone(self) -> "HeroState":
        h = HeroState.__new__(HeroState)
        h.health = self.health
        h.max_health = self.max_health
        h.weapon = self.weapon.clone() if self.weapon else None
        h.mana_crystals = self.mana_crystals
        h.mana = self.mana
        h.attacked = self.attacked
        h.frozen = self.frozen
        h.fatigue = self.fatigue
        return h

    def canonical(self) -> tuple:
        return (
            self.health,
            self.max_health,
            self.weapon.canonical() if self.weapon else None,
            self.mana_crystals,
            self.mana,
            self.attacked,
            self.frozen,
            self.fatigue,
        )


class PlayerState:
    __slots__ = ("hero", "deck", "deck_pos", "hand", "board")

    def __init__(
        self,
        hero: HeroState,
        deck: tuple[str, ...],
        deck_pos: int,
        hand: list[str],
        board: list[MinionInstance],
    ):
        self.hero = hero
        self.deck = deck
        self.deck_pos = deck_pos
        self.hand = hand
        self.board = board

    @property
    def deck_remaining(self) -> int:
        return len(self.deck) - self.deck_pos

    def clone(self) -> "PlayerState":
        p = PlayerState.__new__(PlayerState)
        p.hero = self.hero.clone()
        p.deck = self.deck
        p.deck_pos = self.deck_pos
        p.hand = list(self.hand)
        p.board = [m.clone() for m in self.board]
        return p

    def canonical(self) -> tuple:
        return (
            self.hero.canonical(),
            self.deck[self.deck_pos :],
            tuple(self.hand),
            tuple(m.canonical() for m in self.board),
        )


class GameState:
    __slots__ = (
        "players",
        "active",
        "turn",
        "turn_limit",
        "outcome",
        "removed",
        "next_iid",
        "step",
    )

    def __init__(
        self,
        players: list[PlayerState],
        active: int,
        turn: int,
        turn_limit: int = DEFAULT_TURN_LIMIT,
        outcome: Outcome = Outcome.ONGOING,
        removed: int = 0,
        next_iid: int = 1,
        step: int = 0,
    ):
        self.players = players
        self.active = active
        self.turn = turn
        self.turn_limit = turn_limit
        self.outcome = outcome
        self.removed = removed
        self.next_iid = next_iid
        self.step = step

    def clone(self) -> "GameState":
        s = GameState.__new__(GameState)
        s.players = [p.clone() for p in self.players]
        s.active = self.active
        s.turn = self.turn
        s.turn_limit = self.turn_limit
        s.outcome = self.outcome
        s.removed = self.removed
        s.next_iid = self.next_iid
        s.step = self.step
        return s

    def player(self, side: int) -> PlayerState:
        return self.players[side]

    def opponent(self, side: int) -> PlayerState:
        return self.players[1 - side]

    def canonical(self) -> tuple:
        """Content tuple that determines the state hash.

        Deliberately excludes the event-log cursor (``step``); two states that
        differ only in how many events were emitted along the way are the same
        position.
        """
        return (
            self.players[0].canonical(),
            self.players[1].canonical(),
            self.active,
            self.turn,
            self.turn_limit,
            self.outcome.value,
            self.removed,
        )


# ---------------------------------------------------------------------------
# Canonical 64-bit hashing
# ---------------------------------------------------------------------------


def _encode(value: Any, out: bytearray) -> None:
    if value is None:
        out += b"N"
    elif value is True:
        out += b"T"
    elif value is False:
        out += b"F"
    elif isinstance(value, int):
        out += b"i%d;" % value
    elif isinstance(value, str):
        raw = value.encode("utf-8")
        out += b"s%d:" % len(raw)
        out += raw
    elif isinstance(value, tuple):
        out += b"("
        for item in value:
            _encode(item, out)
        out += b")"
    else:
        raise TypeError(f"unhashable canonical element: {value!r}")


def canonical_bytes(value: Any) -> bytes:
    out = bytearray()
    _encode(value, out)
    return bytes(out)


def state_hash(state: GameState) -> int:
    """Stable 64-bit digest of the position (platform and run independent)."""
    digest = blake2b(canonical_bytes(state.canonical()), digest_size=8).digest()
    return int.from_bytes(digest, "big")


# ---------------------------------------------------------------------------
# Game configuration (external JSON format)
# ---------------------------------------------------------------------------


class ConfigError(ValueError):
    """Raised for malformed configuration input."""


_BOARD_FLAGS = ("taunt", "frozen", "exhausted", "charge")


@dataclass
class GameConfig:
    """Parsed, validated game setup; convertible to an engine state."""

    obj: dict

    @staticmethod
    def from_json_obj(obj: dict) -> "GameConfig":
        _validate_config(obj)
        return GameConfig(copy.deepcopy(obj))

    @staticmethod
    def from_json(text: str) -> "GameConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return GameConfig.from_json_obj(obj)

    def to_json_obj(self) -> dict:
        return copy.deepcopy(self.obj)

    def to_json(self) -> str:
        return json.dumps(self.obj, indent=2, sort_keys=True) + "\n"

    def to_state(self) -> GameState:
        return config_to_state(self)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _validate_config(obj: dict) -> None:
    _require(isinstance(obj, dict), "config must be an object")
    _require(obj.get("formatVersion") == FORMAT_VERSION, "formatVersion must be 1")
    players = obj.get("players")
    _require(isinstance(players, list) and len(players) == 2, "need exactly 2 players")
    _require(obj.get("active") in (0, 1), "active must be 0 or 1")
    _require(isinstance(obj.get("turn"), int) and obj["turn"] >= 1, "turn must be >= 1")
    limit = obj.get("turnLimit", DEFAULT_TURN_LIMIT)
    _require(isinstance(limit, int) and limit >= 1, "turnLimit must be >= 1")
    for idx, ps in enumerate(players):
        where = f"players[{idx}]"
        _require(isinstance(ps, dict), f"{where} must be an object")
        hero = ps.get("hero")
        _require(isinstance(hero, dict), f"{where}.hero missing")
        _require(
            isinstance(hero.get("health"), int) and hero["health"] >= 1,
            f"{where}.hero.health must be a positive integer",
        )
        max_health = hero.get("maxHealth", MAX_HERO_HEALTH)
        _require(hero["health"] <= max_health, f"{where}.hero.health exceeds maxHealth")
        crystals = hero.get("manaCrystals", MAX_MANA)
        _require(0 <= crystals <= MAX_MANA, f"{where}.hero.manaCrystals out of range")
        weapon = hero.get("weapon")
        if weapon is not None:
            _require(
                isinstance(weapon, dict)
                and weapon.get("attack", 0) >= 0
                and weapon.get("durability", 0) >= 1,
                f"{where}.hero.weapon malformed",
            )
        for zone in ("deck", "hand"):
            ids = ps.get(zone, [])
            _require(isinstance(ids, list), f"{where}.{zone} must be a list")
            for cid in ids:
                try:
                    card(cid)
                except KeyError:
                    raise ConfigError(f"{where}.{zone}: unknown card {cid!r}")
        _require(len(ps.get("hand", [])) <= MAX_HAND, f"{where}.hand exceeds {MAX_HAND}")
        board = ps.get("board", [])
        _require(isinstance(board, list) and len(board) <= MAX_BOARD, f"{where}.board too large")
        for bi, entry in enumerate(board):
            bwhere = f"{where}.board[{bi}]"
            _require(isinstance(entry, dict) and "card" in entry, f"{bwhere} needs a card")
            try:
                spec = card(entry["card"])
            except KeyError:
                raise ConfigError(f"{bwhere}: unknown card {entry['card']!r}")
            _require(spec.kind == CardKind.MINION, f"{bwhere}: {entry['card']} is not a minion")
            for flag in entry.get("flags", []):
                _require(flag in _BOARD_FLAGS, f"{bwhere}: unknown flag {flag!r}")
            health = entry.get("health", spec.health)
            max_h = entry.get("maxHealth", max(health, spec.health))
            _require(1 <= health <= max_h, f"{bwhere}: health out of range")


def config_to_state(config: GameConfig) -> GameState:
    obj = config.obj
    players: list[PlayerState] = []
    next_iid = 1
    for ps in obj["players"]:
        hero_obj = ps["hero"]
        weapon_obj = hero_obj.get("weapon")
        weapon = (
            Weapon(weapon_obj["attack"], weapon_obj["durability"]) if weapon_obj else None
        )
        crystals = hero_obj.get("manaCrystals", MAX_MANA)
        hero = HeroState(
            health=hero_obj["health"],
            max_health=hero_obj.get("maxHealth", MAX_HERO_HEALTH),
            weapon=weapon,
            mana_crystals=crystals,
            mana=crystals,
        )
        board: list[MinionInstance] = []
        for entry in ps.get("board", []):
            spec = card(entry["card"])
            flags = entry.get("flags", [])
            health = entry.get("health", spec.health)
            minion = MinionInstance(
                card_id=spec.card_id,
                effect=spec.effect,
                tribe=spec.tribe,
                attack=entry.get("attack", spec.attack),
                health=health,
                max_health=entry.get("maxHealth", max(health, spec.health)),
                taunt="taunt" in flags,
                frozen="frozen" in flags,
                exhausted="exhausted" in flags,
                charge="charge" in flags,
                iid=next_iid,
            )
            next_iid += 1
            board.append(minion)
        players.append(
            PlayerState(
                hero=hero,
                deck=tuple(ps.get("deck", [])),
                deck_pos=0,
                hand=list(ps.get("hand", [])),
                board=board,
            )
        )
    return GameState(
        players=players,
        active=obj["active"],
        turn=obj["turn"],
        turn_limit=obj.get("turnLimit", DEFAULT_TURN_LIMIT),
        next_iid=next_iid,
    )


def state_to_json_obj(state: GameState) -> dict:
    """Informational snapshot of a live state (used by --trace output)."""

    def minion_obj(m: MinionInstance) -> dict:
        flags = [
            name
            for name, val in (
                ("taunt", m.taunt),
                ("frozen", m.frozen),
                ("exhausted", m.exhausted),
                ("charge", m.charge),
                ("attacked", m.attacked),
            )
            if val
        ]
        return {
            "card": m.card_id,
            "attack": m.attack,
            "health": m.health,
            "maxHealth": m.max_health,
            "flags": flags,
        }

    def player_obj(p: PlayerState) -> dict:
        hero = {
            "health": p.hero.health,
            "maxHealth": p.hero.max_health,
            "manaCrystals": p.hero.mana_crystals,
            "mana": p.hero.mana,
            "fatigue": p.hero.fatigue,
        }
        if p.hero.weapon:
            hero["weapon"] = {
                "attack": p.hero.weapon.attack,
                "durability": p.hero.weapon.durability,
            }
        return {
            "hero": hero,
            "hand": list(p.hand),
            "deckRemaining": p.deck_remaining,
            "board": [minion_obj(m) for m in p.board],
        }

    return {
        "players": [player_obj(p) for p in state.players],
        "active": state.active,
        "turn": state.turn,
        "outcome": state.outcome.value,
    }


def total_card_count(state: GameState) -> int:
    """Cards across all zones plus the removed counter; conserved by the engine."""
    total = state.removed
    for p in state.players:
        total += p.deck_remaining + len(p.hand) + len(p.board)
        if p.hero.weapon is not None:
            total += 1
    return total

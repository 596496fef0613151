"""State layer: config validation, action JSON, hashing, clone isolation."""

from __future__ import annotations

import pytest

from hearthproof.state import (
    Attack,
    ConfigError,
    EndTurn,
    GameConfig,
    PlayCard,
    action_from_json_obj,
    action_to_json_obj,
    hero_ref,
    minion_ref,
    state_hash,
    state_to_json_obj,
)


def micro_config_obj() -> dict:
    return {
        "formatVersion": 1,
        "players": [
            {
                "hero": {"health": 10, "manaCrystals": 2},
                "deck": ["Innervate"],
                "hand": ["Mortal Coil"],
                "board": [{"card": "Leper Gnome", "attack": 2, "health": 1}],
            },
            {
                "hero": {"health": 5, "manaCrystals": 0},
                "deck": [],
                "hand": [],
                "board": [],
            },
        ],
        "active": 0,
        "turn": 1,
        "turnLimit": 8,
    }


class TestConfigValidation:
    def test_accepts_well_formed(self) -> None:
        GameConfig.from_json_obj(micro_config_obj())

    def test_rejects_wrong_format_version(self) -> None:
        obj = micro_config_obj()
        obj["formatVersion"] = 2
        with pytest.raises(ConfigError):
            GameConfig.from_json_obj(obj)

    def test_rejects_unknown_card(self) -> None:
        obj = micro_config_obj()
        obj["players"][0]["deck"] = ["Fireball"]
        with pytest.raises(ConfigError):
            GameConfig.from_json_obj(obj)

    def test_rejects_nonminion_on_board(self) -> None:
        obj = micro_config_obj()
        obj["players"][0]["board"] = [{"card": "Charge"}]
        with pytest.raises(ConfigError):
            GameConfig.from_json_obj(obj)

    def test_rejects_oversized_board(self) -> None:
        obj = micro_config_obj()
        obj["players"][0]["board"] = [{"card": "Novice Engineer"}] * 8
        with pytest.raises(ConfigError):
            GameConfig.from_json_obj(obj)

    def test_rejects_bad_flag(self) -> None:
        obj = micro_config_obj()
        obj["players"][0]["board"][0]["flags"] = ["stealth"]
        with pytest.raises(ConfigError):
            GameConfig.from_json_obj(obj)

    def test_config_isolated_from_caller_mutation(self) -> None:
        obj = micro_config_obj()
        config = GameConfig.from_json_obj(obj)
        obj["players"][0]["hero"]["health"] = 1
        assert config.obj["players"][0]["hero"]["health"] == 10
        out = config.to_json_obj()
        out["players"][0]["hero"]["health"] = 2
        assert config.obj["players"][0]["hero"]["health"] == 10


class TestActionJson:
    def test_round_trips(self) -> None:
        actions = [
            PlayCard(0),
            PlayCard(3, target=minion_ref(1, 2)),
            PlayCard(1, position=6),
            PlayCard(2, target=hero_ref(0)),
            Attack(minion_ref(0, 1), minion_ref(1, 0)),
            Attack(hero_ref(0), hero_ref(1)),
            EndTurn(),
        ]
        for action in actions:
            assert action_from_json_obj(action_to_json_obj(action)) == action


class TestHashing:
    def test_hash_stable_across_conversions(self) -> None:
        config = GameConfig.from_json_obj(micro_config_obj())
        assert state_hash(config.to_state()) == state_hash(config.to_state())

    def test_hash_sees_content_changes(self) -> None:
        base = GameConfig.from_json_obj(micro_config_obj()).to_state()
        changed = base.clone()
        changed.players[1].hero.health -= 1
        assert state_hash(base) != state_hash(changed)

    def test_hash_ignores_event_cursor(self) -> None:
        base = GameConfig.from_json_obj(micro_config_obj()).to_state()
        shifted = base.clone()
        shifted.step += 17
        assert state_hash(base) == state_hash(shifted)

    def test_hash_sees_turn_limit(self) -> None:
        base = GameConfig.from_json_obj(micro_config_obj()).to_state()
        clamped = base.clone()
        clamped.turn_limit = 3
        assert state_hash(base) != state_hash(clamped)


class TestCloneIsolation:
    def test_deep_clone(self) -> None:
        state = GameConfig.from_json_obj(micro_config_obj()).to_state()
        copy = state.clone()
        copy.players[0].board[0].attack = 99
        copy.players[0].hand.append("Innervate")
        copy.players[0].hero.health = 1
        assert state.players[0].board[0].attack == 2
        assert state.players[0].hand == ["Mortal Coil"]
        assert state.players[0].hero.health == 10


class TestSnapshot:
    def test_snapshot_shape(self) -> None:
        state = GameConfig.from_json_obj(micro_config_obj()).to_state()
        snap = state_to_json_obj(state)
        assert snap["turn"] == 1
        assert snap["players"][0]["board"][0]["card"] == "Leper Gnome"
        assert snap["players"][0]["deckRemaining"] == 1
        assert snap["outcome"] == "ongoing"

"""Card table: contents, stat arithmetic, and serialization round-trips."""

from __future__ import annotations

import pathlib

from hearthproof import cards
from hearthproof.cards import (
    CardKind,
    EffectTag,
    Tribe,
    card,
    card_database,
    database_from_json,
    database_to_json,
)

DATA_FILE = (
    pathlib.Path(cards.__file__).parent / "data" / "cards.json"
)


class TestTableContents:
    def test_exactly_twenty_cards(self) -> None:
        assert len(card_database()) == 20

    def test_kind_census(self) -> None:
        kinds = [c.kind for c in card_database().values()]
        assert kinds.count(CardKind.SPELL) == 12
        assert kinds.count(CardKind.MINION) == 7
        assert kinds.count(CardKind.WEAPON) == 1

    def test_unknown_card_raises(self) -> None:
        try:
            card("Doomhammer")
        except KeyError:
            pass
        else:
            raise AssertionError("expected KeyError for a card outside the set")

    def test_minion_stats(self) -> None:
        fw = card(cards.FLOATING_WATCHER)
        assert (fw.cost, fw.attack, fw.health, fw.tribe) == (5, 4, 4, Tribe.DEMON)
        gz = card(cards.GAHZRILLA)
        assert (gz.cost, gz.attack, gz.health, gz.tribe) == (7, 6, 9, Tribe.BEAST)
        leper = card(cards.LEPER_GNOME)
        assert (leper.cost, leper.attack, leper.health) == (1, 2, 1)
        assert leper.effect == EffectTag.DEATHRATTLE_DAMAGE_ENEMY_HERO_2
        weapon = card(cards.LIGHTS_JUSTICE)
        assert (weapon.kind, weapon.attack, weapon.health) == (CardKind.WEAPON, 1, 4)

    def test_spell_costs(self) -> None:
        costs = {
            cards.INNERVATE: 0,
            cards.BACKSTAB: 0,
            cards.MORTAL_COIL: 1,
            cards.FLASH_HEAL: 1,
            cards.DEMONFUSE: 2,
            cards.MARK_OF_YSHAARJ: 2,
            cards.ARCANE_INTELLECT: 3,
            cards.FROST_NOVA: 3,
            cards.CHARGE: 3,
            cards.SHADOW_WORD_DEATH: 3,
            cards.BLESSED_CHAMPION: 5,
            cards.MIND_CONTROL: 10,
        }
        for card_id, cost in costs.items():
            assert card(card_id).cost == cost, card_id


class TestBuffArithmetic:
    """The stat lines that make the carrier accounting work out."""

    def test_demon_carrier_reaches_ten(self) -> None:
        # 4 base + 3 + 3 from two demon buffs
        assert card(cards.FLOATING_WATCHER).attack + 3 + 3 == 10

    def test_doubling_reaches_twenty(self) -> None:
        assert 2 * 10 == 20

    def test_charge_bonus_lands_on_milestones(self) -> None:
        # buffed carriers at 10 and 20 attack for 12 and 22 after Charge
        assert 10 + 2 == 12
        assert 20 + 2 == 22

    def test_beast_carrier_reaches_ten(self) -> None:
        # 6 base + 2 + 2 from two beast marks
        assert card(cards.GAHZRILLA).attack + 2 + 2 == 10


class TestSerialization:
    def test_round_trip_equals_database(self) -> None:
        assert database_from_json(database_to_json()) == card_database()

    def test_dump_is_stable(self) -> None:
        assert database_to_json() == database_to_json()

    def test_shipped_data_file_matches_embedded_table(self) -> None:
        assert DATA_FILE.read_text() == database_to_json()

    def test_dump_is_keyed_by_card_id(self) -> None:
        import json

        obj = json.loads(database_to_json())
        assert obj["formatVersion"] == 1
        assert set(obj["cards"].keys()) == set(card_database().keys())
        for card_id, entry in obj["cards"].items():
            assert entry["id"] == card_id

    def test_card_spec_round_trip(self) -> None:
        for spec in card_database().values():
            assert cards.CardSpec.from_json_obj(spec.to_json_obj()) == spec

"""Static card database for the engine.

Every card the engine knows about is enumerated here with its cost, kind,
stats and a closed effect tag.  The effect tags are interpreted by the rules
engine; there is no scripting layer, so adding a card means adding a tag and
teaching the engine about it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum


class CardKind(str, Enum):
    MINION = "minion"
    SPELL = "spell"
    WEAPON = "weapon"


class Tribe(str, Enum):
    NONE = "none"
    DEMON = "demon"
    BEAST = "beast"


class EffectTag(str, Enum):
    """Closed enumeration of card behaviours the engine implements."""

    NO_EFFECT = "NoEffect"
    GAIN_TWO_MANA = "GainTwoMana"
    DRAW_TWO = "DrawTwo"
    FREEZE_ENEMY_MINIONS = "FreezeEnemyMinions"
    DEAL_TWO_TO_UNDAMAGED_MINION = "DealTwoToUndamagedMinion"
    DEAL_ONE_DRAW_IF_KILL = "DealOneDrawIfKill"
    BUFF_DEMON_PLUS_3_3 = "BuffDemonPlus3Plus3"
    BUFF_PLUS_2_2_DRAW_IF_BEAST = "BuffPlus2Plus2DrawIfBeast"
    DOUBLE_ATTACK = "DoubleAttack"
    GIVE_CHARGE_PLUS_2 = "GiveChargePlus2Attack"
    DESTROY_MINION_ATK_5_PLUS = "DestroyMinionAtk5Plus"
    TAKE_CONTROL_ENEMY_MINION = "TakeControlEnemyMinion"
    RESTORE_FIVE_HEALTH = "RestoreFiveHealth"
    BATTLECRY_DRAW_ONE = "BattlecryDrawOne"
    TRIGGER_DRAW_ON_FRIENDLY_SPELL = "TriggerDrawOnFriendlySpell"
    TRIGGER_ADJACENT_SPELL_IMMUNITY = "TriggerAdjacentSpellImmunity"
    TRIGGER_DOUBLE_ATTACK_ON_DAMAGE = "TriggerDoubleAttackOnDamage"
    DEATHRATTLE_DAMAGE_ENEMY_HERO_2 = "DeathrattleDamageEnemyHero2"
    DEATHRATTLE_RESTORE_4_EACH_HERO = "DeathrattleRestore4EachHero"


@dataclass(frozen=True)
class CardSpec:
    """Immutable description of one card.

    ``attack``/``health`` are None for spells; for weapons ``health`` holds
    durability.  ``card_id`` doubles as the display name and is the stable
    string used in config decks, hands and event logs.
    """

    card_id: str
    cost: int
    kind: CardKind
    attack: int | None
    health: int | None
    tribe: Tribe
    effect: EffectTag

    def to_json_obj(self) -> dict:
        return {
            "id": self.card_id,
            "cost": self.cost,
            "kind": self.kind.value,
            "attack": self.attack,
            "health": self.health,
            "tribe": self.tribe.value,
            "effect": self.effect.value,
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "CardSpec":
        return CardSpec(
            card_id=obj["id"],
            cost=obj["cost"],
            kind=CardKind(obj["kind"]),
            attack=obj["attack"],
            health=obj["health"],
            tribe=Tribe(obj["tribe"]),
            effect=EffectTag(obj["effect"]),
        )


def _spell(card_id: str, cost: int, effect: EffectTag) -> CardSpec:
    return CardSpec(card_id, cost, CardKind.SPELL, None, None, Tribe.NONE, effect)


def _minion(
    card_id: str,
    cost: int,
    attack: int,
    health: int,
    effect: EffectTag,
    tribe: Tribe = Tribe.NONE,
) -> CardSpec:
    return CardSpec(card_id, cost, CardKind.MINION, attack, health, tribe, effect)


INNERVATE = "Innervate"
ARCANE_INTELLECT = "Arcane Intellect"
FROST_NOVA = "Frost Nova"
BACKSTAB = "Backstab"
MORTAL_COIL = "Mortal Coil"
DEMONFUSE = "Demonfuse"
MARK_OF_YSHAARJ = "Mark of Y'Shaarj"
BLESSED_CHAMPION = "Blessed Champion"
CHARGE = "Charge"
SHADOW_WORD_DEATH = "Shadow Word: Death"
MIND_CONTROL = "Mind Control"
FLASH_HEAL = "Flash Heal"
LIGHTS_JUSTICE = "Light's Justice"
NOVICE_ENGINEER = "Novice Engineer"
GADGETZAN_AUCTIONEER = "Gadgetzan Auctioneer"
WEE_SPELLSTOPPER = "Wee Spellstopper"
LEPER_GNOME = "Leper Gnome"
MISTRESS_OF_MIXTURES = "Mistress of Mixtures"
FLOATING_WATCHER = "Floating Watcher"
GAHZRILLA = "Gahz'rilla"

_ALL_CARDS: tuple[CardSpec, ...] = (
    _spell(INNERVATE, 0, EffectTag.GAIN_TWO_MANA),
    _spell(ARCANE_INTELLECT, 3, EffectTag.DRAW_TWO),
    _spell(FROST_NOVA, 3, EffectTag.FREEZE_ENEMY_MINIONS),
    _spell(BACKSTAB, 0, EffectTag.DEAL_TWO_TO_UNDAMAGED_MINION),
    _spell(MORTAL_COIL, 1, EffectTag.DEAL_ONE_DRAW_IF_KILL),
    _spell(DEMONFUSE, 2, EffectTag.BUFF_DEMON_PLUS_3_3),
    _spell(MARK_OF_YSHAARJ, 2, EffectTag.BUFF_PLUS_2_2_DRAW_IF_BEAST),
    _spell(BLESSED_CHAMPION, 5, EffectTag.DOUBLE_ATTACK),
    _spell(CHARGE, 3, EffectTag.GIVE_CHARGE_PLUS_2),
    _spell(SHADOW_WORD_DEATH, 3, EffectTag.DESTROY_MINION_ATK_5_PLUS),
    _spell(MIND_CONTROL, 10, EffectTag.TAKE_CONTROL_ENEMY_MINION),
    _spell(FLASH_HEAL, 1, EffectTag.RESTORE_FIVE_HEALTH),
    CardSpec(LIGHTS_JUSTICE, 1, CardKind.WEAPON, 1, 4, Tribe.NONE, EffectTag.NO_EFFECT),
    _minion(NOVICE_ENGINEER, 2, 1, 1, EffectTag.BATTLECRY_DRAW_ONE),
    _minion(GADGETZAN_AUCTIONEER, 6, 4, 4, EffectTag.TRIGGER_DRAW_ON_FRIENDLY_SPELL),
    _minion(WEE_SPELLSTOPPER, 4, 2, 5, EffectTag.TRIGGER_ADJACENT_SPELL_IMMUNITY),
    _minion(LEPER_GNOME, 1, 2, 1, EffectTag.DEATHRATTLE_DAMAGE_ENEMY_HERO_2),
    _minion(MISTRESS_OF_MIXTURES, 1, 2, 2, EffectTag.DEATHRATTLE_RESTORE_4_EACH_HERO),
    _minion(FLOATING_WATCHER, 5, 4, 4, EffectTag.NO_EFFECT, Tribe.DEMON),
    _minion(GAHZRILLA, 7, 6, 9, EffectTag.TRIGGER_DOUBLE_ATTACK_ON_DAMAGE, Tribe.BEAST),
)

_DB: dict[str, CardSpec] = {c.card_id: c for c in _ALL_CARDS}


def card_database() -> dict[str, CardSpec]:
    """Return the full card table keyed by card id."""
    return dict(_DB)


def card(card_id: str) -> CardSpec:
    """Look up one card; raises KeyError for unknown ids."""
    return _DB[card_id]


def database_to_json() -> str:
    """Canonical JSON dump of the card table (object keyed by card id)."""
    cards = {c.card_id: c.to_json_obj() for c in _ALL_CARDS}
    return json.dumps({"formatVersion": 1, "cards": cards}, indent=2, sort_keys=True) + "\n"


def database_from_json(text: str) -> dict[str, CardSpec]:
    obj = json.loads(text)
    specs = [CardSpec.from_json_obj(o) for o in obj["cards"].values()]
    return {c.card_id: c for c in specs}

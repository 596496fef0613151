"""Solvers for the alternating-pick game and its board-game realisation.

Four layers, each building on the previous:

* :func:`oracle_left_wins` — memoised AND/OR recursion over the abstract
  pick game (odd picks are Left's, even picks are Right's; Left wins iff
  the chosen values hit the target exactly).
* :class:`AlphaBeta` / :func:`minimax` — exact game-tree search over engine
  states.  Values are always from the friendly (side 0) perspective:
  ``+1`` friendly win, ``0`` draw, ``-1`` enemy win.  Search is bounded by
  ply depth and node count; positions it cannot resolve come back as
  ``None`` rather than a guess, because leaves are terminal outcomes only
  (there is no heuristic evaluation to be wrong about).
* :func:`skeleton_solve` — solves a compiled line as a small game tree
  whose only free moves are the branch choices; everything between
  branches is replayed verbatim.
* :func:`deviation_check` — replays a chosen line and, at each scripted
  step, probes every legal alternative with a bounded null-window search
  to classify it as refuted, dominated, improved, or unresolved.

Transposition entries are keyed by the 64-bit canonical state hash.  A
hash collision could in principle alias two positions; with a keyed
BLAKE2b digest over the full canonical encoding the chance is negligible
for the search sizes involved here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .compiler import Branch, PartitionInstance, ScriptStep, ScriptedLine
from .engine import IllegalAction, apply, legal_actions, start_game
from .state import (
    Action,
    EndTurn,
    GameConfig,
    GameState,
    Outcome,
    PlayCard,
    minion_ref,
    state_hash,
)

LOSS = -1
DRAW = 0
WIN = 1

_VERDICTS = {WIN: "win", DRAW: "draw", LOSS: "loss"}


def value_verdict(value: int | None) -> str:
    """Map a friendly-perspective value to its verdict string."""
    return _VERDICTS.get(value, "unknown")


# ---------------------------------------------------------------------------
# Abstract pick-game oracle
# ---------------------------------------------------------------------------


def oracle_left_wins(instance: PartitionInstance) -> bool:
    """Does Left have a winning strategy in the alternating pick game?

    Pairs are taken in order; pair ``i`` (1-based) is chosen by Left when
    ``i`` is odd and by Right when ``i`` is even.  Left wins iff the chosen
    values sum to the target.  Memoised on (pair index, running sum), so the
    cost is polynomial in ``n * sum(values)`` rather than ``2**n``.
    """
    pairs = instance.pairs
    target = instance.target
    memo: dict[tuple[int, int], bool] = {}

    def wins(i: int, acc: int) -> bool:
        if acc > target:
            # Values are non-negative, so an overshoot can never recover.
            return False
        if i == len(pairs):
            return acc == target
        key = (i, acc)
        cached = memo.get(key)
        if cached is None:
            x, y = pairs[i]
            if i % 2 == 0:
                cached = wins(i + 1, acc + x) or wins(i + 1, acc + y)
            else:
                cached = wins(i + 1, acc + x) and wins(i + 1, acc + y)
            memo[key] = cached
        return cached

    return wins(0, 0)


def oracle_line(instance: PartitionInstance) -> tuple[bool, tuple[str, ...]]:
    """Optimal-play result and one optimal choice vector.

    Left picks a winning option when one exists, Right a refuting one;
    ties prefer ``x``.  The vector is a witness line, not unique.
    """
    pairs = instance.pairs
    target = instance.target
    memo: dict[tuple[int, int], tuple[bool, tuple[str, ...]]] = {}

    def best(i: int, acc: int) -> tuple[bool, tuple[str, ...]]:
        if i == len(pairs):
            return acc == target, ()
        key = (i, acc)
        cached = memo.get(key)
        if cached is not None:
            return cached
        x, y = pairs[i]
        rx = best(i + 1, acc + x)
        ry = best(i + 1, acc + y)
        if i % 2 == 0:  # Left: prefer a win
            pick = rx if rx[0] or not ry[0] else ry
            choice = "x" if pick is rx else "y"
            result = (pick[0], (choice,) + pick[1])
        else:  # Right: prefer a refutation
            pick = rx if not rx[0] or ry[0] else ry
            choice = "x" if pick is rx else "y"
            result = (pick[0], (choice,) + pick[1])
        memo[key] = result
        return result

    return best(0, 0)


# ---------------------------------------------------------------------------
# Exact alpha-beta over engine states
# ---------------------------------------------------------------------------


def terminal_value(state: GameState) -> int | None:
    """Friendly-perspective value of a decided state, or None if ongoing."""
    oc = state.outcome
    if oc is Outcome.ONGOING:
        return None
    if oc is Outcome.FRIENDLY_WINS:
        return WIN
    if oc is Outcome.ENEMY_WINS:
        return LOSS
    return DRAW


_EXACT, _LOWER, _UPPER, _UNKNOWN = 0, 1, 2, 3


@dataclass
class SolveResult:
    """Outcome of a bounded exact search.

    ``value`` is from the friendly perspective and ``None`` when the
    budgets ran out before the position was proven.  ``pv`` is a
    best-play prefix reconstructed from the search's best-move table; it
    may be shorter than the proven line when cutoffs hid part of it.
    """

    value: int | None
    nodes: int
    tt_hits: int
    exhausted: bool
    pv: tuple[Action, ...] = ()

    @property
    def verdict(self) -> str:
        return value_verdict(self.value)


class AlphaBeta:
    """Depth- and node-bounded alpha-beta over the three-valued outcome.

    The friendly side (0) maximises, the enemy side (1) minimises; a
    single turn spans many plies because the mover only changes on end of
    turn.  Leaves are terminal outcomes, so any resolved value or bound is
    exact game-theoretic truth and may be reused at any depth; only
    "unknown" entries are depth-qualified (a deeper retry may do better).
    """

    def __init__(
        self,
        *,
        max_depth: int = 120,
        max_nodes: int = 500_000,
        tt: dict | None = None,
    ):
        self.max_depth = max_depth
        self.max_nodes = max_nodes
        self.tt: dict[int, tuple[int, int, int]] = tt if tt is not None else {}
        self.best_move: dict[int, Action] = {}
        self.nodes = 0
        self.tt_hits = 0
        self.exhausted = False

    # -- transposition helpers ------------------------------------------

    def _probe(self, key: int, alpha: int, beta: int, depth_left: int) -> tuple[bool, int | None]:
        entry = self.tt.get(key)
        if entry is None:
            return False, None
        flag, val, edepth = entry
        if flag == _EXACT:
            return True, val
        if flag == _LOWER and val >= beta:
            return True, val
        if flag == _UPPER and val <= alpha:
            return True, val
        if flag == _UNKNOWN and depth_left <= edepth:
            return True, None
        return False, None

    def _store(self, key: int, flag: int, val: int, depth_left: int) -> None:
        cur = self.tt.get(key)
        if cur is not None:
            if cur[0] == _EXACT:
                return
            if flag == _UNKNOWN:
                if cur[0] != _UNKNOWN:
                    return  # a real bound beats an unknown marker
                if cur[2] >= depth_left:
                    return
        self.tt[key] = (flag, val, depth_left)

    # -- search ---------------------------------------------------------

    def search(self, state: GameState, alpha: int, beta: int, depth_left: int) -> int | None:
        """Value of ``state`` within the (alpha, beta) window, or None.

        A return ``v`` with ``alpha < v < beta`` is exact; ``v <= alpha``
        is a proven upper bound and ``v >= beta`` a proven lower bound.
        ``None`` means the budgets gave out inside this subtree.
        """
        tv = terminal_value(state)
        if tv is not None:
            return tv
        if self.exhausted:
            return None
        self.nodes += 1
        if self.nodes > self.max_nodes:
            self.exhausted = True
            return None
        if depth_left <= 0:
            return None
        key = state_hash(state)
        hit, val = self._probe(key, alpha, beta, depth_left)
        if hit:
            self.tt_hits += 1
            return val

        maximizing = state.active == 0
        actions = legal_actions(state)
        hinted = self.best_move.get(key)
        if hinted is not None and hinted in actions:
            actions.remove(hinted)
            actions.insert(0, hinted)

        best: int | None = None
        best_action: Action | None = None
        saw_unknown = False
        a, b = alpha, beta
        for action in actions:
            child = apply(state, action)
            v = self.search(child, a, b, depth_left - 1)
            if v is None:
                if self.exhausted:
                    return None
                saw_unknown = True
                continue
            if maximizing:
                if best is None or v > best:
                    best, best_action = v, action
                if best > a:
                    a = best
                if best >= b:
                    self._store(key, _LOWER, best, depth_left)
                    self.best_move[key] = action
                    return best
            else:
                if best is None or v < best:
                    best, best_action = v, action
                if best < b:
                    b = best
                if best <= a:
                    self._store(key, _UPPER, best, depth_left)
                    self.best_move[key] = action
                    return best

        if saw_unknown:
            # Unresolved children could still change the result; resolved
            # ones give a one-sided bound worth keeping.
            if best is not None:
                self._store(key, _LOWER if maximizing else _UPPER, best, depth_left)
            else:
                self._store(key, _UNKNOWN, 0, depth_left)
            return None
        assert best is not None, "a live position always has legal actions"
        if maximizing:
            flag = _UPPER if best <= alpha else _EXACT
        else:
            flag = _LOWER if best >= beta else _EXACT
        self._store(key, flag, best, depth_left)
        if best_action is not None and flag == _EXACT:
            self.best_move[key] = best_action
        return best

    def principal_variation(self, state: GameState, limit: int = 64) -> tuple[Action, ...]:
        pv: list[Action] = []
        seen: set[int] = set()
        while len(pv) < limit and terminal_value(state) is None:
            key = state_hash(state)
            if key in seen:
                break
            seen.add(key)
            action = self.best_move.get(key)
            if action is None:
                break
            pv.append(action)
            state = apply(state, action)
        return tuple(pv)


def minimax(
    state: GameState,
    *,
    max_depth: int = 120,
    max_nodes: int = 500_000,
    tt: dict | None = None,
) -> SolveResult:
    """Exact full-window search from ``state``; unresolved comes back None."""
    ab = AlphaBeta(max_depth=max_depth, max_nodes=max_nodes, tt=tt)
    value = ab.search(state, LOSS - 1, WIN + 1, max_depth)
    pv = ab.principal_variation(state) if value is not None else ()
    return SolveResult(value, ab.nodes, ab.tt_hits, ab.exhausted, pv)


# ---------------------------------------------------------------------------
# Skeleton solving: branch choices only
# ---------------------------------------------------------------------------


TurnItemEntry = ScriptStep | Branch


@dataclass
class SkeletonResult:
    """Result of solving a compiled line over its branch choices.

    ``value``/``verdict`` are from the friendly (Left) perspective.  The
    vector holds one optimal choice per pair (ties prefer ``x``); when an
    early decision already decides the game the unreached tail is padded
    with ``x``.
    """

    value: int | None
    vector: tuple[str, ...]
    nodes: int
    memo_hits: int

    @property
    def verdict(self) -> str:
        return value_verdict(self.value)


def _run_scripted(state: GameState, step: ScriptStep) -> GameState:
    """Apply one scripted step with the line-replay skip rule."""
    try:
        return apply(state, step.action)
    except IllegalAction:
        if step.optional:
            return state
        raise


def skeleton_solve(config: GameConfig, line: ScriptedLine) -> SkeletonResult:
    """Solve the line's decision skeleton by alternating max/min.

    Scripted steps between branches are forced for both sides; each branch
    is a two-way move by the side whose turn it is.  Positions are memoised
    on (item index, state hash) so shared continuations are solved once.
    If the script runs out with the game still undecided the result is the
    turn-limit default, a draw.
    """
    items: list[tuple[int, TurnItemEntry]] = []
    for turn in line.turns:
        for item in turn.items:
            items.append((turn.side, item))

    memo: dict[tuple[int, int], tuple[int, tuple[str, ...]]] = {}
    counters = {"nodes": 0, "hits": 0}

    def advance(state: GameState, idx: int) -> tuple[int, tuple[str, ...]]:
        while True:
            tv = terminal_value(state)
            if tv is not None:
                return tv, ()
            if idx >= len(items):
                return DRAW, ()
            side, item = items[idx]
            if isinstance(item, Branch):
                break
            state = _run_scripted(state, item)
            counters["nodes"] += 1
            idx += 1
        key = (idx, state_hash(state))
        cached = memo.get(key)
        if cached is not None:
            counters["hits"] += 1
            return cached
        branch = item
        maximizing = side == 0
        best: tuple[int, tuple[str, ...]] | None = None
        for choice in ("x", "y"):
            child = state
            decided = False
            for step in branch.steps(choice):
                if terminal_value(child) is not None:
                    decided = True
                    break
                child = _run_scripted(child, step)
                counters["nodes"] += 1
            if decided or terminal_value(child) is not None:
                value, suffix = terminal_value(child), ()
                if value is None:  # decided flag without outcome cannot happen
                    value = DRAW
            else:
                value, suffix = advance(child, idx + 1)
            candidate = (value, (choice,) + suffix)
            if best is None:
                best = candidate
            elif maximizing and candidate[0] > best[0]:
                best = candidate
            elif not maximizing and candidate[0] < best[0]:
                best = candidate
        assert best is not None
        memo[key] = best
        return best

    value, vector = advance(start_game(config), 0)
    if len(vector) < line.n:
        vector = vector + ("x",) * (line.n - len(vector))
    return SkeletonResult(value, vector, counters["nodes"], counters["hits"])


# ---------------------------------------------------------------------------
# Deviation probing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepRecord:
    """One scripted step of a chosen line with its pre-step position."""

    index: int
    turn: int
    side: int
    action: Action
    taken: bool
    state_before: GameState


def walk_line(
    config: GameConfig, line: ScriptedLine, vector: tuple[str, ...]
) -> tuple[list[StepRecord], GameState]:
    """Replay a fully chosen line recording the position before each step.

    Optional steps that are illegal are recorded with ``taken=False`` and
    leave the state unchanged; a decided outcome truncates the walk.
    """
    state = start_game(config)
    records: list[StepRecord] = []
    for i, flat in enumerate(line.flatten(vector)):
        if state.outcome is not Outcome.ONGOING:
            break
        try:
            nxt = apply(state, flat.action)
            taken = True
        except IllegalAction:
            if not flat.optional:
                raise
            nxt = state
            taken = False
        records.append(StepRecord(i, flat.turn, flat.side, flat.action, taken, state))
        state = nxt
    return records, state


@dataclass(frozen=True)
class DeviationFinding:
    step_index: int
    turn: int
    side: int
    scripted: Action
    alternative: Action
    status: str  # "refuted" | "dominated" | "improved" | "unresolved"
    reason: str  # e.g. "forced_loss", "derailed", "rejoined", "wins_anyway"
    nodes: int


@dataclass
class DeviationReport:
    """Aggregate of probing scripted-step alternatives.

    ``refuted`` counts alternatives proven no good for the deviating
    player, ``dominated`` those that transpose back to (or match) the
    script, ``improved`` those proven strictly better (which would
    falsify the compiled line), and ``unresolved`` those the probe
    budgets could not settle either way.
    """

    scripted_value: int
    vector: tuple[str, ...]
    findings: list[DeviationFinding] = field(default_factory=list)
    refuted: int = 0
    dominated: int = 0
    improved: int = 0
    unresolved: int = 0
    checked_steps: int = 0
    nodes: int = 0

    def count(self, finding: DeviationFinding) -> None:
        self.findings.append(finding)
        self.nodes += finding.nodes
        if finding.status == "refuted":
            self.refuted += 1
        elif finding.status == "dominated":
            self.dominated += 1
        elif finding.status == "improved":
            self.improved += 1
        else:
            self.unresolved += 1


class _TurnRejoinProbe:
    """Exhaustive reachability over the deviator's remaining turn.

    From a post-deviation state, explores every action sequence up to the
    end of the deviator's current turn and records whether any of them
    (a) reaches the exact scripted position at the start of the opponent's
    next turn, or (b) wins outright before then.  Results are memoised on
    state hashes and shared across all probes of the same turn, so the
    amortised cost is the size of the reachable in-turn state space.
    """

    def __init__(self, turn: int, mover: int, boundary_hash: int | None, max_nodes: int):
        self.turn = turn
        self.mover = mover
        self.boundary = boundary_hash
        self.max_nodes = max_nodes
        self.memo: dict[int, tuple[bool, bool]] = {}
        self.nodes = 0
        self.exhausted = False

    def analyze(self, state: GameState) -> tuple[str, int]:
        if self.exhausted:
            return "budget", 0
        start = self.nodes
        rejoin, win = self._explore(state)
        spent = self.nodes - start
        if self.exhausted:
            return "budget", spent
        if rejoin:
            return "rejoined", spent
        if win:
            return "wins", spent
        return "derailed", spent

    def _explore(self, state: GameState) -> tuple[bool, bool]:
        if self.exhausted:
            return False, False
        tv = terminal_value(state)
        if tv is not None:
            won = (tv == WIN and self.mover == 0) or (tv == LOSS and self.mover == 1)
            return False, won
        if state.turn > self.turn:
            matched = self.boundary is not None and state_hash(state) == self.boundary
            return matched, False
        key = state_hash(state)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        self.nodes += 1
        if self.nodes > self.max_nodes:
            self.exhausted = True
            return False, False
        rejoin = win = False
        for action in legal_actions(state):
            r, w = self._explore(apply(state, action))
            rejoin = rejoin or r
            win = win or w
            if rejoin and win:
                break
        if not self.exhausted:
            self.memo[key] = (rejoin, win)
        return rejoin, win


class DeviationChecker:
    """Probes alternatives to a line's scripted steps.

    Two complementary checks classify each deviation:

    1. An exhaustive within-turn rejoin search: can the deviator still
       reach the exact scripted position at the start of the opponent's
       next turn, or win before it?  If it can rejoin, the deviation is
       a transposition of the script and dominated.  If it can do
       neither, it has derailed the scripted machinery for good — the
       turn-local sense in which every scripted filler step is forced.
    2. A bounded null-window search of the free continuation, truncated
       ``probe_horizon`` turns out (reaching the horizon counts as a
       draw).  A loss proven inside the horizon is a loss of the real
       game too — the punishing side forces it before the truncation
       matters — which upgrades a derail to a full game-theoretic
       refutation (for example, leaving the enemy board unfrozen loses
       on the spot).

    Statuses: "refuted" (reasons ``forced_loss`` — horizon-sound minimax
    proof — or ``derailed`` — complete turn-local proof), "dominated"
    (``rejoined``, ``wins_anyway``, or ``equal_value``), "improved"
    (provably beats the script; would falsify the line), "unresolved"
    (budgets exhausted).  A ``derailed`` refutation asserts the
    turn-local claim only: a deviation that parks resources now to win
    several turns later would need a deeper probe to distinguish.
    """

    def __init__(
        self,
        config: GameConfig,
        line: ScriptedLine,
        vector: tuple[str, ...] | None = None,
        *,
        probe_horizon: int = 2,
        value_depth: int = 80,
        value_nodes: int = 5_000,
        rejoin_nodes: int = 200_000,
    ):
        if vector is None:
            sk = skeleton_solve(config, line)
            vector = sk.vector if sk.value == WIN else ("x",) * line.n
        self.vector = vector
        self.probe_horizon = probe_horizon
        self.value_depth = value_depth
        self.value_nodes = value_nodes
        self.rejoin_nodes = rejoin_nodes

        self.records, final = walk_line(config, line, vector)
        value = terminal_value(final)
        self.scripted_value = DRAW if value is None else value

        # Scripted position at the start of each turn, for rejoin targets.
        self._turn_start_hash: dict[int, int] = {}
        for rec in self.records:
            if rec.turn not in self._turn_start_hash:
                self._turn_start_hash[rec.turn] = state_hash(rec.state_before)
        self._rejoin_probes: dict[int, _TurnRejoinProbe] = {}
        self._value_tts: dict[int, dict] = {}

    def steps(self, max_turns: int | None = None) -> list[StepRecord]:
        out = []
        for rec in self.records:
            if max_turns is not None and rec.turn > max_turns:
                break
            if rec.taken:
                out.append(rec)
        return out

    def _rejoin_probe(self, rec: StepRecord) -> _TurnRejoinProbe:
        probe = self._rejoin_probes.get(rec.turn)
        if probe is None:
            probe = _TurnRejoinProbe(
                rec.turn,
                rec.state_before.active,
                self._turn_start_hash.get(rec.turn + 1),
                self.rejoin_nodes,
            )
            self._rejoin_probes[rec.turn] = probe
        return probe

    def _loss_probe(self, rec: StepRecord, child: GameState) -> tuple[bool, int]:
        """Prove, if cheap, that the deviation loses within the horizon."""
        clamped = child.clone()
        clamped.turn_limit = min(child.turn_limit, rec.turn + self.probe_horizon)
        tt = self._value_tts.setdefault(rec.turn, {})
        ab = AlphaBeta(max_depth=self.value_depth, max_nodes=self.value_nodes, tt=tt)
        if rec.state_before.active == 0:
            v = ab.search(clamped, LOSS, DRAW, self.value_depth)
            proven = v is not None and v <= LOSS
        else:
            v = ab.search(clamped, DRAW, WIN, self.value_depth)
            proven = v is not None and v >= WIN
        return proven, ab.nodes

    def check_step(self, rec: StepRecord, alternative: Action) -> DeviationFinding:
        mover = rec.state_before.active
        child = apply(rec.state_before, alternative)
        nodes = 0

        def finding(status: str, reason: str) -> DeviationFinding:
            return DeviationFinding(
                rec.index, rec.turn, rec.side, rec.action, alternative,
                status, reason, nodes,
            )

        s_mover = self.scripted_value if mover == 0 else -self.scripted_value

        tv = terminal_value(child)
        if tv is not None:
            v_mover = tv if mover == 0 else -tv
            if v_mover < s_mover:
                return finding("refuted", "forced_loss")
            if v_mover == s_mover:
                return finding("dominated", "equal_value")
            return finding("improved", "better_value")

        # Phase 1: exact rejoin reachability within the current turn.
        probe = self._rejoin_probe(rec)
        result, spent = probe.analyze(child)
        nodes += spent
        if result == "rejoined":
            return finding("dominated", "rejoined")
        if result == "wins":
            if s_mover == WIN:
                return finding("dominated", "wins_anyway")
            return finding("improved", "wins_faster")

        # Phase 2: a bounded null-window probe.  A loss proven inside the
        # truncated horizon is a loss of the real game (the punishment
        # lands before the truncation matters), upgrading a derail to a
        # full game-theoretic refutation.
        proven_loss, spent = self._loss_probe(rec, child)
        nodes += spent
        if proven_loss:
            return finding("refuted", "forced_loss")
        if result == "derailed":
            return finding("refuted", "derailed")
        return finding("unresolved", "budget")

    def check_all(self, max_turns: int = 1) -> DeviationReport:
        report = DeviationReport(
            scripted_value=self.scripted_value, vector=self.vector
        )
        for rec in self.steps(max_turns):
            report.checked_steps += 1
            for alt in legal_actions(rec.state_before):
                if alt == rec.action:
                    continue
                report.count(self.check_step(rec, alt))
        return report


def named_deviations(checker: DeviationChecker) -> list[tuple[str, StepRecord, Action]]:
    """The structural spot-check deviations for a compiled line.

    Three families, all on the opening turn of the checked vector:

    * ``skip_freeze`` — end the turn at the scripted Frost Nova instead of
      casting it (absent when the opening turn carries no Frost Nova, as
      happens for single-pair lines that end on the verification tail).
    * ``carrier_position_k`` — summon the first Floating Watcher at slot k
      instead of the rightmost slot, for every k it would fit.
    * ``double_spend`` — aim the branch's Shadow Word: Death at the
      carrier that already received Charge, leaving the other carrier
      standing (present when the opening branch takes its first option).
    """
    from . import cards as _cards

    out: list[tuple[str, StepRecord, Action]] = []
    fn_rec = fw_rec = swd_rec = None
    for rec in checker.steps(max_turns=1):
        action = rec.action
        if not isinstance(action, PlayCard):
            continue
        hand = rec.state_before.players[rec.side].hand
        cid = hand[action.hand]
        if cid == _cards.FROST_NOVA and fn_rec is None:
            fn_rec = rec
        if (cid == _cards.FLOATING_WATCHER and fw_rec is None
                and action.position is not None):
            fw_rec = rec
        if (cid == _cards.SHADOW_WORD_DEATH and swd_rec is None
                and action.target is not None and action.target.slot == 6):
            swd_rec = rec

    if fn_rec is not None:
        out.append(("skip_freeze", fn_rec, EndTurn()))
    if fw_rec is not None:
        for pos in range(fw_rec.action.position):
            out.append(
                (f"carrier_position_{pos}", fw_rec,
                 PlayCard(fw_rec.action.hand, position=pos))
            )
    if swd_rec is not None:
        charged = minion_ref(0, 5)
        alt = PlayCard(swd_rec.action.hand, target=charged)
        if alt in legal_actions(swd_rec.state_before):
            out.append(("double_spend", swd_rec, alt))
    return out


def check_named_deviations(checker: DeviationChecker) -> DeviationReport:
    """Run the structural spot checks and aggregate them into a report."""
    report = DeviationReport(
        scripted_value=checker.scripted_value, vector=checker.vector
    )
    seen_steps = set()
    for _, rec, alt in named_deviations(checker):
        if rec.index not in seen_steps:
            seen_steps.add(rec.index)
            report.checked_steps += 1
        report.count(checker.check_step(rec, alt))
    return report


def deviation_check(
    config: GameConfig,
    line: ScriptedLine,
    vector: tuple[str, ...] | None = None,
    *,
    max_turns: int | None = None,
    probe_horizon: int = 2,
    value_depth: int = 80,
    value_nodes: int = 5_000,
    rejoin_nodes: int = 200_000,
) -> DeviationReport:
    """Probe alternatives to the line's scripted steps.

    ``vector`` defaults to the skeleton-optimal decisions when those win,
    else all-``x``.  With ``max_turns=None`` (the default) only the named
    structural spot checks run — see :func:`named_deviations`; with an
    integer, every legal alternative at every step of turns up to it is
    probed.  See :class:`DeviationChecker` for probe semantics.
    """
    checker = DeviationChecker(
        config, line, vector,
        probe_horizon=probe_horizon,
        value_depth=value_depth,
        value_nodes=value_nodes,
        rejoin_nodes=rejoin_nodes,
    )
    if max_turns is None:
        return check_named_deviations(checker)
    return checker.check_all(max_turns)

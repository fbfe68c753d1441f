"""Base game mechanics: state, legal actions, stealing chains, rounds, final swap.

Players and gifts are identified by 1-based seat/gift indices. Seat order is
turn order: seat k takes the primary turn of round k. A steal displaces its
victim, who must act immediately; the resulting chain ends when somebody opens
a wrapped gift, which also ends the round. After round n the first player may
swap with any other player, then the game is over.

State is mutated in place. A single game is strictly single-threaded; distinct
games may run concurrently as long as each owns its state and random stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .errors import ConfigurationError, IllegalMoveError, PhaseError


@dataclass(frozen=True)
class StealLimits:
    """Caps on how often a single gift may be stolen. 0 means unlimited.

    ``(1, 0)`` is the standard rule set: once per round, no lifetime cap.
    """

    per_round: int = 1
    lifetime: int = 0

    def __post_init__(self) -> None:
        if self.per_round < 0 or self.lifetime < 0:
            raise ConfigurationError("steal limits must be non-negative")


STANDARD_LIMITS = StealLimits(1, 0)


@dataclass(frozen=True, slots=True)
class Open:
    gift: int


@dataclass(frozen=True, slots=True)
class Steal:
    victim: int


@dataclass(frozen=True, slots=True)
class Swap:
    partner: Optional[int]  # None = keep current gift


Action = Union[Open, Steal]


@dataclass(frozen=True, slots=True)
class ActionRecord:
    """One logged move. ``position_in_chain`` is 0 for the primary turn and
    increments along a stealing chain; ``gift`` is the gift opened, stolen,
    or received in the final swap (None for a declined swap)."""

    actor: int
    action: Union[Open, Steal, Swap]
    round: int
    position_in_chain: int
    gift: Optional[int]


class GameState:
    """Mutable game state.

    Attributes
    ----------
    ownership : list mapping seat -> gift id or None (index 0 unused)
    holder : inverse map, gift -> seat or None
    opened : gift -> bool status flags (False = still wrapped)
    opened_order : gift ids in opening order
    chain_locked : gifts stolen in the current chain (cleared at chain end)
    round_steals / total_steals : per-gift steal counters
    round : current round index, 1..n
    displaced : seat that must act next inside a chain, else None
    """

    __slots__ = (
        "n", "limits", "ownership", "holder", "opened", "opened_order",
        "chain_locked", "round_steals", "total_steals", "round",
        "displaced", "swap_pending", "concluded", "wrapped_count",
    )

    def __init__(self, n: int, limits: StealLimits) -> None:
        self.n = n
        self.limits = limits
        self.ownership: list[Optional[int]] = [None] * (n + 1)
        self.holder: list[Optional[int]] = [None] * (n + 1)
        self.opened: list[bool] = [False] * (n + 1)
        self.opened_order: list[int] = []
        self.chain_locked: set[int] = set()
        self.round_steals: list[int] = [0] * (n + 1)
        self.total_steals: list[int] = [0] * (n + 1)
        self.round = 1
        self.displaced: Optional[int] = None
        self.swap_pending = False
        self.concluded = False
        self.wrapped_count = n

    # -- queries ----------------------------------------------------------

    def wrapped_gifts(self) -> list[int]:
        return [g for g in range(1, self.n + 1) if not self.opened[g]]

    def stealable(self, gift: int) -> bool:
        """True iff `gift` passes the chain lock plus both steal-count caps."""
        if gift in self.chain_locked:
            return False
        lim = self.limits
        if lim.per_round and self.round_steals[gift] >= lim.per_round:
            return False
        if lim.lifetime and self.total_steals[gift] >= lim.lifetime:
            return False
        return True

    def valid_steal_targets(self, actor: int) -> list[int]:
        """Seats owning a stealable opened gift, excluding the actor, by seat."""
        targets = [
            self.holder[g]
            for g in self.opened_order
            if self.holder[g] != actor and self.stealable(g)
        ]
        targets.sort()
        return targets

    def legal_actions(self, actor: int) -> list[Action]:
        if self.swap_pending or self.concluded:
            raise PhaseError("rounds are over; only the final swap remains")
        actions: list[Action] = [Open(g) for g in self.wrapped_gifts()]
        actions.extend(Steal(m) for m in self.valid_steal_targets(actor))
        return actions

    # -- transitions ------------------------------------------------------

    def apply_open(self, actor: int, gift: int) -> "GameState":
        """Open `gift`, ending the current chain and the round."""
        if self.swap_pending or self.concluded:
            raise PhaseError("cannot open after the last round")
        if not 1 <= gift <= self.n or self.opened[gift]:
            raise IllegalMoveError(f"gift {gift} is not available to open")
        if self.ownership[actor] is not None:
            raise IllegalMoveError(f"seat {actor} already holds a gift")
        self.ownership[actor] = gift
        self.holder[gift] = actor
        self.opened[gift] = True
        self.opened_order.append(gift)
        self.wrapped_count -= 1
        # Round ends with every open: clear per-round bookkeeping. Gifts with a
        # nonzero round count are exactly the chain-locked ones.
        for g in self.chain_locked:
            self.round_steals[g] = 0
        self.chain_locked.clear()
        self.displaced = None
        if self.round == self.n:
            self.swap_pending = True
        else:
            self.round += 1
        return self

    def apply_steal(self, thief: int, victim: int) -> "GameState":
        """Steal the victim's gift; the victim becomes the displaced actor."""
        if self.swap_pending or self.concluded:
            raise PhaseError("cannot steal after the last round")
        if victim == thief:
            raise IllegalMoveError("cannot steal from yourself")
        if not 1 <= victim <= self.n:
            raise IllegalMoveError(f"no such seat {victim}")
        gift = self.ownership[victim]
        if gift is None:
            raise IllegalMoveError(f"seat {victim} owns nothing to steal")
        if not self.stealable(gift):
            raise IllegalMoveError(f"gift {gift} is not stealable")
        if self.ownership[thief] is not None:
            raise IllegalMoveError(f"seat {thief} already holds a gift")
        self.ownership[thief] = gift
        self.holder[gift] = thief
        self.ownership[victim] = None
        self.chain_locked.add(gift)
        self.round_steals[gift] += 1
        self.total_steals[gift] += 1
        self.displaced = victim
        return self

    def final_swap(self, partner: Optional[int]) -> "GameState":
        """Seat 1's optional trade. No chain, no locks, no counter updates."""
        if self.concluded:
            raise PhaseError("game already concluded")
        if not self.swap_pending:
            raise PhaseError("final swap is only available after round n")
        if partner is not None:
            if partner == 1 or not 1 <= partner <= self.n:
                raise IllegalMoveError(f"invalid swap partner {partner}")
            g1, gm = self.ownership[1], self.ownership[partner]
            self.ownership[1], self.ownership[partner] = gm, g1
            self.holder[gm], self.holder[g1] = 1, partner
        self.swap_pending = False
        self.concluded = True
        return self


@dataclass(frozen=True)
class GameResult:
    """Outcome of a complete game plus a replayable action log."""

    n: int
    limits: StealLimits
    final_ownership: dict[int, int]
    trajectory: tuple[ActionRecord, ...]
    steal_count: int
    chain_lengths: tuple[int, ...]


DecideFn = Callable[[GameState, int, object], Action]
SwapFn = Callable[[GameState, object], Optional[int]]


def initial_state(n: int, limits: StealLimits = STANDARD_LIMITS) -> GameState:
    """Fresh state: everything wrapped and unowned, round 1."""
    if n < 1:
        raise ConfigurationError("need at least one player")
    return GameState(n, limits)


def run_round(
    state: GameState, decide: DecideFn, rng: object = None
) -> tuple[int, list[ActionRecord]]:
    """Play one full round: the primary turn plus any displacement chain.

    `decide(state, actor, rng)` must return a legal Open or Steal; an illegal
    action raises immediately (policies are trusted code, not user input).
    Returns the chain length (number of steals) and the action records.
    """
    if state.swap_pending or state.concluded:
        raise PhaseError("all rounds already played")
    k = state.round
    actor = k
    position = 0
    records: list[ActionRecord] = []
    while True:
        action = decide(state, actor, rng)
        if type(action) is Open:
            state.apply_open(actor, action.gift)
            records.append(ActionRecord(actor, action, k, position, action.gift))
            assert position <= state.n - 1  # chain termination bound
            return position, records
        if type(action) is Steal:
            victim = action.victim
            gift = state.ownership[victim]
            state.apply_steal(actor, victim)
            records.append(ActionRecord(actor, action, k, position, gift))
            position += 1
            actor = victim
        else:
            raise IllegalMoveError(f"policy returned {action!r}")


def run_game(
    n: int,
    limits: StealLimits,
    decide: DecideFn,
    swap: Optional[SwapFn] = None,
    rng: object = None,
    on_round_end: Optional[Callable[[GameState], None]] = None,
) -> GameResult:
    """Play rounds 1..n and the final swap; returns a bijective allocation.

    `swap(state, rng)` picks seat 1's trade partner (None keeps); when omitted
    the swap is declined. `on_round_end` is a bookkeeping hook (e.g. emotional
    decay) called after each round.
    """
    state = initial_state(n, limits)
    chain_lengths: list[int] = []
    trajectory: list[ActionRecord] = []
    for _ in range(n):
        length, records = run_round(state, decide, rng)
        chain_lengths.append(length)
        trajectory.extend(records)
        if on_round_end is not None:
            on_round_end(state)
    partner = swap(state, rng) if swap is not None else None
    state.final_swap(partner)
    received = state.ownership[1] if partner is not None else None
    trajectory.append(ActionRecord(1, Swap(partner), n, 0, received))
    final = {p: state.ownership[p] for p in range(1, n + 1)}
    return GameResult(
        n=n,
        limits=limits,
        final_ownership=final,
        trajectory=tuple(trajectory),
        steal_count=sum(chain_lengths),
        chain_lengths=tuple(chain_lengths),
    )


def replay(
    n: int, limits: StealLimits, trajectory: Sequence[ActionRecord]
) -> GameState:
    """Re-apply a logged trajectory from scratch and return the end state."""
    state = initial_state(n, limits)
    for rec in trajectory:
        action = rec.action
        if type(action) is Open:
            state.apply_open(rec.actor, action.gift)
        elif type(action) is Steal:
            state.apply_steal(rec.actor, action.victim)
        elif type(action) is Swap:
            state.final_swap(action.partner)
        else:
            raise IllegalMoveError(f"unknown record {rec!r}")
    return state

"""Exact trajectory combinatorics.

A trajectory is a complete action sequence of one game, final swap excluded;
two trajectories differ if any action or any opened gift differs. Under the
standard rules the count factors per round: round k contributes A(k) action
patterns (chain structures) times the choice of wrapped gift, giving

    T(n) = n! * prod_{k=1..n} A(k),   A(k) = sum_{j=0..k-1} (k-1)!/j!

where A(k) is OEIS A000522 evaluated at k-1. A finite lifetime steal cap
breaks the per-round independence; `count_trajectories` then runs a dynamic
program over multisets of per-gift steal counts (gifts with identical steal
histories are interchangeable, so the multiset is a sufficient state).

Everything returns exact Python integers; `brute_force_count` is a deliberately
naive enumeration oracle for cross-checking both routes at small n.
"""

from __future__ import annotations

from math import factorial
from typing import Optional

from .engine import StealLimits

UNLIMITED = 0  # lifetime sentinel, matching the engine's StealLimits encoding

Multiset = tuple  # sorted tuple of per-gift steal counts


def round_action_count(k: int) -> int:
    """A(k): action patterns in round k (chain structures, gift choice aside)."""
    if k < 1:
        raise ValueError(f"round index must be >= 1, got {k}")
    f = factorial(k - 1)
    return sum(f // factorial(j) for j in range(k))


def trajectory_count(n: int) -> int:
    """Closed form T(n) = n! * prod A(k) under standard rules."""
    if n < 1:
        raise ValueError(f"player count must be >= 1, got {n}")
    product = 1
    for k in range(1, n + 1):
        product *= round_action_count(k)
    return factorial(n) * product


def trajectory_count_with_swap(n: int) -> int:
    """T(n) times the n final-swap choices (keep, or trade with any seat)."""
    return n * trajectory_count(n)


def _increment(counts: Multiset, value: int) -> Multiset:
    """Copy of `counts` with one instance of `value` incremented, re-sorted."""
    out = list(counts)
    out.remove(value)
    out.append(value + 1)
    out.sort()
    return tuple(out)


def _remove_one(counts: Multiset, value: int) -> Multiset:
    out = list(counts)
    out.remove(value)
    return tuple(out)


_chain_memo: dict[tuple[Multiset, Multiset], dict[Multiset, int]] = {}


def count_chains(start: Multiset, targets: Multiset) -> dict[Multiset, int]:
    """Enumerate every nonempty stealing chain over the available targets.

    `targets` holds the steal counts of gifts currently below the lifetime
    cap. Each chain steals an ordered sequence of distinct gifts (a stolen
    gift is chain-locked and leaves the pool); the result maps the multiset
    after the chain's increments to the number of ordered chains reaching it.
    Gifts sharing a count are interchangeable, so a value with multiplicity m
    contributes m ordered choices. Results are memoized; treat them as
    read-only.
    """
    key = (start, targets)
    cached = _chain_memo.get(key)
    if cached is not None:
        return cached
    result: dict[Multiset, int] = {}
    seen: set[int] = set()
    for value in targets:
        if value in seen:
            continue
        seen.add(value)
        mult = targets.count(value)
        after = _increment(start, value)
        result[after] = result.get(after, 0) + mult  # victim opens, chain ends
        remaining = _remove_one(targets, value)
        for end_state, ways in count_chains(after, remaining).items():
            result[end_state] = result.get(end_state, 0) + mult * ways
    _chain_memo[key] = result
    return result


def count_trajectories(n: int, lifetime: int = UNLIMITED) -> int:
    """Exact trajectory count under a lifetime steal cap (0 = unlimited).

    The unlimited branch is the closed form. Otherwise a round-by-round DP
    over steal-count multisets: from each reachable multiset, either open
    immediately (append a fresh count of 0) or run any valid chain and then
    append the terminating open's 0. The final multiplication by n! restores
    which physical gift was opened each round.
    """
    if n < 1:
        raise ValueError(f"player count must be >= 1, got {n}")
    if lifetime < 0:
        raise ValueError(f"lifetime must be >= 0, got {lifetime}")
    if lifetime == UNLIMITED:
        return trajectory_count(n)
    states: dict[Multiset, int] = {(0,): 1}  # after round 1: one unstolen gift
    for _ in range(2, n + 1):
        nxt: dict[Multiset, int] = {}
        for counts, ways in states.items():
            opened = tuple(sorted(counts + (0,)))
            nxt[opened] = nxt.get(opened, 0) + ways
            targets = tuple(c for c in counts if c < lifetime)
            if targets:
                for end_state, chain_ways in count_chains(counts, targets).items():
                    new_state = tuple(sorted(end_state + (0,)))
                    nxt[new_state] = nxt.get(new_state, 0) + ways * chain_ways
        states = nxt
    return factorial(n) * sum(states.values())


_BRUTE_FORCE_MAX = 6


def brute_force_count(n: int, limits: StealLimits) -> int:
    """Enumeration oracle: walk every legal action sequence, rounds 1..n.

    Chains are enumerated steal by steal (chain lock, per-round cap, and
    lifetime cap each checked per victim); each open multiplies by the number
    of wrapped gifts available at that moment, since fresh gifts are
    interchangeable until stolen. Knows nothing of the closed form or the
    multiset DP. Guarded to n <= 6 against combinatorial explosion.
    """
    if n < 1:
        raise ValueError(f"player count must be >= 1, got {n}")
    if n > _BRUTE_FORCE_MAX:
        raise ValueError(
            f"brute force enumeration is limited to n <= {_BRUTE_FORCE_MAX} (got {n})"
        )
    per_round, lifetime = limits.per_round, limits.lifetime
    totals: list[int] = []  # lifetime steal count per opened gift, in open order

    def play_round(k: int) -> int:
        if k > n:
            return 1
        open_choices = n - k + 1
        round_counts = [0] * (k - 1)
        locked: set[int] = set()

        def act() -> int:
            totals.append(0)
            ways = open_choices * play_round(k + 1)
            totals.pop()
            for i in range(k - 1):
                if i in locked:
                    continue
                if per_round and round_counts[i] >= per_round:
                    continue
                if lifetime and totals[i] >= lifetime:
                    continue
                totals[i] += 1
                round_counts[i] += 1
                locked.add(i)
                ways += act()
                locked.discard(i)
                round_counts[i] -= 1
                totals[i] -= 1
            return ways

        return act()

    return play_round(1)

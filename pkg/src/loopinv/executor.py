"""Exact loop execution: run a transition system and collect sample states.

States are tuples of Rationals in declared variable order.  Each step
evaluates every transition's guard exactly and fires the unique enabled
one; a state where none is enabled is a loop exit.
"""

from __future__ import annotations

from typing import Sequence, Tuple

from loopinv.frontend import TransitionSystem
from loopinv.polyring import Rational
from loopinv.vanishing import PointSet


class AmbiguityError(RuntimeError):
    """More than one transition enabled at a state."""


class ExecutionConfig:
    __slots__ = ("target_count", "max_steps", "ignore_guard")

    def __init__(self, target_count: int, max_steps: int, ignore_guard: bool = False):
        if target_count < 1:
            raise ValueError("target_count must be at least 1")
        if max_steps < target_count:
            raise ValueError("max_steps must cover target_count")
        self.target_count = target_count
        self.max_steps = max_steps
        self.ignore_guard = ignore_guard


def _enabled(ts: TransitionSystem, state, ignore_guard: bool):
    hits = []
    for tr in ts.transitions:
        ok = True
        for atom in tr.guard:
            if ignore_guard and atom.loop_level:
                continue      # the while-condition is suspended, branch tests are not
            if not atom.holds(state):
                ok = False
                break
        if ok:
            hits.append(tr)
    if len(hits) > 1:
        raise AmbiguityError(f"{len(hits)} transitions enabled at state {state}")
    return hits[0] if hits else None


def collect_samples(ts: TransitionSystem, init: Sequence,
                    cfg: ExecutionConfig) -> PointSet:
    """First trajectory states, exactly evaluated, as a deduplicated set.

    Collection stops at target_count distinct states, at loop exit, at a
    consecutive repeat (fixed point), or at the max_steps safety cap; in
    every early case the result carries shortfall = True.
    """
    state: Tuple[Rational, ...] = tuple(Rational(c) for c in init)
    if len(state) != len(ts.V):
        raise ValueError("initial state dimension mismatch")
    collected = [state]
    distinct = {state}
    steps = 0
    while len(distinct) < cfg.target_count and steps < cfg.max_steps:
        tr = _enabled(ts, state, cfg.ignore_guard)
        if tr is None:
            break
        new_state = tuple(tr.update[v].evaluate(state) for v in ts.V)
        steps += 1
        if new_state == state:
            break
        if new_state not in distinct:
            distinct.add(new_state)
            collected.append(new_state)
        state = new_state
    return PointSet(collected, shortfall=len(distinct) < cfg.target_count)


def format_trace(points: PointSet) -> str:
    """One state per line, coordinates tab-separated in reduced form."""
    return "\n".join("\t".join(str(c) for c in pt) for pt in points.points)

"""Separation rank and the two-player Separation Game.

The rank of a set U over parameters S is 0 when U is contained in S and
otherwise one more than the best Separator choice against the worst
element: srk(U/S) = 1 + min over s of max over v in U of
srk(U ∩ B(v)/S ∪ {s}), balls taken over the enlarged parameter set.

The game starts from the full universe with no parameters.  Each round
the win condition (at most one arena element) is checked, Connector picks
an arena element c, the arena shrinks to the members dependent on c over
the parameters chosen so far, and Separator adds one element to the
parameter set.  game_value computes the optimal number of rounds by plain
minimax, deliberately sharing no code with the rank solver so the two can
cross-check each other.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .core import FiniteStructure
from .errors import BudgetExceeded, DomainError
from .independence import separation_ball

__all__ = [
    "GameState",
    "game_new",
    "connector_move",
    "separator_move",
    "RankValue",
    "SrkSolver",
    "srk",
    "MoveAdvice",
    "optimal_separator_move",
    "optimal_connector_move",
    "game_value",
    "DEFAULT_SEPARATOR_CAP",
    "DEFAULT_ARENA_CAP",
]

DEFAULT_SEPARATOR_CAP = 4
DEFAULT_ARENA_CAP = 12


# --- the game engine ---------------------------------------------------------


@dataclass(frozen=True)
class GameState:
    """One snapshot of a Separation Game.

    round_number counts from 1; history holds completed (connector,
    separator) rounds; pending_connector is set between the two moves of a
    round.  With post_move_arena=True the arena update is deferred to the
    separator move and uses the enlarged parameter set (an experimental
    variant; the default follows the rule that independence is evaluated
    over the parameters chosen before the current round).
    """

    structure: FiniteStructure
    r: int
    round_number: int = 1
    separator_set: frozenset = frozenset()
    arena: frozenset = frozenset()
    history: tuple = ()
    pending_connector: Optional[int] = None
    status: str = "running"
    post_move_arena: bool = False
    budget_bits: Optional[int] = None

    @property
    def finished(self) -> bool:
        return self.status != "running"

    @property
    def awaiting(self) -> Optional[str]:
        if self.finished:
            return None
        return "separator" if self.pending_connector is not None else "connector"


def game_new(
    structure: FiniteStructure,
    r: int,
    post_move_arena: bool = False,
    budget_bits: Optional[int] = None,
) -> GameState:
    """Fresh game: arena = universe, no parameters, win check applied."""
    if r < 0:
        raise DomainError("radius must be >= 0")
    arena = frozenset(range(structure.universe_size))
    status = "separator_won" if len(arena) <= 1 else "running"
    return GameState(
        structure=structure,
        r=r,
        arena=arena,
        status=status,
        post_move_arena=post_move_arena,
        budget_bits=budget_bits,
    )


def connector_move(state: GameState, c: int) -> GameState:
    """Connector picks an arena element; the arena shrinks to its
    dependent members (immediately, unless the post-move variant defers
    the update to the separator move)."""
    if state.finished:
        raise DomainError("illegal move: game is over")
    if state.pending_connector is not None:
        raise DomainError("illegal move: separator to move")
    if c not in state.arena:
        raise DomainError(f"illegal move: {c} is not in the arena")
    if state.post_move_arena:
        return dataclasses.replace(state, pending_connector=c)
    ball = separation_ball(
        state.structure, state.separator_set, state.r, c, state.budget_bits
    )
    return dataclasses.replace(
        state, arena=state.arena & ball, pending_connector=c
    )


def separator_move(state: GameState, s: int) -> GameState:
    """Separator adds any element to the parameter set, completing the
    round; the next round's win condition is checked immediately."""
    if state.finished:
        raise DomainError("illegal move: game is over")
    if state.pending_connector is None:
        raise DomainError("illegal move: connector to move")
    if not 0 <= s < state.structure.universe_size:
        raise DomainError(f"illegal move: {s} is outside the universe")
    c = state.pending_connector
    separator_set = state.separator_set | {s}
    arena = state.arena
    if state.post_move_arena:
        ball = separation_ball(
            state.structure, separator_set, state.r, c, state.budget_bits
        )
        arena = arena & ball
    status = "separator_won" if len(arena) <= 1 else "running"
    return dataclasses.replace(
        state,
        round_number=state.round_number + 1,
        separator_set=separator_set,
        arena=arena,
        history=state.history + ((c, s),),
        pending_connector=None,
        status=status,
    )


# --- separation rank ---------------------------------------------------------


class RankValue(NamedTuple):
    value: int
    exact: bool  # False marks a budget-truncated lower bound


class SrkSolver:
    """Memoized evaluator of the rank recursion for one (structure, r).

    Budgets: parameter sets are explored up to max_separator_size and
    arenas up to max_arena elements; a node cut off by either budget
    reports the lower bound 1 flagged inexact, and inexactness propagates
    to every value it influences.  Re-entering a node already on the
    current stack (possible when the same parameter element is picked
    twice without shrinking the arena) yields an infinite branch, which
    the minimum then avoids.
    """

    def __init__(
        self,
        structure: FiniteStructure,
        r: int,
        budget_bits: Optional[int] = None,
        max_separator_size: int = DEFAULT_SEPARATOR_CAP,
        max_arena: int = DEFAULT_ARENA_CAP,
    ):
        if r < 0:
            raise DomainError("radius must be >= 0")
        self.structure = structure
        self.r = r
        self.budget_bits = budget_bits
        self.max_separator_size = max_separator_size
        self.max_arena = max_arena
        self.memo = {}
        self._active = set()
        self._balls = {}

    def _ball(self, S: frozenset, v: int) -> frozenset:
        key = (S, v)
        if key not in self._balls:
            try:
                self._balls[key] = separation_ball(
                    self.structure, S, self.r, v, self.budget_bits
                )
            except BudgetExceeded as exc:
                raise BudgetExceeded(
                    f"ball enumeration over separator set {sorted(S)} exceeded "
                    f"the budget: {exc}",
                    required=exc.required,
                    budget=exc.budget,
                )
        return self._balls[key]

    def rank(self, U, S) -> RankValue:
        U = frozenset(U)
        S = frozenset(S)
        n = self.structure.universe_size
        for x in U | S:
            if not isinstance(x, int) or not 0 <= x < n:
                raise DomainError(f"element {x!r} outside universe of size {n}")
        return self._rank(U, S)

    def _rank(self, U: frozenset, S: frozenset) -> RankValue:
        if U <= S:
            return RankValue(0, True)
        key = (U, S)
        if key in self.memo:
            return self.memo[key]
        if key in self._active:
            return RankValue(math.inf, True)  # cyclic branch, never optimal
        if len(S) >= self.max_separator_size or len(U) > self.max_arena:
            return RankValue(1, False)
        self._active.add(key)
        try:
            best = RankValue(math.inf, True)
            for s in range(self.structure.universe_size):
                branch = self._branch(U, S, s, best.value)
                if branch is not None and branch.value < best.value:
                    best = branch
            value = RankValue(1 + best.value, best.exact)
        finally:
            self._active.discard(key)
        self.memo[key] = value
        return value

    def _branch(
        self, U: frozenset, S: frozenset, s: int, cutoff
    ) -> Optional[RankValue]:
        """max over v in U of rank(U ∩ B(v) / S ∪ {s}); None when the
        running maximum reaches the cutoff (a dominated branch) or the
        branch loops back to a node in progress."""
        Ss = S | {s}
        worst_value, worst_exact = 0, True
        for v in sorted(U):
            child = self._rank(U & self._ball(Ss, v), Ss)
            if child.value is math.inf:
                return None
            worst_value = max(worst_value, child.value)
            worst_exact = worst_exact and child.exact
            if worst_value >= cutoff:
                return None
        return RankValue(worst_value, worst_exact)

    def best_separator(self, U, S):
        """(s, branch value) achieving the min, ties to the lowest id."""
        U, S = frozenset(U), frozenset(S)
        best_s, best = None, RankValue(math.inf, True)
        for s in range(self.structure.universe_size):
            branch = self._branch(U, S, s, best.value)
            if branch is not None and branch.value < best.value:
                best_s, best = s, branch
        return best_s, best

    def best_connector(self, U, S):
        """(v, child value) achieving the max over balls taken at the
        current parameter set, ties to the lowest id."""
        U, S = frozenset(U), frozenset(S)
        best_v, best = None, RankValue(-1, True)
        for v in sorted(U):
            child = self._rank(U & self._ball(S, v), S)
            if child.value > best.value:
                best_v, best = v, child
        return best_v, best


def srk(
    structure: FiniteStructure,
    r: int,
    U=None,
    S=(),
    budget_bits: Optional[int] = None,
    max_separator_size: int = DEFAULT_SEPARATOR_CAP,
    max_arena: int = DEFAULT_ARENA_CAP,
) -> RankValue:
    """The separation rank of U over S (defaults: whole universe over ∅)."""
    solver = SrkSolver(structure, r, budget_bits, max_separator_size, max_arena)
    if U is None:
        U = range(structure.universe_size)
    return solver.rank(U, S)


# --- optimal moves -----------------------------------------------------------


class MoveAdvice(NamedTuple):
    move: Optional[int]
    bound: int
    exact: bool


def _solver_for(state: GameState, max_separator_size, max_arena) -> SrkSolver:
    return SrkSolver(
        state.structure,
        state.r,
        state.budget_bits,
        max_separator_size,
        max_arena,
    )


def optimal_separator_move(
    state: GameState,
    max_separator_size: int = DEFAULT_SEPARATOR_CAP,
    max_arena: int = DEFAULT_ARENA_CAP,
) -> MoveAdvice:
    """The parameter choice achieving the minimum of the rank recursion at
    the current (arena, parameters); the bound is that rank value (0 when
    the arena already sits inside the parameter set)."""
    if state.finished:
        raise DomainError("game is over")
    U, S = state.arena, state.separator_set
    if U <= S:
        outside = sorted(set(range(state.structure.universe_size)) - S)
        fallback = outside[0] if outside else 0
        return MoveAdvice(fallback, 0, True)
    solver = _solver_for(state, max_separator_size, max_arena)
    s, branch = solver.best_separator(U, S)
    if s is None:
        raise DomainError("no separator move improves the position")
    return MoveAdvice(s, 1 + branch.value, branch.exact)


def optimal_connector_move(
    state: GameState,
    max_separator_size: int = DEFAULT_SEPARATOR_CAP,
    max_arena: int = DEFAULT_ARENA_CAP,
) -> MoveAdvice:
    """The arena element achieving the maximum of the rank recursion over
    balls at the current parameter set; the bound is that child rank."""
    if state.finished:
        raise DomainError("game is over")
    if state.awaiting != "connector":
        raise DomainError("separator to move")
    solver = _solver_for(state, max_separator_size, max_arena)
    v, child = solver.best_connector(state.arena, state.separator_set)
    if v is None:
        raise DomainError("the arena is empty")
    return MoveAdvice(v, child.value, child.exact)


# --- independent minimax game value ------------------------------------------


def game_value(
    structure: FiniteStructure, r: int, budget_bits: Optional[int] = None
) -> int:
    """Minimal number of rounds in which Separator forces the win, by
    exhaustive minimax over the literal game rules.  Shares no logic with
    SrkSolver: this is the cross-check for the rank recursion."""
    if r < 0:
        raise DomainError("radius must be >= 0")
    n = structure.universe_size
    memo = {}
    active = set()

    def ball(S, v):
        return separation_ball(structure, S, r, v, budget_bits)

    def rounds(A, S):
        if len(A) <= 1:
            return 1
        key = (A, S)
        if key in memo:
            return memo[key]
        if key in active:
            return math.inf
        active.add(key)
        try:
            best_c = 0
            for c in sorted(A):
                shrunk = A & ball(S, c)
                reply = min(rounds(shrunk, S | {s}) for s in range(n))
                best_c = max(best_c, reply)
            value = 1 + best_c
        finally:
            active.discard(key)
        memo[key] = value
        return value

    return rounds(frozenset(range(n)), frozenset())

"""Definite-clause resolution with block declarations (coroutining).

Goals whose watched arguments are all unbound variables are parked on those
variables instead of being resolved.  Binding any of them moves the goal to
the store's FIFO wake queue; the solver drains the queue before selecting
the next ordinary goal, so woken goals run to quiescence (possibly parking
again) before the interrupted resolution continues.

Search is depth-first in clause source order with an explicit choicepoint
stack, so deep resolutions do not consume Python stack frames.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .terms import (Atom, Compound, Node, Store, Var, rename, render_many,
                    unify)

DEFAULT_DEPTH_LIMIT = 10000
# forcing rounds before giving up; each round may park new subgoals
MAX_FORCE_ROUNDS = 100


class DepthLimitExceeded(RuntimeError):
    """Resolution ran past the step limit; distinct from plain failure."""


class Flounder(Exception):
    """Residual goals could not be discharged even with blocks lifted."""


def default_depth_limit() -> int:
    env = os.environ.get("CUG_DEPTH_LIMIT")
    return int(env) if env else DEFAULT_DEPTH_LIMIT


@dataclass(frozen=True)
class Literal:
    pred: str
    args: tuple = ()

    @property
    def key(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    def map_nodes(self, fn: Callable[[Node], Node]) -> "Literal":
        return Literal(self.pred, tuple(fn(a) for a in self.args))


@dataclass(frozen=True)
class Clause:
    head: Literal
    body: tuple = ()

    def map_nodes(self, fn: Callable[[Node], Node]) -> "Clause":
        return Clause(self.head.map_nodes(fn),
                      tuple(b.map_nodes(fn) for b in self.body))


@dataclass(frozen=True)
class BlockDecl:
    pred: str
    arity: int
    watched: tuple[int, ...]

    def __post_init__(self):
        if not self.watched or any(not 1 <= i <= self.arity for i in self.watched):
            raise ValueError(f"bad block positions {self.watched} for "
                             f"{self.pred}/{self.arity}")


@dataclass
class Suspension:
    id: int
    goal: Literal
    watch: tuple[Var, ...]


BUILTINS = {("=", 2), ("true", 0)}


@dataclass
class Program:
    """Clauses indexed by predicate/arity, in source order, plus blocks."""

    clauses: dict[tuple[str, int], list[Clause]] = field(default_factory=dict)
    blocks: dict[tuple[str, int], BlockDecl] = field(default_factory=dict)
    target: Node | None = None
    rules: tuple[str, ...] = ("fa", "ba")
    backbone: object = None
    externals: set = field(default_factory=set)
    depth_limit: int | None = None

    def add_clause(self, clause: Clause) -> None:
        self.clauses.setdefault(clause.head.key, []).append(clause)

    def add_block(self, decl: BlockDecl) -> None:
        key = (decl.pred, decl.arity)
        if key in self.blocks:
            raise ValueError(f"duplicate block declaration for {decl.pred}/{decl.arity}")
        self.blocks[key] = decl

    def lexicon(self) -> dict[tuple[str, ...], list[Clause]]:
        """Lexical clauses ``lex([tok, ...], Cat)`` keyed by token tuple."""
        out: dict[tuple[str, ...], list[Clause]] = {}
        for c in self.clauses.get(("lex", 2), []):
            key = lex_key(c.head.args[0])
            out.setdefault(key, []).append(c)
        return out

    def limit(self) -> int:
        return self.depth_limit or default_depth_limit()


def lex_key(n: Node) -> tuple[str, ...]:
    if isinstance(n, Atom):
        return (n.name,)
    if isinstance(n, Compound) and n.functor == "[]":
        return tuple(a.name for a in n.args)
    raise ValueError(f"lexical key must be a token list, got {n!r}")


def render_goal(goal: Literal, s: Store) -> str:
    return f"{goal.pred}({', '.join(render_many(goal.args, s))})"


def _watched_vars(goal: Literal, blocks, s: Store) -> tuple[Var, ...] | None:
    decl = blocks.get(goal.key)
    if decl is None:
        return None
    vs = tuple(s.deref(goal.args[i - 1]) for i in decl.watched)
    if all(isinstance(v, Var) for v in vs):
        return vs
    return None


def should_suspend(goal: Literal, blocks, s: Store) -> Var | None:
    """The variable to park ``goal`` on, or None if it may run now.

    A goal is blocked while *every* watched argument is an unbound variable.
    """
    vs = _watched_vars(goal, blocks, s)
    return vs[0] if vs else None


def residual(s: Store) -> list[Suspension]:
    return list(s.active.values())


def solve(goals: Sequence[Literal], program: Program, s: Store, *,
          limit: int | None = None, eager: bool = False,
          force: bool = False) -> Iterator[list[Suspension]]:
    """Enumerate solutions of ``goals``; yields the residual goals each time.

    The store holds the solution while the consumer runs.  Consumers must
    undo their own changes before resuming the generator.  ``eager``
    ignores every block declaration; ``force`` ignores them for the given
    goals only (their subgoals are still subject to blocks).
    """
    limit = limit or program.limit()
    cont = None
    for g in reversed(goals):
        cont = (g, force, cont)
    start = s.mark()
    choices: list[tuple] = []
    steps = 0
    clauses_of = program.clauses
    blocks = {} if eager else program.blocks

    def enter(goal, rest, options, i):
        nonlocal cont
        n = len(options)
        while i < n:
            cp = s.mark()
            c = rename(options[i], s)
            if unify(Compound(goal.pred, goal.args),
                     Compound(c.head.pred, c.head.args), s):
                if i + 1 < n:
                    choices.append((cp, goal, rest, options, i + 1))
                if s.logging:
                    s.log("resolve", f"{render_goal(goal, s)} [clause {i + 1}]")
                body = rest
                for b in reversed(c.body):
                    body = (b, False, body)
                cont = body
                return True
            i += 1
        return False

    def backtrack():
        while choices:
            cp, goal, rest, options, i = choices.pop()
            s.undo_to(cp)
            if enter(goal, rest, options, i):
                return True
        s.undo_to(start)
        return False

    while True:
        if s.queue:
            woken = []
            while s.queue:
                susp = s.pop_woken()
                woken.append(susp)
                if s.logging:
                    s.log("wake", render_goal(susp.goal, s))
            for susp in reversed(woken):
                cont = (susp.goal, False, cont)
        if cont is None:
            yield residual(s)
            steps = 0
            if not backtrack():
                return
            continue
        goal, forced, rest = cont
        steps += 1
        if steps > limit:
            raise DepthLimitExceeded(f"more than {limit} resolution steps")
        if goal.key == ("=", 2):
            if unify(goal.args[0], goal.args[1], s):
                cont = rest
            elif not backtrack():
                return
            continue
        if goal.key == ("true", 0):
            cont = rest
            continue
        if not forced:
            watch = _watched_vars(goal, blocks, s)
            if watch:
                susp = Suspension(next(s._ids), goal, watch)
                s.suspend(susp, watch)
                if s.logging:
                    s.log("suspend", render_goal(goal, s))
                cont = rest
                continue
        options = clauses_of.get(goal.key, ())
        if not enter(goal, rest, options, 0) and not backtrack():
            return


def force_residual(program: Program, s: Store, *,
                   limit: int | None = None) -> Iterator[None]:
    """Discharge parked goals by running them with their blocks lifted.

    Each round lifts the blocks of the goals currently parked; subgoals they
    create may park again and are handled by the next round.  Yields once
    per complete discharge; callers normally take only the first.
    """
    limit = limit or program.limit()
    yield from _force(program, s, limit, 0)


def _force(program, s, limit, rounds):
    pending = residual(s)
    if not pending:
        yield None
        return
    if rounds > MAX_FORCE_ROUNDS:
        raise DepthLimitExceeded("residual forcing does not converge")
    cp = s.mark()
    for susp in pending:
        s.deactivate(susp)
        if s.logging:
            s.log("force", render_goal(susp.goal, s))
    for _ in solve([p.goal for p in pending], program, s, limit=limit, force=True):
        yield from _force(program, s, limit, rounds + 1)
    s.undo_to(cp)


def first(it: Iterable) -> bool:
    """Advance ``it`` once; True if it produced something."""
    for _ in it:
        return True
    return False


def discharge(program: Program, s: Store, *, limit: int | None = None) -> bool:
    """Commit to the first way of discharging the residual goals.

    Returns whether anything had to be forced; raises :class:`Flounder`
    (store unchanged) when the residual goals have no solution.
    """
    pending = bool(s.active)
    it = force_residual(program, s, limit=limit)
    if not first(it):
        raise Flounder("residual goals have no solution: "
                       + "; ".join(render_goal(p.goal, s) for p in residual(s)))
    return pending

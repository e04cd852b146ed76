"""Ground truth by execution.

Parse trees are enumerated up to a per-chain production bound, and each role
action is interpreted concretely against per-node attribute maps.  Branches
and loops are choices; ``execute_role`` takes an explicit choice vector,
while ``oracle_check`` explores every choice with a memoised set semantics
that yields the same union of faults without listing trees one by one.

Runtime model, kept aligned with the static one: ``$0`` is the node's own map
(which its parent sees as child ``k``), ``$i`` is child ``i``'s map, and each
evaluation of a child starts with fresh maps for the child's own children.
Evaluating a child whose nonterminal has no productions ends the run, like an
abort.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .actions import Abort, Check, Copy, Eval, If, Loop, Propagate, Read, Seq, Write
from .analysis import role_asts
from .errors import BudgetExceeded, ChoiceUnderflow, EmptyLanguage
from .model import Bundle, producers

ERROR_KINDS = ("MissingAttr", "BadAttrT")
DEFAULT_ORACLE_BUDGET = 2_000_000
LOOP_CAP = 2


@dataclass(frozen=True)
class ParseTree:
    production: str | None  # None for a nonterminal without productions
    children: tuple = ()
    symbol: str | None = None

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def __str__(self):
        if self.production is None:
            return f"<{self.symbol}>"
        if not self.children:
            return self.production
        return f"{self.production}(" + ", ".join(map(str, self.children)) + ")"


@dataclass(frozen=True)
class RuntimeViolation:
    kind: str  # MissingAttr | BadAttrT | CheckObserved
    production: str
    index: int
    attr: str
    tree: object = field(default=None, compare=False)
    choices: tuple = field(default=(), compare=False)

    @property
    def key(self):
        return (self.kind, self.production, self.index, self.attr)


def enumerate_trees(g: Bundle, bound: int = 2, limit: int | None = None) -> list[ParseTree]:
    """All trees in which no production occurs more than ``bound`` times on a chain."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    if not producers(g, g.start):
        raise EmptyLanguage(f"start symbol {g.start!r} has no productions")
    index = {p.id: k for k, p in enumerate(g.productions)}
    memo: dict = {}
    count = [0]

    def trees(nt, counts):
        key = (nt, counts)
        if key in memo:
            return memo[key]
        prods = producers(g, nt)
        if not prods:
            memo[key] = [ParseTree(None, (), nt)]
            return memo[key]
        out = []
        for p in prods:
            k = index[p.id]
            if counts[k] >= bound:
                continue
            c2 = counts[:k] + (counts[k] + 1,) + counts[k + 1:]
            options = [trees(sym, c2) for sym in p.rhs]
            for kids in itertools.product(*options):
                out.append(ParseTree(p.id, tuple(kids), nt))
                count[0] += 1
                if limit is not None and count[0] > limit:
                    raise BudgetExceeded(f"more than {limit} trees")
        memo[key] = out
        return out

    result = trees(g.start, (0,) * len(index))
    if not result:
        raise EmptyLanguage(f"no tree of {g.start!r} respects bound {bound}")
    return result


class _Stop(Exception):
    """Unwinds the whole run (abort, or evaluation of an unproducible child)."""


class _Run:
    def __init__(self, g, asts, choices, tree):
        self.g = g
        self.asts = asts
        self.choices = list(choices)
        self.pos = 0
        self.tree = tree
        self.found = set()

    def choose(self, what):
        if self.pos >= len(self.choices):
            raise ChoiceUnderflow(what)
        c = self.choices[self.pos]
        self.pos += 1
        return c

    def fault(self, kind, pid, i, n):
        self.found.add(RuntimeViolation(kind, pid, i, n, self.tree, tuple(self.choices)))

    def node(self, tree, self_map):
        if tree.production is None:
            raise _Stop()
        kids = [dict() for _ in tree.children]
        self.block(self.asts[tree.production], tree, self_map, kids)

    def block(self, seq, tree, me, kids):
        for s in seq.stmts:
            self.stmt(s, tree, me, kids)

    def stmt(self, s, tree, me, kids):
        pid = tree.production
        h = self.g.hierarchy

        def slot(i):
            return me if i == 0 else kids[i - 1]

        if isinstance(s, Eval):
            child = tree.children[s.i - 1]
            self.node(child, kids[s.i - 1])
        elif isinstance(s, Write):
            slot(s.i)[s.n] = s.t
        elif isinstance(s, Read):
            got = slot(s.i).get(s.n)
            if got is None:
                self.fault("MissingAttr", pid, s.i, s.n)
            elif not h.subtype_of(got, s.t):
                self.fault("BadAttrT", pid, s.i, s.n)
        elif isinstance(s, Copy):
            got = slot(s.i_s).get(s.n_s)
            if got is None:
                self.fault("MissingAttr", pid, s.i_s, s.n_s)
            else:
                slot(s.i_d)[s.n_d] = got
        elif isinstance(s, Check):
            self.fault("CheckObserved", pid, s.i, s.n)
        elif isinstance(s, Propagate):
            for n, t in list(kids[0].items()):
                me.setdefault(n, t)
        elif isinstance(s, Abort):
            raise _Stop()
        elif isinstance(s, If):
            if self.choose("if"):
                self.block(s.then, tree, me, kids)
            elif s.orelse is not None:
                self.block(s.orelse, tree, me, kids)
        elif isinstance(s, Loop):
            for _ in range(self.choose("loop")):
                self.block(s.body, tree, me, kids)
        else:
            raise TypeError(f"unknown statement {s!r}")


def execute_role(tree: ParseTree, role, choices, g: Bundle, h=None, asts=None) -> set[RuntimeViolation]:
    """Run ``role`` over ``tree`` with branch/loop decisions taken from ``choices``.

    ``choices`` holds 1/0 (then/else) for each ``if`` and an iteration count in
    0..2 for each ``loop``, in the order they are met.
    """
    name = role if isinstance(role, str) else role.name
    asts = role_asts(g, name) if asts is None else asts
    run = _Run(g, asts, choices, tree)
    try:
        run.node(tree, {})
    except _Stop:
        pass
    return run.found


def exhaustive_choices(tree: ParseTree, role, g: Bundle, asts=None, limit: int = 200_000):
    """Yield ``(choices, violations)`` for every complete choice vector of one tree."""
    name = role if isinstance(role, str) else role.name
    asts = role_asts(g, name) if asts is None else asts
    stack = [()]
    runs = 0
    while stack:
        prefix = stack.pop()
        runs += 1
        if runs > limit:
            raise BudgetExceeded(f"more than {limit} choice vectors")
        try:
            yield prefix, execute_role(tree, name, prefix, g, asts=asts)
        except ChoiceUnderflow as exc:
            options = (1, 0) if exc.args[0] == "if" else tuple(range(LOOP_CAP + 1))
            stack.extend(prefix + (c,) for c in reversed(options))


def oracle_check_bruteforce(g: Bundle, role, bound: int = 2, tree_limit: int = 20_000) -> set:
    """Reference implementation: every tree times every choice vector."""
    name = role if isinstance(role, str) else role.name
    asts = role_asts(g, name)
    keys = set()
    for tree in enumerate_trees(g, bound, tree_limit):
        for _, found in exhaustive_choices(tree, name, g, asts):
            keys |= {v.key for v in found}
    return keys


def _put(m: frozenset, n, t) -> frozenset:
    d = dict(m)
    d[n] = t
    return frozenset(d.items())


class _SetOracle:
    def __init__(self, g: Bundle, asts, bound, budget):
        self.g = g
        self.asts = asts
        self.bound = bound
        self.budget = budget
        self.steps = 0
        self.index = {p.id: k for k, p in enumerate(g.productions)}
        self.memo: dict = {}
        self.keys: set = set()

    def tick(self, n=1):
        self.steps += n
        if self.steps > self.budget:
            raise BudgetExceeded(f"oracle exceeded {self.budget} steps")

    def nonterminal(self, nt, counts, me):
        """Final maps of a fresh ``nt`` node that starts with map ``me``."""
        key = (nt, counts, me)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = frozenset()  # a chain never revisits the same counts
        finals = set()
        for p in producers(self.g, nt):
            k = self.index[p.id]
            if counts[k] >= self.bound:
                continue
            c2 = counts[:k] + (counts[k] + 1,) + counts[k + 1:]
            states = {(me, (frozenset(),) * p.arity)}
            for s in self.run(self.asts[p.id], p, c2, states):
                finals.add(s[0])
        self.memo[key] = frozenset(finals)
        return self.memo[key]

    def run(self, seq: Seq, p, counts, states):
        for s in seq.stmts:
            if not states:
                break
            states = self.stmt(s, p, counts, states)
        return states

    def stmt(self, s, p, counts, states):
        self.tick(len(states))
        h = self.g.hierarchy
        if isinstance(s, If):
            then = self.run(s.then, p, counts, set(states))
            other = self.run(s.orelse, p, counts, set(states)) if s.orelse is not None else states
            return set(then) | set(other)
        if isinstance(s, Loop):
            out, cur = set(states), set(states)
            for _ in range(LOOP_CAP):
                cur = set(self.run(s.body, p, counts, cur))
                out |= cur
            return out
        if isinstance(s, Abort):
            return set()
        out = set()
        for me, kids in states:
            def get(i, n):
                return dict(me if i == 0 else kids[i - 1]).get(n)

            def put(i, n, t):
                if i == 0:
                    return (_put(me, n, t), kids)
                return (me, kids[:i - 1] + (_put(kids[i - 1], n, t),) + kids[i:])

            if isinstance(s, Eval):
                for final in self.nonterminal(p.rhs[s.i - 1], counts, kids[s.i - 1]):
                    out.add((me, kids[:s.i - 1] + (final,) + kids[s.i:]))
            elif isinstance(s, Write):
                out.add(put(s.i, s.n, s.t))
            elif isinstance(s, Read):
                got = get(s.i, s.n)
                if got is None:
                    self.keys.add(("MissingAttr", p.id, s.i, s.n))
                elif not h.subtype_of(got, s.t):
                    self.keys.add(("BadAttrT", p.id, s.i, s.n))
                out.add((me, kids))
            elif isinstance(s, Copy):
                got = get(s.i_s, s.n_s)
                if got is None:
                    self.keys.add(("MissingAttr", p.id, s.i_s, s.n_s))
                    out.add((me, kids))
                else:
                    out.add(put(s.i_d, s.n_d, got))
            elif isinstance(s, Check):
                self.keys.add(("CheckObserved", p.id, s.i, s.n))
                out.add((me, kids))
            elif isinstance(s, Propagate):
                d = dict(me)
                for n, t in kids[0]:
                    d.setdefault(n, t)
                out.add((frozenset(d.items()), kids))
            else:
                raise TypeError(f"unknown statement {s!r}")
        return out


def oracle_check(g: Bundle, role, bound: int = 2, budget: int | None = None) -> set:
    """Union of runtime faults over all bounded trees and choices.

    Returns ``(kind, production, index, attr)`` keys, where kind is one of
    MissingAttr, BadAttrT or CheckObserved.  Each evaluation of a child ranges
    over all of its subtrees independently; with at most one evaluation per
    child on any run this is exactly the per-tree union.
    """
    name = role if isinstance(role, str) else role.name
    if not producers(g, g.start):
        raise EmptyLanguage(f"start symbol {g.start!r} has no productions")
    so = _SetOracle(g, role_asts(g, name), bound, DEFAULT_ORACLE_BUDGET if budget is None else budget)
    so.nonterminal(g.start, (0,) * len(so.index), frozenset())
    return so.keys


def error_keys(keys) -> set:
    return {k for k in keys if k[0] in ERROR_KINDS}

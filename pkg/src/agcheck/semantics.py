"""Production-context stacks and the per-action state transformation.

A context stack simulates the ancestry of the AST node whose action runs.  The
bottom item is the root.  Every other item ``(k, m)`` stands for a node that is
the ``k``-th child of the item below it, and ``m`` maps ``(child index, name)``
to the attribute type recorded for that node's children.  Reads and writes on
``$0`` go to the parent's record at key ``k``.

Stacks are persistent linked cells with a precomputed hash, so visited-set
lookups on ``(node, stack, tags)`` stay cheap.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .actions import (
    BeginEvalMetaAction, CheckAttrType, CopyAttr, EndEvalMetaAction, EnterCtx, IgnoreBranchAction,
    LeaveCtx, Nop, PropagateAttrs, ReadAttr, WriteAttr,
)
from .errors import ImbalanceError


class AttrMap(Mapping):
    """Immutable mapping ``(index, name) -> type`` with a cached hash."""

    __slots__ = ("_d", "_h")

    def __init__(self, items=()):
        self._d = dict(items)
        self._h = hash(frozenset(self._d.items()))

    def __getitem__(self, key):
        return self._d[key]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        if isinstance(other, AttrMap):
            return self._h == other._h and self._d == other._d
        if isinstance(other, Mapping):
            return self._d == dict(other)
        return NotImplemented

    def __repr__(self):
        inner = ", ".join(f"({i},{n!r}): {t}" for (i, n), t in sorted(self._d.items()))
        return "{" + inner + "}"

    def set(self, i: int, n: str, t: str) -> "AttrMap":
        if self._d.get((i, n)) == t:
            return self
        d = dict(self._d)
        d[(i, n)] = t
        return AttrMap(d)

    def at(self, i: int) -> frozenset[tuple[str, str]]:
        return frozenset((n, t) for (j, n), t in self._d.items() if j == i)

    def merged(self, X: Iterable[tuple[str, str]], i: int) -> "AttrMap":
        """Add ``(i, name) -> t`` for every pair in X whose key is not yet mapped."""
        d = dict(self._d)
        changed = False
        for n, t in X:
            if (i, n) not in d:
                d[(i, n)] = t
                changed = True
        return AttrMap(d) if changed else self

    def without_index(self, i: int) -> dict:
        return {key: t for key, t in self._d.items() if key[0] != i}


EMPTY = AttrMap()
HeadMap = AttrMap


class ProductionContext(NamedTuple):
    k: int
    m: AttrMap


class ContextStack:
    __slots__ = ("below", "k", "m", "depth", "_h")

    def __init__(self, below, k, m):
        self.below = below
        self.k = k
        self.m = m if isinstance(m, AttrMap) else AttrMap(m)
        self.depth = 1 if below is None else below.depth + 1
        self._h = hash((None if below is None else below._h, k, self.m._h))

    @classmethod
    def root(cls, m=EMPTY) -> "ContextStack":
        return cls(None, 0, m)

    @classmethod
    def of(cls, items) -> "ContextStack":
        """Build from ``[(k, mapping), ...]`` listed bottom first."""
        cur = None
        for k, m in items:
            cur = cls(cur, k, m)
        if cur is None:
            raise ValueError("a context stack is never empty")
        return cur

    def items(self) -> list[ProductionContext]:
        out, cur = [], self
        while cur is not None:
            out.append(ProductionContext(cur.k, cur.m))
            cur = cur.below
        return out[::-1]

    def push(self, k: int) -> "ContextStack":
        return ContextStack(self, k, EMPTY)

    def pop(self) -> "ContextStack":
        if self.below is None:
            raise ImbalanceError("LeaveCtx on a root-only context stack")
        return self.below

    def with_top(self, m: AttrMap) -> "ContextStack":
        return self if m is self.m else ContextStack(self.below, self.k, m)

    def __len__(self):
        return self.depth

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        a, b = self, other
        if not isinstance(b, ContextStack):
            return NotImplemented
        while a is not b:
            if a is None or b is None or a._h != b._h or a.k != b.k or a.m != b.m:
                return False
            a, b = a.below, b.below
        return True

    def __repr__(self):
        return "<" + ", ".join(f"{c.k}:{c.m!r}" for c in self.items()) + ">"


def ctx_get(C: ContextStack, i: int, n: str) -> str | None:
    if C.below is None:
        return C.m.get((i, n))
    if i >= 1:
        return C.m.get((i, n))
    return C.below.m.get((C.k, n))


def ctx_put(C: ContextStack, i: int, n: str, t: str) -> ContextStack:
    if C.below is None or i >= 1:
        return C.with_top(C.m.set(i, n, t))
    below = C.below
    new_m = below.m.set(C.k, n, t)
    if new_m is below.m:
        return C
    return ContextStack(ContextStack(below.below, below.k, new_m), C.k, C.m)


def ctx_get_all(C: ContextStack, i: int) -> frozenset[tuple[str, str]]:
    if C.below is None or i >= 1:
        return C.m.at(i)
    return C.below.m.at(C.k)


def ctx_put_all(C: ContextStack, i: int, X) -> ContextStack:
    if C.below is None or i >= 1:
        return C.with_top(C.m.merged(X, i))
    below = C.below
    new_m = below.m.merged(X, C.k)
    if new_m is below.m:
        return C
    return ContextStack(ContextStack(below.below, below.k, new_m), C.k, C.m)


def ctx_head(C: ContextStack) -> HeadMap:
    if C.below is None:
        return C.m
    if not C.below.m:
        return C.m
    extra = [((0, n), t) for n, t in C.below.m.at(C.k)]
    if not extra:
        return C.m
    return AttrMap(list(C.m.items()) + extra)


def merge_head(C: ContextStack, h: HeadMap) -> ContextStack:
    """Return C with its head replaced by ``h``; deeper items are untouched."""
    h = h if isinstance(h, AttrMap) else AttrMap(h)
    if C.below is None:
        return C.with_top(h)
    top = AttrMap({key: t for key, t in h.items() if key[0] >= 1})
    below = C.below
    parent_items = below.m.without_index(C.k)
    parent_items.update({(C.k, n): t for (i, n), t in h.items() if i == 0})
    parent_m = AttrMap(parent_items)
    if parent_m != below.m:
        below = ContextStack(below.below, below.k, parent_m)
    if below is C.below and top == C.m:
        return C
    return ContextStack(below, C.k, top)


def top_k(C: ContextStack, k: int) -> tuple[ProductionContext, ...]:
    items = C.items()
    if not 1 <= k <= len(items):
        raise ValueError(f"top_k needs 1 <= k <= {len(items)}")
    return tuple(items[-k:])


# --------------------------------------------------------------------------
# violation kinds


@dataclass(frozen=True)
class MissingAttr:
    i: int
    n: str
    severity = "error"


@dataclass(frozen=True)
class BadAttrT:
    i: int
    n: str
    required: str
    provided: str
    severity = "error"


@dataclass(frozen=True)
class AttrTypeDynamicallyChecked:
    i: int
    n: str
    t: str
    severity = "warning"


NO_VIOLATIONS: frozenset = frozenset()


def apply_action(C: ContextStack, a, hierarchy) -> tuple[ContextStack, frozenset]:
    """Transform C by action ``a`` and report the violations it raises."""
    tp = type(a)
    if tp is Nop or tp is IgnoreBranchAction:
        return C, NO_VIOLATIONS
    if tp is WriteAttr:
        return ctx_put(C, a.i, a.n, a.t), NO_VIOLATIONS
    if tp is ReadAttr:
        got = ctx_get(C, a.i, a.n)
        if got is None:
            return C, frozenset({MissingAttr(a.i, a.n)})
        if not hierarchy.subtype_of(got, a.t):
            return C, frozenset({BadAttrT(a.i, a.n, a.t, got)})
        return C, NO_VIOLATIONS
    if tp is EnterCtx:
        return C.push(a.i), NO_VIOLATIONS
    if tp is LeaveCtx:
        return C.pop(), NO_VIOLATIONS
    if tp is CopyAttr:
        got = ctx_get(C, a.i_s, a.n_s)
        if got is None:
            return C, frozenset({MissingAttr(a.i_s, a.n_s)})
        return ctx_put(C, a.i_d, a.n_d, got), NO_VIOLATIONS
    if tp is CheckAttrType:
        return C, frozenset({AttrTypeDynamicallyChecked(a.i, a.n, a.t)})
    if tp is PropagateAttrs:
        return ctx_put_all(C, 0, ctx_get_all(C, 1)), NO_VIOLATIONS
    if tp is BeginEvalMetaAction or tp is EndEvalMetaAction:
        raise ValueError(f"{tp.__name__} must be rewritten to EnterCtx/LeaveCtx before the visit")
    raise TypeError(f"unknown action {a!r}")


def eval_path(path, C: ContextStack, cfg, hierarchy=None) -> ContextStack:
    """Fold the context transformation of each node along ``path``."""
    hierarchy = hierarchy if hierarchy is not None else cfg.hierarchy
    for v in path:
        C, _ = apply_action(C, cfg.nodes[v], hierarchy)
    return C


def path_violations(path, C: ContextStack, cfg, hierarchy=None) -> frozenset:
    """Violations raised by the last node of ``path`` after evaluating the rest."""
    if not path:
        return NO_VIOLATIONS
    hierarchy = hierarchy if hierarchy is not None else cfg.hierarchy
    C = eval_path(path[:-1], C, cfg, hierarchy)
    return apply_action(C, cfg.nodes[path[-1]], hierarchy)[1]


def is_balanced_actions(actions) -> bool:
    """Membership of an action sequence in the balanced-prefix set (opens may stay open)."""
    depth = 0
    for a in actions:
        if isinstance(a, EnterCtx):
            depth += 1
        elif isinstance(a, LeaveCtx):
            if depth == 0:
                return False
            depth -= 1
    return True


def is_balanced_prefix(path, cfg) -> bool:
    return is_balanced_actions(cfg.nodes[v] for v in path)

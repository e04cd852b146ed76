"""Semantic-action DSL: parsing, role-mode sugar and lowering to per-action CFGs.

The DSL is deliberately tiny.  Conditions carry no expression, so every branch
of an ``if`` and every iteration count of a ``loop`` is a possible execution::

    eval 1;
    if { eval 2; copy 0.val = 2.val; } else { eval 3; copy 0.val = 3.val; }
    read 1.cond : Bool;   // comments run to end of line
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Union

from .errors import IndexOutOfRange, ParseError, PropagateOnNonUnitProduction, UnknownType, ValidationError


class Span(NamedTuple):
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


# --------------------------------------------------------------------------
# CFG node actions


@dataclass(frozen=True)
class WriteAttr:
    i: int
    n: str
    t: str


@dataclass(frozen=True)
class ReadAttr:
    i: int
    n: str
    t: str


@dataclass(frozen=True)
class CopyAttr:
    i_d: int
    n_d: str
    i_s: int
    n_s: str


@dataclass(frozen=True)
class CheckAttrType:
    i: int
    n: str
    t: str


@dataclass(frozen=True)
class PropagateAttrs:
    pass


@dataclass(frozen=True)
class BeginEvalMetaAction:
    i: int


@dataclass(frozen=True)
class EndEvalMetaAction:
    pass


@dataclass(frozen=True)
class EnterCtx:
    i: int


@dataclass(frozen=True)
class LeaveCtx:
    pass


@dataclass(frozen=True)
class Nop:
    pass


@dataclass(frozen=True)
class IgnoreBranchAction:
    pass


Action = Union[
    WriteAttr, ReadAttr, CopyAttr, CheckAttrType, PropagateAttrs, BeginEvalMetaAction,
    EndEvalMetaAction, EnterCtx, LeaveCtx, Nop, IgnoreBranchAction,
]

NOP = Nop()


def action_label(a) -> str:
    """Short human-readable rendering, also used as the hashing label."""
    name = type(a).__name__
    if isinstance(a, (WriteAttr, ReadAttr, CheckAttrType)):
        return f"{name}({a.i}, {a.n}, {a.t})"
    if isinstance(a, CopyAttr):
        return f"{name}({a.i_d}, {a.n_d}, {a.i_s}, {a.n_s})"
    if isinstance(a, (BeginEvalMetaAction, EnterCtx)):
        return f"{name}({a.i})"
    return f"{name}()"


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Eval:
    i: int
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Write:
    i: int
    n: str
    t: str
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Read:
    i: int
    n: str
    t: str
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Copy:
    i_d: int
    n_d: str
    i_s: int
    n_s: str
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Check:
    i: int
    n: str
    t: str
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Propagate:
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Abort:
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Seq:
    stmts: tuple = ()


@dataclass(frozen=True)
class If:
    then: Seq
    orelse: Seq | None = None
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Loop:
    body: Seq
    span: Span | None = field(default=None, compare=False)


ATTR_STMTS = (Write, Read, Copy, Check)


def iter_statements(ast: Seq, prefix: tuple = ()) -> Iterator[tuple[tuple, object]]:
    """Yield ``(path, stmt)`` for every statement, depth first.

    A path is a tuple of integers: the position inside a block, followed for
    ``If`` by 0 (then) / 1 (else) and for ``Loop`` by 0, then the inner position.
    """
    for k, s in enumerate(ast.stmts):
        path = prefix + (k,)
        yield path, s
        if isinstance(s, If):
            yield from iter_statements(s.then, path + (0,))
            if s.orelse is not None:
                yield from iter_statements(s.orelse, path + (1,))
        elif isinstance(s, Loop):
            yield from iter_statements(s.body, path + (0,))


def statement_at(ast: Seq, path: tuple):
    block, rest = ast, list(path)
    while True:
        s = block.stmts[rest.pop(0)]
        if not rest:
            return s
        branch = rest.pop(0)
        block = s.body if isinstance(s, Loop) else (s.then if branch == 0 else s.orelse)


def replace_statement(ast: Seq, path: tuple, new) -> Seq:
    k, rest = path[0], path[1:]
    stmts = list(ast.stmts)
    if not rest:
        stmts[k] = new
    else:
        s = stmts[k]
        branch, inner = rest[0], rest[1:]
        if isinstance(s, Loop):
            stmts[k] = Loop(replace_statement(s.body, inner, new), s.span)
        elif branch == 0:
            stmts[k] = If(replace_statement(s.then, inner, new), s.orelse, s.span)
        else:
            stmts[k] = If(s.then, replace_statement(s.orelse, inner, new), s.span)
    return Seq(tuple(stmts))


def contains_eval(ast: Seq) -> bool:
    return any(isinstance(s, Eval) for _, s in iter_statements(ast))


def attr_names(ast: Seq) -> set[str]:
    out = set()
    for _, s in iter_statements(ast):
        if isinstance(s, Copy):
            out |= {s.n_d, s.n_s}
        elif isinstance(s, ATTR_STMTS):
            out.add(s.n)
    return out


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>[;:.={}])"
)
_KEYWORDS = {"eval", "write", "read", "copy", "check", "propagate", "abort", "if", "else", "loop", "is"}


class _Tok(NamedTuple):
    kind: str
    text: str
    span: Span


def _tokenize(source: str) -> list[_Tok]:
    toks, pos, line, col = [], 0, 1, 1
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if not m:
            raise ParseError(f"unexpected character {source[pos]!r}", Span(line, col))
        kind, text = m.lastgroup, m.group()
        if (kind == "ident" and text in _KEYWORDS) or kind == "sym":
            kind = text
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, text, Span(line, col)))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(_Tok("eof", "", Span(line, col)))
    return toks


class _Parser:
    def __init__(self, source, arity, hierarchy):
        self.toks = _tokenize(source)
        self.pos = 0
        self.arity = arity
        self.hierarchy = hierarchy

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind):
        tok = self.toks[self.pos]
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise ParseError(f"expected {kind!r}, found {found!r}", tok.span)
        self.pos += 1
        return tok

    def index(self, tok, minimum=0):
        i = int(tok.text)
        if self.arity is not None and i > self.arity:
            raise IndexOutOfRange(i, self.arity, tok.span)
        if i < minimum:
            raise ValidationError(f"{tok.span}: eval index must be at least {minimum}")
        return i

    def type_name(self):
        tok = self.take("ident")
        if self.hierarchy is not None and tok.text not in self.hierarchy:
            raise UnknownType(f"{tok.span}: unknown type {tok.text!r}")
        return tok.text

    def ref(self):
        i = self.index(self.take("int"))
        self.take(".")
        return i, self.take("ident").text

    def block(self):
        self.take("{")
        stmts = []
        while self.peek().kind != "}":
            stmts.append(self.stmt())
        self.take("}")
        return Seq(tuple(stmts))

    def stmts_until_eof(self):
        stmts = []
        while self.peek().kind != "eof":
            stmts.append(self.stmt())
        return Seq(tuple(stmts))

    def stmt(self):
        tok = self.peek()
        kind, span = tok.kind, tok.span
        self.pos += 1
        if kind == "eval":
            s = Eval(self.index(self.take("int"), minimum=1), span)
        elif kind in ("write", "read"):
            i, n = self.ref()
            self.take(":")
            s = (Write if kind == "write" else Read)(i, n, self.type_name(), span)
        elif kind == "copy":
            i_d, n_d = self.ref()
            self.take("=")
            i_s, n_s = self.ref()
            s = Copy(i_d, n_d, i_s, n_s, span)
        elif kind == "check":
            i, n = self.ref()
            self.take("is")
            s = Check(i, n, self.type_name(), span)
        elif kind == "propagate":
            if self.arity is not None and self.arity != 1:
                raise PropagateOnNonUnitProduction(
                    f"{span}: propagate needs a single right-hand nonterminal, production has {self.arity}"
                )
            s = Propagate(span)
        elif kind == "abort":
            s = Abort(span)
        elif kind == "if":
            then = self.block()
            orelse = None
            if self.peek().kind == "else":
                self.pos += 1
                orelse = self.block()
            return If(then, orelse, span)
        elif kind == "loop":
            return Loop(self.block(), span)
        else:
            self.pos -= 1
            raise ParseError(f"unexpected {tok.text or 'end of input'!r}", span)
        self.take(";")
        return s


def parse_action(source: str, owner=None, hierarchy=None) -> Seq:
    """Parse an action source; ``owner`` (a Production) enables index checks."""
    arity = None if owner is None else owner.arity
    return _Parser(source, arity, hierarchy).stmts_until_eof()


def unparse(ast: Seq, indent: str = "") -> str:
    lines = []
    for s in ast.stmts:
        if isinstance(s, Eval):
            lines.append(f"{indent}eval {s.i};")
        elif isinstance(s, Write):
            lines.append(f"{indent}write {s.i}.{s.n} : {s.t};")
        elif isinstance(s, Read):
            lines.append(f"{indent}read {s.i}.{s.n} : {s.t};")
        elif isinstance(s, Copy):
            lines.append(f"{indent}copy {s.i_d}.{s.n_d} = {s.i_s}.{s.n_s};")
        elif isinstance(s, Check):
            lines.append(f"{indent}check {s.i}.{s.n} is {s.t};")
        elif isinstance(s, Propagate):
            lines.append(f"{indent}propagate;")
        elif isinstance(s, Abort):
            lines.append(f"{indent}abort;")
        elif isinstance(s, If):
            lines.append(f"{indent}if {{")
            lines.append(unparse(s.then, indent + "  "))
            if s.orelse is not None:
                lines.append(f"{indent}}} else {{")
                lines.append(unparse(s.orelse, indent + "  "))
            lines.append(f"{indent}}}")
        elif isinstance(s, Loop):
            lines.append(f"{indent}loop {{")
            lines.append(unparse(s.body, indent + "  "))
            lines.append(f"{indent}}}")
    return "\n".join(line for line in lines if line)


def apply_role_mode(ast: Seq, mode: str, owner) -> Seq:
    """Expand the postorder/preorder sugar into explicit child evaluations."""
    if mode == "manual" or owner.arity == 0 or contains_eval(ast):
        return ast
    evals = tuple(Eval(i) for i in range(1, owner.arity + 1))
    if mode == "postorder":
        return Seq(evals + ast.stmts)
    if mode == "preorder":
        return Seq(ast.stmts + evals)
    raise ValidationError(f"unknown role mode {mode!r}")


# --------------------------------------------------------------------------
# lowering


@dataclass
class ActionCfg:
    nodes: dict[int, object]
    succ: dict[int, list[int]]
    entry: int
    exit: int
    spans: dict[int, Span | None] = field(default_factory=dict)
    paths: dict[int, tuple | None] = field(default_factory=dict)

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(u, v) for u, vs in self.succ.items() for v in vs}

    def preds(self) -> dict[int, list[int]]:
        out = {n: [] for n in self.nodes}
        for u, vs in self.succ.items():
            for v in vs:
                out[v].append(u)
        return out

    def renumbered(self, mapping: dict[int, int]) -> "ActionCfg":
        return ActionCfg(
            nodes={mapping[k]: v for k, v in self.nodes.items()},
            succ={mapping[k]: [mapping[x] for x in vs] for k, vs in self.succ.items()},
            entry=mapping[self.entry],
            exit=mapping[self.exit],
            spans={mapping[k]: v for k, v in self.spans.items()},
            paths={mapping[k]: v for k, v in self.paths.items()},
        )


class _Lowering:
    def __init__(self):
        self.nodes, self.succ, self.spans, self.paths = {}, {}, {}, {}

    def node(self, action, span=None, path=None):
        nid = len(self.nodes)
        self.nodes[nid] = action
        self.succ[nid] = []
        self.spans[nid] = span
        self.paths[nid] = path
        return nid

    def edge(self, u, v):
        self.succ[u].append(v)

    def block(self, seq: Seq, cur, prefix):
        # cur is None once every path through the block has aborted
        for k, s in enumerate(seq.stmts):
            if cur is None:
                break
            cur = self.stmt(s, cur, prefix + (k,))
        return cur

    def stmt(self, s, cur, path):
        span = getattr(s, "span", None)
        if isinstance(s, Eval):
            b = self.node(BeginEvalMetaAction(s.i), span, path)
            e = self.node(EndEvalMetaAction(), span, path)
            self.edge(cur, b)
            self.edge(b, e)
            return e
        if isinstance(s, Abort):
            n = self.node(IgnoreBranchAction(), span, path)
            self.edge(cur, n)
            return None
        if isinstance(s, If):
            fork = self.node(NOP, span, path)
            self.edge(cur, fork)
            ends = [self.block(s.then, fork, path + (0,))]
            ends.append(fork if s.orelse is None else self.block(s.orelse, fork, path + (1,)))
            ends = [x for x in ends if x is not None]
            if not ends:
                return None
            join = self.node(NOP, span, path)
            for x in ends:
                self.edge(x, join)
            return join
        if isinstance(s, Loop):
            header = self.node(NOP, span, path)
            self.edge(cur, header)
            end = self.block(s.body, header, path + (0,))
            if end is not None:
                latch = self.node(NOP, span, path)
                self.edge(end, latch)
                self.edge(latch, header)
            after = self.node(NOP, span, path)
            self.edge(header, after)
            return after
        if isinstance(s, Write):
            a = WriteAttr(s.i, s.n, s.t)
        elif isinstance(s, Read):
            a = ReadAttr(s.i, s.n, s.t)
        elif isinstance(s, Copy):
            a = CopyAttr(s.i_d, s.n_d, s.i_s, s.n_s)
        elif isinstance(s, Check):
            a = CheckAttrType(s.i, s.n, s.t)
        elif isinstance(s, Propagate):
            a = PropagateAttrs()
        else:
            raise TypeError(f"not a statement: {s!r}")
        n = self.node(a, span, path)
        self.edge(cur, n)
        return n


def lower_to_cfg(ast: Seq) -> ActionCfg:
    """Lower an action AST to its control-flow graph.

    Statements after an ``abort`` on every path are unreachable and are not
    lowered; the exit node is then only reachable if some path avoids them.
    """
    lw = _Lowering()
    entry = lw.node(NOP)
    end = lw.block(ast, entry, ())
    exit_ = lw.node(NOP)
    if end is not None:
        lw.edge(end, exit_)
    return ActionCfg(lw.nodes, lw.succ, entry, exit_, lw.spans, lw.paths)


# --------------------------------------------------------------------------
# canonical hashing


def _refine_colors(cfg: ActionCfg) -> dict[int, str]:
    preds = cfg.preds()
    colors = {}
    for n, a in cfg.nodes.items():
        tag = "entry" if n == cfg.entry else "exit" if n == cfg.exit else ""
        colors[n] = f"{tag}|{action_label(a)}"
    distinct = len(set(colors.values()))
    for _ in range(len(cfg.nodes)):
        new = {}
        for n in cfg.nodes:
            sig = (colors[n], sorted(colors[s] for s in cfg.succ[n]), sorted(colors[p] for p in preds[n]))
            new[n] = hashlib.sha1(repr(sig).encode()).hexdigest()
        colors = new
        nd = len(set(colors.values()))
        if nd == distinct:
            break
        distinct = nd
    return colors


def canonical_order(cfg: ActionCfg) -> list[int]:
    """Node ids in a traversal order that does not depend on the ids themselves.

    Successors are visited ordered by a colour-refined structural signature; ties
    (structurally indistinguishable successors) fall back to id order.
    """
    colors = _refine_colors(cfg)
    order, seen, stack = [], set(), [cfg.entry]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        order.append(n)
        for s in sorted(cfg.succ[n], key=lambda x: (colors[x], x), reverse=True):
            if s not in seen:
                stack.append(s)
    rest = sorted((n for n in cfg.nodes if n not in seen), key=lambda x: (colors[x], x))
    return order + rest


def canonical_hash(cfg: ActionCfg) -> str:
    order = canonical_order(cfg)
    pos = {n: k for k, n in enumerate(order)}
    encoded = []
    for n in order:
        marker = "E" if n == cfg.entry else "X" if n == cfg.exit else ""
        encoded.append((marker, action_label(cfg.nodes[n]), sorted(pos[s] for s in cfg.succ[n])))
    return hashlib.sha256(repr(encoded).encode()).hexdigest()

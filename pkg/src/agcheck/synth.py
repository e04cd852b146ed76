"""Random and synthetic bundles for cross-validation and stress runs."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .actions import Abort, Check, Copy, Eval, If, Loop, Propagate, Read, Seq, Write, unparse
from .model import bundle_from_dict

TYPES = [
    {"name": "Int"},
    {"name": "PosInt", "parents": ["Int"]},
    {"name": "Str"},
    {"name": "Env"},
]
TYPE_NAMES = ["Int", "PosInt", "Str", "Env", "Object"]


@dataclass
class GenConfig:
    max_productions: int = 8
    attrs: tuple = ("a", "b", "c")
    max_depth: int = 2  # nesting of if/loop
    max_stmts: int = 4
    copies: bool = False  # allow copy/propagate statements
    checks: bool = True
    dead_prob: float = 0.1  # chance of referencing a nonterminal without productions
    mode_prob: float = 0.2  # chance the role is postorder/preorder instead of manual
    extra_arities: tuple = (0, 0, 1, 1, 2)


class _ActionGen:
    def __init__(self, rng: random.Random, cfg: GenConfig, arity: int):
        self.rng = rng
        self.cfg = cfg
        self.arity = arity

    def ref(self):
        return self.rng.randint(0, self.arity), self.rng.choice(self.cfg.attrs)

    def action(self, allow_eval=True) -> Seq:
        stmts, _ = self.block(0, frozenset(), allow_eval)
        return stmts

    def block(self, depth, evaluated, allow_eval):
        """Statements plus the children evaluated on some path through them."""
        rng, out = self.rng, []
        n = rng.randint(0, self.cfg.max_stmts)
        for _ in range(n):
            s, evaluated = self.stmt(depth, evaluated, allow_eval)
            if s is not None:
                out.append(s)
            if isinstance(s, Abort):
                break
        return Seq(tuple(out)), evaluated

    def stmt(self, depth, evaluated, allow_eval):
        rng = self.rng
        free = [i for i in range(1, self.arity + 1) if i not in evaluated]
        kinds = ["write"] * 4 + ["read"] * 4
        if allow_eval and free:
            kinds += ["eval"] * 4
        if depth < self.cfg.max_depth:
            kinds += ["if"] * 2 + ["loop"]
        if self.cfg.checks:
            kinds.append("check")
        if self.cfg.copies:
            kinds += ["copy"] * 2
            if self.arity == 1:
                kinds.append("propagate")
        kinds.append("abort")
        kind = rng.choice(kinds)
        if kind == "eval":
            i = rng.choice(free)
            return Eval(i), evaluated | {i}
        if kind in ("write", "read", "check"):
            i, n = self.ref()
            t = rng.choice(TYPE_NAMES)
            return {"write": Write, "read": Read, "check": Check}[kind](i, n, t), evaluated
        if kind == "copy":
            (i_d, n_d), (i_s, n_s) = self.ref(), self.ref()
            return Copy(i_d, n_d, i_s, n_s), evaluated
        if kind == "propagate":
            return Propagate(), evaluated
        if kind == "abort":
            # keep aborts rare, they cut everything behind them
            return (Abort(), evaluated) if rng.random() < 0.3 else (None, evaluated)
        if kind == "if":
            then, ev1 = self.block(depth + 1, evaluated, allow_eval)
            if rng.random() < 0.6:
                orelse, ev2 = self.block(depth + 1, evaluated, allow_eval)
            else:
                orelse, ev2 = None, evaluated
            return If(then, orelse), ev1 | ev2
        # loops never evaluate children: a child runs at most once per path
        body, _ = self.block(depth + 1, evaluated, False)
        return Loop(body), evaluated


def random_bundle_doc(seed: int, cfg: GenConfig | None = None) -> dict:
    """A random bundle whose nonterminals all derive finite trees."""
    cfg = cfg or GenConfig()
    rng = random.Random(seed)
    n_nts = rng.randint(1, 3)
    nts = ["Program"] + [f"N{k}" for k in range(1, n_nts + 1)]
    dead = rng.random() < cfg.dead_prob
    all_nts = nts + (["Dead"] if dead else [])
    rhs_pool = nts[1:] + (["Dead"] if dead else [])
    prods = []

    def add(lhs, rhs):
        prods.append({"id": f"p{len(prods)}", "lhs": lhs, "rhs": rhs})

    # base productions from the last nonterminal upwards keep everything productive
    for j in range(len(nts) - 1, 0, -1):
        later = nts[j + 1:]
        rhs = [rng.choice(later)] if later and rng.random() < 0.5 else []
        add(nts[j], rhs)
    add("Program", [rng.choice(nts[1:])] if len(nts) > 1 else [])
    budget = rng.randint(len(prods), cfg.max_productions)
    while len(prods) < budget and len(nts) > 1:
        lhs = rng.choice(nts)
        arity = rng.choice(cfg.extra_arities)
        add(lhs, [rng.choice(rhs_pool) for _ in range(arity)])
    mode = "manual"
    if rng.random() < cfg.mode_prob:
        mode = rng.choice(["postorder", "preorder"])
    for p in prods:
        gen = _ActionGen(rng, cfg, len(p["rhs"]))
        ast = gen.action(allow_eval=(mode == "manual"))
        p["actions"] = {"r": unparse(ast)}
    return {
        "types": TYPES,
        "nonterminals": all_nts,
        "start": "Program",
        "roles": [{"name": "r", "mode": mode}],
        "modules": [{"name": "gen", "productions": prods}],
    }


def random_bundle(seed: int, cfg: GenConfig | None = None):
    return bundle_from_dict(random_bundle_doc(seed, cfg))


# --------------------------------------------------------------------------
# stress bundle

_CHAIN = ("A", "B", "C")


def stress_bundle_doc(dups: int = 4) -> dict:
    """Three mutually recursive nonterminals with many same-shaped productions.

    Every nonterminal gets ``dups`` productions that differ only in their label
    (terminal-only variants in a real grammar), plus a few distinct shapes and
    a leaf.  Recursion runs A -> B -> C -> A.
    """
    prods = [{"id": "prog", "lhs": "Program", "rhs": ["A"], "actions": {"eval": "write 1.env : Env; eval 1; read 1.v : Int;"}}]
    for k, x in enumerate(_CHAIN):
        y = _CHAIN[(k + 1) % 3]
        same = "read 0.env : Env; write 1.env : Env; eval 1; if { write 0.v : Int; } else { write 0.v : PosInt; }"
        for d in range(dups):
            prods.append({"id": f"{x}_op{d}", "label": f"{x} op{d}", "lhs": x, "rhs": [y], "actions": {"eval": same}})
        prods.append({"id": f"{x}_pair", "lhs": x, "rhs": [y, y], "actions": {
            "eval": "write 1.env : Env; write 2.env : Env; eval 1; eval 2; read 1.v : Int; read 2.v : Int; write 0.v : Int;"}})
        prods.append({"id": f"{x}_tag", "lhs": x, "rhs": [y], "actions": {
            "eval": "write 1.env : Env; if { write 1.flag : Int; } eval 1; write 0.v : Int; if { write 0.w : Str; }"}})
        prods.append({"id": f"{x}_leaf", "lhs": x, "rhs": [], "actions": {"eval": "write 0.v : PosInt;"}})
        prods.append({"id": f"{x}_lit", "lhs": x, "rhs": [], "actions": {"eval": "read 0.env : Env; write 0.v : Int;"}})
    return {
        "types": TYPES,
        "nonterminals": ["Program", *_CHAIN],
        "start": "Program",
        "roles": [{"name": "eval", "mode": "manual"}],
        "modules": [{"name": "stress", "productions": prods}],
    }


def stress_bundle(dups: int = 4):
    return bundle_from_dict(stress_bundle_doc(dups))

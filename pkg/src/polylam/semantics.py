"""Total call-by-value evaluator for elaborated terms.

The language has no recursion, so evaluation always terminates; any failure
here means the term was not produced by the elaborator.  Function-typed
inputs are supplied as finite lookup tables (`VTable`) with a default for
keys outside the table.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    UNIT,
    App,
    Arrow,
    Builtin,
    Inl,
    Inr,
    Lam,
    ListLit,
    Pair,
    Prod,
    Star,
    Sum,
    Term,
    Type,
    Unit,
    UnitVal,
    Var,
)


class InternalEvalError(Exception):
    """Evaluation met an ill-formed term or value: an elaborator bug."""


@dataclass(frozen=True)
class VUnit:
    pass


@dataclass(frozen=True)
class VPair:
    fst: "Value"
    snd: "Value"


@dataclass(frozen=True)
class VInl:
    payload: "Value"


@dataclass(frozen=True)
class VInr:
    payload: "Value"


@dataclass(frozen=True)
class VList:
    items: tuple["Value", ...]


@dataclass(frozen=True)
class VClosure:
    param: str
    body: Term
    env: dict


@dataclass(frozen=True)
class VBuiltin:
    name: str
    inst: tuple[Type, ...]
    args: tuple["Value", ...]


@dataclass(frozen=True)
class VTable:
    """Finite function: lookup by structural equality, default on miss."""

    entries: tuple[tuple["Value", "Value"], ...]
    default: "Value"


Value = VUnit | VPair | VInl | VInr | VList | VClosure | VBuiltin | VTable

VUNIT = VUnit()

_ARITY = {"fst": 1, "snd": 1, "uncons": 1, "either": 3, "concat": 1,
          "map": 2, "split": 1}


def eval_term(env: dict, t: Term) -> Value:
    match t:
        case Var(name):
            try:
                return env[name]
            except KeyError:
                raise InternalEvalError(f"unbound variable '{name}'") from None
        case Lam(param, _, body):
            return VClosure(param, body, env)
        case App(f, a):
            return apply_fn(eval_term(env, f), eval_term(env, a))
        case UnitVal():
            return VUNIT
        case Pair(a, b):
            return VPair(eval_term(env, a), eval_term(env, b))
        case Inl(m, _):
            return VInl(eval_term(env, m))
        case Inr(m, _):
            return VInr(eval_term(env, m))
        case ListLit(items, _):
            return VList(tuple(eval_term(env, i) for i in items))
        case Builtin(name, inst):
            return VBuiltin(name, inst, ())
    raise InternalEvalError(f"cannot evaluate unelaborated term: {t!r}")


def apply_fn(f: Value, arg: Value) -> Value:
    match f:
        case VClosure(param, body, env):
            return eval_term({**env, param: arg}, body)
        case VTable(entries, default):
            for key, val in entries:
                if value_eq(key, arg):
                    return val
            return default
        case VBuiltin(name, inst, args):
            args = (*args, arg)
            if len(args) < _ARITY[name]:
                return VBuiltin(name, inst, args)
            return _delta(name, args)
    raise InternalEvalError(f"applied a non-function value: {f!r}")


def _delta(name: str, args: tuple[Value, ...]) -> Value:
    match name, args:
        case "fst", (VPair(a, _),):
            return a
        case "snd", (VPair(_, b),):
            return b
        case "uncons", (VList(items),):
            if not items:
                return VInl(VUNIT)
            return VInr(VPair(items[0], VList(items[1:])))
        case "either", (f, g, scrut):
            match scrut:
                case VInl(p):
                    return apply_fn(f, p)
                case VInr(p):
                    return apply_fn(g, p)
        case "concat", (VList(items),):
            out: list[Value] = []
            for inner in items:
                if not isinstance(inner, VList):
                    break
                out.extend(inner.items)
            else:
                return VList(tuple(out))
        case "map", (f, VList(items)):
            return VList(tuple(apply_fn(f, i) for i in items))
        case "split", (VList(items),):
            return VList(tuple(
                VPair(VList(items[:i]), VPair(items[i], VList(items[i + 1:])))
                for i in range(len(items))))
    raise InternalEvalError(f"builtin '{name}' applied to ill-typed arguments")


def value_eq(v: Value, w: Value) -> bool:
    """Structural equality of arrow-free values."""
    match v, w:
        case VUnit(), VUnit():
            return True
        case VPair(a, b), VPair(c, d):
            return value_eq(a, c) and value_eq(b, d)
        case VInl(a), VInl(b):
            return value_eq(a, b)
        case VInr(a), VInr(b):
            return value_eq(a, b)
        case (VInl(), VInr()) | (VInr(), VInl()):
            return False
        case VList(xs), VList(ys):
            return len(xs) == len(ys) and all(value_eq(a, b) for a, b in zip(xs, ys))
    if isinstance(v, (VClosure, VBuiltin, VTable)) or isinstance(w, (VClosure, VBuiltin, VTable)):
        raise ValueError("structural equality is undefined on function values")
    return False


def conforms(v: Value, ty: Type) -> bool:
    """Value-typing judgment: does v inhabit ty?

    Functional values are checked shallowly (a closure conforms to any arrow
    type); tables additionally check their entries and default.
    """
    match v, ty:
        case VUnit(), Unit():
            return True
        case VPair(a, b), Prod(l, r):
            return conforms(a, l) and conforms(b, r)
        case VInl(p), Sum(l, _):
            return conforms(p, l)
        case VInr(p), Sum(_, r):
            return conforms(p, r)
        case VList(items), Star(e):
            return all(conforms(i, e) for i in items)
        case (VClosure(), Arrow(_, _)) | (VBuiltin(), Arrow(_, _)):
            return True
        case VTable(entries, default), Arrow(d, c):
            return (conforms(default, c)
                    and all(conforms(k, d) and conforms(val, c) for k, val in entries))
    return False


# ------------------------------------------------------- CLI value literals
#
# Grammar: `()`, `(v,w)`, `L v`, `R v`, `[v1,...,vn]`, and numerals where the
# expected type is 1*.  Parsing is driven by the type, so the same text can
# be rejected or accepted depending on where it appears.

class ValueParseError(Exception):
    pass


def format_value(v: Value) -> str:
    """Render a value as a literal; functions get a display-only rendering."""
    match v:
        case VUnit():
            return "()"
        case VPair(a, b):
            return f"({format_value(a)},{format_value(b)})"
        case VInl(p):
            return f"L {format_value(p)}"
        case VInr(p):
            return f"R {format_value(p)}"
        case VList(items):
            return "[" + ",".join(format_value(i) for i in items) + "]"
        case VTable(entries, default):
            body = ", ".join(f"{format_value(k)} -> {format_value(val)}"
                             for k, val in entries)
            return "{" + body + f"; default {format_value(default)}" + "}"
        case VClosure() | VBuiltin():
            return "<function>"
    raise TypeError(f"not a value: {v!r}")


class _VParser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, msg: str):
        raise ValueParseError(f"column {self.i + 1}: {msg}")

    def skip_ws(self):
        while self.i < len(self.text) and self.text[self.i] in " \t\r\n":
            self.i += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.i] if self.i < len(self.text) else ""

    def eat(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.i += 1

    def value(self, ty: Type) -> Value:
        c = self.peek()
        match ty:
            case Unit():
                self.eat("(")
                self.eat(")")
                return VUNIT
            case Prod(l, r):
                self.eat("(")
                a = self.value(l)
                self.eat(",")
                b = self.value(r)
                self.eat(")")
                return VPair(a, b)
            case Sum(l, r):
                if c == "L":
                    self.i += 1
                    return VInl(self.value(l))
                if c == "R":
                    self.i += 1
                    return VInr(self.value(r))
                self.error("expected 'L' or 'R'")
            case Star(e):
                if c.isdigit():
                    if ty != Star(UNIT):
                        self.error("numerals only stand for values of type 1*")
                    j = self.i
                    while j < len(self.text) and self.text[j].isdigit():
                        j += 1
                    k = int(self.text[self.i:j])
                    self.i = j
                    return VList((VUNIT,) * k)
                self.eat("[")
                items: list[Value] = []
                if self.peek() != "]":
                    items.append(self.value(e))
                    while self.peek() == ",":
                        self.i += 1
                        items.append(self.value(e))
                self.eat("]")
                return VList(tuple(items))
            case Arrow():
                self.error("function values cannot be written as literals")
        self.error(f"no literal form for this type")

    def end(self):
        self.skip_ws()
        if self.i != len(self.text):
            self.error("trailing input after value")


def parse_value(text: str, ty: Type) -> Value:
    p = _VParser(text)
    v = p.value(ty)
    p.end()
    return v

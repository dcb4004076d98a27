"""Abstract syntax of types and terms, the textual surface syntax, and desugaring.

The core calculus has five type constructors (unit, product, sum, list, arrow),
Church-style annotated binders, and seven schematic builtins.  The surface
syntax additionally permits numerals (unary naturals), a ``+1`` successor
suffix, pair-pattern binders ``\\(x,y):AxB -> M``, and ascriptions ``(M : A)``;
``desugar`` eliminates everything except ascriptions, which the typechecker
consumes during elaboration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

Pos = tuple[int, int]  # 1-based (line, column)

BUILTIN_NAMES = frozenset({"fst", "snd", "uncons", "either", "concat", "map", "split"})


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class Unit:
    """The one-element type, written ``1``."""


@dataclass(frozen=True)
class Prod:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class Sum:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class Star:
    """The list type, written ``A*``."""

    elem: "Type"


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"


Type = Unit | Prod | Sum | Star | Arrow

UNIT = Unit()
NAT = Star(UNIT)        # naturals, encoded in unary
BOOL = Sum(UNIT, UNIT)


def arrow_free(ty: Type) -> bool:
    match ty:
        case Unit():
            return True
        case Prod(l, r) | Sum(l, r):
            return arrow_free(l) and arrow_free(r)
        case Star(e):
            return arrow_free(e)
        case Arrow():
            return False
    raise TypeError(f"not a type: {ty!r}")


def finite(ty: Type) -> bool:
    """True for types with finitely many values: no lists, no arrows."""
    match ty:
        case Unit():
            return True
        case Prod(l, r) | Sum(l, r):
            return finite(l) and finite(r)
        case Star() | Arrow():
            return False
    raise TypeError(f"not a type: {ty!r}")


# ---------------------------------------------------------------- terms
#
# `pos`, and the elaborator-filled `ty` on Var, are metadata: they do not
# participate in structural equality, so elaborated terms compare by shape.

@dataclass(frozen=True)
class Var:
    name: str
    ty: Type | None = field(default=None, compare=False, repr=False)
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Lam:
    param: str
    param_ty: Type
    body: "Term"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class UnitVal:
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Pair:
    fst: "Term"
    snd: "Term"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Inl:
    payload: "Term"
    ty: Type | None = None  # the full sum type; None until elaborated
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Inr:
    payload: "Term"
    ty: Type | None = None
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ListLit:
    items: tuple["Term", ...]
    elem_ty: Type | None = None
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Builtin:
    name: str
    inst: tuple[Type, ...] = ()  # type instantiation; empty until elaborated
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Ascribe:
    """``(M : A)``.  Consumed (erased) by elaboration; never evaluated."""

    term: "Term"
    ty: Type
    pos: Pos | None = field(default=None, compare=False, repr=False)


# Surface-only sugar, eliminated by `desugar`.

@dataclass(frozen=True)
class NumLit:
    value: int
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SuccOf:
    arg: "Term"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PairLam:
    left: str
    right: str
    param_ty: Type
    body: "Term"
    pos: Pos | None = field(default=None, compare=False, repr=False)


Term = (
    Var | Lam | App | UnitVal | Pair | Inl | Inr | ListLit | Builtin | Ascribe
    | NumLit | SuccOf | PairLam
)
SurfaceTerm = Term  # parse trees may contain the sugar nodes above


# ---------------------------------------------------------------- lexer

@dataclass(frozen=True)
class _Tok:
    kind: str  # one of ( ) [ ] , : + * \ -> num ident eof
    text: str
    line: int
    col: int


_SINGLE = {"(": "(", ")": ")", "[": "[", "]": "]", ",": ",", ":": ":",
           "+": "+", "*": "*", "\\": "\\"}


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("->", i):
            toks.append(_Tok("->", "->", line, col))
            i += 2
            col += 2
            continue
        if text.startswith("--", i):  # line comment
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in _SINGLE:
            toks.append(_Tok(_SINGLE[c], c, line, col))
            i += 1
            col += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("num", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Tok("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(_Tok("eof", "", line, col))
    return toks


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            want = what or f"'{kind}'"
            raise ParseError(f"expected {want}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return self.next()

    def fail(self, msg: str):
        tok = self.peek()
        raise ParseError(msg, tok.line, tok.col)

    # -- types.  Precedence, loosest first: -> (right), + (right), x (right),
    # postfix *, atoms.  Binder positions parse with allow_arrow=False, so an
    # arrow type in a lambda binder must be parenthesized.

    def type_(self, allow_arrow: bool = True) -> Type:
        t = self.type_sum()
        if allow_arrow and self.peek().kind == "->":
            self.next()
            return Arrow(t, self.type_(True))
        return t

    def type_sum(self) -> Type:
        t = self.type_prod()
        if self.peek().kind == "+":
            self.next()
            return Sum(t, self.type_sum())
        return t

    def type_prod(self) -> Type:
        t = self.type_post()
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "x":
            self.next()
            return Prod(t, self.type_prod())
        return t

    def type_post(self) -> Type:
        t = self.type_atom()
        while self.peek().kind == "*":
            self.next()
            t = Star(t)
        return t

    def type_atom(self) -> Type:
        tok = self.peek()
        if tok.kind == "num" and tok.text == "1":
            self.next()
            return UNIT
        if tok.kind == "(":
            self.next()
            t = self.type_(True)
            self.expect(")")
            return t
        self.fail("expected a type")

    # -- terms

    def term(self) -> Term:
        if self.peek().kind == "\\":
            return self.lam()
        return self.app()

    def lam(self) -> Term:
        start = self.expect("\\")
        pos = (start.line, start.col)
        if self.peek().kind == "(":
            self.next()
            left = self.expect("ident", "a binder name").text
            self.expect(",")
            right = self.expect("ident", "a binder name").text
            self.expect(")")
            self.expect(":", "':' with the binder type")
            ty = self.type_(allow_arrow=False)
            self.expect("->")
            return PairLam(left, right, ty, self.term(), pos=pos)
        name = self.expect("ident", "a binder name").text
        self.expect(":", "':' with the binder type")
        ty = self.type_(allow_arrow=False)
        self.expect("->")
        return Lam(name, ty, self.term(), pos=pos)

    def app(self) -> Term:
        t = self.prefix()
        while self.peek().kind in ("(", "[", "num", "ident"):
            arg = self.prefix()
            t = App(t, arg, pos=_pos_of(t))
        return t

    def prefix(self) -> Term:
        tok = self.peek()
        if tok.kind == "ident" and tok.text in ("Left", "Right"):
            self.next()
            payload = self.prefix()
            node = Inl if tok.text == "Left" else Inr
            return node(payload, None, pos=(tok.line, tok.col))
        return self.postfix()

    def postfix(self) -> Term:
        t = self.atom()
        while self.peek().kind == "+":
            plus = self.next()
            one = self.peek()
            if one.kind != "num" or one.text != "1":
                raise ParseError("expected '1' after '+'", plus.line, plus.col)
            self.next()
            t = SuccOf(t, pos=_pos_of(t))
        return t

    def atom(self) -> Term:
        tok = self.peek()
        pos = (tok.line, tok.col)
        if tok.kind == "(":
            self.next()
            if self.peek().kind == ")":
                self.next()
                return UnitVal(pos=pos)
            t = self.term()
            nxt = self.peek()
            if nxt.kind == ",":
                self.next()
                t2 = self.term()
                self.expect(")")
                return Pair(t, t2, pos=pos)
            if nxt.kind == ":":
                self.next()
                ty = self.type_(True)
                self.expect(")")
                return Ascribe(t, ty, pos=pos)
            self.expect(")")
            return t
        if tok.kind == "[":
            self.next()
            items: list[Term] = []
            if self.peek().kind != "]":
                items.append(self.term())
                while self.peek().kind == ",":
                    self.next()
                    items.append(self.term())
            self.expect("]")
            return ListLit(tuple(items), None, pos=pos)
        if tok.kind == "num":
            self.next()
            return NumLit(int(tok.text), pos=pos)
        if tok.kind == "ident":
            self.next()
            if tok.text in BUILTIN_NAMES:
                return Builtin(tok.text, (), pos=pos)
            return Var(tok.text, pos=pos)
        self.fail("expected a term")


def _pos_of(t: Term) -> Pos | None:
    return getattr(t, "pos", None)


def parse_type(text: str) -> Type:
    p = _Parser(_tokenize(text))
    t = p.type_(True)
    p.expect("eof", "end of input")
    return t


def parse_term(text: str) -> SurfaceTerm:
    p = _Parser(_tokenize(text))
    t = p.term()
    p.expect("eof", "end of input")
    return t


# ---------------------------------------------------------------- desugaring

def names_in(t: Term) -> set[str]:
    """Every variable and binder name occurring in t."""
    acc: set[str] = set()

    def go(t: Term):
        match t:
            case Var(name):
                acc.add(name)
            case Lam(p, _, b):
                acc.add(p)
                go(b)
            case PairLam(l, r, _, b):
                acc.update((l, r))
                go(b)
            case App(f, a):
                go(f)
                go(a)
            case Pair(a, b):
                go(a)
                go(b)
            case Inl(m, _) | Inr(m, _) | Ascribe(m, _) | SuccOf(m):
                go(m)
            case ListLit(items, _):
                for it in items:
                    go(it)
            case UnitVal() | Builtin() | NumLit():
                pass

    go(t)
    return acc


def _subst(t: Term, name: str, repl: Term) -> Term:
    """Replace free occurrences of `name` in a sugar-free term."""
    match t:
        case Var(n):
            return repl if n == name else t
        case Lam(p, ty, b):
            if p == name:
                return t
            return Lam(p, ty, _subst(b, name, repl), pos=t.pos)
        case App(f, a):
            return App(_subst(f, name, repl), _subst(a, name, repl), pos=t.pos)
        case Pair(a, b):
            return Pair(_subst(a, name, repl), _subst(b, name, repl), pos=t.pos)
        case Inl(m, ty):
            return Inl(_subst(m, name, repl), ty, pos=t.pos)
        case Inr(m, ty):
            return Inr(_subst(m, name, repl), ty, pos=t.pos)
        case ListLit(items, et):
            return ListLit(tuple(_subst(i, name, repl) for i in items), et, pos=t.pos)
        case Ascribe(m, ty):
            return Ascribe(_subst(m, name, repl), ty, pos=t.pos)
        case UnitVal() | Builtin():
            return t
    raise TypeError(f"substitution over sugared term: {t!r}")


def desugar(t: SurfaceTerm) -> Term:
    """Expand surface sugar into the core calculus.

    Numerals become unit lists, ``M+1`` becomes an application of the
    successor term, and pair-pattern binders project through fst/snd.  Never
    fails; missing annotations are left for the typechecker to resolve.
    """
    match t:
        case NumLit(k):
            return ListLit(tuple(UnitVal() for _ in range(k)), UNIT, pos=t.pos)
        case SuccOf(m):
            from .stdlib import mk_succ

            return App(mk_succ(), desugar(m), pos=t.pos)
        case PairLam(left, right, ty, body):
            b = desugar(body)
            p = _fresh("p", names_in(b) | {left, right})
            b = _subst(b, left, App(Builtin("fst"), Var(p)))
            b = _subst(b, right, App(Builtin("snd"), Var(p)))
            return Lam(p, ty, b, pos=t.pos)
        case Lam(x, ty, b):
            return Lam(x, ty, desugar(b), pos=t.pos)
        case App(f, a):
            return App(desugar(f), desugar(a), pos=t.pos)
        case Pair(a, b):
            return Pair(desugar(a), desugar(b), pos=t.pos)
        case Inl(m, ty):
            return Inl(desugar(m), ty, pos=t.pos)
        case Inr(m, ty):
            return Inr(desugar(m), ty, pos=t.pos)
        case ListLit(items, et):
            return ListLit(tuple(desugar(i) for i in items), et, pos=t.pos)
        case Ascribe(m, ty):
            return Ascribe(desugar(m), ty, pos=t.pos)
        case Var() | UnitVal() | Builtin():
            return t
    raise TypeError(f"not a term: {t!r}")


def _fresh(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    k = 0
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


# ---------------------------------------------------------------- printing
#
# Precedence levels: 0 term, 1 application head, 2 application argument /
# injection payload context, 3 atom.  Types: 0 arrow, 1 sum, 2 product,
# 3 star, 4 atom.

def print_type(ty: Type, prec: int = 0) -> str:
    match ty:
        case Unit():
            return "1"
        case Star(e):
            s = print_type(e, 3) + "*"
            me = 3
        case Prod(l, r):
            s = f"{print_type(l, 3)} x {print_type(r, 2)}"
            me = 2
        case Sum(l, r):
            s = f"{print_type(l, 2)} + {print_type(r, 1)}"
            me = 1
        case Arrow(d, c):
            s = f"{print_type(d, 1)} -> {print_type(c, 0)}"
            me = 0
        case _:
            raise TypeError(f"not a type: {ty!r}")
    return f"({s})" if me < prec else s


def _is_unit_list(t: ListLit) -> bool:
    return t.elem_ty == UNIT and all(isinstance(i, UnitVal) for i in t.items)


def print_term(t: Term) -> str:
    """Render a term so that it reparses and re-elaborates to the same tree.

    Builtins, injections, and empty lists are printed with ascriptions when
    they carry types, which is what makes re-elaboration deterministic.
    """
    return _pt(t, 0)


def _pt(t: Term, prec: int) -> str:
    match t:
        case Var(name):
            return name
        case UnitVal():
            return "()"
        case Lam(x, ty, b):
            s = f"\\{x}:{print_type(ty, 1)} -> {_pt(b, 0)}"
            return f"({s})" if prec > 0 else s
        case PairLam(l, r, ty, b):
            s = f"\\({l},{r}):{print_type(ty, 1)} -> {_pt(b, 0)}"
            return f"({s})" if prec > 0 else s
        case App(f, a):
            s = f"{_pt(f, 1)} {_pt(a, 2)}"
            return f"({s})" if prec > 1 else s
        case Pair(a, b):
            return f"({_pt(a, 0)}, {_pt(b, 0)})"
        case Inl(m, ty):
            body = f"Left {_pt(m, 3)}"
            if ty is not None:
                return f"({body} : {print_type(ty)})"
            return f"({body})" if prec > 2 else body
        case Inr(m, ty):
            body = f"Right {_pt(m, 3)}"
            if ty is not None:
                return f"({body} : {print_type(ty)})"
            return f"({body})" if prec > 2 else body
        case ListLit(items, et):
            if et == UNIT and all(isinstance(i, UnitVal) for i in items):
                return str(len(items))
            if not items:
                if et is None:
                    return "[]"
                return f"([] : {print_type(Star(et))})"
            return "[" + ", ".join(_pt(i, 0) for i in items) + "]"
        case Builtin(name, inst):
            if not inst:
                return name
            from .typecheck import builtin_type

            return f"({name} : {print_type(builtin_type(name, inst))})"
        case Ascribe(m, ty):
            return f"({_pt(m, 0)} : {print_type(ty)})"
        case NumLit(k):
            return str(k)
        case SuccOf(m):
            return f"{_pt(m, 3)}+1"
    raise TypeError(f"not a term: {t!r}")

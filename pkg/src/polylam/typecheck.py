"""Church-style bidirectional typechecking and elaboration.

Every binder is annotated, so types propagate locally: `infer` synthesizes a
type bottom-up, `check` pushes an expected type into unannotated injections,
empty lists, and bare builtins.  Both return a fully elaborated term in which
every builtin carries a concrete instantiation and ascriptions are erased.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    UNIT,
    App,
    Arrow,
    Ascribe,
    Builtin,
    Inl,
    Inr,
    Lam,
    ListLit,
    NumLit,
    Pair,
    PairLam,
    Pos,
    Prod,
    Star,
    SuccOf,
    Sum,
    Term,
    Type,
    Unit,
    UnitVal,
    Var,
    desugar,
    print_type,
)

Context = dict[str, Type]  # variable name -> declared type, innermost binding wins


class TypeCheckError(Exception):
    def __init__(self, msg: str, pos: Pos | None = None):
        self.pos = pos
        super().__init__(msg if pos is None else f"{pos[0]}:{pos[1]}: {msg}")


class AmbiguousInstantiationError(TypeCheckError):
    """Neither an annotation nor the context determines a type."""


# ---------------------------------------------------------------- schemes

@dataclass(frozen=True)
class _P:
    """Type-parameter placeholder inside a builtin scheme skeleton."""

    idx: int


@dataclass(frozen=True)
class BuiltinScheme:
    name: str
    arity: int  # number of type parameters
    skeleton: object  # Type tree that may contain _P placeholders

    def instantiate(self, inst: tuple[Type, ...]) -> Type:
        if len(inst) != self.arity:
            raise TypeCheckError(
                f"{self.name} takes {self.arity} type parameters, got {len(inst)}")
        return _fill(self.skeleton, inst)


def _fill(skel, inst: tuple[Type, ...]) -> Type:
    match skel:
        case _P(i):
            return inst[i]
        case Unit():
            return skel
        case Prod(l, r):
            return Prod(_fill(l, inst), _fill(r, inst))
        case Sum(l, r):
            return Sum(_fill(l, inst), _fill(r, inst))
        case Star(e):
            return Star(_fill(e, inst))
        case Arrow(d, c):
            return Arrow(_fill(d, inst), _fill(c, inst))
    raise TypeError(f"bad skeleton node: {skel!r}")


def _match(skel, ty: Type, bind: dict[int, Type]) -> bool:
    """One-way unification of a scheme skeleton against a concrete type."""
    match skel, ty:
        case _P(i), _:
            if i in bind:
                return bind[i] == ty
            bind[i] = ty
            return True
        case Unit(), Unit():
            return True
        case (Prod(a, b), Prod(c, d)) | (Sum(a, b), Sum(c, d)):
            return _match(a, c, bind) and _match(b, d, bind)
        case Star(a), Star(b):
            return _match(a, b, bind)
        case Arrow(a, b), Arrow(c, d):
            return _match(a, c, bind) and _match(b, d, bind)
    return False


_A, _B, _C = _P(0), _P(1), _P(2)

SCHEMES: dict[str, BuiltinScheme] = {
    "fst": BuiltinScheme("fst", 2, Arrow(Prod(_A, _B), _A)),
    "snd": BuiltinScheme("snd", 2, Arrow(Prod(_A, _B), _B)),
    "uncons": BuiltinScheme("uncons", 1, Arrow(Star(_A), Sum(UNIT, Prod(_A, Star(_A))))),
    "either": BuiltinScheme(
        "either", 3,
        Arrow(Arrow(_A, _C), Arrow(Arrow(_B, _C), Arrow(Sum(_A, _B), _C)))),
    "concat": BuiltinScheme("concat", 1, Arrow(Star(Star(_A)), Star(_A))),
    "map": BuiltinScheme("map", 2, Arrow(Arrow(_A, _B), Arrow(Star(_A), Star(_B)))),
    "split": BuiltinScheme(
        "split", 1, Arrow(Star(_A), Star(Prod(Star(_A), Prod(_A, Star(_A)))))),
}

# Leading arguments needed before a bare builtin's instantiation is determined.
_MIN_ARGS = {"fst": 1, "snd": 1, "uncons": 1, "either": 2, "concat": 1,
             "map": 1, "split": 1}


def builtin_type(name: str, inst: tuple[Type, ...]) -> Type:
    return SCHEMES[name].instantiate(inst)


# ---------------------------------------------------------------- elaboration

def infer(ctx: Context, t: Term) -> tuple[Term, Type]:
    """Elaborate t and synthesize its unique type."""
    return _infer(dict(ctx), desugar(t))


def check(ctx: Context, t: Term, expected: Type) -> Term:
    """Elaborate t at exactly the expected type."""
    return _check(dict(ctx), desugar(t), expected)


def _infer(ctx: Context, t: Term) -> tuple[Term, Type]:
    match t:
        case Var(name):
            ty = ctx.get(name)
            if ty is None:
                raise TypeCheckError(f"unknown variable '{name}'", t.pos)
            return Var(name, ty=ty, pos=t.pos), ty
        case UnitVal():
            return t, UNIT
        case Lam(x, a, b):
            eb, tb = _infer({**ctx, x: a}, b)
            return Lam(x, a, eb, pos=t.pos), Arrow(a, tb)
        case App():
            return _infer_app(ctx, t)
        case Pair(a, b):
            ea, ta = _infer(ctx, a)
            eb, tb = _infer(ctx, b)
            return Pair(ea, eb, pos=t.pos), Prod(ta, tb)
        case Inl(m, ty):
            if ty is None:
                raise AmbiguousInstantiationError(
                    "cannot infer the sum type of a bare injection; ascribe it", t.pos)
            if not isinstance(ty, Sum):
                raise TypeCheckError(
                    f"injection annotated with non-sum type {print_type(ty)}", t.pos)
            return Inl(_check(ctx, m, ty.left), ty, pos=t.pos), ty
        case Inr(m, ty):
            if ty is None:
                raise AmbiguousInstantiationError(
                    "cannot infer the sum type of a bare injection; ascribe it", t.pos)
            if not isinstance(ty, Sum):
                raise TypeCheckError(
                    f"injection annotated with non-sum type {print_type(ty)}", t.pos)
            return Inr(_check(ctx, m, ty.right), ty, pos=t.pos), ty
        case ListLit(items, et):
            if et is not None:
                elabs = tuple(_check(ctx, i, et) for i in items)
                return ListLit(elabs, et, pos=t.pos), Star(et)
            if not items:
                raise AmbiguousInstantiationError(
                    "cannot infer the element type of an empty list; ascribe it", t.pos)
            e0, t0 = _infer(ctx, items[0])
            rest = tuple(_check(ctx, i, t0) for i in items[1:])
            return ListLit((e0, *rest), t0, pos=t.pos), Star(t0)
        case Builtin(name, inst):
            scheme = SCHEMES[name]
            if len(inst) == scheme.arity:
                return t, scheme.instantiate(inst)
            if not inst:
                raise AmbiguousInstantiationError(
                    f"'{name}' needs arguments or an ascription to fix its type", t.pos)
            raise TypeCheckError(
                f"'{name}' carries {len(inst)} type parameters, wants {scheme.arity}",
                t.pos)
        case Ascribe(m, ty):
            return _check(ctx, m, ty), ty
        case NumLit() | SuccOf() | PairLam():
            raise TypeCheckError("internal: sugar reached the typechecker", t.pos)
    raise TypeCheckError(f"internal: not a term: {t!r}")


def _infer_app(ctx: Context, t: App) -> tuple[Term, Type]:
    chain: list[App] = []
    head: Term = t
    while isinstance(head, App):
        chain.append(head)
        head = head.fn
    chain.reverse()
    args = [node.arg for node in chain]

    if isinstance(head, Builtin) and not head.inst:
        inst = _solve_inst(ctx, head, args)
        fn: Term = Builtin(head.name, inst, pos=head.pos)
        fn_ty = SCHEMES[head.name].instantiate(inst)
    else:
        fn, fn_ty = _infer(ctx, head)

    for arg, node in zip(args, chain):
        if not isinstance(fn_ty, Arrow):
            raise TypeCheckError(
                f"cannot apply a value of type {print_type(fn_ty)}", node.pos)
        ea = _check(ctx, arg, fn_ty.dom)
        fn = App(fn, ea, pos=node.pos)
        fn_ty = fn_ty.cod
    return fn, fn_ty


def _solve_inst(ctx: Context, b: Builtin, args: list[Term]) -> tuple[Type, ...]:
    """Determine a bare builtin's type parameters from its leading arguments."""
    if len(args) < _MIN_ARGS[b.name]:
        raise AmbiguousInstantiationError(
            f"'{b.name}' applied to too few arguments to fix its type", b.pos)
    _, t0 = _infer(ctx, args[0])
    match b.name:
        case "fst" | "snd":
            if not isinstance(t0, Prod):
                raise TypeCheckError(
                    f"'{b.name}' expects a pair, found {print_type(t0)}", b.pos)
            return (t0.left, t0.right)
        case "uncons" | "split":
            if not isinstance(t0, Star):
                raise TypeCheckError(
                    f"'{b.name}' expects a list, found {print_type(t0)}", b.pos)
            return (t0.elem,)
        case "concat":
            if not (isinstance(t0, Star) and isinstance(t0.elem, Star)):
                raise TypeCheckError(
                    f"'concat' expects a list of lists, found {print_type(t0)}", b.pos)
            return (t0.elem.elem,)
        case "map":
            if not isinstance(t0, Arrow):
                raise TypeCheckError(
                    f"'map' expects a function, found {print_type(t0)}", b.pos)
            return (t0.dom, t0.cod)
        case "either":
            if not isinstance(t0, Arrow):
                raise TypeCheckError(
                    f"'either' expects a function, found {print_type(t0)}", b.pos)
            _, t1 = _infer(ctx, args[1])
            if not isinstance(t1, Arrow):
                raise TypeCheckError(
                    f"'either' expects a second function, found {print_type(t1)}", b.pos)
            if t1.cod != t0.cod:
                raise TypeCheckError(
                    "branches of 'either' disagree: "
                    f"{print_type(t0.cod)} vs {print_type(t1.cod)}", b.pos)
            return (t0.dom, t1.dom, t0.cod)
    raise TypeCheckError(f"internal: unknown builtin '{b.name}'", b.pos)


def _check(ctx: Context, t: Term, expected: Type) -> Term:
    match t:
        case Lam(x, a, b):
            if not isinstance(expected, Arrow):
                raise TypeCheckError(
                    f"lambda cannot have non-arrow type {print_type(expected)}", t.pos)
            if a != expected.dom:
                raise TypeCheckError(
                    f"binder declared {print_type(a)} but context expects "
                    f"{print_type(expected.dom)}", t.pos)
            eb = _check({**ctx, x: a}, b, expected.cod)
            return Lam(x, a, eb, pos=t.pos)
        case Pair(a, b):
            if not isinstance(expected, Prod):
                raise TypeCheckError(
                    f"pair cannot have non-product type {print_type(expected)}", t.pos)
            return Pair(_check(ctx, a, expected.left),
                        _check(ctx, b, expected.right), pos=t.pos)
        case Inl(m, ty):
            if not isinstance(expected, Sum):
                raise TypeCheckError(
                    f"injection cannot have non-sum type {print_type(expected)}", t.pos)
            if ty is not None and ty != expected:
                raise TypeCheckError(
                    f"type mismatch: expected {print_type(expected)}, "
                    f"found {print_type(ty)}", t.pos)
            return Inl(_check(ctx, m, expected.left), expected, pos=t.pos)
        case Inr(m, ty):
            if not isinstance(expected, Sum):
                raise TypeCheckError(
                    f"injection cannot have non-sum type {print_type(expected)}", t.pos)
            if ty is not None and ty != expected:
                raise TypeCheckError(
                    f"type mismatch: expected {print_type(expected)}, "
                    f"found {print_type(ty)}", t.pos)
            return Inr(_check(ctx, m, expected.right), expected, pos=t.pos)
        case ListLit(items, et):
            if not isinstance(expected, Star):
                raise TypeCheckError(
                    f"list cannot have non-list type {print_type(expected)}", t.pos)
            if et is not None and et != expected.elem:
                raise TypeCheckError(
                    f"type mismatch: expected elements of {print_type(expected.elem)}, "
                    f"found {print_type(et)}", t.pos)
            elabs = tuple(_check(ctx, i, expected.elem) for i in items)
            return ListLit(elabs, expected.elem, pos=t.pos)
        case UnitVal():
            if expected != UNIT:
                raise TypeCheckError(
                    f"type mismatch: expected {print_type(expected)}, found 1", t.pos)
            return t
        case Ascribe(m, ty):
            if ty != expected:
                raise TypeCheckError(
                    f"ascription {print_type(ty)} does not match expected "
                    f"{print_type(expected)}", t.pos)
            return _check(ctx, m, ty)
        case Builtin(name, inst) if not inst:
            scheme = SCHEMES[name]
            bind: dict[int, Type] = {}
            if not _match(scheme.skeleton, expected, bind):
                raise TypeCheckError(
                    f"'{name}' cannot have type {print_type(expected)}", t.pos)
            solved = tuple(bind[i] for i in range(scheme.arity))
            return Builtin(name, solved, pos=t.pos)
        case _:
            e, ty = _infer(ctx, t)
            if ty != expected:
                raise TypeCheckError(
                    f"type mismatch: expected {print_type(expected)}, "
                    f"found {print_type(ty)}", t.pos)
            return e

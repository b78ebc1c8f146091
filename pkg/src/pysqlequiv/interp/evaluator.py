"""
Bag Evaluation of Queries and UniNomial Terms
"""

from __future__ import annotations
from fractions import Fraction
from functools import lru_cache
from ..error_handling import ArgumentTypeError, EmptyAggregateError, EvaluationError
from ..core import ast
from ..core.schema import Schema
from ..denote import terms as tm
from ..uninomial.normal_form import NormalForm, embed
from .bag import Bag
from .instance import Instance
from .values import Value, enumerate_tuples, format_tuple, int_value


def eval_agg(name: str, bag: Bag) -> Value:
    """
    Apply an aggregate to a bag of scalar values.

    Parameters
    ----------
    name : str
        One of SUM, COUNT, AVG, MAX, MIN.

    bag : Bag
        Bag of `Value`s.

    Returns
    -------
    Value
        SUM of the empty bag is 0 and COUNT is 0. AVG is a `Fraction`
        unless it is integral.

    Raises
    ------
    EmptyAggregateError
        MAX, MIN or AVG of the empty bag.
    """
    if not isinstance(bag, Bag):
        raise ArgumentTypeError("bag", bag, Bag)
    if name == "COUNT":
        return int_value(len(bag))
    if not bag and name in ("MAX", "MIN", "AVG"):
        raise EmptyAggregateError(name)
    for value in bag:
        if not isinstance(value, Value):
            raise EvaluationError(f"aggregate {name} over non-scalar tuple {format_tuple(value)}")
    if name in ("SUM", "AVG"):
        if any(not isinstance(v.payload, (int, Fraction)) or isinstance(v.payload, bool) for v in bag):
            raise EvaluationError(f"aggregate {name} over non-numeric values")
        total = sum((v.payload * m for v, m in bag.items()), 0)
        if name == "SUM":
            return int_value(total)
        return int_value(Fraction(total, len(bag)))
    if name in ("MAX", "MIN"):
        pick = max if name == "MAX" else min
        return pick(bag, key=Value.sort_key)
    raise EvaluationError(f"unknown aggregate {name}")


@lru_cache(maxsize=4096)
def _has_agg(term: tm.UTerm) -> bool:
    return any(isinstance(node, tm.AggApply) for node in term.walk())


class Evaluator:
    """
    Evaluate AST nodes and terms on an instance.

    Attributes
    ----------
    instance : Instance
        Interpretation of relations and meta-variables.

    seen : set|None
        When not `None`, every scalar value produced by an intermediate
        result is added to it.
    """

    def __init__(self, instance: Instance, observe: bool = False) -> None:
        if not isinstance(instance, Instance):
            raise ArgumentTypeError("instance", instance, Instance)
        self.instance = instance
        self.seen: set | None = set() if observe else None

    def _observe(self, t) -> None:
        if self.seen is None:
            return
        if isinstance(t, Value):
            self.seen.add(t)
        elif t != ():
            self._observe(t[0])
            self._observe(t[1])

    # ==============================
    # Queries
    # ==============================

    def query(self, q: ast.Query, g) -> Bag:
        result = self._query(q, g)
        if self.seen is not None:
            for t in result:
                self._observe(t)
        return result

    def _query(self, q: ast.Query, g) -> Bag:
        if isinstance(q, (ast.Table, ast.TableMeta)):
            return self.instance.relation(q.name)
        if isinstance(q, ast.Select):
            counts = {}
            for t, m in self.query(q.query, g).items():
                out = self.proj(q.proj, t)
                counts[out] = counts.get(out, 0) + m
            return Bag(counts)
        if isinstance(q, ast.Product):
            left = self.query(q.left, g)
            right = self.query(q.right, g)
            return Bag({(t1, t2): m1 * m2 for t1, m1 in left.items() for t2, m2 in right.items()})
        if isinstance(q, ast.Where):
            source = self.query(q.query, g)
            return Bag({t: m for t, m in source.items() if self.pred(q.pred, (g, t))})
        if isinstance(q, ast.UnionAll):
            return self.query(q.left, g).union_all(self.query(q.right, g))
        if isinstance(q, ast.Except):
            return self.query(q.left, g).except_(self.query(q.right, g))
        if isinstance(q, ast.Distinct):
            return self.query(q.query, g).distinct()
        raise ArgumentTypeError("q", q, ast.Query)

    def pred(self, b: ast.Pred, g) -> bool:
        if isinstance(b, ast.Eq):
            return self.expr(b.left, g) == self.expr(b.right, g)
        if isinstance(b, ast.And):
            return self.pred(b.left, g) and self.pred(b.right, g)
        if isinstance(b, ast.Or):
            return self.pred(b.left, g) or self.pred(b.right, g)
        if isinstance(b, ast.Not):
            return not self.pred(b.pred, g)
        if isinstance(b, ast.TruePred):
            return True
        if isinstance(b, ast.FalsePred):
            return False
        if isinstance(b, ast.Exists):
            return bool(self.query(b.query, g))
        if isinstance(b, ast.CastPred):
            return self.pred(b.pred, self.proj(b.proj, g))
        if isinstance(b, ast.PredMeta):
            return self.instance.pred_holds(b.name, g)
        raise ArgumentTypeError("b", b, ast.Pred)

    def expr(self, e: ast.Expr, g) -> Value:
        if isinstance(e, ast.Var):
            value = self.proj(e.proj, g)
            if not isinstance(value, Value):
                raise EvaluationError(f"Var({e.proj}) reached non-scalar {format_tuple(value)}")
            return value
        if isinstance(e, ast.Apply):
            value = self.instance.call(e.name, tuple(self.expr(arg, g) for arg in e.args))
        elif isinstance(e, ast.Agg):
            value = eval_agg(e.name, self.query(e.query, g))
        elif isinstance(e, ast.CastExpr):
            return self.expr(e.expr, self.proj(e.proj, g))
        elif isinstance(e, ast.ExprMeta):
            value = self.instance.expr_value(e.name, g)
        else:
            raise ArgumentTypeError("e", e, ast.Expr)
        self._observe(value)
        return value

    def proj(self, p: ast.Proj, t):
        if isinstance(p, ast.Star):
            return t
        if isinstance(p, (ast.Left, ast.Right)):
            if not isinstance(t, tuple) or len(t) != 2:
                raise EvaluationError(f"{p} applied to non-pair {format_tuple(t)}")
            return t[0] if isinstance(p, ast.Left) else t[1]
        if isinstance(p, ast.EmptyProj):
            return ()
        if isinstance(p, ast.Compose):
            return self.proj(p.second, self.proj(p.first, t))
        if isinstance(p, ast.Pair):
            return (self.proj(p.left, t), self.proj(p.right, t))
        if isinstance(p, ast.Eval):
            return self.expr(p.expr, t)
        if isinstance(p, ast.ProjMeta):
            return self.apply_proj_meta(p.name, t)
        raise ArgumentTypeError("p", p, ast.Proj)

    def apply_proj_meta(self, name: str, t):
        interp = self.instance.proj_table(name)
        if isinstance(interp, ast.Proj):
            return self.proj(interp, t)
        try:
            return interp[t]
        except KeyError:
            raise EvaluationError(f"projection {name} is undefined on {format_tuple(t)}") from None

    # ==============================
    # Terms
    # ==============================

    def domain(self, schema: Schema) -> list:
        return list(enumerate_tuples(schema, self.instance.domains))

    def uterm(self, term: tm.UTerm, env: list) -> int:
        """
        Value of a UniNomial term; `env` holds the bound tuples, outermost first.
        """
        if isinstance(term, tm.Zero):
            return 0
        if isinstance(term, tm.One):
            return 1
        if isinstance(term, tm.Plus):
            return self.uterm(term.left, env) + self.uterm(term.right, env)
        if isinstance(term, tm.Times):
            first, second = term.left, term.right
            if _has_agg(first) and not _has_agg(second):
                first, second = second, first
            left = self.uterm(first, env)
            return 0 if left == 0 else left * self.uterm(second, env)
        if isinstance(term, tm.Squash):
            return 1 if self.uterm(term.arg, env) else 0
        if isinstance(term, tm.Negate):
            return 0 if self.uterm(term.arg, env) else 1
        if isinstance(term, tm.Sigma):
            return sum(self.uterm(term.body, env + [t]) for t in self.domain(term.schema))
        if isinstance(term, tm.RelAtom):
            return self.instance.relation(term.table).multiplicity(self.tuple_term(term.arg, env))
        if isinstance(term, tm.EqAtom):
            return int(self.tuple_term(term.left, env) == self.tuple_term(term.right, env))
        if isinstance(term, tm.PredAtom):
            return int(self.instance.pred_holds(term.meta.name, self.tuple_term(term.arg, env)))
        if isinstance(term, tm.Lam):
            raise EvaluationError("a lambda needs arguments before it has a value")
        raise ArgumentTypeError("term", term, tm.UTerm)

    def tuple_term(self, term: tm.TupleTerm, env: list):
        if isinstance(term, tm.VarRef):
            if not 0 <= term.index < len(env):
                raise EvaluationError(f"dangling variable index {term.index}")
            return env[len(env) - 1 - term.index]
        if isinstance(term, (tm.Fst, tm.Snd)):
            t = self.tuple_term(term.arg, env)
            if not isinstance(t, tuple) or len(t) != 2:
                raise EvaluationError(f"pair projection of non-pair {format_tuple(t)}")
            return t[0] if isinstance(term, tm.Fst) else t[1]
        if isinstance(term, tm.MkPair):
            return (self.tuple_term(term.left, env), self.tuple_term(term.right, env))
        if isinstance(term, tm.Unit):
            return ()
        if isinstance(term, tm.Const):
            return term.value
        if isinstance(term, tm.ProjApply):
            return self.apply_proj_meta(term.meta.name, self.tuple_term(term.arg, env))
        if isinstance(term, tm.FnApply):
            return self.instance.call(term.name, tuple(self.tuple_term(a, env) for a in term.args))
        if isinstance(term, tm.ExprApply):
            return self.instance.expr_value(term.meta.name, self.tuple_term(term.arg, env))
        if isinstance(term, tm.AggApply):
            lam = term.body
            counts = {}
            for t in self.domain(lam.schema):
                m = self.uterm(lam.body, env + [t])
                if m:
                    counts[t] = m
            return eval_agg(term.name, Bag(counts))
        if isinstance(term, tm.NamedVar):
            raise EvaluationError(f"free named variable {term.name}")
        raise ArgumentTypeError("term", term, tm.TupleTerm)


def eval_query(inst: Instance, g, q: ast.Query) -> Bag:
    """
    Evaluate a query under context tuple `g`.

    Parameters
    ----------
    inst : Instance
        Interpretation of every relation and meta-variable `q` uses.

    g : tuple|Value
        Context tuple, `()` for the empty context.

    q : pysqlequiv.core.ast.Query

    Returns
    -------
    Bag

    Raises
    ------
    UnboundMetaError
        A relation or meta-variable missing from `inst`.

    EmptyAggregateError
        MAX, MIN or AVG over an empty group.
    """
    return Evaluator(inst).query(q, g)


def eval_uterm(inst: Instance, env: list, term: tm.UTerm, *args) -> int:
    """
    Evaluate a UniNomial term to a natural number.

    Leading `Lam`s consume `args` in order. Sums enumerate `inst.domains`.

    Raises
    ------
    InfiniteDomainError
        A sum ranges over a base type with no finite domain.
    """
    env = list(env)
    for arg in args:
        if not isinstance(term, tm.Lam):
            raise EvaluationError("too many arguments for term")
        env.append(arg)
        term = term.body
    return Evaluator(inst).uterm(term, env)


def eval_tuple_term(inst: Instance, env: list, term: tm.TupleTerm):
    """
    Evaluate a tuple term to a concrete tuple.
    """
    return Evaluator(inst).tuple_term(term, list(env))


def eval_normal_form(inst: Instance, nf: NormalForm, *args) -> int:
    """
    Evaluate a normal form through its embedding; `args` bind its free
    variables in order.
    """
    if not isinstance(nf, NormalForm):
        raise ArgumentTypeError("nf", nf, NormalForm)
    return eval_uterm(inst, [], embed(nf), *args)

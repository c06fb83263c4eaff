"""Reader and printer for the s-expression domain/problem language.

The notation follows JSHOP2::

    (defdomain office
      ((:operator (!turn-on-light ?l ?r)
         ((not (on ?l ?r)))          ; preconditions
         ()                          ; delete list
         ((on ?l ?r)))               ; add list
       (:method (light-helper ?l ?r)
         (not (on ?l ?r)) (!turn-on-light ?l ?r)
         (on ?l ?r) ())))

    (defproblem office-problem office
      ()
      (:unordered ((adjust-office R a l m)) ((adjust-desk R l c))))

``?x`` is a variable, ``!op`` a primitive task symbol and ``;`` starts a
comment that runs to the end of the line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

from .model import (
    Atom,
    Branch,
    Domain,
    Literal,
    Method,
    Operator,
    Plan,
    Problem,
    Task,
    TaskNetwork,
    Unordered,
    Var,
    term,
    variables,
)

# JSHOP2 constructs this planner deliberately does not implement.
UNSUPPORTED = {
    ":-", ":axiom", "call", ":first", ":sort-by", "or", "imply", "forall",
    "exists", "assign", "eval", ":protection", ":immediate", ":task",
}


class ParseError(Exception):
    """Diagnostic for malformed input; line and column are 1-based."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class Symbol:
    text: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class SList:
    items: Tuple["SExpr", ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)

    def __str__(self):
        return print_sexpr(self)


SExpr = Union[Symbol, SList]


def _tokens(source: str):
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch.isspace():
            i += 1
            col += 1
        elif ch == ";":
            while i < n and source[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        else:
            start = i
            while i < n and not source[i].isspace() and source[i] not in "();":
                i += 1
            yield source[start:i], line, col
            col += i - start


def tokenize_and_read(source: str) -> List[SExpr]:
    """Read every top-level s-expression in ``source``."""
    forms: List[SExpr] = []
    stack: List[Tuple[list, int, int]] = []
    for tok, line, col in _tokens(source):
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise ParseError(line, col, "unbalanced ')'")
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else forms).append(node)
        else:
            sym = Symbol(tok, line, col)
            (stack[-1][0] if stack else forms).append(sym)
    if stack:
        _, l0, c0 = stack[-1]
        raise ParseError(l0, c0, "unbalanced '(': missing ')'")
    if not forms:
        raise ParseError(1, 1, "empty input")
    return forms


def print_sexpr(expr: SExpr) -> str:
    if isinstance(expr, Symbol):
        return expr.text
    return "(" + " ".join(print_sexpr(e) for e in expr.items) + ")"


def _fail(at, message):
    raise ParseError(getattr(at, "line", 1) or 1, getattr(at, "column", 1) or 1, message)


def _is_nil(expr):
    return isinstance(expr, Symbol) and expr.text.lower() == "nil"


def _head_symbol(expr):
    if isinstance(expr, SList) and expr.items and isinstance(expr.items[0], Symbol):
        return expr.items[0].text
    return None


def _check_supported(expr):
    head = _head_symbol(expr)
    if head is not None and head.lower() in UNSUPPORTED:
        _fail(expr, f"unsupported feature: {head}")


def _terms(exprs, owner):
    out = []
    for e in exprs:
        if not isinstance(e, Symbol):
            _fail(e, f"expected a term in {owner}, got a list")
        if e.text.startswith((":", "!")) or e.text == "?":
            _fail(e, f"invalid term {e.text!r}")
        out.append(term(e.text))
    return tuple(out)


def _atom(expr) -> Atom:
    if not isinstance(expr, SList) or not expr.items:
        _fail(expr, "expected an atom")
    _check_supported(expr)
    head = expr.items[0]
    if not isinstance(head, Symbol):
        _fail(head, "atom predicate must be a symbol")
    if head.text.startswith(("?", "!", ":")) or head.text in ("and", "not"):
        _fail(head, f"invalid predicate symbol {head.text!r}")
    return Atom(head.text, _terms(expr.items[1:], f"atom {head.text}"))


def _task(expr) -> Task:
    if not isinstance(expr, SList) or not expr.items or not isinstance(expr.items[0], Symbol):
        _fail(expr, "expected a task")
    _check_supported(expr)
    head = expr.items[0].text
    primitive = head.startswith("!")
    symbol = head[1:] if primitive else head
    if not symbol or symbol.startswith(("?", "!", ":")):
        _fail(expr.items[0], f"invalid task symbol {head!r}")
    return Task(symbol, _terms(expr.items[1:], f"task {head}"), primitive)


def parse_precondition(expr: SExpr) -> Tuple[Literal, ...]:
    """Flatten a precondition expression into a conjunction of literals.

    Accepted shapes: ``()``/``nil``, a single atom, ``(not <atom>)``,
    ``(and ...)`` and a list of any of these.
    """
    if _is_nil(expr):
        return ()
    if isinstance(expr, Symbol):
        _fail(expr, f"expected a precondition, got symbol {expr.text!r}")
    if not expr.items:
        return ()
    _check_supported(expr)
    head = _head_symbol(expr)
    if head is None:
        out: list = []
        for e in expr.items:
            out.extend(parse_precondition(e))
        return tuple(out)
    if head == "and":
        out = []
        for e in expr.items[1:]:
            out.extend(parse_precondition(e))
        return tuple(out)
    if head == "not":
        if len(expr.items) != 2:
            _fail(expr, "(not ...) takes exactly one atom")
        inner = expr.items[1]
        if _head_symbol(inner) in ("not", "and"):
            _fail(inner, "only atoms may be negated")
        return (Literal(_atom(inner), negated=True),)
    return (Literal(_atom(expr)),)


def _atom_list(expr, what) -> Tuple[Atom, ...]:
    if _is_nil(expr):
        return ()
    if isinstance(expr, Symbol):
        _fail(expr, f"expected a {what} list")
    if not expr.items:
        return ()
    _check_supported(expr)
    if _head_symbol(expr) is not None:
        return (_atom(expr),)
    return tuple(_atom(e) for e in expr.items)


def parse_tasklist(expr: SExpr) -> TaskNetwork:
    if _is_nil(expr):
        return TaskNetwork()
    if isinstance(expr, Symbol):
        _fail(expr, f"expected a task list, got symbol {expr.text!r}")
    if not expr.items:
        return TaskNetwork()
    head = _head_symbol(expr)
    if head == ":unordered":
        if len(expr.items) < 2:
            _fail(expr, ":unordered needs at least one task list")
        return TaskNetwork((Unordered(tuple(parse_tasklist(e) for e in expr.items[1:])),))
    if head == ":ordered":
        return _sequence(expr.items[1:])
    if head is not None:
        if head.startswith(":"):
            _fail(expr, f"unsupported feature: {head}")
        return TaskNetwork((_task(expr),))
    return _sequence(expr.items)


def _sequence(exprs):
    nodes: list = []
    for e in exprs:
        nodes.extend(parse_tasklist(e).nodes)
    return TaskNetwork(tuple(nodes))


def _operator(form) -> Operator:
    items = form.items
    if len(items) == 6:
        _fail(items[5], "unsupported feature: operator cost")
    if len(items) != 5:
        _fail(form, "(:operator <head> <preconditions> <delete> <add>) expected")
    head = _task(items[1])
    if not head.primitive:
        _fail(items[1], f"operator head must be primitive (start with '!'): {head.symbol}")
    params = head.args
    for p, e in zip(params, items[1].items[1:]):
        if not isinstance(p, Var):
            _fail(e, f"operator parameter must be a variable: {p}")
    if len(set(params)) != len(params):
        _fail(items[1], "duplicate operator parameter")
    pre = parse_precondition(items[2])
    dels = _atom_list(items[3], "delete")
    adds = _atom_list(items[4], "add")
    bound = set(params)
    for lit in pre:
        free = variables(lit) - bound
        if free:
            _fail(items[2], f"precondition variable {sorted(v.name for v in free)[0]} not in operator head")
    for atom, at in [(a, items[3]) for a in dels] + [(a, items[4]) for a in adds]:
        free = variables(atom) - bound
        if free:
            _fail(at, f"effect variable {sorted(v.name for v in free)[0]} not in operator head")
    return Operator(head.symbol, params, pre, dels, adds)


def _method(form) -> Method:
    items = form.items
    if len(items) < 2:
        _fail(form, "(:method <head> (<preconditions> <tasks>)+) expected")
    head = _task(items[1])
    if head.primitive:
        _fail(items[1], f"method head must not be primitive: !{head.symbol}")
    rest = items[2:]
    branches = []
    i = 0
    while i < len(rest):
        label = None
        if isinstance(rest[i], Symbol) and not _is_nil(rest[i]):
            label = rest[i].text
            i += 1
        if i + 1 >= len(rest):
            _fail(rest[i] if i < len(rest) else form, "method branch is missing its task list")
        pre = parse_precondition(rest[i])
        subtasks = parse_tasklist(rest[i + 1])
        bound = variables(head)
        for lit in pre:
            if not lit.negated:
                bound |= variables(lit)
        for lit in pre:
            free = variables(lit) - bound
            if free:
                _fail(rest[i], f"unbound variable {sorted(v.name for v in free)[0]} in negated precondition")
        free = variables(subtasks) - bound
        if free:
            _fail(rest[i + 1], f"subtask variable {sorted(v.name for v in free)[0]} "
                               "is bound by neither the head nor the preconditions")
        branches.append(Branch(pre, subtasks, label))
        i += 2
    if not branches:
        _fail(form, f"method {head.symbol} has no branches")
    return Method(head, tuple(branches))


def _expect_form(source, keyword, arity):
    forms = tokenize_and_read(source)
    if len(forms) != 1:
        _fail(forms[1], f"expected exactly one ({keyword} ...) form")
    form = forms[0]
    if _head_symbol(form) != keyword:
        _fail(form, f"expected ({keyword} ...)")
    if len(form.items) != arity:
        _fail(form, f"malformed ({keyword} ...) form")
    names = form.items[1:2] if keyword == "defdomain" else form.items[1:3]
    for e in names:
        if not isinstance(e, Symbol):
            _fail(e, "expected a name")
    return form


def parse_domain(source: str) -> Domain:
    form = _expect_form(source, "defdomain", 3)
    name = form.items[1].text
    body = form.items[2]
    if _is_nil(body):
        body = SList()
    if not isinstance(body, SList):
        _fail(body, "expected a list of domain items")
    operators = {}
    methods: dict = {}
    for item in body.items:
        kw = _head_symbol(item)
        if kw == ":operator":
            op = _operator(item)
            if op.name in operators:
                _fail(item, f"duplicate operator !{op.name}")
            operators[op.name] = op
        elif kw == ":method":
            m = _method(item)
            methods.setdefault(m.name, []).append(m)
        elif kw is not None and kw.lower() in UNSUPPORTED:
            _fail(item, f"unsupported feature: {kw}")
        else:
            _fail(item, f"unknown domain item {kw or print_sexpr(item)!r}")
    clash = set(operators) & set(methods)
    if clash:
        _fail(body, f"symbol used as both operator and method: {sorted(clash)[0]}")
    return Domain(name, operators, {k: tuple(v) for k, v in methods.items()})


def parse_problem(source: str) -> Problem:
    form = _expect_form(source, "defproblem", 5)
    name, domain_name = form.items[1].text, form.items[2].text
    state_expr = form.items[3]
    atoms: Tuple[Atom, ...] = ()
    if not _is_nil(state_expr):
        if not isinstance(state_expr, SList):
            _fail(state_expr, "expected a list of initial atoms")
        atoms = tuple(_atom(e) for e in state_expr.items)
    for atom, e in zip(atoms, getattr(state_expr, "items", ())):
        if not atom.is_ground():
            _fail(e, f"variable in initial state: {atom}")
    network = parse_tasklist(form.items[4])
    for task in network.tasks():
        if not task.is_ground():
            _fail(form.items[4], f"variable in initial task network: {task}")
    return Problem(name, domain_name, atoms, network)


def parse_plan(source: str) -> Plan:
    """Read a plan file: one ground step per line as an s-expression."""
    if not source.strip() or all(line.lstrip().startswith(";") or not line.strip()
                                 for line in source.splitlines()):
        return Plan()
    steps = []
    for expr in tokenize_and_read(source):
        task = _task(expr)
        if not task.is_ground():
            _fail(expr, f"plan step is not ground: {task}")
        steps.append(Task(task.symbol, task.args, primitive=True))
    return Plan(tuple(steps))


def _fmt_pre(pre: Sequence[Literal]) -> str:
    return "(" + " ".join(map(str, pre)) + ")"


def _fmt_atoms(atoms: Sequence[Atom]) -> str:
    return "(" + " ".join(map(str, atoms)) + ")"


def format_tasklist(net: TaskNetwork) -> str:
    parts = []
    for node in net.nodes:
        if isinstance(node, Task):
            parts.append(str(node))
        else:
            parts.append("(:unordered " + " ".join(format_tasklist(m) for m in node.members) + ")")
    return "(" + " ".join(parts) + ")"


def print_domain(domain: Domain) -> str:
    lines = [f"(defdomain {domain.name}", "  ("]
    for op in domain.operators.values():
        lines.append(f"    (:operator {op.head}")
        lines.append(f"      {_fmt_pre(op.preconditions)}")
        lines.append(f"      {_fmt_atoms(op.delete_effects)}")
        lines.append(f"      {_fmt_atoms(op.add_effects)})")
    for group in domain.methods.values():
        for m in group:
            lines.append(f"    (:method {m.head}")
            for br in m.branches:
                label = f"{br.label} " if br.label else ""
                lines.append(f"      {label}{_fmt_pre(br.preconditions)}")
                lines.append(f"      {format_tasklist(br.subtasks)}")
            lines[-1] += ")"
    lines.append("  )")
    lines.append(")")
    return "\n".join(lines) + "\n"


def print_problem(problem: Problem) -> str:
    lines = [f"(defproblem {problem.name} {problem.domain_name}", "  ("]
    lines.extend(f"    {a}" for a in problem.initial_state)
    lines.append("  )")
    lines.append(f"  {format_tasklist(problem.network)}")
    lines.append(")")
    return "\n".join(lines) + "\n"


def format_plan(plan) -> str:
    return "".join(f"{step}\n" for step in plan)

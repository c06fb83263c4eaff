"""Symbolic data types shared by the parser, the logic engine and the planner.

Every value here is immutable once built, so domains and problems can be
shared freely between planner instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union


class _Interned:
    """Terms are interned: one object per name, so equality is identity."""

    __slots__ = ("name",)
    _cache: dict

    def __new__(cls, name: str):
        obj = cls._cache.get(name)
        if obj is None:
            cls._check(name)
            obj = object.__new__(cls)
            object.__setattr__(obj, "name", name)
            cls._cache[name] = obj
        return obj

    def __setattr__(self, key, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __reduce__(self):
        return type(self), (self.name,)

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"

    def __str__(self):
        return self.name


class Var(_Interned):
    __slots__ = ()
    _cache = {}

    @staticmethod
    def _check(name):
        if not isinstance(name, str) or not name.startswith("?") or len(name) < 2:
            raise ValueError(f"variable name must start with '?': {name!r}")


class Const(_Interned):
    __slots__ = ()
    _cache = {}

    @staticmethod
    def _check(name):
        if not isinstance(name, str) or not name or name.startswith("?"):
            raise ValueError(f"invalid constant name: {name!r}")


Term = Union[Var, Const]


def term(name: str) -> Term:
    """Build a Var or Const from its surface spelling."""
    return Var(name) if name.startswith("?") else Const(name)


class _Structure:
    # immutable record with a cached hash; subclasses list their fields in _fields
    __slots__ = ("_hash",)
    _fields: Tuple[str, ...] = ()

    def __setattr__(self, key, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _init(self, *values):
        for name, value in zip(self._fields, values):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + values))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if other is self:
            return True
        if type(other) is not type(self) or other._hash != self._hash:
            return False
        return all(getattr(self, f) == getattr(other, f) for f in self._fields)

    def __ne__(self, other):
        return not self == other

    def __reduce__(self):
        return type(self), tuple(getattr(self, f) for f in self._fields)

    def __repr__(self):
        body = ", ".join(repr(getattr(self, f)) for f in self._fields)
        return f"{type(self).__name__}({body})"


class Atom(_Structure):
    __slots__ = ("predicate", "args")
    _fields = ("predicate", "args")

    def __init__(self, predicate: str, args: Iterable[Term] = ()):
        self._init(predicate, tuple(args))

    def is_ground(self) -> bool:
        return all(type(a) is Const for a in self.args)

    def __str__(self):
        return "(" + " ".join([self.predicate, *map(str, self.args)]) + ")"


class Literal(_Structure):
    __slots__ = ("atom", "negated")
    _fields = ("atom", "negated")

    def __init__(self, atom: Atom, negated: bool = False):
        self._init(atom, bool(negated))

    def __str__(self):
        return f"(not {self.atom})" if self.negated else str(self.atom)


class Task(_Structure):
    # symbol is stored without the leading "!"; primitive keeps that information
    __slots__ = ("symbol", "args", "primitive")
    _fields = ("symbol", "args", "primitive")

    def __init__(self, symbol: str, args: Iterable[Term] = (), primitive: bool = False):
        self._init(symbol, tuple(args), bool(primitive))

    def is_ground(self) -> bool:
        return all(type(a) is Const for a in self.args)

    def __str__(self):
        head = "!" + self.symbol if self.primitive else self.symbol
        return "(" + " ".join([head, *map(str, self.args)]) + ")"


@dataclass(frozen=True, slots=True)
class Unordered:
    """A group of task networks whose members may interleave freely."""

    members: Tuple["TaskNetwork", ...]


@dataclass(frozen=True, slots=True)
class TaskNetwork:
    """Tasks in precedence order; node i finishes before node i+1 starts."""

    nodes: Tuple[Union[Task, Unordered], ...] = ()

    def tasks(self) -> Iterator[Task]:
        for node in self.nodes:
            if isinstance(node, Task):
                yield node
            else:
                for member in node.members:
                    yield from member.tasks()

    def is_primitive(self) -> bool:
        return all(t.primitive for t in self.tasks())

    def is_empty(self) -> bool:
        return not any(True for _ in self.tasks())

    def __len__(self):
        return sum(1 for _ in self.tasks())


TaskNode = Union[Task, Unordered]


@dataclass(frozen=True, slots=True)
class Operator:
    name: str
    params: Tuple[Var, ...]
    preconditions: Tuple[Literal, ...] = ()
    delete_effects: Tuple[Atom, ...] = ()
    add_effects: Tuple[Atom, ...] = ()

    @property
    def head(self) -> Task:
        return Task(self.name, self.params, primitive=True)


@dataclass(frozen=True, slots=True)
class Branch:
    preconditions: Tuple[Literal, ...]
    subtasks: TaskNetwork
    label: Optional[str] = None


@dataclass(frozen=True, slots=True)
class Method:
    head: Task
    branches: Tuple[Branch, ...]

    def __post_init__(self):
        if self.head.primitive:
            raise ValueError(f"method head {self.head} is primitive")
        if not self.branches:
            raise ValueError(f"method {self.head} has no branches")

    @property
    def name(self) -> str:
        return self.head.symbol


@dataclass(frozen=True)
class Domain:
    name: str
    operators: Mapping[str, Operator] = field(default_factory=dict)
    methods: Mapping[str, Tuple[Method, ...]] = field(default_factory=dict)

    def __post_init__(self):
        clash = set(self.operators) & set(self.methods)
        if clash:
            raise ValueError(f"symbols used both as operator and method: {sorted(clash)}")

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    initial_state: Tuple[Atom, ...] = ()
    network: TaskNetwork = TaskNetwork()

    def __post_init__(self):
        for atom in self.initial_state:
            if not atom.is_ground():
                raise ValueError(f"variable in initial state: {atom}")


@dataclass(frozen=True, slots=True)
class Plan:
    steps: Tuple[Task, ...] = ()

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def __str__(self):
        return "\n".join(map(str, self.steps))


Substitution = Dict[Var, Term]


class State:
    """A set of ground atoms, indexed by predicate in insertion order.

    ``apply`` returns a new state and shares the untouched predicate buckets
    with the old one, so snapshots for backtracking are cheap.
    """

    __slots__ = ("_atoms", "_index")

    def __init__(self, atoms: Iterable[Atom] = ()):
        index: Dict[str, list] = {}
        seen = set()
        for atom in atoms:
            if not atom.is_ground():
                raise ValueError(f"state atoms must be ground: {atom}")
            if atom in seen:
                continue
            seen.add(atom)
            index.setdefault(atom.predicate, []).append(atom)
        self._atoms = frozenset(seen)
        self._index = {p: tuple(v) for p, v in index.items()}

    @classmethod
    def _make(cls, atoms, index):
        obj = cls.__new__(cls)
        obj._atoms = atoms
        obj._index = index
        return obj

    def with_predicate(self, predicate: str) -> Tuple[Atom, ...]:
        return self._index.get(predicate, ())

    def apply(self, deletes: Iterable[Atom], adds: Iterable[Atom]) -> "State":
        """Return (self - deletes) | adds."""
        deletes = frozenset(deletes)
        adds = tuple(dict.fromkeys(adds))
        atoms = (self._atoms - deletes).union(adds)
        index = dict(self._index)
        touched = {a.predicate for a in deletes} | {a.predicate for a in adds}
        for pred in touched:
            kept = [a for a in self._index.get(pred, ()) if a not in deletes]
            present = set(kept)
            kept.extend(a for a in adds if a.predicate == pred and a not in present)
            if kept:
                index[pred] = tuple(kept)
            else:
                index.pop(pred, None)
        return State._make(atoms, index)

    @property
    def atoms(self) -> frozenset:
        return self._atoms

    def __contains__(self, atom):
        return atom in self._atoms

    def __iter__(self):
        for bucket in self._index.values():
            yield from bucket

    def __len__(self):
        return len(self._atoms)

    def __eq__(self, other):
        if not isinstance(other, State):
            return NotImplemented
        return self._atoms == other._atoms

    def __hash__(self):
        return hash(self._atoms)

    def __repr__(self):
        return "State({" + ", ".join(map(str, self)) + "})"


def walk(t: Term, s: Mapping[Var, Term]) -> Term:
    """Follow variable bindings until reaching a constant or an unbound variable."""
    steps = 0
    while type(t) is Var:
        nxt = s.get(t)
        if nxt is None or nxt is t:
            break
        t = nxt
        steps += 1
        if steps > len(s):
            raise ValueError("cyclic substitution")
    return t


def _sub_args(args, s):
    out = []
    for a in args:
        if type(a) is Var:
            b = s.get(a, a)
            if type(b) is Var and b is not a:
                b = walk(b, s)
            a = b
        out.append(a)
    return tuple(out)


def apply_substitution(x, s: Mapping[Var, Term]):
    """Replace every bound variable in ``x`` by its fully dereferenced binding.

    ``x`` may be a term, atom, literal, task or task network; the result has
    the same kind. Unbound variables are left in place.
    """
    if not s:
        return x
    if isinstance(x, (Var, Const)):
        return walk(x, s) if type(x) is Var else x
    if isinstance(x, Atom):
        args = _sub_args(x.args, s)
        return x if args == x.args else Atom(x.predicate, args)
    if isinstance(x, Task):
        args = _sub_args(x.args, s)
        return x if args == x.args else Task(x.symbol, args, x.primitive)
    if isinstance(x, Literal):
        return Literal(apply_substitution(x.atom, s), x.negated)
    if isinstance(x, TaskNetwork):
        return TaskNetwork(tuple(apply_substitution(n, s) for n in x.nodes))
    if isinstance(x, Unordered):
        return Unordered(tuple(apply_substitution(m, s) for m in x.members))
    raise TypeError(f"cannot substitute into {type(x).__name__}")


def is_ground(x) -> bool:
    if isinstance(x, Var):
        return False
    if isinstance(x, Const):
        return True
    if isinstance(x, Literal):
        return x.atom.is_ground()
    if isinstance(x, TaskNetwork):
        return all(t.is_ground() for t in x.tasks())
    return x.is_ground()


def variables(x) -> set:
    """Collect the variables occurring in an atom, literal, task or network."""
    if isinstance(x, Var):
        return {x}
    if isinstance(x, Const):
        return set()
    if isinstance(x, Literal):
        x = x.atom
    if isinstance(x, (Atom, Task)):
        return {a for a in x.args if type(a) is Var}
    if isinstance(x, TaskNetwork):
        out = set()
        for t in x.tasks():
            out.update(variables(t))
        return out
    raise TypeError(f"no variables for {type(x).__name__}")

"""Brute-force reference enumerator for baseline plan sets.

Shares no search, unification or precondition code with the package: tasks,
atoms and states are plain tuples of strings, method variables are bound by
trying every assignment over the problem's constants, and the frontier is a
nested list walked recursively. Only the parsed Domain/Problem objects are
read from the package.
"""

from __future__ import annotations


def _is_var(name):
    return name.startswith("?")


def _atom(a):
    return (a.predicate,) + tuple(t.name for t in a.args)


def _task(t):
    return (t.primitive, t.symbol) + tuple(a.name for a in t.args)


def _net(network):
    out = []
    for node in network.nodes:
        if hasattr(node, "members"):
            out.append(("group", tuple(_net(m) for m in node.members)))
        else:
            out.append(("task", _task(node)))
    return tuple(out)


def _subst(tup, env, skip):
    # skip: number of leading non-argument fields
    return tup[:skip] + tuple(env.get(x, x) for x in tup[skip:])


def _subst_net(net, env):
    out = []
    for kind, body in net:
        if kind == "task":
            out.append(("task", _subst(body, env, 2)))
        else:
            out.append(("group", tuple(_subst_net(m, env) for m in body)))
    return tuple(out)


def _finished(net):
    for kind, body in net:
        if kind == "task" or not all(_finished(m) for m in body):
            return False
    return True


def _choices(net):
    """Yield (task, rebuild) for every task that may be worked on next.

    ``rebuild(replacement)`` returns the network with that task replaced by
    the given sequence of nodes.
    """
    for i, (kind, body) in enumerate(net):
        rest = net[i + 1:]
        if kind == "task":
            yield body, (lambda repl, rest=rest: tuple(repl) + rest)
            return
        if all(_finished(m) for m in body):
            continue
        for k, member in enumerate(body):
            for task, inner in _choices(member):
                def rebuild(repl, k=k, inner=inner, body=body, rest=rest):
                    members = body[:k] + (inner(repl),) + body[k + 1:]
                    return (("group", members),) + rest
                yield task, rebuild
        return


class BruteForce:
    def __init__(self, domain, problem):
        self.operators = {}
        for op in domain.operators.values():
            self.operators[op.name] = (
                tuple(p.name for p in op.params),
                tuple((l.negated, _atom(l.atom)) for l in op.preconditions),
                tuple(_atom(a) for a in op.delete_effects),
                tuple(_atom(a) for a in op.add_effects),
            )
        self.methods = {}
        for symbol, group in domain.methods.items():
            self.methods[symbol] = [
                (tuple(a.name for a in m.head.args),
                 [(tuple((l.negated, _atom(l.atom)) for l in br.preconditions), _net(br.subtasks))
                  for br in m.branches])
                for m in group
            ]
        self.state0 = frozenset(_atom(a) for a in problem.initial_state)
        self.net0 = _net(problem.network)
        consts = set()
        for fact in self.state0:
            consts.update(fact[1:])
        self.universe = sorted(consts)

    def _holds(self, pre, env, state):
        for negated, atom in pre:
            fact = _subst(atom, env, 1)
            if any(_is_var(x) for x in fact[1:]):
                return False
            if (fact in state) == negated:
                return False
        return True

    def _head_env(self, head, args):
        if len(head) != len(args):
            return None
        env = {}
        for h, a in zip(head, args):
            if _is_var(h):
                if env.setdefault(h, a) != a:
                    return None
            elif h != a:
                return None
        return env

    def _branch_bindings(self, pre, subtasks, env, state):
        free = []
        for _, atom in pre:
            free.extend(x for x in atom[1:] if _is_var(x) and x not in env and x not in free)
        # every assignment over the universe, checking each literal as soon as
        # all of its variables are assigned
        ready = [[] for _ in range(len(free) + 1)]
        for lit in pre:
            names = [x for x in lit[1][1:] if _is_var(x) and x not in env]
            ready[max((free.index(x) + 1 for x in names), default=0)].append(lit)
        found = []

        def assign(k, current):
            if not self._holds(ready[k], current, state):
                return
            if k == len(free):
                found.append(current)
                return
            for value in self.universe:
                assign(k + 1, dict(current, **{free[k]: value}))

        assign(0, dict(env))
        return found

    def successors(self, state, net):
        """Every (state, network, step-or-None) reachable by one expansion."""
        for task, rebuild in _choices(net):
            primitive, symbol, args = task[0], task[1], task[2:]
            if primitive:
                params, pre, dels, adds = self.operators[symbol]
                if len(params) != len(args):
                    continue
                env = dict(zip(params, args))
                if not self._holds(pre, env, state):
                    continue
                new_state = (state - {_subst(a, env, 1) for a in dels}) | {_subst(a, env, 1) for a in adds}
                yield new_state, rebuild(()), (symbol,) + args
                continue
            for head, branches in self.methods[symbol]:
                env = self._head_env(head, args)
                if env is None:
                    continue
                for pre, subtasks in branches:
                    bindings = self._branch_bindings(pre, subtasks, env, state)
                    if bindings:
                        for b in bindings:
                            yield state, rebuild(_subst_net(subtasks, b)), None
                        break

    def plans(self, max_depth):
        """Set of step sequences reachable within ``max_depth`` expansions."""
        found = set()

        def walk(state, net, steps, depth):
            if _finished(net):
                found.add(steps)
                return
            if depth >= max_depth:
                return
            for new_state, new_net, step in self.successors(state, net):
                walk(new_state, new_net, steps + ((step,) if step else ()), depth + 1)

        walk(self.state0, self.net0, (), 0)
        return found


def as_tuples(plan):
    """Convert a package Plan to the oracle's step tuples."""
    return tuple((s.symbol,) + tuple(a.name for a in s.args) for s in plan)


def has_redundant_step(domain, problem, steps):
    """True if some step repeats an earlier identical step whose added atoms
    were all asserted by applied steps and still hold at that point."""
    bf = BruteForce(domain, problem)
    state = set(bf.state0)
    asserted = set()  # atoms added by applied steps that still hold
    done = []
    for step in steps:
        params, _, dels, adds = bf.operators[step[0]]
        env = dict(zip(params, step[1:]))
        for prev_adds, prev in done:
            if prev == step and all(a in asserted for a in prev_adds):
                return True
        add_facts = {_subst(a, env, 1) for a in adds}
        del_facts = {_subst(a, env, 1) for a in dels}
        state = (state - del_facts) | add_facts
        asserted = (asserted - del_facts) | add_facts
        done.append((add_facts, step))
    return False

"""Contingency plans and dominance across immediate refinements.

A plan fixes a finite set of alternatives and picks one at each state in
its domain. The consistency notion implemented here is a sure-thing
condition over evidence: whenever every immediate refinement of a state is
in the domain and all of them settle on the same alternative, the state
itself must settle on that alternative too. A parallel condition applies
to state-indexed preference relations, where any strict preference
unanimous across a state's immediate refinements must already be held at
the state.

The plan-level and relation-level conditions agree on plans defined
everywhere, via the relation a plan induces (chosen alternative strictly
on top, the rest tied below, indifference off the domain). On partial
plans the relation-level condition is strictly stronger: an undecided
state escapes the plan-level clause but not the relation-level one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .structure import EStructure


class PlanError(ValueError):
    """Malformed plan or preference relation."""


@dataclass(frozen=True)
class Plan:
    """A choice of alternative at each state of a domain.

    Attributes:
        alternatives: at least two distinct alternative labels, in
            declaration order.
        choice: state -> chosen alternative; the domain is its key set.
    """

    alternatives: tuple[str, ...]
    choice: Mapping[str, str]

    def __post_init__(self) -> None:
        if len(self.alternatives) < 2:
            raise PlanError("need at least two alternatives")
        if len(set(self.alternatives)) != len(self.alternatives):
            raise PlanError("duplicate alternative labels")
        if not self.choice:
            raise PlanError("plan domain is empty")
        for x, a in self.choice.items():
            if a not in self.alternatives:
                raise PlanError(f"choice {a!r} at {x!r} is not an alternative")

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(self.choice)

    def restricted_to(self, states) -> "Plan":
        kept = {x: a for x, a in self.choice.items() if x in set(states)}
        return Plan(self.alternatives, kept)


@dataclass(frozen=True)
class IsdReport:
    """Outcome of a dominance check.

    violations holds (state, alternative) pairs for plans and
    (state, preferred, dispreferred) triples for relations.
    """

    violations: tuple[tuple, ...]

    @property
    def consistent(self) -> bool:
        return not self.violations


def check_isd_plan(s: EStructure, plan: Plan) -> IsdReport:
    """Dominance check for a plan.

    A state z in the domain is violating when its immediate refinements
    are nonempty, all lie in the domain, all choose one alternative a, and
    the plan picks something else at z. States whose refinements are only
    partly covered by the domain impose no constraint.
    """
    for x in plan.choice:
        if x not in s.states:
            raise PlanError(f"plan state {x!r} is not a state")
    refinements = s.derived.immed_sets
    violations: list[tuple] = []
    for z in s.states:
        if z not in plan.choice:
            continue
        kids = refinements[z]
        if not kids or not all(y in plan.choice for y in kids):
            continue
        picks = {plan.choice[y] for y in kids}
        if len(picks) == 1:
            a = picks.pop()
            if plan.choice[z] != a:
                violations.append((z, a))
    violations.sort(key=lambda v: (s.states.index(v[0]), v[1]))
    return IsdReport(tuple(violations))


@dataclass(frozen=True)
class ConditionalPreferenceRelation:
    """A total preorder on alternatives at each covered state.

    Attributes:
        alternatives: the alternative labels.
        tiers: state -> indifference classes, best first; each state's
            tiers must partition the alternatives.
    """

    alternatives: tuple[str, ...]
    tiers: Mapping[str, tuple[frozenset[str], ...]]

    def __post_init__(self) -> None:
        alts = set(self.alternatives)
        for x, levels in self.tiers.items():
            seen: set[str] = set()
            for level in levels:
                if not level or level & seen:
                    raise PlanError(f"tiers at {x!r} are not disjoint")
                seen |= level
            if seen != alts:
                raise PlanError(f"tiers at {x!r} do not cover alternatives")

    def _level(self, x: str, a: str) -> int:
        for i, level in enumerate(self.tiers[x]):
            if a in level:
                return i
        raise PlanError(f"alternative {a!r} missing from tiers at {x!r}")

    def prefers(self, x: str, a: str, b: str) -> bool:
        """Strict preference for a over b at state x."""
        return self._level(x, a) < self._level(x, b)

    def indifferent(self, x: str, a: str, b: str) -> bool:
        return self._level(x, a) == self._level(x, b)


def induced_relation(s: EStructure, plan: Plan) -> ConditionalPreferenceRelation:
    """The relation a plan stands for: its pick strictly beats everything
    else where defined, total indifference elsewhere."""
    rest = tuple(plan.alternatives)
    tiers: dict[str, tuple[frozenset[str], ...]] = {}
    for x in s.states:
        a = plan.choice.get(x)
        if a is None:
            tiers[x] = (frozenset(rest),)
        else:
            tiers[x] = (frozenset({a}), frozenset(r for r in rest if r != a))
    return ConditionalPreferenceRelation(plan.alternatives, tiers)


def check_isd_relation(
    s: EStructure,
    relation: ConditionalPreferenceRelation | None = None,
    *,
    prefers: Callable[[str, str, str], bool] | None = None,
    alternatives: tuple[str, ...] | None = None,
) -> IsdReport:
    """Dominance check for a state-indexed preference relation.

    Accepts either a ConditionalPreferenceRelation or a bare strict
    preference predicate with its alternative labels. A state z is
    violating for the pair (a, b) when z has immediate refinements, every
    one of them strictly prefers a to b, and z does not.
    """
    if relation is not None:
        for x in s.states:
            if x not in relation.tiers:
                raise PlanError(f"relation does not cover state {x!r}")
        prefers = relation.prefers
        alternatives = relation.alternatives
    elif prefers is None or alternatives is None:
        raise PlanError("pass a relation, or prefers with alternatives")
    refinements = s.derived.immed_sets
    violations: list[tuple] = []
    for z in s.states:
        kids = refinements[z]
        if not kids:
            continue
        for a in alternatives:
            for b in alternatives:
                if a == b:
                    continue
                if all(prefers(y, a, b) for y in kids) and not prefers(z, a, b):
                    violations.append((z, a, b))
    violations.sort(key=lambda v: (s.states.index(v[0]), v[1], v[2]))
    return IsdReport(tuple(violations))

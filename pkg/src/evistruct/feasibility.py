"""Exact decision of plan rationalizability by linear programming.

A plan is rationalizable when some probability weighting of the sample
points and some utility per alternative make the chosen alternative the
strict conditional-expected-utility maximizer at every domain state. With
g[a][w] standing for utility times weight, the requirement becomes a
homogeneous system of strict linear inequalities in g; scaling freedom
turns each strict inequality into "at least 1", and shifting every
alternative's utility equally at a sample point lets g be taken
nonnegative without loss. Feasibility of

    sum over w in e(x) of (g[chosen][w] - g[a][w]) >= 1,   g >= 0

is therefore equivalent to rationalizability, and a uniform weighting
recovers utilities from any feasible g.

The decision runs a phase-1 simplex. By default a floating-point pass
locates the answer and the answer alone is certified in exact rational
arithmetic: a claimed-feasible point is rounded to rationals and rescaled
(soundly, by homogeneity) until every row clears 1 exactly, while a
claimed-infeasible dual is reduced to its support rows and re-derived by
an exact simplex there. If anything fails to certify, a full exact
Fraction simplex with Bland's rule settles the instance. Every returned
verdict, either way, carries an exactly verified witness: a weighting
with utilities, or a nonnegative row combination proving emptiness.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .canonical import build_canonical
from .plans import Plan, PlanError
from .structure import EStructure

_FLOAT_EPS = 1e-7


@dataclass(frozen=True)
class FeasibilityRow:
    """One strict-dominance constraint.

    Attributes:
        state: domain state the constraint comes from.
        alternative: the rejected alternative it compares against.
        coeffs: dense coefficient list over the g variables.
    """

    state: str
    alternative: str
    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class FeasibilitySystem:
    """The linearized system for one structure and plan.

    Column j stands for g[alternatives[j // natoms]][atom j % natoms].
    """

    alternatives: tuple[str, ...]
    atoms: tuple[str, ...]
    rows: tuple[FeasibilityRow, ...]

    @property
    def ncols(self) -> int:
        return len(self.alternatives) * len(self.atoms)

    def column_label(self, j: int) -> tuple[str, str]:
        n = len(self.atoms)
        return self.alternatives[j // n], self.atoms[j % n]


@dataclass(frozen=True)
class FeasibilityResult:
    """Verdict plus an exactly verified witness.

    Feasible: weights is a probability over atom labels and utilities maps
    each alternative to a utility per atom label realizing every strict
    preference. Infeasible: certificate lists (state, alternative,
    multiplier) rows whose nonnegative combination has no positive entry
    in any column yet positive total, so no nonnegative g can satisfy all
    rows.
    """

    feasible: bool
    system: FeasibilitySystem
    weights: Mapping[str, Fraction] | None = None
    utilities: Mapping[str, Mapping[str, Fraction]] | None = None
    certificate: tuple[tuple[str, str, Fraction], ...] | None = None


@dataclass(frozen=True)
class CertificateReport:
    valid: bool
    reason: str | None = None


def build_system(s: EStructure, plan: Plan) -> FeasibilitySystem:
    """Linearize the strict-dominance requirements of a plan."""
    for x in plan.choice:
        if x not in s.states:
            raise PlanError(f"plan state {x!r} is not a state")
    space = build_canonical(s)
    atoms = space.labels
    natoms = len(atoms)
    alts = plan.alternatives
    index = {a: i for i, a in enumerate(alts)}
    rows: list[FeasibilityRow] = []
    for x in s.states:
        if x not in plan.choice:
            continue
        chosen = plan.choice[x]
        event = space.events[x]
        for a in alts:
            if a == chosen:
                continue
            coeffs = [0] * (len(alts) * natoms)
            for w in event:
                coeffs[index[chosen] * natoms + w] += 1
                coeffs[index[a] * natoms + w] -= 1
            rows.append(FeasibilityRow(x, a, tuple(coeffs)))
    return FeasibilitySystem(alts, atoms, tuple(rows))


# ---------------------------------------------------------------- simplex

def _phase1_exact(rows: Sequence[Sequence[int]], ncols: int):
    """Phase-1 simplex in Fractions with Bland's rule.

    Decides {x >= 0 : Ax >= 1}. Returns ("feasible", x) with x exact, or
    ("infeasible", y) with y the exact Farkas duals per row.
    """
    m = len(rows)
    n = ncols
    width = n + 2 * m
    tableau: list[list[Fraction]] = []
    for i, coeffs in enumerate(rows):
        row = [Fraction(c) for c in coeffs]
        row += [Fraction(0)] * (2 * m) + [Fraction(1)]
        row[n + i] = Fraction(-1)
        row[n + m + i] = Fraction(1)
        tableau.append(row)
    basis = list(range(n + m, n + 2 * m))
    red = [Fraction(0)] * (width + 1)
    for j in range(width + 1):
        cj = Fraction(1) if n + m <= j < n + 2 * m else Fraction(0)
        red[j] = cj - sum(tableau[i][j] for i in range(m))

    while True:
        enter = next((j for j in range(width) if red[j] < 0), None)
        if enter is None:
            break
        pivot_row = None
        best = None
        for i in range(m):
            t = tableau[i][enter]
            if t > 0:
                ratio = tableau[i][width] / t
                if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[pivot_row]):
                    best = ratio
                    pivot_row = i
        if pivot_row is None:
            raise RuntimeError("phase-1 objective unbounded")
        _pivot(tableau, red, basis, pivot_row, enter, width)

    objective = -red[width]
    if objective == 0:
        x = [Fraction(0)] * n
        for i, b in enumerate(basis):
            if b < n:
                x[b] = tableau[i][width]
        return "feasible", x
    y = [Fraction(1) - red[n + m + i] for i in range(m)]
    return "infeasible", y


def _pivot(tableau, red, basis, pivot_row, enter, width) -> None:
    prow = tableau[pivot_row]
    pv = prow[enter]
    if pv != 1:
        inv = 1 / pv if isinstance(pv, Fraction) else 1.0 / pv
        tableau[pivot_row] = prow = [v * inv for v in prow]
    for i in range(len(tableau)):
        if i == pivot_row:
            continue
        f = tableau[i][enter]
        if f:
            row = tableau[i]
            tableau[i] = [v - f * p for v, p in zip(row, prow)]
    f = red[enter]
    if f:
        red[:] = [v - f * p for v, p in zip(red, prow)]
    basis[pivot_row] = enter


def _phase1_float(rows: Sequence[Sequence[int]], ncols: int):
    """Floating phase-1, Dantzig entering with a Bland tail.

    Returns (objective, x, y) or None when it stalls; callers treat the
    output as a hint to be certified exactly, never as an answer.
    """
    m = len(rows)
    n = ncols
    width = n + 2 * m
    tableau: list[list[float]] = []
    for i, coeffs in enumerate(rows):
        row = [float(c) for c in coeffs]
        row += [0.0] * (2 * m) + [1.0]
        row[n + i] = -1.0
        row[n + m + i] = 1.0
        tableau.append(row)
    basis = list(range(n + m, n + 2 * m))
    red = [0.0] * (width + 1)
    for j in range(width + 1):
        cj = 1.0 if n + m <= j < n + 2 * m else 0.0
        red[j] = cj - sum(tableau[i][j] for i in range(m))

    cap = 60 + 25 * (m + n)
    stall = 0
    last_obj = float("inf")
    for _ in range(cap):
        if stall < 40:
            enter = min(range(width), key=lambda j: red[j])
            if red[enter] > -_FLOAT_EPS:
                enter = None
        else:
            enter = next((j for j in range(width) if red[j] < -_FLOAT_EPS),
                         None)
        if enter is None:
            break
        pivot_row = None
        best = None
        for i in range(m):
            t = tableau[i][enter]
            if t > 1e-10:
                ratio = tableau[i][width] / t
                if best is None or ratio < best - 1e-12 or (
                        abs(ratio - best) <= 1e-12
                        and basis[i] < basis[pivot_row]):
                    best = ratio
                    pivot_row = i
        if pivot_row is None:
            return None
        _pivot(tableau, red, basis, pivot_row, enter, width)
        obj = -red[width]
        if obj < last_obj - 1e-12:
            last_obj = obj
            stall = 0
        else:
            stall += 1
    else:
        return None

    objective = -red[width]
    x = [0.0] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tableau[i][width]
    y = [1.0 - red[n + m + i] for i in range(m)]
    return objective, x, y


# ------------------------------------------------------- certification

def _row_values(system: FeasibilitySystem,
                x: Sequence[Fraction]) -> list[Fraction]:
    return [sum((Fraction(c) * v for c, v in zip(r.coeffs, x) if c),
                start=Fraction(0))
            for r in system.rows]


def _exactify_feasible(system: FeasibilitySystem, xf) -> list[Fraction] | None:
    """Round a float point to rationals and rescale into the system.

    The system is homogeneous apart from the right-hand side, so any
    rational point with strictly positive row values scales onto one with
    all values at least 1.
    """
    x = [Fraction(0) if v < 1e-9 else Fraction(v).limit_denominator(10 ** 6)
         for v in xf]
    values = _row_values(system, x)
    worst = min(values, default=Fraction(1))
    if worst <= 0:
        return None
    if worst < 1:
        x = [v / worst for v in x]
    return x


def _support_certificate(system: FeasibilitySystem,
                         yf) -> list[Fraction] | None:
    """Re-derive an exact Farkas combination on the float dual's support."""
    support = [i for i, v in enumerate(yf) if v > _FLOAT_EPS]
    if not support:
        return None
    cols = sorted({j for i in support
                   for j, c in enumerate(system.rows[i].coeffs) if c})
    if not cols:
        return None
    sub = [[system.rows[i].coeffs[j] for j in cols] for i in support]
    verdict, payload = _phase1_exact(sub, len(cols))
    if verdict != "infeasible":
        return None
    y = [Fraction(0)] * len(system.rows)
    for i, v in zip(support, payload):
        y[i] = v
    return y


def verify_certificate(system: FeasibilitySystem,
                       result: FeasibilityResult) -> CertificateReport:
    """Exactly re-check the witness carried by a result.

    A feasible result must make every chosen alternative strictly beat
    every rival in weighted utility; an infeasible one must combine rows
    nonnegatively into a vector with no positive column and positive
    total multiplier.
    """
    if result.feasible:
        if result.weights is None or result.utilities is None:
            return CertificateReport(False, "missing witness")
        total = sum(result.weights.values())
        if total != 1:
            return CertificateReport(False, f"weights sum to {total}")
        if any(w <= 0 for w in result.weights.values()):
            return CertificateReport(False, "nonpositive weight")
        for row in system.rows:
            margin = Fraction(0)
            n = len(system.atoms)
            for j, c in enumerate(row.coeffs):
                if c:
                    alt, atom = system.column_label(j)
                    margin += c * result.weights[atom] \
                        * result.utilities[alt][atom]
            if margin <= 0:
                return CertificateReport(
                    False, f"no strict preference at {row.state!r} "
                           f"against {row.alternative!r}")
        return CertificateReport(True)

    if not result.certificate:
        return CertificateReport(False, "missing certificate")
    key = {(r.state, r.alternative): i for i, r in enumerate(system.rows)}
    y = [Fraction(0)] * len(system.rows)
    for state, alt, mult in result.certificate:
        if (state, alt) not in key:
            return CertificateReport(False, f"unknown row ({state}, {alt})")
        if mult < 0:
            return CertificateReport(False, "negative multiplier")
        y[key[state, alt]] += mult
    if sum(y) <= 0:
        return CertificateReport(False, "zero combination")
    for j in range(system.ncols):
        combined = sum(y[i] * r.coeffs[j] for i, r in enumerate(system.rows))
        if combined > 0:
            alt, atom = system.column_label(j)
            return CertificateReport(
                False, f"combination positive on g[{alt}][{atom}]")
    return CertificateReport(True)


def _result_from_point(system: FeasibilitySystem,
                       x: Sequence[Fraction]) -> FeasibilityResult:
    n = len(system.atoms)
    weight = Fraction(1, n)
    weights = {atom: weight for atom in system.atoms}
    utilities = {
        alt: {atom: n * x[i * n + k] for k, atom in enumerate(system.atoms)}
        for i, alt in enumerate(system.alternatives)
    }
    return FeasibilityResult(True, system, weights=weights,
                             utilities=utilities)


def _result_from_duals(system: FeasibilitySystem,
                       y: Sequence[Fraction]) -> FeasibilityResult:
    cert = tuple((r.state, r.alternative, v)
                 for r, v in zip(system.rows, y) if v)
    return FeasibilityResult(False, system, certificate=cert)


def decide_system(system: FeasibilitySystem,
                  method: str = "exact") -> FeasibilityResult:
    """Decide a linearized system and return a verified result.

    The default runs the pure rational simplex: no floating point
    anywhere in the decision path. method="auto" first tries a float
    phase-1 as a search hint, then certifies the suggested witness in
    exact arithmetic (falling back to the pure path when certification
    fails), so its answers carry the same guarantee but arrive faster
    on large systems.
    """
    if method not in ("auto", "exact"):
        raise ValueError(f"unknown method {method!r}")
    coeff_rows = [r.coeffs for r in system.rows]
    if not coeff_rows:
        raise PlanError("system has no constraints; nothing to decide")

    if method == "auto":
        hint = _phase1_float(coeff_rows, system.ncols)
        if hint is not None:
            objective, xf, yf = hint
            if objective < _FLOAT_EPS:
                attempts = ("feasible", "infeasible")
            else:
                attempts = ("infeasible", "feasible")
            for attempt in attempts:
                if attempt == "feasible":
                    x = _exactify_feasible(system, xf)
                    if x is not None:
                        result = _result_from_point(system, x)
                        if verify_certificate(system, result).valid:
                            return result
                else:
                    y = _support_certificate(system, yf)
                    if y is not None:
                        result = _result_from_duals(system, y)
                        if verify_certificate(system, result).valid:
                            return result

    verdict, payload = _phase1_exact(coeff_rows, system.ncols)
    if verdict == "feasible":
        values = _row_values(system, payload)
        if min(values) < 1:
            raise RuntimeError("exact simplex returned an invalid point")
        result = _result_from_point(system, payload)
    else:
        result = _result_from_duals(system, payload)
    report = verify_certificate(system, result)
    if not report.valid:
        raise RuntimeError(f"exact simplex witness failed its own "
                           f"verification: {report.reason}")
    return result


def decide_rationalizable(s: EStructure, plan: Plan,
                          method: str = "exact") -> FeasibilityResult:
    """Decide whether any weighting and utilities rationalize the plan."""
    return decide_system(build_system(s, plan), method)

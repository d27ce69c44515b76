"""Brute-force reference implementations used to pin expected test values.

Everything in this module favors directness over speed and is written
against plain data (state ids as strings, relations as sets of pairs,
rationals as fractions.Fraction). Nothing here imports the package under
test; the test modules cross-check package output against these.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations


# ---------------------------------------------------------------------------
# relation plumbing
# ---------------------------------------------------------------------------

def closure(states, pairs):
    """Reflexive-transitive closure of generator pairs over `states`.

    Returns a set of (x, y) meaning "x is weakly more specific than y".
    """
    states = list(states)
    rel = {(x, x) for x in states}
    rel.update((a, b) for a, b in pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return rel


def sms_pairs(rel):
    return {(x, y) for (x, y) in rel if (y, x) not in rel}


def eqs_pairs(rel):
    return {(x, y) for (x, y) in rel if (y, x) in rel}


def immms_pairs(states, rel):
    strict = sms_pairs(rel)
    out = set()
    for x, z in strict:
        if not any((x, y) in strict and (y, z) in strict for y in states):
            out.add((x, z))
    return out


def children_of(states, rel, z):
    """Y(z): states immediately more specific than z."""
    return {x for (x, zz) in immms_pairs(states, rel) if zz == z}


def maximal_states(states, rel):
    strict = sms_pairs(rel)
    return [x for x in states if not any((w, x) in strict for w in states)]


def incompatible(states, rel, x, y):
    """No common refinement: nothing is weakly more specific than both."""
    return not any((w, x) in rel and (w, y) in rel for w in states)


def check_axioms_oracle(states, root, rel):
    """Direct quantifier evaluation of the five axioms. Returns dict id -> bool."""
    states = list(states)
    strict = sms_pairs(rel)
    # (1) preorder: closure construction guarantees reflexive+transitive;
    # well-foundedness = no sms-cycle, automatic since sms is a strict order
    # on the finite quotient; still check reflexivity/transitivity directly.
    reflexive = all((x, x) in rel for x in states)
    transitive = all(
        (a, d) in rel
        for (a, b) in rel
        for (c, d) in rel
        if b == c
    )
    acyclic = all(not ((x, y) in strict and (y, x) in strict)
                  for x in states for y in states)
    ax1 = reflexive and transitive and acyclic
    # (2) every non-root state strictly more specific than root; >= 2 states
    ax2 = len(states) >= 2 and all(
        (x, root) in strict for x in states if x != root)
    # (3) every sms pair has an immediate step off its specific end
    imm = immms_pairs(states, rel)
    ax3 = all(
        any((x, y) in imm and (y, z) in rel for y in states)
        for (x, z) in strict
    )
    # (4) finite immediate-refinement sets: trivial on finite carriers
    ax4 = all(len(children_of(states, rel, z)) <= len(states) for z in states)
    # (5) separation: not(x wms z) implies some y wms x with y incompat z
    ax5 = all(
        any((y, x) in rel and incompatible(states, rel, y, z) for y in states)
        for x in states for z in states
        if (x, z) not in rel
    )
    return {"preorder": ax1, "root": ax2, "intermediacy": ax3,
            "finite_branching": ax4, "separation": ax5}


def rank_oracle(states, root, rel):
    """Shortest immms-chain length to root, by breadth-first search."""
    imm = immms_pairs(states, rel)
    dist = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for y in frontier:
            for (x, z) in imm:
                if z == y and x not in dist:
                    dist[x] = dist[y] + 1
                    nxt.append(x)
        frontier = nxt
    return dist


def level_set_oracle(states, root, rel, n):
    dist = rank_oracle(states, root, rel)
    return {x for x, d in dist.items() if d <= n}


# ---------------------------------------------------------------------------
# canonical space
# ---------------------------------------------------------------------------

def atoms_oracle(states, rel):
    """Equivalence classes of maximal states, ordered by first declaration."""
    states = list(states)
    eqs = eqs_pairs(rel)
    maxs = maximal_states(states, rel)
    classes = []
    seen = set()
    for m in maxs:
        if m in seen:
            continue
        cls = tuple(x for x in states if (x, m) in eqs and (m, x) in eqs and x in maxs)
        seen.update(cls)
        classes.append(cls)
    return classes


def event_oracle(states, rel, atoms, x):
    """Indices of atoms whose members are weakly more specific than x."""
    return frozenset(
        i for i, cls in enumerate(atoms) if (cls[0], x) in rel)


def field_oracle(event_sets, universe):
    """Field of sets generated by `event_sets` over frozenset `universe`."""
    field = {frozenset(), frozenset(universe)}
    field.update(frozenset(e) for e in event_sets)
    changed = True
    while changed:
        changed = False
        for a in list(field):
            comp = frozenset(universe) - a
            if comp not in field:
                field.add(comp)
                changed = True
            for b in list(field):
                for c in (a | b, a & b):
                    if c not in field:
                        field.add(c)
                        changed = True
    return field


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------

TREE_CONDITIONS = ("t-root", "t-order", "t-parent", "t-immediate",
                   "t-branching", "t-incompat", "t-unbiased")


def check_tree_oracle(states, root, rel, nodes, edges):
    """Direct evaluation of the seven conditions. Returns set of failing ids."""
    nodes = list(nodes)
    edges = set(edges)
    failed = set()
    if root not in nodes or len(nodes) < 2:
        failed.add("t-root")
    order = closure(nodes, edges)           # the tree preorder
    if not all(p in rel for p in order):
        failed.add("t-order")
    strict = sms_pairs(order)
    timm = immms_pairs(nodes, order)
    for x in nodes:
        if x == root:
            continue
        if len([y for (xx, y) in timm if xx == x]) != 1:
            failed.add("t-parent")
    ambient_imm = immms_pairs(states, rel)
    if not all(p in ambient_imm for p in timm):
        failed.add("t-immediate")
    maximal_in_t = {x for x in nodes
                    if not any((w, x) in strict for w in nodes)}
    for x in nodes:
        if x in maximal_in_t:
            continue
        kids = [y for (y, xx) in timm if xx == x]
        if len(kids) < 2:
            failed.add("t-branching")
        for y, z in combinations(kids, 2):
            if not incompatible(states, rel, y, z):
                failed.add("t-incompat")
    ambient_strict = sms_pairs(rel)
    for x in nodes:
        if x in maximal_in_t:
            continue
        kids = [y for (y, xx) in timm if xx == x]
        for z in states:
            if (z, x) not in ambient_strict:
                continue
            ok = any((v, z) in rel and (v, w) in rel
                     for v in states for w in kids)
            if not ok:
                failed.add("t-unbiased")
    return failed


def enumerate_trees_oracle(states, root, rel, limit=None):
    """All (nodes, edges) passing the seven conditions; exhaustive with the
    one sound pruning that parents must be ambient-immms (necessary by
    t-immediate)."""
    states = list(states)
    ambient_imm = immms_pairs(states, rel)
    others = [s for s in states if s != root]
    found = []
    for r in range(1, len(others) + 1):
        for extra in combinations(others, r):
            node_set = [root] + list(extra)
            choices = []
            feasible = True
            for x in extra:
                parents = [y for y in node_set
                           if (x, y) in ambient_imm]
                if not parents:
                    feasible = False
                    break
                choices.append((x, parents))
            if not feasible:
                continue
            def assignments(i, acc):
                if i == len(choices):
                    yield tuple(acc)
                    return
                x, parents = choices[i]
                for p in parents:
                    yield from assignments(i + 1, acc + [(x, p)])
            for edges in assignments(0, []):
                if not check_tree_oracle(states, root, rel, node_set, edges):
                    found.append((tuple(node_set), frozenset(edges)))
                    if limit is not None and len(found) >= limit:
                        return found
    return found


def graph_tree_oracle(nodes, edges, root):
    """(connected, acyclic) of the undirected parent graph, plus a cycle
    witness when one exists."""
    adj = {n: set() for n in nodes}
    for c, p in edges:
        adj[c].add(p)
        adj[p].add(c)
    seen = {root}
    stack = [(root, None)]
    cycle = None
    while stack:
        n, parent = stack.pop()
        for m in adj[n]:
            if m == parent:
                continue
            if m in seen:
                cycle = (n, m)
            else:
                seen.add(m)
                stack.append((m, n))
    connected = seen == set(nodes)
    return connected, cycle is None, cycle


def branches_oracle(nodes, parent, root):
    """Root-to-leaf node lists, one per leaf (node that is nobody's parent)."""
    kids = {n: [] for n in nodes}
    for c, p in parent.items():
        kids[p].append(c)
    leaves = [n for n in nodes if not kids[n]]
    out = []
    for leaf in leaves:
        path = [leaf]
        while path[-1] != root:
            path.append(parent[path[-1]])
        out.append(tuple(reversed(path)))
    return out


def partitions_oracle(nodes, rel_t, root):
    """Partition sequence over the tree's own canonical atoms, by definition:
    block for x at stage n iff rank(x) == n, or rank(x) < n and x maximal."""
    dist = rank_oracle(nodes, root, rel_t)
    atoms = atoms_oracle(nodes, rel_t)
    maxs = set(maximal_states(nodes, rel_t))
    depth = max(dist.values())
    seq = []
    for n in range(depth + 1):
        blocks = set()
        for x in nodes:
            if dist[x] == n or (dist[x] < n and x in maxs):
                blocks.add(event_oracle(nodes, rel_t, atoms, x))
        seq.append(blocks)
    return atoms, seq


def decompositions_oracle(nodes, rel_t, element):
    """All antichains of tree nodes whose events are pairwise disjoint and
    union exactly to `element` (a frozenset of atom indices)."""
    atoms = atoms_oracle(nodes, rel_t)
    evs = {x: event_oracle(nodes, rel_t, atoms, x) for x in nodes}
    nodes = list(nodes)
    out = []
    for r in range(0, len(nodes) + 1):
        for combo in combinations(nodes, r):
            union = frozenset()
            ok = True
            for x in combo:
                if evs[x] & union:
                    ok = False
                    break
                union |= evs[x]
            if ok and union == element:
                out.append(frozenset(combo))
    return out


# ---------------------------------------------------------------------------
# plans and ISD
# ---------------------------------------------------------------------------

def isd_plan_oracle(states, rel, domain, zeta):
    """Violations of the plan consistency rule, by direct evaluation."""
    violations = []
    for z in domain:
        kids = children_of(states, rel, z)
        if not kids or not kids <= set(domain):
            continue
        prescribed = {zeta[x] for x in kids}
        if len(prescribed) == 1:
            a = prescribed.pop()
            if zeta[z] != a:
                violations.append((z, a))
    return violations


def isd_relation_violations(states, rel, alternatives, strict_pref):
    """Violations of the relation consistency rule, by direct evaluation.

    strict_pref(x, a, b) -> bool meaning "a is strictly worse than b at x".
    Returns (z, a, b) triples where strict dominance of b over a on every
    immediate refinement of z fails to propagate to z itself.
    """
    violations = []
    for z in states:
        kids = children_of(states, rel, z)
        if not kids:
            continue
        for a in alternatives:
            for b in alternatives:
                if a == b:
                    continue
                if all(strict_pref(x, a, b) for x in kids):
                    if not strict_pref(z, a, b):
                        violations.append((z, a, b))
    return violations


# ---------------------------------------------------------------------------
# linear feasibility: Fourier-Motzkin elimination over exact rationals
# ---------------------------------------------------------------------------

def fourier_motzkin(rows, nvars):
    """Decide feasibility of a homogeneous system of strict inequalities.

    rows: list of coefficient lists (length nvars, Fractions); each row
    asserts sum(c_i * v_i) > 0. Returns (feasible, multipliers) where, when
    infeasible, multipliers is a nonnegative combination of the ORIGINAL
    rows summing to the zero functional (with at least one positive weight).
    """
    m = len(rows)
    # carry multipliers: each working row is (coeffs, lam) with lam a vector
    # over the original rows such that coeffs == lam . original_rows
    work = [([Fraction(c) for c in row],
             [Fraction(1) if j == i else Fraction(0) for j in range(m)])
            for i, row in enumerate(rows)]

    def scaled(row):
        # normalize to make duplicates comparable; scaling a strict
        # inequality by a positive rational changes nothing
        coeffs, lam = row
        top = max((abs(c) for c in coeffs if c), default=None)
        if top is None:
            return row
        return [c / top for c in coeffs], [v / top for v in lam]

    def dedup(rows_in):
        seen = {}
        for row in map(scaled, rows_in):
            key = tuple(row[0])
            if key not in seen:
                seen[key] = row
        return list(seen.values())

    work = dedup(work)
    remaining = list(range(nvars))
    while remaining:
        zero_row = next((r for r in work if all(c == 0 for c in r[0])), None)
        if zero_row is not None:
            return False, zero_row[1]

        def growth(v):
            p = sum(1 for r in work if r[0][v] > 0)
            n = sum(1 for r in work if r[0][v] < 0)
            return p * n - p - n

        v = min(remaining, key=growth)
        remaining.remove(v)
        pos = [r for r in work if r[0][v] > 0]
        neg = [r for r in work if r[0][v] < 0]
        new = [r for r in work if r[0][v] == 0]
        for cp, lp in pos:
            for cn, ln in neg:
                a, b = cp[v], -cn[v]
                coeffs = [b * cp[k] + a * cn[k] for k in range(nvars)]
                lam = [b * lp[k] + a * ln[k] for k in range(m)]
                new.append((coeffs, lam))
        work = dedup(new)
    for coeffs, lam in work:
        # all variables eliminated: a surviving row claims 0 > 0
        assert all(c == 0 for c in coeffs)
        return False, lam
    return True, None


def margins_oracle(event_of, weights, utilities, domain, zeta, alternatives):
    """Exact strict-preference margins for every (x, a != zeta(x)).

    event_of: state -> iterable of point keys; weights: point -> Fraction;
    utilities: alt -> (point -> Fraction). Returns dict (x, a) -> Fraction
    margin = integral of f_zeta(x) minus integral of f_a over the event.
    """
    out = {}
    for x in domain:
        ev = list(event_of(x))
        for a in alternatives:
            if a == zeta[x]:
                continue
            lhs = sum((weights[p] * utilities[zeta[x]](p) for p in ev),
                      Fraction(0))
            rhs = sum((weights[p] * utilities[a](p) for p in ev), Fraction(0))
            out[(x, a)] = lhs - rhs
    return out


# ---------------------------------------------------------------------------
# constructive rationalization helpers
# ---------------------------------------------------------------------------

def geometric_weights(n):
    """Pre-normalization weights 2*3^-k for k=1..n and the renormalizer."""
    pre = [Fraction(2, 3 ** k) for k in range(1, n + 1)]
    renorm = 1 / (1 - Fraction(1, 3 ** n))
    return pre, [w * renorm for w in pre]


def qualifying_branches(nodes, parent, root, rel, zeta, x, a):
    """All branches through x on which no node weakly more specific than x
    prescribes a. `rel` is the tree's own closed order."""
    out = []
    for br in branches_oracle(nodes, parent, root):
        if x not in br:
            continue
        if all(zeta[y] != a for y in br if (y, x) in rel):
            out.append(br)
    return out

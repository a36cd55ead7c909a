from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Set, Tuple

from ribnet.curve.dual_graph import arithmetic_genus, is_connected
from ribnet.curve.model import PointOnCurve, SpectralCurveData


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"code": v.code, "message": v.message} for v in self.violations],
        }


def sigma_image(S: SpectralCurveData, p: PointOnCurve) -> PointOnCurve:
    """Image of ``p`` under the holomorphic involution of the curve."""
    return S.sigma(p)


def _marked(S: SpectralCurveData) -> Iterable[Tuple[str, PointOnCurve]]:
    for j, e in enumerate(S.P):
        yield f"P{j + 1}", e.point
    for k, q in enumerate(S.Q):
        yield f"Q{k + 1}", q
    for a, r in enumerate(S.R):
        yield f"R{a + 1}", r
    for m, g in enumerate(S.gamma):
        yield f"gamma{m + 1}", g


def validate_data(S: SpectralCurveData) -> ValidationReport:
    """Collect every structural problem of ``S``; never raises."""
    out: List[Violation] = []

    def bad(code: str, message: str) -> None:
        out.append(Violation(code, message))

    if S.n < 1 or S.N < 0 or S.l < 1:
        bad("count-invalid", f"need n>=1, N>=0, l>=1 (got n={S.n}, N={S.N}, l={S.l})")
    if len(S.P) != S.n:
        bad("count-P", f"expected {S.n} P points, got {len(S.P)}")
    if len(S.Q) != S.n + S.N:
        bad("count-Q", f"expected {S.n + S.N} Q points, got {len(S.Q)}")
    if len(S.R) != S.l + S.N:
        bad("count-R", f"expected {S.l + S.N} R points, got {len(S.R)}")
    if len(S.d) != S.l + S.N:
        bad("count-d", f"expected {S.l + S.N} values in d, got {len(S.d)}")
    if len(S.swap_state) != S.l:
        bad("count-swap", f"expected {S.l} swap flags, got {len(S.swap_state)}")

    ids = [c.id for c in S.components]
    dup_ids = [i for i, k in Counter(ids).items() if k > 1]
    if dup_ids:
        bad("component-duplicate", f"duplicate component ids {sorted(dup_ids)}")
    id_set = set(ids)
    structural_ok = not dup_ids and bool(id_set)
    if not id_set:
        bad("component-missing", "curve has no components")

    for c in S.components:
        if c.sigma_partner not in id_set:
            bad("sigma-unknown", f"component {c.id} pairs with unknown id {c.sigma_partner}")
            structural_ok = False
            continue
        partner = next(p for p in S.components if p.id == c.sigma_partner)
        if partner.sigma_partner != c.id:
            bad("sigma-not-involution", f"sigma pairing {c.id}->{c.sigma_partner} is not an involution")
            structural_ok = False
        if c.self_paired and not c.sigma_is_negation:
            bad("sigma-identity", f"sigma fixes every point of component {c.id}")

    points = [p for _, p in _marked(S)]
    points += [b for node in S.nodes for b in (node.branch_a, node.branch_b)]
    for p in points:
        if p.component_id not in id_set:
            bad("unknown-component", f"point {p} lies on unknown component {p.component_id}")
            structural_ok = False

    for label, p in _marked(S):
        if p.num.imag != 0 or p.den.imag != 0:
            bad("not-real", f"{label} has non-real coordinate {p.coordinate}")
    for node in S.nodes:
        for b in (node.branch_a, node.branch_b):
            if b.num.imag != 0:
                bad("not-real", f"node branch {b} has non-real coordinate")
    for j, e in enumerate(S.P):
        if not math.isfinite(e.rho) or e.rho == 0:
            bad("rho-zero", f"P{j + 1} needs a finite nonzero parameter scale")
    if any(not math.isfinite(v) for v in S.d):
        bad("not-real", "d contains non-finite values")

    if not structural_ok:
        return ValidationReport(tuple(out))

    if not is_connected(S):
        bad("disconnected", "dual graph of the curve is not connected")
    else:
        g = arithmetic_genus(S)
        if g < 0:
            bad("genus-negative", f"arithmetic genus {g} < 0")
        expected = g + S.l + S.N - 1
        if len(S.gamma) != expected:
            bad("gamma-degree", f"expected g+l+N-1 = {expected} gamma points, got {len(S.gamma)}")

    for j, e in enumerate(S.P):
        c = S.component(e.point.component_id)
        if not e.point.is_infinite or not (c.self_paired and c.sigma_is_negation):
            bad("P-chart", f"P{j + 1} must sit at infinity of a self-paired negation component")
    p_components = Counter(e.point.component_id for e in S.P)
    for cid, k in p_components.items():
        if k > 1:
            bad("P-chart", f"component {cid} carries {k} essential points")

    for a, r in enumerate(S.R):
        fixed = S.sigma(r) == r
        if a < S.l and fixed:
            bad("R-not-movable", f"R{a + 1} is fixed by sigma")
        if a >= S.l and not fixed:
            bad("R-not-fixed", f"R{a + 1} must be fixed by sigma")
    for k, q in enumerate(S.Q):
        if S.sigma(q) != q:
            bad("Q-not-fixed", f"Q{k + 1} must be fixed by sigma")

    fixed_points: Set[PointOnCurve] = set()
    for c in S.components:
        if c.self_paired and c.sigma_is_negation:
            fixed_points.add(PointOnCurve.at(c.id, 0))
            fixed_points.add(PointOnCurve.infinity(c.id))
    marked_fixed = {e.point for e in S.P} | set(S.Q) | set(S.R[S.l :])
    if fixed_points != marked_fixed:
        extra = sorted(str(p) for p in fixed_points - marked_fixed)
        bad(
            "fixed-points",
            f"sigma has {len(fixed_points)} fixed points, expected exactly the "
            f"{2 * (S.n + S.N)} marked ones; unmarked: {extra}",
        )

    labelled: List[Tuple[str, PointOnCurve]] = list(_marked(S))
    labelled += [(f"sigmaR{a + 1}", S.sigma(S.R[a])) for a in range(min(S.l, len(S.R)))]
    seen: dict[PointOnCurve, str] = {}
    for label, p in labelled:
        if p in seen:
            bad("point-collision", f"{label} coincides with {seen[p]}")
        seen.setdefault(p, label)

    branch_use: Counter[PointOnCurve] = Counter()
    for k, node in enumerate(S.nodes):
        if node.branch_a == node.branch_b:
            bad("node-degenerate", f"node {k} glues a point to itself")
        for b in (node.branch_a, node.branch_b):
            branch_use[b] += 1
            if b in seen:
                bad("node-collision", f"node {k} branch {b} coincides with {seen[b]}")
            elif b in fixed_points:
                bad("node-collision", f"node {k} branch {b} is a sigma-fixed point")
    for b, k in branch_use.items():
        if k > 1:
            bad("node-collision", f"branch {b} is used by {k} nodes")

    node_pairs = {node.branches for node in S.nodes}
    for k, node in enumerate(S.nodes):
        image = frozenset((S.sigma(node.branch_a), S.sigma(node.branch_b)))
        if image not in node_pairs:
            bad("node-sigma", f"sigma image of node {k} is not a node")

    return ValidationReport(tuple(out))

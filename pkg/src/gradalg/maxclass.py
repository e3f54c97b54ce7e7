"""Graded Lie algebras of maximal class: two-step centralizers, constituents,
construction from centralizer sequences, and exhaustive enumeration.

The two-step centralizer at degree i is the kernel of w -> [e_i, w] acting
into degree i+1; sequences list degrees 2, 3, ... in order.
"""

from __future__ import annotations

import concurrent.futures
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import core, formats, fp
from .errors import CapExceeded, DegreeOutOfRange, Inadmissible, NotTwoGenerated

DEFAULT_DEGREE_CAP = 64

Y_VEC = (0, 1)
X_VEC = (1, 0)


@dataclass(frozen=True)
class CentralizerPoint:
    """One entry of a two-step centralizer sequence.

    kind is one of "y", "x", "other", "all", "none", "diamond"; point
    kinds carry normalized projective coordinates (alpha, beta).
    """

    kind: str
    coeffs: Optional[tuple] = None

    @staticmethod
    def from_vector(vec, p: int) -> "CentralizerPoint":
        alpha, beta = core._normalize_point(vec, p)
        if (alpha, beta) == Y_VEC:
            return CentralizerPoint("y", Y_VEC)
        if beta == 0:
            return CentralizerPoint("x", X_VEC)
        return CentralizerPoint("other", (alpha, beta))

    def is_point(self) -> bool:
        return self.kind in ("y", "x", "other")

    def __str__(self):
        if self.is_point():
            return formats.format_point(self.coeffs)
        return self.kind


ALL = CentralizerPoint("all")
NONE = CentralizerPoint("none")
DIAMOND = CentralizerPoint("diamond")
Y = CentralizerPoint("y", Y_VEC)
X = CentralizerPoint("x", X_VEC)


@dataclass(frozen=True)
class ConstituentAnalysis:
    """Constituent decomposition of a centralizer sequence.

    qbar is None in the metabelian case (no second centralizer); no
    first-constituent length is invented then.  trailing counts the final
    y-centralized positions that close no constituent.
    """

    qbar: Optional[int]
    q: Optional[int]
    e: Optional[int]
    lengths: tuple
    trailing: int
    distinct_centralizers: int

    @property
    def metabelian(self) -> bool:
        return self.qbar is None


def centralizer_sequence(a: core.GradedAlgebra):
    """CentralizerPoints for degrees 2.. as far as they are determined.

    Requires canonical orientation for the y/x labels to be meaningful.
    Diamond markers stand in for two-dimensional components; a terminal
    "all" appears when the algebra is terminated.
    """
    if a.dims[0] != 2:
        raise NotTwoGenerated("need dim L_1 = 2")
    seq = []
    limit = a.top if a.terminated else a.top - 1
    for d in range(2, limit + 1):
        dim = a.dims[d - 1]
        if dim == 2:
            seq.append(DIAMOND)
            continue
        if dim != 1:
            break
        ker = core._kernel_point(a, d)
        if ker == "all":
            seq.append(ALL)
            break
        if ker == ():
            seq.append(NONE)
        else:
            seq.append(CentralizerPoint.from_vector(ker, a.p))
    return seq


def _prime_power_exponent(q: int, p: int) -> Optional[int]:
    if q < 1:
        return None
    e = 0
    while q > 1 and q % p == 0:
        q //= p
        e += 1
    return e if q == 1 and e > 0 else None


def constituent_lengths(seq: Sequence[CentralizerPoint], p: int) -> ConstituentAnalysis:
    """Decompose a maximal-class centralizer sequence into constituents.

    A constituent must be closed by a point different from Fy and from the
    whole of L_1, so a trailing y-run before termination is reported
    separately and never as a constituent.
    """
    points = list(seq)
    if points and points[-1].kind == "all":
        points = points[:-1]
    for pt in points:
        if not pt.is_point():
            raise ValueError(f"not a maximal-class sequence entry: {pt}")
    distinct = len({pt.coeffs for pt in points})
    nony = [k for k, pt in enumerate(points) if pt.kind != "y"]
    if not nony:
        return ConstituentAnalysis(None, None, None, (), len(points), distinct)
    qbar = nony[0] + 2
    lengths = tuple(nony[k + 1] - nony[k] for k in range(len(nony) - 1))
    trailing = len(points) - 1 - nony[-1]
    q = qbar // 2 if qbar % 2 == 0 else None
    e = _prime_power_exponent(q, p) if q is not None else None
    if e is None:
        q = None
    return ConstituentAnalysis(qbar, q, e, lengths, trailing, distinct)


def _point_vector(pt) -> tuple:
    if isinstance(pt, CentralizerPoint):
        if not pt.is_point():
            raise ValueError(f"cannot prescribe {pt.kind}")
        return pt.coeffs
    return tuple(pt)


def prescribe_step_with_ext(a: core.GradedAlgebra, ext: core.ExtensionSpace,
                            vec) -> core.GradedAlgebra:
    """Quotient the extension so that C_top = F(alpha x + beta y) exactly.

    Raises Inadmissible at the prescribed position when the component dies
    or the realized centralizer differs from the prescription.
    """
    pos = a.top
    p = a.p
    if ext.universal_dim == 0:
        raise Inadmissible(pos, f"component at degree {pos + 1} is forced to zero")
    row = [0] * (2 * a.dims[a.top - 1])
    row[0], row[1] = vec[0] % p, vec[1] % p
    kill = fp.vmatmul(row, ext.symbol_map, ext.universal_dim, p)
    child = core.quotient_extension(a, ext, [kill])
    if child.terminated or child.dims[-1] != 1:
        raise Inadmissible(pos, f"killing C_{pos} candidate empties degree {pos + 1}")
    ker = core._kernel_point(child, pos)
    if ker in ("all", (), None) or \
            core._normalize_point(ker, p) != core._normalize_point(vec, p):
        raise Inadmissible(pos, f"realized C_{pos} differs from prescription")
    return child


def prescribe_step(a: core.GradedAlgebra, vec) -> core.GradedAlgebra:
    return prescribe_step_with_ext(a, core.extend_degree(a), vec)


def from_centralizers(seq, p: int, terminated: bool = False) -> core.GradedAlgebra:
    """Build the maximal-class algebra with the prescribed sequence.

    seq lists C_2, C_3, ... as CentralizerPoints, (alpha, beta) tuples, or
    a centralizer string; a terminal "all" entry terminates the algebra.
    """
    if isinstance(seq, str):
        seq = formats.parse_centralizers(seq, p)
    entries = list(seq)
    if entries and (entries[-1] == "all" or getattr(entries[-1], "kind", None) == "all"):
        entries = entries[:-1]
        terminated = True
    vecs = [_point_vector(pt) for pt in entries]
    if not vecs:
        a = core.free_start(p)
        return core.terminate(a) if terminated else a
    if core._normalize_point(vecs[0], p) != Y_VEC:
        raise Inadmissible(2, "canonical sequences start with C_2 = Fy")
    a = core.free_start(p)
    for vec in vecs:
        a = prescribe_step(a, vec)
    return core.terminate(a) if terminated else a


def is_metabelian_through(a: core.GradedAlgebra, j: int) -> bool:
    """True iff all brackets of basis elements of degree >= 2 with degree
    sum < j vanish."""
    if j > a.top + 1:
        raise DegreeOutOfRange(f"degree {j} beyond built degree {a.top}")
    for da in range(2, j - 1):
        for db in range(da, j - da):
            for ka in range(a.dims[da - 1]):
                for kb in range(a.dims[db - 1]):
                    if not fp.is_zero(core._pair(a, da, ka, db, kb)):
                        return False
    return True


# ---------------------------------------------------------------------------
# enumeration

def branch_points(p: int, palette: str):
    """Candidate centralizer points in canonical branch order."""
    if palette == "two":
        return [Y_VEC, X_VEC]
    if palette == "all":
        if p > 5:
            raise ValueError("all-point palette is limited to p <= 5")
        return [Y_VEC, X_VEC] + [(1, c) for c in range(1, p)]
    raise ValueError(f"unknown palette {palette!r}")


@dataclass
class EnumerationStats:
    nodes: int = 0
    qbar_multi: Counter = field(default_factory=Counter)
    length_counts: Counter = field(default_factory=Counter)
    law_length_violations: list = field(default_factory=list)
    law_chain_violations: list = field(default_factory=list)

    def merge(self, other: "EnumerationStats"):
        self.nodes += other.nodes
        self.qbar_multi.update(other.qbar_multi)
        self.length_counts.update(other.length_counts)
        self.law_length_violations.extend(other.law_length_violations)
        self.law_chain_violations.extend(other.law_chain_violations)


@dataclass(frozen=True)
class EnumerationLeaf:
    seq: str
    status: str  # "cap" | "dead"
    qbar: Optional[int]
    lengths: tuple
    trailing: int
    distinct: int


@dataclass
class EnumerationReport:
    char: int
    max_degree: int
    palette: str
    leaves: list
    stats: EnumerationStats

    def to_dict(self) -> dict:
        return {
            "char": self.char,
            "max_degree": self.max_degree,
            "palette": self.palette,
            "node_count": self.stats.nodes,
            "leaf_count": len(self.leaves),
            "observed_qbar_multi_constituent": sorted(self.stats.qbar_multi),
            "constituent_length_counts":
                {str(k): v for k, v in sorted(self.stats.length_counts.items())},
            "law_length_violations": list(self.stats.law_length_violations),
            "law_chain_violations": list(self.stats.law_chain_violations),
            "leaves": [
                {"seq": lf.seq, "status": lf.status,
                 "qbar": lf.qbar, "lengths": list(lf.lengths),
                 "trailing": lf.trailing,
                 "distinct_centralizers": lf.distinct}
                for lf in self.leaves
            ],
        }


def _law_checks(p, stats, points, vec, qbar, lengths):
    """Record violations of the length law and the chain law at a node
    that just placed a non-y point."""
    if qbar is None or not lengths:
        return
    stats.qbar_multi[qbar] += 1
    e = _prime_power_exponent(qbar // 2, p) if qbar % 2 == 0 else None
    if e is None:
        stats.law_length_violations.append(
            {"seq": formats.format_centralizers(points + [vec]),
             "why": f"qbar={qbar}"})
        return
    allowed = {qbar} | {qbar - p ** s for s in range(e + 1)}
    if any(h not in allowed for h in lengths):
        stats.law_length_violations.append(
            {"seq": formats.format_centralizers(points + [vec]),
             "why": f"lengths={list(lengths)}"})
    if lengths[0] == qbar - 1:
        bad_nonfinal = any(h not in (qbar, qbar - 1) for h in lengths[:-1])
        bad_final = lengths[-1] < qbar - 1 and \
            (len(lengths) < 2 or lengths[-2] != qbar - 1)
        if bad_nonfinal or bad_final:
            stats.law_chain_violations.append(
                {"seq": formats.format_centralizers(points + [vec]),
                 "why": f"lengths={list(lengths)}"})


@dataclass
class _EnumCtx:
    p: int
    max_degree: int
    vecs: list
    stats: EnumerationStats
    events: list
    split_depth: Optional[int] = None


def _emit_leaf(ctx, points, status, qbar, lengths, last_nony):
    trailing = len(points) + 1 - last_nony if last_nony else len(points)
    leaf = EnumerationLeaf(formats.format_centralizers(points), status,
                           qbar, tuple(lengths), trailing,
                           len(set(points)))
    ctx.events.append(("leaf", leaf))
    if lengths:
        ctx.stats.length_counts.update(lengths)


def _dfs(a, points, ctx, qbar, lengths, last_nony):
    if ctx.split_depth is not None and a.top >= ctx.split_depth \
            and a.top < ctx.max_degree:
        ctx.events.append(("task", (list(points), qbar, list(lengths), last_nony)))
        return
    ctx.stats.nodes += 1
    if a.top >= ctx.max_degree:
        _emit_leaf(ctx, points, "cap", qbar, lengths, last_nony)
        return
    ext = core.extend_degree(a)
    if ext.universal_dim == 0:
        _emit_leaf(ctx, points, "dead", qbar, lengths, last_nony)
        return
    any_child = False
    pos = a.top
    choices = ctx.vecs if points else [Y_VEC]
    for vec in choices:
        try:
            child = prescribe_step_with_ext(a, ext, vec)
        except Inadmissible:
            continue
        any_child = True
        if vec == Y_VEC:
            state = (qbar, lengths, last_nony)
        elif qbar is None:
            state = (pos, lengths, pos)
        else:
            state = (qbar, lengths + [pos - last_nony], pos)
        if vec != Y_VEC:
            _law_checks(ctx.p, ctx.stats, points, vec, state[0], state[1])
        _dfs(child, points + [vec], ctx, *state)
    if not any_child:
        _emit_leaf(ctx, points, "dead", qbar, lengths, last_nony)


def enumerate_maxclass(p: int, max_degree: int, palette: str = "two",
                       workers: int = 1,
                       cap: int = DEFAULT_DEGREE_CAP) -> EnumerationReport:
    """Depth-first enumeration of admissible centralizer prefixes.

    Returns every maximal prefix (the leaves of the choice tree) plus law
    statistics gathered at every node.  Output order is the canonical
    branch order (y < x < other by coefficient) regardless of workers.
    """
    fp.check_prime(p)
    if max_degree > cap:
        raise CapExceeded(f"max_degree {max_degree} exceeds cap {cap}")
    vecs = branch_points(p, palette)
    stats = EnumerationStats()
    split = None if workers <= 1 else min(max_degree, 14)
    ctx = _EnumCtx(p, max_degree, vecs, stats, [], split)
    _dfs(core.free_start(p), [], ctx, None, [], 0)
    leaves: list = []
    if split is None:
        for kind, payload in ctx.events:
            leaves.append(payload)
        return EnumerationReport(p, max_degree, palette, leaves, stats)

    tasks = [(k, ev[1]) for k, ev in enumerate(ctx.events) if ev[0] == "task"]
    results = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futs = {pool.submit(_enum_worker, (p, max_degree, palette) + tuple(state)): k
                for k, state in tasks}
        for fut in concurrent.futures.as_completed(futs):
            results[futs[fut]] = fut.result()
    for k, (kind, payload) in enumerate(ctx.events):
        if kind == "leaf":
            leaves.append(payload)
        else:
            sub_leaves, sub_stats = results[k]
            leaves.extend(sub_leaves)
            stats.merge(sub_stats)
    return EnumerationReport(p, max_degree, palette, leaves, stats)


def _enum_worker(args):
    p, max_degree, palette, points, qbar, lengths, last_nony = args
    vecs = branch_points(p, palette)
    a = from_centralizers([tuple(v) for v in points], p)
    ctx = _EnumCtx(p, max_degree, vecs, EnumerationStats(), [])
    _dfs(a, [tuple(v) for v in points], ctx, qbar, list(lengths), last_nony)
    return [payload for kind, payload in ctx.events], ctx.stats

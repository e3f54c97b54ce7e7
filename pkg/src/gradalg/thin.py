"""Thin-algebra analysis: covering property, diamond detection and typing,
the maximal-class quotient at the second diamond, the clause-by-clause
structure verifier, and the constrained search for thin algebras.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Optional

from . import core, formats, fp, maxclass
from .errors import (CapExceeded, DegreeOutOfRange, Inadmissible,
                     NoSecondDiamond)

DEFAULT_DEGREE_CAP = 64

CLAUSE_IDS = ("main.1", "main.2", "main.3", "thin.4", "thin.5", "thin.6",
              "odd.metabelian", "cor.degree-form")


def projective_vectors(dim: int, p: int):
    """One representative per projective point of F_p^dim, fixed order."""
    if dim == 1:
        return [(1,)]
    if dim == 2:
        return [(1, c) for c in range(p)] + [(0, 1)]
    out = []
    for vec in product(range(p), repeat=dim):
        lead = next((c for c in vec if c), None)
        if lead == 1:
            out.append(vec)
    return out


def check_covering(a: core.GradedAlgebra, through: int):
    """None if [u, L_1] = L_{i+1} for every nonzero u in L_i, i <= through;
    otherwise the first failing (degree, coeffs)."""
    limit = a.top if a.terminated else a.top - 1
    if through > limit:
        raise DegreeOutOfRange(f"covering check through {through} needs "
                               f"degree {through + 1} to be determined")
    for i in range(1, through + 1):
        target = a.dims[i] if i < a.top else 0
        if target == 0:
            continue
        if a.dims[i - 1] == 1:
            rows = [a.adx[i - 1][0], a.ady[i - 1][0]]
            if fp.rank(rows, target, a.p) != target:
                return (i, (1,))
            continue
        for u in projective_vectors(a.dims[i - 1], a.p):
            rows = [fp.vmatmul(u, a.adx[i - 1], target, a.p),
                    fp.vmatmul(u, a.ady[i - 1], target, a.p)]
            if fp.rank(rows, target, a.p) != target:
                return (i, u)
    return None


# ---------------------------------------------------------------------------
# diamonds

@dataclass(frozen=True)
class DiamondReport:
    degree: int
    genuine: bool
    mu: object  # int | "inf" | "fake-0" | "fake-1" | "untyped"
    ambiguous: bool = False
    witness: dict = field(default_factory=dict)

    def mu_str(self) -> str:
        return str(self.mu)


def _row_apply(a, row, d, letter):
    return core._apply_letter(a, row, d, letter, sym=False)


def _solve_mu(a, wxy, wyx, p):
    """mu with (1 - mu)[wxy] = mu[wyx], or "inf", or None."""
    s = fp.vadd(wxy, wyx, p)
    if fp.is_zero(s):
        return ("inf", False) if not fp.is_zero(wxy) else (None, False)
    k = next(i for i, c in enumerate(s) if c)
    mu = wxy[k] * fp.inv_mod(s[k], p) % p
    if fp.vscale(s, mu, p) != tuple(wxy):
        return (None, False)
    return (mu, False)


def diamond_scan(a: core.GradedAlgebra):
    """DiamondReports for genuine and fake diamonds, in degree order.

    Typing needs the next component to be nonzero, so the top degree of an
    unterminated algebra is reported untyped when two-dimensional and
    skipped for fake detection.  A fake type-0 reading immediately after a
    type-1 diamond is suppressed (type one is preferred).
    """
    if a.top >= 3 and a.dims[2] != 1:
        raise ValueError("diamond typing needs dim L_3 = 1")
    p = a.p
    reports = []
    fake1_at = set()
    for h in range(3, a.top + 1):
        dim_h = a.dims[h - 1]
        if a.dims[h - 2] != 1:
            if dim_h == 2:
                reports.append(DiamondReport(h, True, "untyped", witness={
                    "reason": "preceding component not one-dimensional"}))
            continue
        next_known = h + 1 <= a.top
        wx = a.adx[h - 2][0]
        wy = a.ady[h - 2][0]
        if dim_h == 2:
            if not next_known:
                reports.append(DiamondReport(h, True, "untyped", witness={
                    "reason": "next component not built"}))
                continue
            wxx = _row_apply(a, wx, h, core.X)
            wyy = _row_apply(a, wy, h, core.Y)
            wxy = _row_apply(a, wx, h, core.Y)
            wyx = _row_apply(a, wy, h, core.X)
            wit = {"wxx": list(wxx), "wyy": list(wyy),
                   "wxy": list(wxy), "wyx": list(wyx)}
            if not (fp.is_zero(wxx) and fp.is_zero(wyy)):
                reports.append(DiamondReport(h, True, "untyped", witness=wit))
                continue
            mu, amb = _solve_mu(a, wxy, wyx, p)
            reports.append(DiamondReport(h, True,
                                         "untyped" if mu is None else mu,
                                         amb, wit))
            continue
        if dim_h != 1 or not next_known:
            continue
        if fp.is_zero(wy) and not fp.is_zero(wx):
            wxx = _row_apply(a, wx, h, core.X)
            if fp.is_zero(wxx):
                reports.append(DiamondReport(h, False, "fake-1", witness={
                    "wy": list(wy), "wxx": list(wxx)}))
                fake1_at.add(h)
                continue
        if fp.is_zero(wx) and not fp.is_zero(wy) and (h - 1) not in fake1_at:
            wyy = _row_apply(a, wy, h, core.Y)
            if fp.is_zero(wyy):
                reports.append(DiamondReport(h, False, "fake-0", witness={
                    "wx": list(wx), "wyy": list(wyy)}))
    return reports


def second_diamond(a: core.GradedAlgebra) -> Optional[int]:
    for d in range(2, a.top + 1):
        if a.dims[d - 1] == 2:
            return d
    return None


def build_M_quotient(l: core.GradedAlgebra) -> core.GradedAlgebra:
    """The maximal-class quotient of dimension k+1 killing [L_{k-1} x]."""
    k = second_diamond(l)
    if k is None:
        raise NoSecondDiamond("no two-dimensional component past degree 1")
    if l.top < k + 1:
        raise DegreeOutOfRange(f"need the algebra built through degree {k + 1}")
    if l.dims[k - 2] != 1:
        raise NoSecondDiamond("second diamond must follow a one-dimensional component")
    p = l.p
    kill = l.adx[k - 2][0]
    if fp.is_zero(kill):
        raise NoSecondDiamond("[L_{k-1} x] vanishes; not a genuine diamond step")
    red, pivots = fp.rref([kill], 2, p)
    pivot = pivots[0]
    survivor = 1 - pivot
    proj = []
    for c in range(2):
        if c == pivot:
            proj.append((-red[0][survivor] % p,))
        else:
            proj.append((1,))
    adx = list(l.adx[:k - 2])
    ady = list(l.ady[:k - 2])
    adx.append(tuple(fp.vmatmul(row, proj, 1, p) for row in l.adx[k - 2]))
    ady.append(tuple(fp.vmatmul(row, proj, 1, p) for row in l.ady[k - 2]))
    defs = list(l.defs[:k - 2]) + [(l.defs[k - 2][survivor],)]
    return core.GradedAlgebra(p, l.dims[:k - 1] + (1,), adx, ady, defs,
                              terminated=True)


# ---------------------------------------------------------------------------
# theorem verifier

@dataclass(frozen=True)
class Clause:
    id: str
    status: str  # "pass" | "fail" | "not_applicable" | "open"
    witness: dict = field(default_factory=dict)


@dataclass
class TheoremReport:
    k: Optional[int]
    qbar: Optional[int]
    r: Optional[int]
    n: Optional[int]
    clauses: list
    dim_bound_checked: dict
    caveats: list

    def to_dict(self) -> dict:
        return {
            "k": self.k, "qbar": self.qbar, "r": self.r, "n": self.n,
            "clauses": [{"id": c.id, "status": c.status, "witness": c.witness}
                        for c in self.clauses],
            "dim_bound_checked": self.dim_bound_checked,
            "caveats": list(self.caveats),
        }

    def failing(self):
        return [c for c in self.clauses if c.status == "fail"]


def _is_power_of(n: int, base: int) -> bool:
    if n < 1:
        return False
    while n % base == 0:
        n //= base
    return n == 1


def verify_structure_theorem(l: core.GradedAlgebra) -> TheoremReport:
    """Clause-by-clause check of the second-diamond structure statements.

    Hypothesis failures and unbuilt ranges short-circuit to
    not_applicable; the unresolved first-constituent-4 subcase with second
    constituent of length 2 is reported open.
    """
    p = l.p
    top = l.top
    caveats = []
    clauses = {cid: Clause(cid, "not_applicable") for cid in CLAUSE_IDS}
    k = second_diamond(l)
    bound = {}

    def report(qbar=None, r=None, n=None):
        ordered = [clauses[cid] for cid in CLAUSE_IDS]
        return TheoremReport(k, qbar, r, n, ordered, bound, caveats)

    if k is None:
        caveats.append("no genuine second diamond: maximal class "
                       "(thin by convention excluded)")
        return report()
    cov = check_covering(l, top if l.terminated else top - 1)
    if cov is not None:
        caveats.append(f"covering property fails at degree {cov[0]}")
        return report()

    # first two-step centralizers below the diamond
    seq = maxclass.centralizer_sequence(l)
    prek = [pt for d, pt in zip(range(2, 2 + len(seq)), seq) if d < k - 1]
    qbar = None
    for d, pt in zip(range(2, 2 + len(prek)), prek):
        if pt.is_point() and pt.kind != "y":
            qbar = d
            break

    if p == 2:
        num, den = 4 * k + 1, 3
        bound.update({"expr": "(4k+1)/3", "num": num, "den": den,
                      "built_degree": top, "satisfied": 3 * top > num})
        if not bound["satisfied"]:
            caveats.append(f"built degree {top} does not exceed (4k+1)/3")
            return report(qbar)
        if maxclass.is_metabelian_through(l, k):
            caveats.append("L/L^k metabelian: not the exceptional case")
            return report(qbar)
        if top < 5 or not maxclass.is_metabelian_through(l, 6):
            caveats.append("L/L^6 not metabelian (qbar <= 4 or too small)")
            if qbar != 4:
                return report(qbar)
        if qbar is None:
            caveats.append("no second centralizer below the diamond")
            return report(qbar)
        M = build_M_quotient(l)
        ana = maxclass.constituent_lengths(maxclass.centralizer_sequence(M), p)
        if qbar == 4:
            caveats.append("first constituent has length 4: proof covers "
                           "only the (4,3) prefix; (4,2) is open")
            if ana.lengths and ana.lengths[0] == 2:
                for cid in ("main.1", "main.2", "main.3",
                            "thin.4", "thin.5", "thin.6"):
                    clauses[cid] = Clause(cid, "open",
                                          {"reason": "(4,2) prefix unresolved"})
                return report(qbar)
        # main.1: exactly two distinct two-step centralizers in M
        ok = ana.distinct_centralizers == 2
        clauses["main.1"] = Clause("main.1", "pass" if ok else "fail",
                                   {"distinct": ana.distinct_centralizers})
        # main.2: constituent length sequence of M
        r = None
        lengths = ana.lengths
        if ana.qbar == qbar:
            if lengths == (qbar - 2,):
                r = 1
            elif (len(lengths) >= 2 and lengths[0] == qbar - 1
                  and lengths[-1] == qbar - 1
                  and all(h == qbar for h in lengths[1:-1])):
                cand = (len(lengths) + 1) // 2  # 2r - 3 middle entries
                if len(lengths) == 2 * cand - 1 and _is_power_of(cand, 2):
                    r = cand
        ok = r is not None
        clauses["main.2"] = Clause(
            "main.2", "pass" if ok else "fail",
            {"qbar": ana.qbar, "lengths": list(lengths), "r": r})
        # main.3: k + 1 a power of two
        ok3 = _is_power_of(k + 1, 2)
        clauses["main.3"] = Clause("main.3", "pass" if ok3 else "fail",
                                   {"k_plus_1": k + 1})
        n = 2 * r if r else None
        if r is not None and k + 1 != 2 * r * qbar:
            caveats.append("constituent pattern inconsistent with k")
        # thin.4: components strictly between k and 3(k-1)/2 centralized
        # by x or y
        lo, hi_num = k + 1, 3 * (k - 1)  # i < hi_num/2
        failures = []
        checked_to = None
        for i in range(lo, top):
            if 2 * i >= hi_num:
                break
            checked_to = i
            if l.dims[i - 1] != 1 or not (
                    fp.is_zero(l.adx[i - 1][0]) or fp.is_zero(l.ady[i - 1][0])):
                failures.append(i)
        full = checked_to is not None and 2 * (checked_to + 1) >= hi_num
        if failures:
            clauses["thin.4"] = Clause("thin.4", "fail", {"degrees": failures})
        elif full:
            clauses["thin.4"] = Clause("thin.4", "pass",
                                       {"range": [lo, (hi_num - 1) // 2]})
        else:
            clauses["thin.4"] = Clause(
                "thin.4", "not_applicable",
                {"missing": f"degrees {max(lo, top)}..{(hi_num - 1) // 2} not built"})
        # thin.5: fake type-1 diamonds at m*qbar - 1 (1 < m < 2r) and
        # m*qbar - 2 (2r < m < 3r), and nowhere else in range
        if r is None:
            clauses["thin.5"] = Clause("thin.5", "not_applicable",
                                       {"reason": "pattern clause failed"})
            clauses["thin.6"] = Clause("thin.6", "not_applicable",
                                       {"reason": "pattern clause failed"})
        else:
            scan = diamond_scan(l)
            expected = {m * qbar - 1 for m in range(2, 2 * r)}
            expected |= {m * qbar - 2 for m in range(2 * r + 1, 3 * r)}
            hi = 3 * r * qbar - 3  # strictly before the genuine-diamond slot
            scan_hi = min(top - 1, hi)
            fakes = {rep.degree for rep in scan if rep.mu == "fake-1"}
            window = set(range(qbar + 1, scan_hi + 1)) - {k}
            mismatch = sorted((fakes & window) ^ (expected & window))
            if mismatch:
                clauses["thin.5"] = Clause("thin.5", "fail",
                                           {"mismatch_degrees": mismatch})
            elif scan_hi >= hi:
                clauses["thin.5"] = Clause(
                    "thin.5", "pass",
                    {"expected": sorted(expected), "window_top": scan_hi})
            else:
                clauses["thin.5"] = Clause(
                    "thin.5", "not_applicable",
                    {"checked_to": scan_hi,
                     "missing": f"degrees {scan_hi + 1}..{hi} not built",
                     "expected": sorted(expected)})
            if r == 1:
                clauses["thin.6"] = Clause("thin.6", "not_applicable",
                                           {"reason": "r = 1"})
            else:
                mu = next((rep.mu for rep in scan
                           if rep.degree == k and rep.genuine), None)
                ok6 = mu == "inf"
                clauses["thin.6"] = Clause("thin.6",
                                           "pass" if ok6 else "fail",
                                           {"mu": str(mu)})
        return report(qbar, r, n)

    # odd characteristic
    num, den = 4 * k - 3, 3  # top > 4k/3 - 1  <=>  3 top > 4k - 3
    bound.update({"expr": "4k/3-1", "num": num, "den": den,
                  "built_degree": top, "satisfied": 3 * top > num})
    if not bound["satisfied"]:
        caveats.append(f"built degree {top} does not exceed 4k/3-1")
        return report(qbar)
    meta = maxclass.is_metabelian_through(l, k)
    clauses["odd.metabelian"] = Clause("odd.metabelian",
                                       "pass" if meta else "fail", {})
    form = k % 2 == 1 and (k in (3, 5) or _is_power_of(k, p)
                           or ((k + 1) % 2 == 0 and _is_power_of((k + 1) // 2, p)))
    clauses["cor.degree-form"] = Clause("cor.degree-form",
                                        "pass" if form else "fail", {"k": k})
    return report(qbar)


# ---------------------------------------------------------------------------
# search

@dataclass
class SearchResult:
    status: str  # "found" | "unsatisfiable"
    witnesses: list
    nodes: int
    deepest: int

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "nodes": self.nodes,
            "deepest_degree": self.deepest,
            "witnesses": [formats.algebra_to_dict(w) for w in self.witnesses],
        }


def _kill_subspaces(u: int, kill_dim: int, p: int):
    """All subspaces of F_p^u of the given dimension, as canonical reduced
    row sets, in a fixed lexicographic order."""
    if kill_dim == 0:
        yield []
        return
    for pivots in combinations(range(u), kill_dim):
        freepos = [(r, c) for r in range(kill_dim)
                   for c in range(pivots[r] + 1, u) if c not in pivots]
        for vals in product(range(p), repeat=len(freepos)):
            rows = [[0] * u for _ in range(kill_dim)]
            for r in range(kill_dim):
                rows[r][pivots[r]] = 1
            for (r, c), v in zip(freepos, vals):
                rows[r][c] = v
            yield [tuple(row) for row in rows]


def _covering_step_ok(child, p):
    """Covering at the degree below the newly added component."""
    t = child.top - 1
    dim_t = child.dims[t - 1]
    if dim_t == 1:
        return True
    target = child.dims[t]
    for u in projective_vectors(dim_t, p):
        rows = [fp.vmatmul(u, child.adx[t - 1], target, p),
                fp.vmatmul(u, child.ady[t - 1], target, p)]
        if fp.rank(rows, target, p) != target:
            return False
    return True


class _SearchCtx:
    def __init__(self, p, target_k, max_degree, qbar, branch_limit, palette):
        self.p = p
        self.target_k = target_k
        self.max_degree = max_degree
        self.qbar = qbar
        self.branch_limit = branch_limit
        self.vecs = maxclass.branch_points(p, palette)
        self.nodes = 0
        self.deepest = 0
        self.witnesses = []
        self.tasks = None  # set to a list to collect split tasks
        self.split_depth = None

    def bump(self, top):
        self.nodes += 1
        if top > self.deepest:
            self.deepest = top
        if self.nodes > self.branch_limit:
            raise CapExceeded(f"branch limit {self.branch_limit} exceeded")


def _search_dfs(a, ctx, points):
    if ctx.split_depth is not None and a.top >= ctx.split_depth \
            and a.top < ctx.max_degree:
        ctx.tasks.append(list(points))
        return
    ctx.bump(a.top)
    t = a.top
    if t >= ctx.max_degree:
        ctx.witnesses.append(a)
        return
    ext = core.extend_degree(a)
    if ext.universal_dim == 0:
        return
    if t + 1 < ctx.target_k:
        if ctx.qbar is not None and t < ctx.qbar:
            choices = [maxclass.Y_VEC]
        elif ctx.qbar is not None and t == ctx.qbar:
            choices = [maxclass.X_VEC]
        else:
            choices = ctx.vecs if points else [maxclass.Y_VEC]
        for vec in choices:
            try:
                child = maxclass.prescribe_step_with_ext(a, ext, vec)
            except Inadmissible:
                continue
            _search_dfs(child, ctx, points + [vec])
        return
    if t + 1 == ctx.target_k:
        if ext.universal_dim != 2:
            return
        child = core.impose_quotient(a, ext, "full")
        _search_dfs(child, ctx, points)
        return
    u = ext.universal_dim
    for d_new in (1, 2):
        kd = u - d_new
        if kd < 0:
            continue
        for kills in _kill_subspaces(u, kd, ctx.p):
            child = core.quotient_extension(a, ext, kills)
            if child.terminated:
                continue
            if _covering_step_ok(child, ctx.p):
                _search_dfs(child, ctx, points)


def thin_search(p: int, target_k: int, max_degree: int,
                qbar: Optional[int] = None, branch_limit: int = 100000,
                workers: int = 1, cap: int = DEFAULT_DEGREE_CAP) -> SearchResult:
    """Depth-first search for thin algebras with prescribed second diamond.

    Components are kept one-dimensional below target_k (with C_qbar = Fx
    when qbar is given), two-dimensional at target_k, and of dimension one
    or two afterwards; the covering property prunes every step.  Emits
    every consistent algebra reaching max_degree, in canonical order.
    With workers > 1 the branch limit applies per pre-diamond subtree.
    """
    fp.check_prime(p)
    if max_degree > cap:
        raise CapExceeded(f"max_degree {max_degree} exceeds cap {cap}")
    if target_k < 3 or target_k > max_degree:
        raise ValueError("need 3 <= target_k <= max_degree")
    if qbar is not None and (qbar % 2 or qbar >= target_k):
        raise ValueError("qbar must be even and below target_k")
    palette = "all" if p <= 5 else "two"
    ctx = _SearchCtx(p, target_k, max_degree, qbar, branch_limit, palette)
    if workers > 1:
        ctx.split_depth = min(target_k - 1, 12)
        ctx.tasks = []
    _search_dfs(core.free_start(p), ctx, [])
    witnesses = list(ctx.witnesses)
    nodes, deepest = ctx.nodes, ctx.deepest
    if ctx.tasks:
        args = [(p, target_k, max_degree, qbar, branch_limit, palette,
                 [tuple(v) for v in pts]) for pts in ctx.tasks]
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_search_worker, args))
        for sub_wits, sub_nodes, sub_deepest in results:
            witnesses.extend(formats.algebra_from_dict(d) for d in sub_wits)
            nodes += sub_nodes
            deepest = max(deepest, sub_deepest)
    status = "found" if witnesses else "unsatisfiable"
    return SearchResult(status, witnesses, nodes, deepest)


def _search_worker(args):
    p, target_k, max_degree, qbar, branch_limit, palette, points = args
    a = maxclass.from_centralizers(list(points), p)
    ctx = _SearchCtx(p, target_k, max_degree, qbar, branch_limit, palette)
    ctx.deepest = a.top
    _search_dfs(a, ctx, list(points))
    return ([formats.algebra_to_dict(w) for w in ctx.witnesses],
            ctx.nodes, ctx.deepest)

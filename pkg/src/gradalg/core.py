"""Graded algebra store and the degree-by-degree extension engine.

A ``GradedAlgebra`` holds a 2-generated graded Lie algebra over F_p as
per-degree adjoint matrices for the two canonical generators, plus one
*definition* per basis element of degree >= 2 (the parent bracket that
produced it).  All bracket values are recovered by collection:

    [u, [w, z]] = [[u, w], z] - [[u, z], w]

recursing on the second argument's definition until it has degree one.

Extending by one degree builds the universal next component: the span of
formal symbols (e, x), (e, y) over the current top basis, modulo every
relation obtained by expanding, through the definitions, the alternating
law [u, u] = 0, antisymmetry [u, v] + [v, u] = 0, and the Jacobi identity
with a generator entry.  Any further quotient of that space is again a
consistent one-degree extension.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import fp
from .errors import (DegreeOutOfRange, DimensionTooLarge, InconsistentBase,
                     NotTwoGenerated)

X, Y = 0, 1
LETTERS = ("x", "y")
LETTER_INDEX = {"x": X, "y": Y}


class GradedAlgebra:
    """Degree-indexed components with adjoint action of the generators.

    Fields:
      p           characteristic
      dims        dims[d-1] = dim L_d; dims[0] = 2
      adx, ady    adx[d-1] is the matrix of [., x]: L_d -> L_{d+1}
      defs        defs[d-2][b] = (parent index, letter index) with
                  [e_parent, letter] equal to basis element b of degree d
      terminated  True when L_{top+1} is the zero component by construction

    Values are immutable once returned; extension produces a new value
    sharing all lower-degree data (and the bracket cache) with its parent.
    """

    __slots__ = ("p", "dims", "adx", "ady", "defs", "terminated", "meta",
                 "_chain", "_pairs")

    def __init__(self, p, dims, adx, ady, defs, terminated=False,
                 parent=None, chain=None, meta=None):
        self.p = fp.check_prime(p)
        self.dims = tuple(dims)
        self.adx = tuple(adx)
        self.ady = tuple(ady)
        self.defs = tuple(defs)
        self.terminated = bool(terminated)
        self.meta = dict(meta or {})
        self._pairs = {}
        if chain is not None:
            self._chain = chain
        elif parent is not None and len(parent.dims) == len(self.dims) - 1:
            self._chain = parent._chain + (self,)
        else:
            self._chain = (self,) * max(len(self.dims) - 1, 1)

    @property
    def top(self) -> int:
        return len(self.dims)

    def dim_at(self, degree: int) -> int:
        if degree < 1:
            return 0
        if degree <= self.top:
            return self.dims[degree - 1]
        if self.terminated:
            return 0
        raise DegreeOutOfRange(f"degree {degree} beyond built degree {self.top}")

    def ad(self, letter: int, degree: int):
        """Matrix of [., letter]: L_degree -> L_{degree+1}."""
        return (self.adx if letter == X else self.ady)[degree - 1]

    def __repr__(self):
        tail = ", terminated" if self.terminated else ""
        return f"GradedAlgebra(p={self.p}, dims={list(self.dims)}{tail})"


@dataclass(frozen=True)
class HomogeneousElement:
    degree: int
    coeffs: tuple

    def is_zero(self) -> bool:
        return fp.is_zero(self.coeffs)


@dataclass(frozen=True)
class ExtensionSpace:
    """Universal next component at a degree-extension step.

    symbol_map expresses each formal symbol 2*e + letter in the chosen
    basis of the universal component (the non-pivot symbols of the
    reduced relation matrix, in symbol order).
    """

    base_degree: int
    universal_dim: int
    symbol_map: tuple
    relations: fp.RowMatrix
    nonpivot_symbols: tuple


def free_start(p: int) -> GradedAlgebra:
    """The algebra with dims [2, 1] and e_2 = [x, y]."""
    fp.check_prime(p)
    adx1 = ((0,), ((p - 1) % p,))  # [x, x] = 0, [y, x] = -e_2
    ady1 = ((1,), (0,))
    defs2 = ((0, Y),)
    return GradedAlgebra(p, (2, 1), (adx1,), (ady1,), (defs2,))


# ---------------------------------------------------------------------------
# collection

def _width(alg: GradedAlgebra, t: int) -> int:
    if t <= alg.top:
        return alg.dims[t - 1]
    return 2 * alg.dims[alg.top - 1]


def _apply_letter(alg, row, d, letter, sym):
    """Bracket a degree-d coefficient row with a generator."""
    if d + 1 <= alg.top:
        return fp.vmatmul(row, alg.ad(letter, d), alg.dims[d], alg.p)
    if not sym or d != alg.top:
        raise DegreeOutOfRange(f"degree {d + 1} beyond built degree {alg.top}")
    out = [0] * (2 * alg.dims[d - 1])
    for a, c in enumerate(row):
        if c:
            out[2 * a + letter] = c
    return tuple(out)


def _pair(alg, i, a, j, b, sym=False, overlay=None):
    """[e_{i,a}, e_{j,b}] as a row in degree i+j.

    In symbol mode the value for i+j == top+1 is a row over the formal
    symbols of the pending extension, cached only in the overlay dict.
    """
    t = i + j
    p = alg.p
    if j == 1:
        if t <= alg.top:
            return alg.ad(b, i)[a]
        if not sym:
            raise DegreeOutOfRange(f"degree {t} beyond built degree {alg.top}")
        out = [0] * (2 * alg.dims[i - 1])
        out[2 * a + b] = 1
        return tuple(out)
    key = (i, a, j, b)
    if t <= alg.top:
        store = alg._chain[t - 2]._pairs
    else:
        store = overlay
    val = store.get(key)
    if val is not None:
        return val
    w, zl = alg.defs[j - 2][b]
    uw = _pair(alg, i, a, j - 1, w, sym, overlay)
    t1 = _apply_letter(alg, uw, t - 1, zl, sym)
    adrow = alg.ad(zl, i)[a]
    if j - 1 == 1:
        t2 = _apply_letter(alg, adrow, i + 1, w, sym)
    else:
        acc = [0] * _width(alg, t)
        for c, coeff in enumerate(adrow):
            if coeff:
                sub = _pair(alg, i + 1, c, j - 1, w, sym, overlay)
                for k2, s in enumerate(sub):
                    if s:
                        acc[k2] = (acc[k2] + coeff * s) % p
        t2 = tuple(acc)
    val = fp.vsub(t1, t2, p)
    store[key] = val
    return val


def bracket(alg: GradedAlgebra, u: HomogeneousElement,
            v: HomogeneousElement) -> HomogeneousElement:
    """[u, v], computed by collection on v's definitions."""
    t = u.degree + v.degree
    if t > alg.top:
        raise DegreeOutOfRange(f"degree {t} beyond built degree {alg.top}")
    p = alg.p
    acc = [0] * alg.dims[t - 1]
    for a, ca in enumerate(u.coeffs):
        if not ca:
            continue
        for b, cb in enumerate(v.coeffs):
            if not cb:
                continue
            row = _pair(alg, u.degree, a, v.degree, b)
            c = ca * cb % p
            for k, s in enumerate(row):
                if s:
                    acc[k] = (acc[k] + c * s) % p
    return HomogeneousElement(t, tuple(acc))


def eval_word(alg: GradedAlgebra, word) -> HomogeneousElement:
    """Evaluate a left-normed bracket word of generators.

    Accepts the text DSL (e.g. ``"y x^6 y x^5"``) or a list of letter
    indices; the first letter is the head of the left-normed bracket.
    """
    if isinstance(word, str):
        from .formats import parse_word
        letters = parse_word(word)
    else:
        letters = list(word)
    if not letters:
        raise ValueError("empty word")
    if len(letters) > alg.top:
        raise DegreeOutOfRange(
            f"word of length {len(letters)} exceeds built degree {alg.top}")
    row = (1, 0) if letters[0] == X else (0, 1)
    d = 1
    for letter in letters[1:]:
        row = _apply_letter(alg, row, d, letter, sym=False)
        d += 1
    return HomogeneousElement(d, tuple(row))


# ---------------------------------------------------------------------------
# consistency checks

def _unit(n, k):
    row = [0] * n
    row[k] = 1
    return tuple(row)


def _basis_elements(alg, degree):
    return [HomogeneousElement(degree, _unit(alg.dims[degree - 1], k))
            for k in range(alg.dims[degree - 1])]


def check_jacobi(alg: GradedAlgebra, mode: str = "all_triples"):
    """None on pass, else the first violating pair or triple.

    all_triples is the brute-force oracle: alternation [u,u] = 0 and
    antisymmetry [u,v] + [v,u] = 0 on every basis pair, plus the Jacobi
    identity on every basis triple with degree sum <= built degree.
    generator_triples checks only the triples (f, x, y) that the
    extension step quotients by.
    """
    p = alg.p
    top = alg.top
    if mode == "generator_triples":
        for df in range(1, top - 1):
            for f in range(alg.dims[df - 1]):
                fx = alg.ad(X, df)[f]
                fy = alg.ad(Y, df)[f]
                t1 = _apply_letter(alg, fx, df + 1, Y, sym=False)
                t2 = _apply_letter(alg, fy, df + 1, X, sym=False)
                acc = list(fp.vsub(t1, t2, p))
                e2row = alg.ad(Y, 1)[X]  # [x, y] as a degree-2 row
                for c, coeff in enumerate(e2row):
                    if coeff:
                        sub = _pair(alg, df, f, 2, c)
                        for k, s in enumerate(sub):
                            acc[k] = (acc[k] - coeff * s) % p
                if any(acc):
                    return ((df, f), "x", "y")
        return None
    if mode != "all_triples":
        raise ValueError(f"unknown mode {mode!r}")
    basis = [(d, k) for d in range(1, top + 1)
             for k in range(alg.dims[d - 1])]
    # pair axioms
    for ai, (di, ki) in enumerate(basis):
        for dj, kj in basis[ai:]:
            if di + dj > top:
                continue
            fw = _pair(alg, di, ki, dj, kj)
            bw = _pair(alg, dj, kj, di, ki)
            if not fp.is_zero(fp.vadd(fw, bw, p)):
                return ((di, ki), (dj, kj))
            if (di, ki) == (dj, kj) and not fp.is_zero(fw):
                return ((di, ki), (dj, kj))
    # triples
    for ai, (di, ki) in enumerate(basis):
        for aj in range(ai, len(basis)):
            dj, kj = basis[aj]
            if di + dj >= top:
                continue
            for dk, kk in basis[aj:]:
                t = di + dj + dk
                if t > top:
                    continue
                acc = [0] * alg.dims[t - 1]
                for (d1, k1), (d2, k2), (d3, k3) in (
                        ((di, ki), (dj, kj), (dk, kk)),
                        ((dj, kj), (dk, kk), (di, ki)),
                        ((dk, kk), (di, ki), (dj, kj))):
                    uv = _pair(alg, d1, k1, d2, k2)
                    for c, coeff in enumerate(uv):
                        if coeff:
                            sub = _pair(alg, d1 + d2, c, d3, k3)
                            for k2_, s in enumerate(sub):
                                if s:
                                    acc[k2_] = (acc[k2_] + coeff * s) % p
                if any(acc):
                    return ((di, ki), (dj, kj), (dk, kk))
    return None


def check_bigrading(alg: GradedAlgebra):
    """(True, weights) if x- and y-weights can be assigned, else (False, witness).

    Weights are fixed by the definitions: x has weight (1, 0), y has
    (0, 1), and each defined element adds its letter to its parent.  The
    algebra is Z^2-graded exactly when every adjoint matrix respects them.
    """
    weights = [[(1, 0), (0, 1)]]
    for d in range(2, alg.top + 1):
        level = []
        for parent, letter in alg.defs[d - 2]:
            wx, wy = weights[d - 2][parent]
            level.append((wx + (letter == X), wy + (letter == Y)))
        weights.append(level)
    for d in range(1, alg.top):
        for letter in (X, Y):
            mat = alg.ad(letter, d)
            for a, row in enumerate(mat):
                wx, wy = weights[d - 1][a]
                want = (wx + (letter == X), wy + (letter == Y))
                for b, c in enumerate(row):
                    if c and weights[d][b] != want:
                        return False, (d, a, LETTERS[letter], b)
    return True, weights


# ---------------------------------------------------------------------------
# extension

def extend_degree(alg: GradedAlgebra, validate: bool = False) -> ExtensionSpace:
    """Universal degree-(top+1) component of a consistent algebra."""
    if alg.terminated:
        raise DegreeOutOfRange("algebra is terminated; nothing to extend")
    if alg.dims[0] != 2:
        raise NotTwoGenerated("degree-1 component must have dimension 2")
    if validate:
        bad = check_jacobi(alg, "all_triples")
        if bad is not None:
            raise InconsistentBase(f"stored algebra fails Jacobi at {bad}")
    p = alg.p
    n = alg.top
    m = alg.dims[n - 1]
    nsym = 2 * m
    overlay: dict = {}
    rows = []

    def sym_pair(i, a, j, b):
        return _pair(alg, i, a, j, b, sym=True, overlay=overlay)

    # Jacobi with a generator entry: u of degree i, v of degree j = n - i >= 2
    for i in range(1, n - 1):
        j = n - i
        for a in range(alg.dims[i - 1]):
            for b in range(alg.dims[j - 1]):
                uv = _pair(alg, i, a, j, b)
                for z in (X, Y):
                    acc = list(_apply_letter(alg, uv, n, z, sym=True))
                    uz = alg.ad(z, i)[a]
                    for c, coeff in enumerate(uz):
                        if coeff:
                            sub = sym_pair(i + 1, c, j, b)
                            for k, s in enumerate(sub):
                                if s:
                                    acc[k] = (acc[k] - coeff * s) % p
                    vz = alg.ad(z, j)[b]
                    for c, coeff in enumerate(vz):
                        if coeff:
                            sub = sym_pair(i, a, j + 1, c)
                            for k, s in enumerate(sub):
                                if s:
                                    acc[k] = (acc[k] - coeff * s) % p
                    if any(acc):
                        rows.append(tuple(acc))
    # Jacobi (f, x, y) for f of degree n-1
    for f in range(alg.dims[n - 2]):
        t1 = _apply_letter(alg, alg.ad(X, n - 1)[f], n, Y, sym=True)
        t2 = _apply_letter(alg, alg.ad(Y, n - 1)[f], n, X, sym=True)
        acc = list(fp.vsub(t1, t2, p))
        for c, coeff in enumerate(alg.ad(Y, 1)[X]):
            if coeff:
                sub = sym_pair(n - 1, f, 2, c)
                for k, s in enumerate(sub):
                    if s:
                        acc[k] = (acc[k] - coeff * s) % p
        if any(acc):
            rows.append(tuple(acc))
    # antisymmetry and the alternating law at total degree n + 1
    for j in range(1, (n + 1) // 2 + 1):
        i = n + 1 - j
        if i > n:
            continue
        for a in range(alg.dims[i - 1]):
            brange = range(alg.dims[j - 1]) if i != j else range(a, alg.dims[j - 1])
            for b in brange:
                if i == j and a == b:
                    row = sym_pair(i, a, i, a)
                else:
                    row = fp.vadd(sym_pair(i, a, j, b), sym_pair(j, b, i, a), p)
                if any(row):
                    rows.append(row)

    red, pivots = fp.rref(rows, nsym, p)
    pivset = set(pivots)
    nonpivot = tuple(s for s in range(nsym) if s not in pivset)
    udim = len(nonpivot)
    posof = {s: k for k, s in enumerate(nonpivot)}
    symbol_map = []
    byfirst = {pc: row for row, pc in zip(red, pivots)}
    for s in range(nsym):
        if s in pivset:
            row = byfirst[s]
            symbol_map.append(tuple(-row[c] % p for c in nonpivot))
        else:
            symbol_map.append(_unit(udim, posof[s]))
    return ExtensionSpace(n, udim, tuple(symbol_map),
                          fp.RowMatrix(p, nsym, tuple(red)), nonpivot)


def quotient_extension(alg: GradedAlgebra, ext: ExtensionSpace,
                       kill_rows) -> GradedAlgebra:
    """Extend by the quotient of the universal component killing span(kill_rows).

    kill_rows are given in universal-component coordinates.
    """
    if ext.base_degree != alg.top:
        raise ValueError("extension space does not match this algebra")
    p = alg.p
    u = ext.universal_dim
    red, pivots = fp.rref(kill_rows, u, p)
    pivset = set(pivots)
    survivors = [c for c in range(u) if c not in pivset]
    d_new = len(survivors)
    if d_new == 0:
        return terminate(alg)
    posof = {c: k for k, c in enumerate(survivors)}
    byfirst = {pc: row for row, pc in zip(red, pivots)}
    proj = []
    for c in range(u):
        if c in pivset:
            row = byfirst[c]
            proj.append(tuple(-row[s] % p for s in survivors))
        else:
            proj.append(_unit(d_new, posof[c]))
    final_map = fp.mat_mul(ext.symbol_map, proj, d_new, p)
    m = alg.dims[alg.top - 1]
    adx_top = tuple(final_map[2 * a + X] for a in range(m))
    ady_top = tuple(final_map[2 * a + Y] for a in range(m))
    defs_new = tuple(divmod(ext.nonpivot_symbols[c], 2) for c in survivors)
    return GradedAlgebra(p, alg.dims + (d_new,), alg.adx + (adx_top,),
                         alg.ady + (ady_top,), alg.defs + (defs_new,),
                         parent=alg)


def impose_quotient(alg: GradedAlgebra, ext: ExtensionSpace,
                    keep) -> GradedAlgebra:
    """Extend by a chosen quotient of the universal component.

    keep is "full", "zero", an integer dimension (the first coordinates
    of the universal basis survive), or rows spanning the kept subspace
    in universal coordinates; the killed subspace is then the canonical
    complement determined by the pivot rule.
    """
    u = ext.universal_dim
    if keep == "full":
        return quotient_extension(alg, ext, [])
    if keep == "zero":
        return quotient_extension(alg, ext, [_unit(u, c) for c in range(u)])
    if isinstance(keep, int):
        if keep > u:
            raise DimensionTooLarge(f"requested {keep} > universal dim {u}")
        if keep < 0:
            raise ValueError("negative dimension")
        return quotient_extension(alg, ext,
                                  [_unit(u, c) for c in range(keep, u)])
    rows = [tuple(r) for r in keep]
    if any(len(r) != u for r in rows):
        raise ValueError("keep rows must have universal width")
    _, pivots = fp.rref(rows, u, alg.p)
    pivset = set(pivots)
    kills = [_unit(u, c) for c in range(u) if c not in pivset]
    return quotient_extension(alg, ext, kills)


def terminate(alg: GradedAlgebra) -> GradedAlgebra:
    """The same algebra with the zero component imposed at the next degree."""
    if alg.terminated:
        return alg
    return GradedAlgebra(alg.p, alg.dims, alg.adx, alg.ady, alg.defs,
                         terminated=True, chain=alg._chain, meta=alg.meta)


# ---------------------------------------------------------------------------
# generator changes and canonical orientation

def _transpose(rows, ncols):
    if not rows:
        return [()] * ncols
    return [tuple(r[c] for r in rows) for c in range(ncols)]


def change_generators(alg: GradedAlgebra, g) -> GradedAlgebra:
    """Rebuild the algebra on generators x' = g[0].(x,y), y' = g[1].(x,y).

    The new basis at every degree is re-chosen by the same pivot rule the
    extension step uses, so the result is in canonical storage form.
    """
    p = alg.p
    g = tuple(tuple(c % p for c in row) for row in g)
    if fp.rank(g, 2, p) != 2:
        raise ValueError("generator change must be invertible")
    dims = alg.dims
    T = [g]
    new_adx, new_ady, new_defs = [], [], []
    for d in range(1, alg.top):
        m, m_next = dims[d - 1], dims[d]
        raw = []
        for j in range(m):
            base = T[-1][j]
            rx = fp.vmatmul(base, alg.adx[d - 1], m_next, p)
            ry = fp.vmatmul(base, alg.ady[d - 1], m_next, p)
            raw.append((rx, ry))
        stacked = []
        for j in range(m):
            rx, ry = raw[j]
            stacked.append(fp.vadd(fp.vscale(rx, g[0][0], p),
                                   fp.vscale(ry, g[0][1], p), p))
            stacked.append(fp.vadd(fp.vscale(rx, g[1][0], p),
                                   fp.vscale(ry, g[1][1], p), p))
        lnull = fp.nullspace(_transpose(stacked, 2 * m), 2 * m, p)
        _, pivots = fp.rref(lnull, 2 * m, p)
        pivset = set(pivots)
        nonpivot = [s for s in range(2 * m) if s not in pivset]
        if len(nonpivot) != m_next:
            raise InconsistentBase(
                f"degree {d + 1} not spanned by generator images")
        T.append([stacked[s] for s in nonpivot])
        new_defs.append(tuple(divmod(s, 2) for s in nonpivot))
        ax, ay = [], []
        for j in range(m):
            for target, out in ((stacked[2 * j], ax), (stacked[2 * j + 1], ay)):
                coeffs = fp.solve_in_rowspace(T[-1], target, p)
                if coeffs is None:
                    raise InconsistentBase("generator image outside new basis")
                out.append(coeffs)
        new_adx.append(tuple(ax))
        new_ady.append(tuple(ay))
    return GradedAlgebra(p, dims, tuple(new_adx), tuple(new_ady),
                         tuple(new_defs), terminated=alg.terminated)


def _kernel_point(alg, degree):
    """Kernel of w in L_1 -> [e_degree, w], for a 1-dimensional component."""
    if degree >= alg.top and not alg.terminated:
        return None
    if degree >= alg.top:
        return "all"
    rows = _transpose([alg.adx[degree - 1][0], alg.ady[degree - 1][0]],
                      alg.dims[degree])
    ker = fp.nullspace(rows, 2, alg.p)
    if len(ker) == 0:
        return ()
    if len(ker) == 2:
        return "all"
    return ker[0]


def canonical_form(alg: GradedAlgebra):
    """Reorient generators to the standard choice.

    y is renormalized to span the first two-step centralizer, and x to
    span the second distinct one when it exists.  Returns the rebuilt
    algebra and the change-of-generators matrix; the identity change
    returns the input unchanged.
    """
    p = alg.p
    if alg.dims[0] != 2:
        raise NotTwoGenerated("need dim L_1 = 2")
    identity = ((1, 0), (0, 1))
    if alg.top < 2 or alg.dims[1] == 0:
        return alg, identity
    ypoint = _kernel_point(alg, 2)
    if ypoint in (None, "all", ()):
        return alg, identity
    ynorm = _normalize_point(ypoint, p)
    g1 = None
    for cand in _point_order(p):
        if fp.rank([cand, ynorm], 2, p) == 2:
            g1 = (cand, ynorm)
            break
    a1 = alg if g1 == identity else change_generators(alg, g1)
    xpoint = None
    for d in range(2, a1.top + 1):
        if a1.dims[d - 1] != 1:
            break
        pt = _kernel_point(a1, d)
        if pt is None or pt == "all":
            break
        if pt == ():
            continue
        pn = _normalize_point(pt, p)
        if pn != (0, 1):
            xpoint = pn
            break
    if xpoint is None or xpoint == (1, 0):
        g = g1
        out = a1
    else:
        g2 = (xpoint, (0, 1))
        out = change_generators(a1, g2)
        g = fp.mat_mul(g2, g1, 2, p)
    return (alg, identity) if g == identity else (out, g)


def _normalize_point(vec, p):
    lead = next(c for c in vec if c)
    return fp.vscale(vec, fp.inv_mod(lead, p), p)


def _point_order(p):
    """Projective points of L_1 in canonical order: x, x+cy, then y."""
    yield (1, 0)
    for c in range(1, p):
        yield (1, c)
    yield (0, 1)

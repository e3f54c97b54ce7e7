"""Arithmetic over F_p for small primes and dense row reduction.

Rows are tuples of ints in ``[0, p)``.  The p = 2 elimination kernels pack
each row into a single Python int (bit j = column j) and work by XOR; the
generic path does plain modular arithmetic.  Pivoting is always leftmost
nonzero, so reduced forms and the bases derived from them are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

_SMALL_PRIMES = {
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227,
    229, 233, 239, 241, 251,
}


def check_prime(p: int) -> int:
    if p not in _SMALL_PRIMES:
        raise ValueError(f"characteristic must be a prime <= 251, got {p}")
    return p


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("no inverse of 0")
    return pow(a, p - 2, p)


def lucas_binomial(n: int, k: int, p: int) -> int:
    """C(n, k) mod p, evaluated digit-wise in base p.

    Returns 0 for k > n and 1 for k = 0, matching the Pascal triangle mod p.
    """
    if n < 0 or k < 0:
        raise ValueError("lucas_binomial needs nonnegative arguments")
    check_prime(p)
    if k > n:
        return 0
    out = 1
    while k:
        nd, n = n % p, n // p
        kd, k = k % p, k // p
        if kd > nd:
            return 0
        num = den = 1
        for i in range(kd):
            num = num * (nd - i) % p
            den = den * (i + 1) % p
        out = out * num * inv_mod(den, p) % p
    return out


# ---------------------------------------------------------------------------
# row helpers (tuples mod p)

def vzero(n: int) -> tuple:
    return (0,) * n


def vadd(u: Sequence[int], v: Sequence[int], p: int) -> tuple:
    return tuple((a + b) % p for a, b in zip(u, v))


def vsub(u: Sequence[int], v: Sequence[int], p: int) -> tuple:
    return tuple((a - b) % p for a, b in zip(u, v))


def vneg(u: Sequence[int], p: int) -> tuple:
    return tuple(-a % p for a in u)


def vscale(u: Sequence[int], c: int, p: int) -> tuple:
    c %= p
    if c == 0:
        return vzero(len(u))
    if c == 1:
        return tuple(u)
    return tuple(a * c % p for a in u)


def vaddmul(u: Sequence[int], v: Sequence[int], c: int, p: int) -> tuple:
    """u + c*v mod p."""
    c %= p
    if c == 0:
        return tuple(u)
    return tuple((a + c * b) % p for a, b in zip(u, v))


def is_zero(u: Sequence[int]) -> bool:
    return not any(u)


def vmatmul(row: Sequence[int], mat: Sequence[Sequence[int]], ncols: int, p: int) -> tuple:
    """row . mat, where mat is given as a sequence of rows."""
    out = [0] * ncols
    for c, mrow in zip(row, mat):
        if c:
            for j, m in enumerate(mrow):
                if m:
                    out[j] = (out[j] + c * m) % p
    return tuple(out)


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], ncols: int, p: int) -> tuple:
    return tuple(vmatmul(row, b, ncols, p) for row in a)


def pack2(row: Sequence[int]) -> int:
    m = 0
    for j, c in enumerate(row):
        if c & 1:
            m |= 1 << j
    return m


def unpack2(mask: int, ncols: int) -> tuple:
    return tuple((mask >> j) & 1 for j in range(ncols))


# ---------------------------------------------------------------------------
# reduced row echelon form

def _rref2(rows: Iterable[Sequence[int]], ncols: int):
    masks = [m for m in (pack2(r) for r in rows) if m]
    out_masks: list[int] = []
    pivots: list[int] = []
    for m in masks:
        for pm, pc in zip(out_masks, pivots):
            if (m >> pc) & 1:
                m ^= pm
        if m == 0:
            continue
        pc = (m & -m).bit_length() - 1
        for i in range(len(out_masks)):
            if (out_masks[i] >> pc) & 1:
                out_masks[i] ^= m
        pos = 0
        while pos < len(pivots) and pivots[pos] < pc:
            pos += 1
        out_masks.insert(pos, m)
        pivots.insert(pos, pc)
    return [unpack2(m, ncols) for m in out_masks], pivots


def _rref_generic(rows: Iterable[Sequence[int]], ncols: int, p: int):
    out: list[tuple] = []
    pivots: list[int] = []
    for row in rows:
        row = tuple(c % p for c in row)
        for prow, pc in zip(out, pivots):
            if row[pc]:
                row = vaddmul(row, prow, -row[pc], p)
        lead = next((j for j, c in enumerate(row) if c), None)
        if lead is None:
            continue
        row = vscale(row, inv_mod(row[lead], p), p)
        for i in range(len(out)):
            if out[i][lead]:
                out[i] = vaddmul(out[i], row, -out[i][lead], p)
        pos = 0
        while pos < len(pivots) and pivots[pos] < lead:
            pos += 1
        out.insert(pos, row)
        pivots.insert(pos, lead)
    return out, pivots


def rref(rows: Iterable[Sequence[int]], ncols: int, p: int):
    """Reduced row echelon form with leftmost-nonzero pivoting.

    Returns (nonzero reduced rows, pivot column indices), both sorted by
    pivot column.
    """
    if p == 2:
        return _rref2(rows, ncols)
    return _rref_generic(rows, ncols, p)


def rank(rows: Iterable[Sequence[int]], ncols: int, p: int) -> int:
    return len(rref(rows, ncols, p)[1])


def nullspace(rows: Iterable[Sequence[int]], ncols: int, p: int) -> list[tuple]:
    """Basis rows for {v : A v^T = 0}, one per non-pivot column of A."""
    red, pivots = rref(rows, ncols, p)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for row, pc in zip(red, pivots):
            v[pc] = -row[free] % p
        basis.append(tuple(v))
    return basis


def solve_in_rowspace(basis: Sequence[Sequence[int]], target: Sequence[int],
                      p: int) -> Optional[tuple]:
    """Coefficients c with sum(c_i * basis_i) = target, or None.

    The basis rows need not be reduced; ties are resolved by the same
    leftmost-pivot rule as rref, so the answer is deterministic.
    """
    n = len(target)
    k = len(basis)
    aug = [tuple(row) + vzero(k)[:i] + (1,) + vzero(k)[i + 1:]
           for i, row in enumerate(basis)]
    red, pivots = rref(aug, n + k, p) if p != 2 else _rref2(aug, n + k)
    t = tuple(c % p for c in target) + vzero(k)
    for row, pc in zip(red, pivots):
        if pc >= n:
            break
        if t[pc]:
            t = vaddmul(t, row, -t[pc], p)
    if any(t[:n]):
        return None
    return vneg(t[n:], p)


@dataclass(frozen=True)
class RowMatrix:
    """A dense matrix over F_p stored as coefficient rows."""

    char: int
    ncols: int
    rows: tuple

    def __post_init__(self):
        check_prime(self.char)
        object.__setattr__(self, "rows", tuple(tuple(c % self.char for c in r)
                                               for r in self.rows))
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("row width mismatch")

    def reduce(self):
        """(reduced RowMatrix, rank, pivot columns)."""
        red, pivots = rref(self.rows, self.ncols, self.char)
        return RowMatrix(self.char, self.ncols, tuple(red)), len(pivots), tuple(pivots)

    @property
    def rank(self) -> int:
        return self.reduce()[1]

    def nullspace(self) -> "RowMatrix":
        return RowMatrix(self.char, self.ncols,
                         tuple(nullspace(self.rows, self.ncols, self.char)))

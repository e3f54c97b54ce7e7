"""Shared text and file formats: algebra JSON, words, centralizer strings.

All serializers are bit-exact: the same value always produces the same
bytes, and load(save(a)) reproduces the stored matrices verbatim.  Rows
are encoded as little-endian base-p integers in hex, which for p = 2 is
plain bit packing.
"""

from __future__ import annotations

import json
import re

from .core import LETTERS, LETTER_INDEX, GradedAlgebra, X, Y
from .errors import ParseError


# ---------------------------------------------------------------------------
# row packing

def pack_row(row, p: int) -> str:
    n = 0
    for c in reversed(row):
        n = n * p + (c % p)
    return format(n, "x")


def unpack_row(text: str, width: int, p: int):
    try:
        n = int(text, 16)
    except ValueError as exc:
        raise ParseError(f"bad row encoding {text!r}") from exc
    out = []
    for _ in range(width):
        n, c = divmod(n, p)
        out.append(c)
    if n:
        raise ParseError(f"row {text!r} wider than {width} columns")
    return tuple(out)


# ---------------------------------------------------------------------------
# algebra JSON

def algebra_to_dict(a: GradedAlgebra) -> dict:
    dims = list(a.dims) + ([0] if a.terminated else [])
    defs = [[parent, LETTERS[letter]]
            for level in a.defs for parent, letter in level]
    admats = {}
    for key, mats in (("ad_x", a.adx), ("ad_y", a.ady)):
        admats[key] = [[pack_row(row, a.p) for row in mat] for mat in mats]
    return {"char": a.p, "dims": dims, "defs": defs, **admats}


def algebra_from_dict(d: dict) -> GradedAlgebra:
    try:
        p = int(d["char"])
        dims = [int(x) for x in d["dims"]]
        raw_defs = list(d["defs"])
        raw_adx = list(d["ad_x"])
        raw_ady = list(d["ad_y"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed algebra JSON: {exc}") from exc
    terminated = False
    if dims and dims[-1] == 0:
        terminated = True
        dims = dims[:-1]
    if not dims or dims[0] != 2 or any(x <= 0 for x in dims):
        raise ParseError("dims must start with 2 and stay positive")
    top = len(dims)
    flat = iter(raw_defs)
    defs = []
    for deg in range(2, top + 1):
        level = []
        for _ in range(dims[deg - 1]):
            try:
                parent, letter = next(flat)
            except StopIteration:
                raise ParseError("defs list too short") from None
            if letter not in LETTER_INDEX:
                raise ParseError(f"bad letter {letter!r} in defs")
            parent = int(parent)
            if not 0 <= parent < dims[deg - 2]:
                raise ParseError(f"def parent {parent} out of range at degree {deg}")
            level.append((parent, LETTER_INDEX[letter]))
        defs.append(tuple(level))
    if next(flat, None) is not None:
        raise ParseError("defs list too long")
    if len(raw_adx) != top - 1 or len(raw_ady) != top - 1:
        raise ParseError("ad matrices must cover degrees 1..top-1")
    adx, ady = [], []
    for deg in range(1, top):
        for raw, out in ((raw_adx[deg - 1], adx), (raw_ady[deg - 1], ady)):
            if len(raw) != dims[deg - 1]:
                raise ParseError(f"ad matrix at degree {deg} has wrong row count")
            out.append(tuple(unpack_row(r, dims[deg], p) for r in raw))
    a = GradedAlgebra(p, dims, adx, ady, defs, terminated=terminated)
    _validate_defs(a)
    return a


def _validate_defs(a: GradedAlgebra):
    # collection needs every definition to hold exactly: [parent, letter] = e
    for deg in range(2, a.top + 1):
        for b, (parent, letter) in enumerate(a.defs[deg - 2]):
            row = a.ad(letter, deg - 1)[parent]
            want = tuple(1 if k == b else 0 for k in range(a.dims[deg - 1]))
            if row != want:
                raise ParseError(
                    f"definition of degree-{deg} element {b} does not match ad")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def save_algebra(a: GradedAlgebra, path):
    with open(path, "w") as fh:
        fh.write(dumps(algebra_to_dict(a)))


def load_algebra(path) -> GradedAlgebra:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON in {path}: {exc}") from exc
    return algebra_from_dict(d)


# ---------------------------------------------------------------------------
# word DSL:  head letter then letters, ^k repeats, e.g. "y x^6 y x^5"

_TOKEN = re.compile(r"([xy])(?:\s*\^\s*(\d+))?")


def parse_word(text: str):
    letters = []
    pos = 0
    for m in _TOKEN.finditer(text):
        if text[pos:m.start()].strip():
            raise ParseError(f"bad word syntax near {text[pos:m.start()]!r}")
        count = int(m.group(2)) if m.group(2) else 1
        letters.extend([LETTER_INDEX[m.group(1)]] * count)
        pos = m.end()
    if text[pos:].strip():
        raise ParseError(f"bad word syntax near {text[pos:]!r}")
    if not letters:
        raise ParseError("empty word")
    return letters


def format_word(letters) -> str:
    out = []
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        run = j - i
        out.append(LETTERS[letters[i]] + (f"^{run}" if run > 1 else ""))
        i = j
    return " ".join(out)


# ---------------------------------------------------------------------------
# centralizer-string DSL: points y, x, x+cy, plus terminal "all";
# e.g. "y^6 x y^6 x" with ^k repetition.

_POINT = re.compile(r"(all|x\s*\+\s*(\d+)?\s*y|[xy])(?:\s*\^\s*(\d+))?")


def parse_centralizers(text: str, p: int):
    """Parse a centralizer string into (alpha, beta) point tuples.

    A terminal "all" token is allowed and returned as the string "all".
    """
    points = []
    pos = 0
    for m in _POINT.finditer(text):
        if text[pos:m.start()].strip():
            raise ParseError(f"bad centralizer syntax near {text[pos:m.start()]!r}")
        tok = m.group(1)
        count = int(m.group(3)) if m.group(3) else 1
        if tok == "all":
            pt = "all"
        elif tok == "x":
            pt = (1, 0)
        elif tok == "y":
            pt = (0, 1)
        else:
            c = int(m.group(2)) if m.group(2) else 1
            if not 0 < c < p:
                raise ParseError(f"coefficient {c} out of range for p={p}")
            pt = (1, c % p)
        points.extend([pt] * count)
        pos = m.end()
    if text[pos:].strip():
        raise ParseError(f"bad centralizer syntax near {text[pos:]!r}")
    for k, pt in enumerate(points):
        if pt == "all" and k != len(points) - 1:
            raise ParseError("'all' may only terminate a sequence")
    return points


def format_point(pt) -> str:
    if isinstance(pt, str):
        return pt
    alpha, beta = pt
    if alpha == 0:
        return "y"
    if beta == 0:
        return "x"
    return "x+y" if beta == 1 else f"x+{beta}y"


def format_centralizers(points) -> str:
    toks = [format_point(pt) for pt in points]
    out = []
    i = 0
    while i < len(toks):
        j = i
        while j < len(toks) and toks[j] == toks[i]:
            j += 1
        run = j - i
        out.append(toks[i] + (f"^{run}" if run > 1 else ""))
        i = j
    return " ".join(out)


# ---------------------------------------------------------------------------
# constituent pattern DSL:  "Q=8: 8,7,8^2,7,7"

_PATTERN = re.compile(r"^\s*Q\s*=\s*(\d+)\s*:\s*(.*)$")


def parse_pattern(text: str):
    """(qbar, [later lengths]) from a pattern like "Q=8: 8,7,8^2,7"."""
    m = _PATTERN.match(text)
    if not m:
        raise ParseError(f"bad pattern {text!r}; expected 'Q=<n>: l1,l2,...'")
    qbar = int(m.group(1))
    lengths = []
    body = m.group(2).strip()
    if body:
        for part in body.split(","):
            part = part.strip()
            pm = re.fullmatch(r"(\d+)(?:\s*\^\s*(\d+))?", part)
            if not pm:
                raise ParseError(f"bad constituent length {part!r}")
            lengths.extend([int(pm.group(1))] * (int(pm.group(2)) if pm.group(2) else 1))
    first = lengths[0] if lengths else None
    if first != qbar:
        raise ParseError("pattern must begin with the first constituent Q")
    return qbar, lengths[1:]


def pattern_to_centralizers(qbar: int, lengths, total: int | None = None):
    """Expand a constituent pattern into a Y/X point list for C_2, C_3, ...

    total limits the number of points (prefix truncation); without it the
    expansion ends at the last constituent's closing point.
    """
    if qbar < 3:
        raise ParseError("first constituent must have length >= 3")
    points = [(0, 1)] * (qbar - 2) + [(1, 0)]
    for r in lengths:
        if r < 1:
            raise ParseError("constituent lengths must be positive")
        points.extend([(0, 1)] * (r - 1) + [(1, 0)])
    if total is not None:
        if total > len(points):
            points.extend([(0, 1)] * (total - len(points)))
        points = points[:total]
    return points

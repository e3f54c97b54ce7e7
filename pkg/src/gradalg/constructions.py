"""Named example families used as fixtures and positive controls."""

from __future__ import annotations

from dataclasses import dataclass

from . import core, formats, fp, maxclass
from .errors import CapExceeded
from .thin import _kill_subspaces

DEFAULT_DIM_CAP = 128


@dataclass(frozen=True)
class BiZassenhausParams:
    """Loop-algebra family parameters; the constituent pattern repeats
    qbar-1, qbar^(2^g - 2), qbar-1 after a leading qbar."""

    g: int
    h: int

    def __post_init__(self):
        if self.g < 2 or self.h < 1:
            raise ValueError("need g >= 2 and h >= 1")

    @property
    def qbar(self) -> int:
        return 2 ** (self.h + 1)

    @property
    def period_dim(self) -> int:
        return (2 ** self.g) * self.qbar

    def period_lengths(self):
        return [self.qbar - 1] + [self.qbar] * (2 ** self.g - 2) + [self.qbar - 1]


def metabelian_maxclass(p: int, dim: int) -> core.GradedAlgebra:
    """The all-y algebra of the given dimension, terminated."""
    if dim < 3:
        raise ValueError("need dim >= 3")
    points = [maxclass.Y_VEC] * (dim - 3)
    return maxclass.from_centralizers(points, p, terminated=True)


def bi_zassenhaus_quotient(params: BiZassenhausParams, dim: int,
                           cap: int = DEFAULT_DIM_CAP) -> core.GradedAlgebra:
    """The dimension-dim quotient of the periodic-pattern algebra.

    Consistency of the truncation is verified by the construction itself;
    an Inadmissible escape would indicate an engine bug.
    """
    if dim > cap:
        raise CapExceeded(f"dim {dim} exceeds cap {cap}")
    qbar = params.qbar
    if dim < qbar + 2:
        raise ValueError(f"dim must cover the first constituent (>= {qbar + 2})")
    xpos = [qbar]
    while True:
        for r in params.period_lengths():
            xpos.append(xpos[-1] + r)
        if xpos[-1] > dim:
            break
    top = dim - 1
    positions = set(q for q in xpos if q <= top - 1)
    points = [maxclass.X_VEC if pos in positions else maxclass.Y_VEC
              for pos in range(2, top)]
    return maxclass.from_centralizers(points, 2, terminated=True)


def one_dim_central_extensions(m: core.GradedAlgebra):
    """All one-dimensional graded central extensions of a maximal-class
    algebra, deduplicated by centralizer sequence."""
    base = m
    if base.terminated:
        base = core.GradedAlgebra(m.p, m.dims, m.adx, m.ady, m.defs,
                                  terminated=False, chain=m._chain, meta=m.meta)
    ext = core.extend_degree(base)
    u = ext.universal_dim
    out = []
    seen = set()
    if u == 0:
        return out
    for kills in _kill_subspaces(u, u - 1, base.p):
        child = core.terminate(core.quotient_extension(base, ext, kills))
        key = formats.format_centralizers(
            [pt.coeffs if pt.is_point() else pt.kind
             for pt in maxclass.centralizer_sequence(child)])
        if key in seen:
            continue
        seen.add(key)
        out.append(child)
    return out

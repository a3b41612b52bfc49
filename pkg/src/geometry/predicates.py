"""
Robust orientation and in-circle predicates.

Each predicate evaluates the determinant in floating point and accepts the
sign when it exceeds a static forward error bound; otherwise the determinant
is recomputed exactly with rational arithmetic (every float is a rational, so
the fallback is exact). Batch versions screen whole arrays with numpy and only
send the uncertain rows to the exact path.
"""

from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

_EPS = np.finfo(float).eps / 2.0  # 2^-53, unit roundoff
CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS

Point = Sequence[float]


def _sign(value) -> int:
    return (value > 0) - (value < 0)


def _orient_exact(a: Point, b: Point, c: Point) -> Fraction:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _incircle_exact(a: Point, b: Point, c: Point, d: Point) -> Fraction:
    dx, dy = Fraction(d[0]), Fraction(d[1])
    adx, ady = Fraction(a[0]) - dx, Fraction(a[1]) - dy
    bdx, bdy = Fraction(b[0]) - dx, Fraction(b[1]) - dy
    cdx, cdy = Fraction(c[0]) - dx, Fraction(c[1]) - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    return (
        alift * (bdx * cdy - cdx * bdy)
        + blift * (cdx * ady - adx * cdy)
        + clift * (adx * bdy - bdx * ady)
    )


def orient2d(a: Point, b: Point, c: Point) -> int:
    """
    Orientation of the triple ``(a, b, c)``.

    Returns:
        +1 if counterclockwise, -1 if clockwise, 0 if collinear
    """
    detleft = (float(a[0]) - float(c[0])) * (float(b[1]) - float(c[1]))
    detright = (float(a[1]) - float(c[1])) * (float(b[0]) - float(c[0]))
    det = detleft - detright
    errbound = CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > errbound or -det > errbound:
        return _sign(det)
    return _sign(_orient_exact(a, b, c))


def incircle(a: Point, b: Point, c: Point, d: Point) -> int:
    """
    Sign of the in-circle determinant.

    For counterclockwise ``(a, b, c)`` the result is +1 if ``d`` lies strictly
    inside the circumcircle, -1 if strictly outside and 0 if cocircular.
    """
    dx, dy = float(d[0]), float(d[1])
    adx, ady = float(a[0]) - dx, float(a[1]) - dy
    bdx, bdy = float(b[0]) - dx, float(b[1]) - dy
    cdx, cdy = float(c[0]) - dx, float(c[1]) - dy

    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy

    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = (
        (abs(bdxcdy) + abs(cdxbdy)) * alift
        + (abs(cdxady) + abs(adxcdy)) * blift
        + (abs(adxbdy) + abs(bdxady)) * clift
    )
    errbound = ICC_ERRBOUND * permanent
    if det > errbound or -det > errbound:
        return _sign(det)
    return _sign(_incircle_exact(a, b, c, d))


def incircle_perturbed(
    a: Point, b: Point, c: Point, d: Point, ranks: Tuple[int, int, int, int]
) -> int:
    """
    In-circle sign under the symbolic lifting perturbation.

    Cocircular ties are broken by lowering the lifted height of every point by
    an infinitesimal that is larger for lower rank; the lowest-ranked of the
    four points decides. The result is never 0 for four distinct points with
    ``(a, b, c)`` non-collinear.

    Args:
        a, b, c, d: The four points
        ranks: Total-order ranks of ``(a, b, c, d)``

    Returns:
        +1 or -1 with the same orientation convention as ``incircle``
    """
    s = incircle(a, b, c, d)
    if s != 0:
        return s
    lowest = min(range(4), key=lambda i: ranks[i])
    if lowest == 3:
        return orient2d(a, b, c)
    if lowest == 0:
        return -orient2d(b, c, d)
    if lowest == 1:
        return orient2d(a, c, d)
    return -orient2d(a, b, d)


def inside_circumcircle(
    a: Point, b: Point, c: Point, d: Point, ranks: Tuple[int, int, int, int]
) -> bool:
    """True if ``d`` is inside the circumcircle of ``(a, b, c)`` after perturbation."""
    return incircle_perturbed(a, b, c, d, ranks) * orient2d(a, b, c) > 0


def orient2d_batch(pa: np.ndarray, pb: np.ndarray, pc: np.ndarray) -> np.ndarray:
    """
    Vectorized ``orient2d`` over rows of ``(k, 2)`` arrays.

    Returns:
        Integer array of signs
    """
    detleft = (pa[:, 0] - pc[:, 0]) * (pb[:, 1] - pc[:, 1])
    detright = (pa[:, 1] - pc[:, 1]) * (pb[:, 0] - pc[:, 0])
    det = detleft - detright
    errbound = CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    signs = np.sign(det).astype(np.int64)
    uncertain = np.flatnonzero(np.abs(det) <= errbound)
    for i in uncertain:
        signs[i] = _sign(_orient_exact(pa[i], pb[i], pc[i]))
    return signs


def incircle_batch(
    pa: np.ndarray, pb: np.ndarray, pc: np.ndarray, pd: np.ndarray, exact: bool = True
) -> np.ndarray:
    """
    Vectorized ``incircle`` over rows of ``(k, 2)`` arrays.

    Args:
        exact: If False, uncertain rows are reported as 0 instead of being
            resolved exactly (used for cheap screening)

    Returns:
        Integer array of signs
    """
    adx, ady = pa[:, 0] - pd[:, 0], pa[:, 1] - pd[:, 1]
    bdx, bdy = pb[:, 0] - pd[:, 0], pb[:, 1] - pd[:, 1]
    cdx, cdy = pc[:, 0] - pd[:, 0], pc[:, 1] - pd[:, 1]
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = (
        (np.abs(bdxcdy) + np.abs(cdxbdy)) * alift
        + (np.abs(cdxady) + np.abs(adxcdy)) * blift
        + (np.abs(adxbdy) + np.abs(bdxady)) * clift
    )
    uncertain = np.abs(det) <= ICC_ERRBOUND * permanent
    signs = np.where(uncertain, 0, np.sign(det)).astype(np.int64)
    if exact:
        for i in np.flatnonzero(uncertain):
            signs[i] = _sign(_incircle_exact(pa[i], pb[i], pc[i], pd[i]))
    return signs

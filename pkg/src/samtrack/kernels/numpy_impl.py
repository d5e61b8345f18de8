"""Pure-numpy reference implementations of the hot pixel kernels.

These are the fallback path used when numba is unavailable or disabled via
SAMTRACK_NO_NUMBA=1. Semantics are identical to kernels.numba_impl; the
parity is covered by tests and the speed gap by benchmarks/bench_kernels.py.
"""
import numpy as np

_INT_MAX = np.iinfo(np.int64).max


def label_components_4(mask):
    """Label 4-connected components of a 0/1 uint8 mask.

    Returns an int64 array with 0 for background; component numbering is
    arbitrary but deterministic (callers renumber by raster order).
    """
    m = mask.astype(bool)
    h, w = m.shape
    lab = np.where(m, np.arange(1, h * w + 1, dtype=np.int64).reshape(h, w), 0)
    while True:
        big = np.where(m, lab, _INT_MAX)
        neigh = np.full((h, w), _INT_MAX, dtype=np.int64)
        neigh[1:, :] = np.minimum(neigh[1:, :], big[:-1, :])
        neigh[:-1, :] = np.minimum(neigh[:-1, :], big[1:, :])
        neigh[:, 1:] = np.minimum(neigh[:, 1:], big[:, :-1])
        neigh[:, :-1] = np.minimum(neigh[:, :-1], big[:, 1:])
        nxt = np.where(m, np.minimum(big, neigh), 0)
        if np.array_equal(nxt, lab):
            return lab
        lab = nxt


def dilate_disc(mask, radius):
    """Dilate a 0/1 uint8 mask by a Euclidean disc of the given integer radius."""
    m = mask.astype(bool)
    if radius <= 0:
        return m.astype(np.uint8)
    h, w = m.shape
    out = np.zeros((h, w), dtype=bool)
    r2 = radius * radius
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dy * dy + dx * dx > r2:
                continue
            ys0, ys1 = max(0, dy), min(h, h + dy)
            xs0, xs1 = max(0, dx), min(w, w + dx)
            if ys0 >= ys1 or xs0 >= xs1:
                continue
            out[ys0:ys1, xs0:xs1] |= m[ys0 - dy:ys1 - dy, xs0 - dx:xs1 - dx]
    return out.astype(np.uint8)


def rle_encode_bits(flat):
    """Run lengths of a flat 0/1 uint8 array, background-first (first run may be 0)."""
    n = flat.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    changes = np.flatnonzero(np.diff(flat.astype(np.int16))) + 1
    bounds = np.concatenate(([0], changes, [n]))
    runs = np.diff(bounds).astype(np.int64)
    if flat[0] != 0:
        runs = np.concatenate(([0], runs))
    return runs


def best_shift(prev_img, cur_img, mask, radius, tol):
    """Best integer displacement of `mask` from prev_img to cur_img.

    Score of (dy, dx) = number of mask pixels p with |cur[p+d] - prev[p]| <= tol
    and p+d in bounds. Ties broken by smaller dy*dy+dx*dx, then (dy, dx) order.
    Returns (dy, dx, score).
    """
    h, w = prev_img.shape
    ys, xs = np.nonzero(mask)
    src = prev_img[ys, xs].astype(np.int32)
    best = (-1, 0, 0)  # (score, dy, dx) under the tie-break ordering
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            ty = ys + dy
            tx = xs + dx
            ok = (ty >= 0) & (ty < h) & (tx >= 0) & (tx < w)
            if not ok.any():
                score = 0
            else:
                diff = np.abs(cur_img[ty[ok], tx[ok]].astype(np.int32) - src[ok])
                score = int(np.count_nonzero(diff <= tol))
            if _better(score, dy, dx, best):
                best = (score, dy, dx)
    return best[1], best[2], best[0]


def _better(score, dy, dx, best):
    bscore, bdy, bdx = best
    if score != bscore:
        return score > bscore
    d2, bd2 = dy * dy + dx * dx, bdy * bdy + bdx * bdx
    if d2 != bd2:
        return d2 < bd2
    return (dy, dx) < (bdy, bdx)

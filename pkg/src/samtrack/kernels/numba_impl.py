"""Numba-jitted hot kernels; semantics match kernels.numpy_impl exactly."""
import numpy as np
from numba import njit


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


@njit(cache=True)
def label_components_4(mask):
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int64)
    # 4-connectivity admits at most ceil(h*w/2) provisional labels
    parent = np.zeros(h * w // 2 + 2, dtype=np.int64)
    nxt = 1
    for y in range(h):
        for x in range(w):
            if mask[y, x] == 0:
                continue
            up = labels[y - 1, x] if y > 0 else 0
            left = labels[y, x - 1] if x > 0 else 0
            if up == 0 and left == 0:
                parent[nxt] = nxt
                labels[y, x] = nxt
                nxt += 1
            elif up == 0:
                labels[y, x] = left
            elif left == 0:
                labels[y, x] = up
            else:
                ru = _find(parent, up)
                rl = _find(parent, left)
                r = ru if ru < rl else rl
                parent[ru] = r
                parent[rl] = r
                labels[y, x] = r
    for y in range(h):
        for x in range(w):
            if labels[y, x] != 0:
                labels[y, x] = _find(parent, labels[y, x])
    return labels


@njit(cache=True)
def dilate_disc(mask, radius):
    h, w = mask.shape
    out = np.zeros((h, w), dtype=np.uint8)
    if radius <= 0:
        for y in range(h):
            for x in range(w):
                out[y, x] = 1 if mask[y, x] else 0
        return out
    r2 = radius * radius
    for y in range(h):
        for x in range(w):
            if mask[y, x] == 0:
                continue
            y0 = max(0, y - radius)
            y1 = min(h, y + radius + 1)
            for ty in range(y0, y1):
                dy2 = (ty - y) * (ty - y)
                x0 = max(0, x - radius)
                x1 = min(w, x + radius + 1)
                for tx in range(x0, x1):
                    if dy2 + (tx - x) * (tx - x) <= r2:
                        out[ty, tx] = 1
    return out


@njit(cache=True)
def rle_encode_bits(flat):
    n = flat.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    nruns = 1
    for i in range(1, n):
        if flat[i] != flat[i - 1]:
            nruns += 1
    lead = 1 if flat[0] != 0 else 0
    runs = np.zeros(nruns + lead, dtype=np.int64)
    idx = lead
    count = 1
    for i in range(1, n):
        if flat[i] != flat[i - 1]:
            runs[idx] = count
            idx += 1
            count = 1
        else:
            count += 1
    runs[idx] = count
    return runs


@njit(cache=True)
def best_shift(prev_img, cur_img, mask, radius, tol):
    h, w = prev_img.shape
    # widen before differencing: uint8 arithmetic would wrap around
    prev = prev_img.astype(np.int32)
    cur = cur_img.astype(np.int32)
    npix = 0
    for y in range(h):
        for x in range(w):
            if mask[y, x]:
                npix += 1
    ys = np.zeros(npix, dtype=np.int64)
    xs = np.zeros(npix, dtype=np.int64)
    k = 0
    for y in range(h):
        for x in range(w):
            if mask[y, x]:
                ys[k] = y
                xs[k] = x
                k += 1
    best_score = -1
    best_dy = 0
    best_dx = 0
    best_d2 = 0
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            score = 0
            for i in range(npix):
                ty = ys[i] + dy
                tx = xs[i] + dx
                if 0 <= ty < h and 0 <= tx < w:
                    d = cur[ty, tx] - prev[ys[i], xs[i]]
                    if -tol <= d <= tol:
                        score += 1
            d2 = dy * dy + dx * dx
            take = False
            if score > best_score:
                take = True
            elif score == best_score:
                if d2 < best_d2:
                    take = True
                elif d2 == best_d2 and (dy < best_dy or (dy == best_dy and dx < best_dx)):
                    take = True
            if take:
                best_score = score
                best_dy = dy
                best_dx = dx
                best_d2 = d2
    return best_dy, best_dx, best_score

"""Independent brute-force oracles used by unit and acceptance tests.

Pure-python pixel enumeration throughout; nothing here shares code with the
implementations under test.
"""


def brute_force_gate(track, seg, t, min_area=0):
    """Enumerate every pixel to build per-label areas in S and N, then gate."""
    h, w = len(track), len(track[0])
    xs, xn = {}, {}
    for y in range(h):
        for x in range(w):
            s = int(seg[y][x])
            if s == 0:
                continue
            xs[s] = xs.get(s, 0) + 1
            if int(track[y][x]) == 0:
                xn[s] = xn.get(s, 0) + 1
    accepted = []
    for label in sorted(xs):
        n_area = xn.get(label, 0)
        if n_area / xs[label] > t and n_area >= min_area:
            accepted.append(label)
    return accepted


def iou_oracle(pred, gt):
    inter = union = 0
    for y in range(len(pred)):
        for x in range(len(pred[0])):
            p, g = bool(pred[y][x]), bool(gt[y][x])
            inter += p and g
            union += p or g
    return 1.0 if union == 0 else inter / union


def boundary_set(mask):
    h, w = len(mask), len(mask[0])
    out = []
    for y in range(h):
        for x in range(w):
            if not mask[y][x]:
                continue
            for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                if not (0 <= ny < h and 0 <= nx < w) or not mask[ny][nx]:
                    out.append((y, x))
                    break
    return out


def boundary_f_oracle(pred, gt, tol):
    p_any = any(any(row) for row in pred)
    g_any = any(any(row) for row in gt)
    if not p_any and not g_any:
        return 1.0
    if p_any != g_any:
        return 0.0
    pb, gb = boundary_set(pred), boundary_set(gt)

    def within(points, targets):
        hits = 0
        for (y, x) in points:
            if any((y - ty) ** 2 + (x - tx) ** 2 <= tol * tol for ty, tx in targets):
                hits += 1
        return hits

    precision = within(pb, gb) / len(pb)
    recall = within(gb, pb) / len(gb)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def evaluate_oracle(preds, gts, object_ids, tol, exclude_first=True):
    start = 1 if exclude_first else 0
    j_means, f_means = [], []
    for oid in object_ids:
        js, fs = [], []
        for t in range(start, len(gts)):
            pm = [[v == oid for v in row] for row in preds[t].tolist()]
            gm = [[v == oid for v in row] for row in gts[t].tolist()]
            js.append(iou_oracle(pm, gm))
            fs.append(boundary_f_oracle(pm, gm, tol))
        j_means.append(sum(js) / len(js))
        f_means.append(sum(fs) / len(fs))
    mean_j = sum(j_means) / len(j_means)
    mean_f = sum(f_means) / len(f_means)
    return mean_j, mean_f, (mean_j + mean_f) / 2

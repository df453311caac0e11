"""Numba kernels for decision-tree growth and traversal.

The training protocol refits whole forests after every collected episode
and queries them at every environment step, so split search and tree
walking are the two hot paths of the package. Everything here is plain
array code compiled with numba; randomness comes from an explicit
splitmix64 stream seeded by the caller, so results are bit-reproducible
across processes and platforms.

Trees are stored flat: per-node arrays (feature, threshold, left, right,
impurity, sample count, impurity decrease, value vector) plus an array of
root indices, one per tree. Nodes of tree t occupy the contiguous id range
[roots[t], roots[t+1]). Leaves have feature == -1.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TREE_STRIDE = np.uint64(0xA24BAED4963EE407)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@njit(cache=True, inline="always")
def _next_u64(state):
    state[0] = state[0] + _GAMMA
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def _rand_uniform(state):
    return (_next_u64(state) >> _S11) * _INV53


@njit(cache=True, inline="always")
def _rand_below(state, k):
    return np.int64(_rand_uniform(state) * k)


@njit(cache=True)
def grow_forest(
    X,
    y,
    w,
    n_classes,
    n_trees,
    max_depth,
    min_samples_split,
    max_features,
    bootstrap,
    random_threshold,
    seed,
):
    """Grow a Gini-impurity classification forest.

    max_depth < 0 means unlimited. random_threshold selects the
    extremely-randomized rule (one uniform threshold per candidate feature)
    instead of the exhaustive midpoint sweep. Ties between candidate splits
    resolve to the first one found, which makes growth deterministic.
    """
    n, d = X.shape
    cap = n_trees * (2 * n + 1)
    feat = np.full(cap, -1, np.int64)
    thr = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    imp = np.zeros(cap, np.float64)
    nsamp = np.zeros(cap, np.int64)
    dec = np.zeros(cap, np.float64)
    val = np.zeros((cap, n_classes), np.float64)
    roots = np.zeros(n_trees, np.int64)

    state = np.zeros(1, np.uint64)
    idx = np.empty(n, np.int64)
    sort_vals = np.empty(n, np.float64)
    feat_scratch = np.empty(d, np.int64)
    wc = np.zeros(n_classes, np.float64)
    wl = np.zeros(n_classes, np.float64)
    stack = np.empty((2 * n + 2, 4), np.int64)

    cursor = 0
    for t in range(n_trees):
        state[0] = np.uint64(seed) + np.uint64(t + 1) * _TREE_STRIDE
        if bootstrap:
            for i in range(n):
                idx[i] = _rand_below(state, n)
        else:
            for i in range(n):
                idx[i] = i

        roots[t] = cursor
        stack[0, 0] = cursor
        stack[0, 1] = 0
        stack[0, 2] = n
        stack[0, 3] = 0
        cursor += 1
        top = 1

        while top > 0:
            top -= 1
            nid = stack[top, 0]
            s = stack[top, 1]
            e = stack[top, 2]
            depth = stack[top, 3]
            m = e - s

            total_w = 0.0
            for c in range(n_classes):
                wc[c] = 0.0
            for i in range(s, e):
                ii = idx[i]
                wc[y[ii]] += w[ii]
                total_w += w[ii]

            gini = 1.0
            n_present = 0
            for c in range(n_classes):
                p = wc[c] / total_w
                gini -= p * p
                val[nid, c] = p
                if wc[c] > 0.0:
                    n_present += 1
            imp[nid] = gini
            nsamp[nid] = m

            if (
                m < min_samples_split
                or n_present <= 1
                or (max_depth >= 0 and depth >= max_depth)
            ):
                continue

            for i in range(d):
                feat_scratch[i] = i
            best_gain = -1.0e308
            best_f = -1
            best_thr = 0.0

            for fi in range(max_features):
                if max_features < d:
                    # partial Fisher-Yates; with all features as candidates
                    # keep natural order so exhaustive mode is RNG-free
                    j = fi + _rand_below(state, d - fi)
                    tmp = feat_scratch[fi]
                    feat_scratch[fi] = feat_scratch[j]
                    feat_scratch[j] = tmp
                f = feat_scratch[fi]

                if random_threshold:
                    vmin = X[idx[s], f]
                    vmax = vmin
                    for i in range(s + 1, e):
                        v = X[idx[i], f]
                        if v < vmin:
                            vmin = v
                        elif v > vmax:
                            vmax = v
                    if vmax <= vmin:
                        continue
                    cand = vmin + _rand_uniform(state) * (vmax - vmin)
                    if cand >= vmax:  # float rounding at u -> 1
                        cand = vmin
                    wl_sum = 0.0
                    for c in range(n_classes):
                        wl[c] = 0.0
                    for i in range(s, e):
                        ii = idx[i]
                        if X[ii, f] <= cand:
                            wl[y[ii]] += w[ii]
                            wl_sum += w[ii]
                    wr_sum = total_w - wl_sum
                    gini_l = 1.0
                    gini_r = 1.0
                    for c in range(n_classes):
                        pl = wl[c] / wl_sum
                        pr = (wc[c] - wl[c]) / wr_sum
                        gini_l -= pl * pl
                        gini_r -= pr * pr
                    gain = gini - (wl_sum * gini_l + wr_sum * gini_r) / total_w
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_thr = cand
                else:
                    for i in range(m):
                        sort_vals[i] = X[idx[s + i], f]
                    order = np.argsort(sort_vals[:m])
                    wl_sum = 0.0
                    for c in range(n_classes):
                        wl[c] = 0.0
                    for i in range(m - 1):
                        ii = idx[s + order[i]]
                        wl[y[ii]] += w[ii]
                        wl_sum += w[ii]
                        v_cur = sort_vals[order[i]]
                        v_nxt = sort_vals[order[i + 1]]
                        if v_cur < v_nxt:
                            wr_sum = total_w - wl_sum
                            gini_l = 1.0
                            gini_r = 1.0
                            for c in range(n_classes):
                                pl = wl[c] / wl_sum
                                pr = (wc[c] - wl[c]) / wr_sum
                                gini_l -= pl * pl
                                gini_r -= pr * pr
                            gain = gini - (wl_sum * gini_l + wr_sum * gini_r) / total_w
                            if gain > best_gain:
                                best_gain = gain
                                best_f = f
                                cand = 0.5 * (v_cur + v_nxt)
                                # adjacent floats: the midpoint can round up
                                # and leave the right side empty
                                best_thr = v_cur if cand >= v_nxt else cand

            if best_f < 0:
                continue

            i = s
            j = e - 1
            while i <= j:
                if X[idx[i], best_f] <= best_thr:
                    i += 1
                else:
                    tmp = idx[i]
                    idx[i] = idx[j]
                    idx[j] = tmp
                    j -= 1
            mid = i

            feat[nid] = best_f
            thr[nid] = best_thr
            dec[nid] = best_gain if best_gain > 0.0 else 0.0
            left_id = cursor
            right_id = cursor + 1
            cursor += 2
            left[nid] = left_id
            right[nid] = right_id
            stack[top, 0] = right_id
            stack[top, 1] = mid
            stack[top, 2] = e
            stack[top, 3] = depth + 1
            top += 1
            stack[top, 0] = left_id
            stack[top, 1] = s
            stack[top, 2] = mid
            stack[top, 3] = depth + 1
            top += 1

    return (
        feat[:cursor].copy(),
        thr[:cursor].copy(),
        left[:cursor].copy(),
        right[:cursor].copy(),
        imp[:cursor].copy(),
        nsamp[:cursor].copy(),
        dec[:cursor].copy(),
        val[:cursor].copy(),
        roots,
    )


@njit(cache=True)
def grow_tree_second_order(X, g, h, reg_lambda, gamma, max_depth, min_samples_split):
    """Grow one regression tree on gradients/hessians (exact greedy).

    Gain is the standard second-order split score; a node becomes a leaf
    when no split has positive gain. Leaf value is -G / (H + lambda).
    """
    n, d = X.shape
    cap = 2 * n + 1
    feat = np.full(cap, -1, np.int64)
    thr = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    nsamp = np.zeros(cap, np.int64)
    gain_arr = np.zeros(cap, np.float64)
    leaf_val = np.zeros(cap, np.float64)

    idx = np.arange(n)
    sort_vals = np.empty(n, np.float64)
    stack = np.empty((2 * n + 2, 4), np.int64)

    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    stack[0, 3] = 0
    cursor = 1
    top = 1

    while top > 0:
        top -= 1
        nid = stack[top, 0]
        s = stack[top, 1]
        e = stack[top, 2]
        depth = stack[top, 3]
        m = e - s

        g_sum = 0.0
        h_sum = 0.0
        for i in range(s, e):
            g_sum += g[idx[i]]
            h_sum += h[idx[i]]
        leaf_val[nid] = -g_sum / (h_sum + reg_lambda)
        nsamp[nid] = m

        if m < min_samples_split or (max_depth >= 0 and depth >= max_depth):
            continue

        parent_score = g_sum * g_sum / (h_sum + reg_lambda)
        best_gain = 0.0
        best_f = -1
        best_thr = 0.0

        for f in range(d):
            for i in range(m):
                sort_vals[i] = X[idx[s + i], f]
            order = np.argsort(sort_vals[:m])
            gl = 0.0
            hl = 0.0
            for i in range(m - 1):
                ii = idx[s + order[i]]
                gl += g[ii]
                hl += h[ii]
                v_cur = sort_vals[order[i]]
                v_nxt = sort_vals[order[i + 1]]
                if v_cur < v_nxt:
                    gr = g_sum - gl
                    hr = h_sum - hl
                    gain = (
                        0.5
                        * (
                            gl * gl / (hl + reg_lambda)
                            + gr * gr / (hr + reg_lambda)
                            - parent_score
                        )
                        - gamma
                    )
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        cand = 0.5 * (v_cur + v_nxt)
                        best_thr = v_cur if cand >= v_nxt else cand

        if best_f < 0:
            continue

        i = s
        j = e - 1
        while i <= j:
            if X[idx[i], best_f] <= best_thr:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        mid = i

        feat[nid] = best_f
        thr[nid] = best_thr
        gain_arr[nid] = best_gain
        left_id = cursor
        right_id = cursor + 1
        cursor += 2
        left[nid] = left_id
        right[nid] = right_id
        stack[top, 0] = right_id
        stack[top, 1] = mid
        stack[top, 2] = e
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = left_id
        stack[top, 1] = s
        stack[top, 2] = mid
        stack[top, 3] = depth + 1
        top += 1

    return (
        feat[:cursor].copy(),
        thr[:cursor].copy(),
        left[:cursor].copy(),
        right[:cursor].copy(),
        nsamp[:cursor].copy(),
        gain_arr[:cursor].copy(),
        leaf_val[:cursor].copy(),
    )


@njit(cache=True)
def forest_predict_proba(X, feat, thr, left, right, val, roots):
    """Average the leaf class-frequency vectors over all trees, per row."""
    n = X.shape[0]
    n_trees = roots.shape[0]
    n_classes = val.shape[1]
    out = np.zeros((n, n_classes), np.float64)
    for i in range(n):
        for t in range(n_trees):
            nid = roots[t]
            while feat[nid] >= 0:
                if X[i, feat[nid]] <= thr[nid]:
                    nid = left[nid]
                else:
                    nid = right[nid]
            for c in range(n_classes):
                out[i, c] += val[nid, c]
    for i in range(n):
        for c in range(n_classes):
            out[i, c] /= n_trees
    return out


@njit(cache=True)
def trees_add_scalar(X, feat, thr, left, right, leaf_val, roots, scale, out):
    """Add scale * leaf value of every listed tree to out, per row."""
    n = X.shape[0]
    for t in range(roots.shape[0]):
        root = roots[t]
        for i in range(n):
            nid = root
            while feat[nid] >= 0:
                if X[i, feat[nid]] <= thr[nid]:
                    nid = left[nid]
                else:
                    nid = right[nid]
            out[i] += scale * leaf_val[nid]


@njit(cache=True)
def weighted_vote(X, feat, thr, left, right, val, roots, stage_weights):
    """Per-stage one-hot votes weighted by the stage coefficients."""
    n = X.shape[0]
    n_classes = val.shape[1]
    out = np.zeros((n, n_classes), np.float64)
    for t in range(roots.shape[0]):
        root = roots[t]
        alpha = stage_weights[t]
        for i in range(n):
            nid = root
            while feat[nid] >= 0:
                if X[i, feat[nid]] <= thr[nid]:
                    nid = left[nid]
                else:
                    nid = right[nid]
            best_c = 0
            best_v = val[nid, 0]
            for c in range(1, n_classes):
                if val[nid, c] > best_v:
                    best_v = val[nid, c]
                    best_c = c
            out[i, best_c] += alpha
    return out


@njit(cache=True)
def path_contributions(x, feat, thr, left, right, dec, roots, n_features):
    """Impurity decreases of the nodes traversed by x, summed per feature
    and averaged over trees."""
    scores = np.zeros(n_features, np.float64)
    for t in range(roots.shape[0]):
        nid = roots[t]
        while feat[nid] >= 0:
            scores[feat[nid]] += dec[nid]
            if x[feat[nid]] <= thr[nid]:
                nid = left[nid]
            else:
                nid = right[nid]
    return scores / roots.shape[0]

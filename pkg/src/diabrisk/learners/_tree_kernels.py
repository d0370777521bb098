"""Numba kernels for histogram-based tree growth and prediction.

One grower serves both criteria: Gini impurity (g = class-1 indicator,
h = 1 per row) and Newton boosting gain (g, h = logistic gradient/hessian).
Node processing order, tie-breaking (lowest feature then lowest bin), and the
per-node feature subsample stream are all fixed, so results are reproducible
regardless of thread count.
"""

import numpy as np
from numba import njit

GINI = 0
NEWTON = 1


@njit(cache=True, inline="always")
def _mix64(state):
    # splitmix64: counter-based stream, deterministic per node id
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True)
def grow_tree(
    codes,  # (n_features, n_rows) uint16 bin codes
    thr_offsets,  # (n_features + 1,) int64 offsets into the threshold table
    g,  # (n_rows,) float64
    h,  # (n_rows,) float64
    sample_idx,  # (m,) int64 rows of this tree (duplicates allowed)
    max_depth,
    min_samples_split,
    min_child_hess,
    l2,
    criterion,
    mtry,
    seed,
    cap,  # maximum number of nodes
):
    n_features = codes.shape[0]
    m = sample_idx.size

    feature = np.full(cap, -1, np.int32)
    split_bin = np.full(cap, -1, np.int32)
    left = np.full(cap, -1, np.int32)
    right = np.full(cap, -1, np.int32)
    leaf_value = np.zeros(cap, np.float64)
    gain_arr = np.zeros(cap, np.float64)
    count_arr = np.zeros(cap, np.int64)
    q_start = np.zeros(cap, np.int64)
    q_end = np.zeros(cap, np.int64)
    q_depth = np.zeros(cap, np.int64)

    idx = sample_idx.copy()
    scratch = np.empty(m, np.int64)
    feat_buf = np.empty(n_features, np.int64)

    n_nodes = 1
    q_end[0] = m
    head = 0
    while head < n_nodes:
        node = head
        head += 1
        start = q_start[node]
        end = q_end[node]
        count = end - start
        count_arr[node] = count

        total_g = 0.0
        total_h = 0.0
        for ii in range(start, end):
            total_g += g[idx[ii]]
            total_h += h[idx[ii]]
        if criterion == NEWTON:
            leaf_value[node] = -total_g / (total_h + l2)
        else:
            leaf_value[node] = total_g / count

        if q_depth[node] >= max_depth or count < min_samples_split or n_nodes + 2 > cap:
            continue
        if criterion == GINI and (total_g <= 0.0 or total_g >= count):
            continue  # pure node

        if mtry < n_features:
            for f in range(n_features):
                feat_buf[f] = f
            state = np.uint64(seed) ^ (np.uint64(node) * np.uint64(0x9E3779B97F4A7C15))
            for i in range(mtry):
                state, z = _mix64(state)
                j = i + np.int64(z % np.uint64(n_features - i))
                feat_buf[i], feat_buf[j] = feat_buf[j], feat_buf[i]
            feat_buf[:mtry].sort()
            n_try = mtry
        else:
            for f in range(n_features):
                feat_buf[f] = f
            n_try = n_features

        best_gain = 1e-12
        best_feature = -1
        best_bin = -1
        if criterion == NEWTON:
            parent_score = total_g * total_g / (total_h + l2)
            parent_imp = 0.0
        else:
            p1 = total_g / count
            parent_imp = 2.0 * p1 * (1.0 - p1)
            parent_score = 0.0

        for fi in range(n_try):
            f = feat_buf[fi]
            n_thr = thr_offsets[f + 1] - thr_offsets[f]
            if n_thr == 0:
                continue
            n_bins = n_thr + 1
            hist_g = np.zeros(n_bins, np.float64)
            hist_h = np.zeros(n_bins, np.float64)
            hist_c = np.zeros(n_bins, np.int64)
            for ii in range(start, end):
                s = idx[ii]
                c = codes[f, s]
                hist_g[c] += g[s]
                hist_h[c] += h[s]
                hist_c[c] += 1

            left_g = 0.0
            left_h = 0.0
            left_c = 0
            for b in range(n_bins - 1):
                left_g += hist_g[b]
                left_h += hist_h[b]
                left_c += hist_c[b]
                right_c = count - left_c
                if left_c == 0 or right_c == 0:
                    continue
                right_g = total_g - left_g
                right_h = total_h - left_h
                if left_h < min_child_hess or right_h < min_child_hess:
                    continue
                if criterion == NEWTON:
                    gain = 0.5 * (
                        left_g * left_g / (left_h + l2)
                        + right_g * right_g / (right_h + l2)
                        - parent_score
                    )
                else:
                    p_left = left_g / left_c
                    p_right = right_g / right_c
                    gain = (
                        parent_imp
                        - (left_c / count) * 2.0 * p_left * (1.0 - p_left)
                        - (right_c / count) * 2.0 * p_right * (1.0 - p_right)
                    )
                if gain > best_gain:
                    best_gain = gain
                    best_feature = f
                    best_bin = b

        if best_feature < 0:
            continue

        n_left = 0
        for ii in range(start, end):  # stable partition
            if codes[best_feature, idx[ii]] <= best_bin:
                scratch[n_left] = idx[ii]
                n_left += 1
        pos = n_left
        for ii in range(start, end):
            if codes[best_feature, idx[ii]] > best_bin:
                scratch[pos] = idx[ii]
                pos += 1
        for ii in range(count):
            idx[start + ii] = scratch[ii]

        feature[node] = best_feature
        split_bin[node] = best_bin
        gain_arr[node] = best_gain
        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        left[node] = left_id
        right[node] = right_id
        q_start[left_id] = start
        q_end[left_id] = start + n_left
        q_depth[left_id] = q_depth[node] + 1
        q_start[right_id] = start + n_left
        q_end[right_id] = end
        q_depth[right_id] = q_depth[node] + 1

    return (
        feature[:n_nodes],
        split_bin[:n_nodes],
        left[:n_nodes],
        right[:n_nodes],
        leaf_value[:n_nodes],
        gain_arr[:n_nodes],
        count_arr[:n_nodes],
    )


@njit(cache=True)
def predict_tree(feature, threshold, left, right, leaf_value, rows, out):
    for i in range(rows.shape[0]):
        node = 0
        while feature[node] >= 0:
            if rows[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] += leaf_value[node]

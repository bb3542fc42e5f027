"""Agglomerative clustering of segments with a GMM-parameter distance."""

from dataclasses import dataclass, field

import numpy as np

from . import gmm


@dataclass
class Cluster:
    id: int
    member_segments: list        # segment indices, sorted
    model: gmm.GaussianMixture
    n_frames: int


@dataclass
class Dendrogram:
    """Merge history: (cluster_a, cluster_b, distance, new_id) per step."""

    merges: list
    leaf_count: int


def segment_frame_rows(seg, features):
    """Feature rows belonging to one segment."""
    return features[seg.start_frame:seg.end_frame]


def fit_segment_model(n_frames_rows, max_components=4, seed=0, short=False):
    """Fit a GMM to pooled frame rows, choosing the component count by BIC.

    Candidates run from 1 to min(max_components, n_frames // 50); short
    segments always get a single component.
    """
    X = np.atleast_2d(np.asarray(n_frames_rows, float))
    m_hi = 1 if short else max(1, min(max_components, X.shape[0] // 50))
    if m_hi == 1:
        model, _ = gmm.fit_em(X, 1, seed=seed)
        return model
    best_m, _ = gmm.select_n_components(X, 1, m_hi, "bic", seed=seed)
    model, _ = gmm.fit_em(X, best_m, seed=seed + best_m)
    return model


def _kl_sym_diag(mu_p, var_p, mu_q, var_q):
    """Symmetric KL between diagonal Gaussians, summed over dimensions."""
    dm = mu_p - mu_q
    return float(np.sum(0.5 * (var_p / var_q + var_q / var_p - 2.0
                               + dm * dm * (1.0 / var_p + 1.0 / var_q))))


def gmm_distance(a, b):
    """Matched-pair symmetric-KL distance between two mixtures.

    Component pairs are matched greedily by smallest symmetric KL over
    all cross pairs (a symmetric rule, so the distance is too); each
    matched pair contributes min(w_a, w_b) * KLsym, normalized by the
    total matched weight.
    """
    if a.dim != b.dim:
        raise ValueError(f"model dims differ: {a.dim} vs {b.dim}")
    pairs = []
    for i in range(a.n_components):
        for j in range(b.n_components):
            kl = _kl_sym_diag(a.means[i], a.variances[i], b.means[j], b.variances[j])
            w = min(a.weights[i], b.weights[j])
            pairs.append((kl, -w, -(a.weights[i] + b.weights[j]), i, j))
    pairs.sort(key=lambda p: p[:3])
    used_a, used_b = set(), set()
    num = den = 0.0
    for kl, negw, _, i, j in pairs:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        num += -negw * kl
        den += -negw
        if len(used_a) == min(a.n_components, b.n_components):
            break
    return num / den if den > 0 else 0.0


def agglomerate(segments, features, threshold, max_components=4, seed=0):
    """Bottom-up merging of per-segment clusters until the closest pair
    exceeds the distance threshold.

    Each merge pools the member frames and refits the cluster model.
    Returns (labels, dendrogram); labels are "S0", "S1", ... ordered by
    first temporal appearance.
    """
    if not segments:
        return [], Dendrogram([], 0)
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    features = np.atleast_2d(np.asarray(features, float))

    clusters = {}
    for i, seg in enumerate(segments):
        rows = segment_frame_rows(seg, features)
        model = fit_segment_model(rows, max_components, seed=seed + i,
                                  short=seg.short)
        clusters[i] = Cluster(i, [i], model, rows.shape[0])

    next_id = len(segments)
    merges = []
    dist_cache = {}

    def dist(ia, ib):
        key = (min(ia, ib), max(ia, ib))
        if key not in dist_cache:
            dist_cache[key] = gmm_distance(clusters[key[0]].model,
                                           clusters[key[1]].model)
        return dist_cache[key]

    while len(clusters) > 1:
        live = sorted(clusters)
        best = None  # (distance, id_a, id_b); lexicographic tie-break
        for ai in range(len(live)):
            for bi in range(ai + 1, len(live)):
                cand = (dist(live[ai], live[bi]), live[ai], live[bi])
                if best is None or cand < best:
                    best = cand
        d, ia, ib = best
        if d > threshold:
            break
        members = sorted(clusters[ia].member_segments
                         + clusters[ib].member_segments)
        rows = np.vstack([segment_frame_rows(segments[m], features)
                          for m in members])
        model = fit_segment_model(rows, max_components, seed=seed + next_id)
        for stale in [k for k in dist_cache if ia in k or ib in k]:
            del dist_cache[stale]
        del clusters[ia], clusters[ib]
        clusters[next_id] = Cluster(next_id, members, model, rows.shape[0])
        merges.append((ia, ib, d, next_id))
        next_id += 1

    labels = _labels_from_clusters(clusters, len(segments))
    return labels, Dendrogram(merges, len(segments))


def _labels_from_clusters(clusters, n_segments):
    order = sorted(clusters.values(), key=lambda c: min(c.member_segments))
    labels = [None] * n_segments
    for rank, cluster in enumerate(order):
        for m in cluster.member_segments:
            labels[m] = f"S{rank}"
    return labels


def cut_dendrogram(dend, k):
    """Replay merges until exactly k live clusters remain.

    Requires a dendrogram with enough merges (run agglomerate with a
    large threshold to record the full tree).
    """
    if not 1 <= k <= dend.leaf_count:
        raise ValueError(f"k={k} outside [1, {dend.leaf_count}]")
    members = {i: [i] for i in range(dend.leaf_count)}
    for ia, ib, _, new_id in dend.merges:
        if len(members) == k:
            break
        members[new_id] = sorted(members.pop(ia) + members.pop(ib))
    if len(members) != k:
        raise ValueError(f"dendrogram has too few merges to reach k={k}")
    clusters = {i: Cluster(i, m, None, 0) for i, m in members.items()}
    return _labels_from_clusters(clusters, dend.leaf_count)


def threshold_from_dendrogram(dend):
    """Distance threshold at the largest gap in the sorted merge distances.

    With fewer than two merges there is no gap to split; returns just
    above the largest distance so everything merges.
    """
    dists = sorted(m[2] for m in dend.merges)
    if len(dists) < 2:
        return (dists[-1] * 1.01 + 1e-12) if dists else 0.0
    gaps = np.diff(dists)
    g = int(np.argmax(gaps))
    return (dists[g] + dists[g + 1]) / 2.0


def auto_threshold(segments, features, max_components=4, seed=0):
    """Run an unbounded agglomeration and pick the merge-gap threshold."""
    _, dend = agglomerate(segments, features, np.inf, max_components, seed)
    return threshold_from_dendrogram(dend)


def cut_at_threshold(dend, threshold):
    """Labels a threshold-stopped run would produce, from the full tree.

    The merge sequence does not depend on the threshold (it only stops
    the loop), so replaying until the first merge whose distance exceeds
    the threshold reproduces the stopped run exactly.
    """
    members = {i: [i] for i in range(dend.leaf_count)}
    for ia, ib, d, new_id in dend.merges:
        if d > threshold:
            break
        members[new_id] = sorted(members.pop(ia) + members.pop(ib))
    clusters = {i: Cluster(i, m, None, 0) for i, m in members.items()}
    return _labels_from_clusters(clusters, dend.leaf_count)


def dendrogram_csv(dend, sink):
    """Write step,cluster_a,cluster_b,distance,new_id rows."""
    sink.write("step,cluster_a,cluster_b,distance,new_id\n")
    for step, (ia, ib, d, new_id) in enumerate(dend.merges):
        sink.write(f"{step},{ia},{ib},{d!r},{new_id}\n")

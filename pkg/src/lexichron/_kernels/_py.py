"""Pure-Python window kernels, used when the compiled extension is absent.

Same contracts as ``_ckern``: positions are 0-based indices into a document's
indexed (skip-filtered) token sequence, windows never cross documents.
"""

from __future__ import annotations

import numpy as np


def count_window_hits(targets, probes, w):
    """Number of target positions with at least one probe within distance w.

    Both position arrays must be sorted ascending. Each target counts once,
    however many probes fall inside its window.
    """
    n, m = len(targets), len(probes)
    if n == 0 or m == 0:
        return 0
    hits = 0
    j = 0
    for t in targets:
        lo = t - w
        while j < m and probes[j] < lo:
            j += 1
        if j < m and probes[j] <= t + w:
            hits += 1
    return hits


def window_pair_ids(ids, w):
    """Emit (left, right) id pairs for position pairs p < q with q - p <= w.

    ``ids`` holds one int per indexed position; negative ids mark
    out-of-vocabulary tokens. Same-id pairs are dropped (zero diagonal).
    Returns two int32 arrays of equal length.
    """
    out_a = []
    out_b = []
    n = len(ids)
    for p in range(n):
        ip = ids[p]
        if ip < 0:
            continue
        qmax = p + w + 1
        if qmax > n:
            qmax = n
        for q in range(p + 1, qmax):
            iq = ids[q]
            if iq >= 0 and iq != ip:
                out_a.append(ip)
                out_b.append(iq)
    return (
        np.asarray(out_a, dtype=np.int32),
        np.asarray(out_b, dtype=np.int32),
    )

"""Independent reference implementations used only by tests.

Deliberately naive: python loops over scalar values, no vectorization, no
shared code with the package. The growth oracle mirrors the documented update
semantics (in-place ascending raster, ascending neighbor offsets, strict
improvement) with the same float64 expression order, so results must match
the production kernel bit for bit.
"""
from __future__ import annotations

import math


def naive_offsets(neighborhood):
    offs = []
    for dz in (-1, 0, 1):
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if dz == 0 and di == 0 and dj == 0:
                    continue
                if neighborhood in (8, 4) and dz != 0:
                    continue
                if neighborhood in (6, 4) and abs(dz) + abs(di) + abs(dj) != 1:
                    continue
                offs.append((dz, di, dj))
    return offs


def naive_sweep(intens, labels, weights, neighborhood, max_i, averaging):
    """One in-place raster pass over nested lists. Returns label changes."""
    Z = len(intens)
    M = len(intens[0])
    N = len(intens[0][0])
    offsets = naive_offsets(neighborhood)
    changes = 0
    for z in range(Z):
        for i in range(M):
            for j in range(N):
                lab = labels[z][i][j]
                if lab == 0:
                    continue
                w = weights[z][i][j]
                ip = intens[z][i][j]
                for dz, di, dj in offsets:
                    zq, iq, jq = z + dz, i + di, j + dj
                    if not (0 <= zq < Z and 0 <= iq < M and 0 <= jq < N):
                        continue
                    if max_i > 0.0:
                        s = w * (1.0 - abs(ip - intens[zq][iq][jq]) / max_i)
                    else:
                        s = w
                    if s > weights[zq][iq][jq]:
                        if averaging:
                            weights[zq][iq][jq] = (weights[zq][iq][jq] + s) / 2.0
                        else:
                            weights[zq][iq][jq] = s
                        if labels[zq][iq][jq] != lab:
                            labels[zq][iq][jq] = lab
                            changes += 1
    return changes


def naive_segment(intens, seeds, averaging, neighborhood=26,
                  max_iterations=50):
    """Reference growth loop on nested lists.

    intens and seeds are anything indexable as [z][i][j]; returns
    (labels, weights, iterations, converged) with labels/weights as nested
    lists.
    """
    Z = len(intens)
    M = len(intens[0])
    N = len(intens[0][0])
    intens = [[[float(intens[z][i][j]) for j in range(N)]
               for i in range(M)] for z in range(Z)]
    labels = [[[int(seeds[z][i][j]) for j in range(N)]
               for i in range(M)] for z in range(Z)]
    weights = [[[1.0 if labels[z][i][j] != 0 else 0.0 for j in range(N)]
                for i in range(M)] for z in range(Z)]
    max_i = max(intens[z][i][j] for z in range(Z) for i in range(M)
                for j in range(N))
    iterations = 0
    converged = False
    for _ in range(max_iterations):
        changes = naive_sweep(intens, labels, weights, neighborhood, max_i,
                              averaging)
        iterations += 1
        if changes == 0:
            converged = True
            break
    return labels, weights, iterations, converged


def naive_dice(a_voxels, b_voxels):
    a, b = set(a_voxels), set(b_voxels)
    if not a and not b:
        return 1.0
    return 2.0 * len(a & b) / (len(a) + len(b))


def naive_jaccard(a_voxels, b_voxels):
    a, b = set(a_voxels), set(b_voxels)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def naive_hausdorff(a_voxels, b_voxels):
    """O(n^2) max of directed nearest-neighbor distances."""
    a, b = list(a_voxels), list(b_voxels)
    assert a and b, "hausdorff needs nonempty sets"

    def directed(xs, ys):
        worst = 0.0
        for x in xs:
            best = min(math.dist(x, y) for y in ys)
            worst = max(worst, best)
        return worst

    return max(directed(a, b), directed(b, a))


def mask_voxels(mask):
    """Boolean [z][i][j] structure to a list of (z, i, j) tuples."""
    out = []
    for z, plane in enumerate(mask):
        for i, row in enumerate(plane):
            for j, val in enumerate(row):
                if val:
                    out.append((z, i, j))
    return out

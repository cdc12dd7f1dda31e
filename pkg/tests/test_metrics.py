"""Dice, Jaccard and Hausdorff semantics against brute-force references."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vertegrow import DataError, MetricReport, dice, hausdorff, jaccard, report

from oracle import mask_voxels, naive_dice, naive_hausdorff, naive_jaccard


def _mask(shape, voxels):
    m = np.zeros(shape, dtype=bool)
    for v in voxels:
        m[v] = True
    return m


def test_identical_nonempty_masks():
    m = _mask((2, 3, 3), [(0, 1, 1), (1, 2, 2)])
    assert dice(m, m) == 1.0
    assert jaccard(m, m) == 1.0
    assert hausdorff(m, m) == 0.0


def test_disjoint_masks():
    a = _mask((1, 3, 3), [(0, 0, 0)])
    b = _mask((1, 3, 3), [(0, 2, 2)])
    assert dice(a, b) == 0.0
    assert jaccard(a, b) == 0.0


def test_half_overlap_counts():
    # |a| = |b| = 4 with 2 shared voxels on a 3x3 slice
    a = _mask((1, 3, 3), [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)])
    b = _mask((1, 3, 3), [(0, 1, 0), (0, 1, 1), (0, 2, 0), (0, 2, 1)])
    assert dice(a, b) == 0.5
    assert jaccard(a, b) == pytest.approx(1 / 3)
    jac = jaccard(a, b)
    assert 2 * jac / (1 + jac) == pytest.approx(0.5, abs=1e-15)


def test_empty_vs_empty_is_one():
    e = np.zeros((2, 2, 2), dtype=bool)
    assert dice(e, e) == 1.0
    assert jaccard(e, e) == 1.0


def test_empty_vs_nonempty_is_zero():
    e = np.zeros((1, 2, 2), dtype=bool)
    m = _mask((1, 2, 2), [(0, 0, 0)])
    assert dice(e, m) == 0.0
    assert jaccard(m, e) == 0.0


def test_dim_mismatch():
    with pytest.raises(DataError, match="mask dims differ"):
        dice(np.zeros((1, 2, 2), bool), np.zeros((1, 2, 3), bool))
    with pytest.raises(DataError, match="mask dims differ"):
        hausdorff(np.ones((1, 2, 2), bool), np.ones((1, 2, 3), bool))


def test_hausdorff_3_4_5_triangle():
    a = _mask((1, 5, 6), [(0, 0, 0)])
    b = _mask((1, 5, 6), [(0, 3, 4)])
    assert hausdorff(a, b) == 5.0


def test_hausdorff_empty_mask_is_error():
    m = _mask((1, 2, 2), [(0, 0, 0)])
    e = np.zeros((1, 2, 2), dtype=bool)
    with pytest.raises(DataError, match="empty"):
        hausdorff(m, e)
    with pytest.raises(DataError, match="empty"):
        hausdorff(e, m)


def test_hausdorff_asymmetric_sets():
    # one distant extra voxel in a dominates the direction a -> b
    a = _mask((1, 8, 8), [(0, 0, 0), (0, 7, 7)])
    b = _mask((1, 8, 8), [(0, 0, 0)])
    assert hausdorff(a, b) == pytest.approx(np.hypot(7, 7))


def test_hausdorff_spacing_weights_axes():
    # two voxels one column apart: physical gap equals the column spacing dx
    a = _mask((1, 2, 2), [(0, 0, 0)])
    b = _mask((1, 2, 2), [(0, 0, 1)])
    assert hausdorff(a, b, spacing=(0.5, 3.0, 7.0)) == pytest.approx(0.5)
    # one row apart: gap equals dy
    c = _mask((1, 2, 2), [(0, 1, 0)])
    assert hausdorff(a, c, spacing=(0.5, 3.0, 7.0)) == pytest.approx(3.0)
    # one slice apart: gap equals dz
    d = np.zeros((2, 2, 2), dtype=bool)
    d[1, 0, 0] = True
    e = np.zeros((2, 2, 2), dtype=bool)
    e[0, 0, 0] = True
    assert hausdorff(e, d, spacing=(0.5, 3.0, 7.0)) == pytest.approx(7.0)


def test_report_bundles_everything():
    m = _mask((1, 3, 3), [(0, 1, 1)])
    rep = report(m, m, elapsed_segmentation=1.5, annotation_seconds=13.0)
    assert rep == MetricReport(dsc=1.0, jac=1.0, hd=0.0,
                               elapsed_segmentation=1.5,
                               annotation_seconds=13.0)


# ---------------------------------------------------------------------------
# brute-force agreement and algebraic properties


def _random_pair(rng, shape=(3, 8, 8), p=0.2):
    a = rng.random(shape) < p
    b = rng.random(shape) < p
    return a, b


def test_matches_brute_force_on_random_masks():
    rng = np.random.default_rng(42)
    for _ in range(50):
        a, b = _random_pair(rng, shape=(2, 5, 5), p=0.3)
        assert dice(a, b) == naive_dice(mask_voxels(a), mask_voxels(b))
        assert jaccard(a, b) == naive_jaccard(mask_voxels(a), mask_voxels(b))
        if a.any() and b.any():
            assert hausdorff(a, b) == pytest.approx(
                naive_hausdorff(mask_voxels(a), mask_voxels(b)), abs=1e-9)


def test_symmetry():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a, b = _random_pair(rng)
        assert dice(a, b) == dice(b, a)
        assert jaccard(a, b) == jaccard(b, a)
        if a.any() and b.any():
            assert hausdorff(a, b) == hausdorff(b, a)


def test_dice_jaccard_identity_thousand_pairs():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        a, b = _random_pair(rng, shape=(2, 6, 6), p=rng.uniform(0.05, 0.5))
        d, j = dice(a, b), jaccard(a, b)
        assert abs(d - 2 * j / (1 + j)) < 1e-12


def test_hausdorff_triangle_sanity():
    rng = np.random.default_rng(5)
    for _ in range(30):
        a = rng.random((2, 6, 6)) < 0.3
        b = rng.random((2, 6, 6)) < 0.3
        c = rng.random((2, 6, 6)) < 0.3
        if not (a.any() and b.any() and c.any()):
            continue
        assert hausdorff(a, b) <= hausdorff(a, c) + hausdorff(c, b) + 1e-9


def test_dice_monotone_in_shared_voxels():
    rng = np.random.default_rng(11)
    for _ in range(30):
        a, b = _random_pair(rng, shape=(2, 6, 6), p=0.4)
        both = a & b
        if not both.any():
            continue
        z, i, j = [ax[0] for ax in np.nonzero(both)]
        a2 = a.copy()
        a2[z, i, j] = False
        assert dice(a2, b) <= dice(a, b)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), p=st.floats(0.05, 0.6))
def test_property_metrics_agree_with_brute_force(seed, p):
    rng = np.random.default_rng(seed)
    a = rng.random((2, 4, 4)) < p
    b = rng.random((2, 4, 4)) < p
    assert dice(a, b) == naive_dice(mask_voxels(a), mask_voxels(b))
    assert jaccard(a, b) == naive_jaccard(mask_voxels(a), mask_voxels(b))
    if a.any() and b.any():
        assert hausdorff(a, b) == pytest.approx(
            naive_hausdorff(mask_voxels(a), mask_voxels(b)), abs=1e-9)

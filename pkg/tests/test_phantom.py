"""Phantom generation determinism, geometry bounds, and auto seeding."""
import json

import numpy as np
import pytest
from scipy import ndimage

from vertegrow import DataError, PhantomSpec, auto_seed, generate, rasterize
from vertegrow.phantom import (
    SECONDS_PER_SLICE,
    default_suite,
    load_spec,
    spec_from_dict,
    spec_to_dict,
)


def test_spec_validation():
    with pytest.raises(DataError, match="unknown body"):
        PhantomSpec(dims=(8, 8, 3), body="torus")
    with pytest.raises(DataError, match="must differ"):
        PhantomSpec(dims=(8, 8, 3), fg_intensity=50, bg_intensity=50)
    with pytest.raises(DataError, match="negative noise"):
        PhantomSpec(dims=(8, 8, 3), noise_sigma=-1)
    with pytest.raises(DataError, match="bad dims"):
        PhantomSpec(dims=(8, 0, 3))


def test_noiseless_box_has_two_intensities():
    spec = PhantomSpec(dims=(12, 12, 5), body="box",
                       params={"lo": [3, 3, 1], "hi": [8, 8, 3]},
                       fg_intensity=100, bg_intensity=10)
    vol, gt = generate(spec)
    assert set(np.unique(vol.intensities)) == {10.0, 100.0}
    np.testing.assert_array_equal(vol.intensities == 100.0, gt)
    assert gt.sum() == 6 * 6 * 3


def test_generation_deterministic():
    spec = PhantomSpec(dims=(16, 16, 5), noise_sigma=8.0, rng_seed=12)
    vol_a, gt_a = generate(spec)
    vol_b, gt_b = generate(spec)
    np.testing.assert_array_equal(vol_a.intensities, vol_b.intensities)
    np.testing.assert_array_equal(gt_a, gt_b)


def test_different_seeds_differ():
    base = dict(dims=(16, 16, 5), noise_sigma=8.0)
    vol_a, _ = generate(PhantomSpec(rng_seed=1, **base))
    vol_b, _ = generate(PhantomSpec(rng_seed=2, **base))
    assert (vol_a.intensities != vol_b.intensities).any()


def test_noise_clipped_nonnegative():
    spec = PhantomSpec(dims=(16, 16, 4), fg_intensity=30, bg_intensity=5,
                       noise_sigma=40.0, rng_seed=3)
    vol, _ = generate(spec)
    assert vol.intensities.min() >= 0.0


def test_edge_sigma_smooths_but_gt_stays_crisp():
    base = dict(dims=(20, 20, 5), fg_intensity=100, bg_intensity=10)
    sharp, gt_sharp = generate(PhantomSpec(**base))
    soft, gt_soft = generate(PhantomSpec(params={"edge_sigma": 1.2}, **base))
    np.testing.assert_array_equal(gt_sharp, gt_soft)
    assert len(np.unique(soft.intensities)) > 2
    assert soft.intensities.min() >= 10.0 - 1e-6
    assert soft.intensities.max() <= 100.0 + 1e-6


def test_stacked_vertebrae_components():
    spec = PhantomSpec(dims=(60, 20, 7), body="stacked-vertebrae",
                       params={"n_bodies": 3, "radii": [7, 6, 2], "gap": 3})
    _, gt = generate(spec)
    _, n_comp = ndimage.label(gt)  # default 6-connectivity structure
    assert n_comp == 3


def test_geometry_out_of_bounds():
    spec = PhantomSpec(dims=(10, 10, 3), body="ellipsoid",
                       params={"center": [5, 5, 1], "radii": [8, 3, 1]})
    with pytest.raises(DataError, match="geometry out of bounds"):
        generate(spec)
    box = PhantomSpec(dims=(10, 10, 3), body="box",
                      params={"lo": [0, 0, 0], "hi": [10, 4, 2]})
    with pytest.raises(DataError, match="geometry out of bounds"):
        generate(box)


def test_ellipsoid_default_geometry_fits():
    vol, gt = generate(PhantomSpec(dims=(15, 11, 5)))
    assert gt.any()
    assert vol.shape == (5, 15, 11)


# ---------------------------------------------------------------------------
# auto seeding


def _ellipsoid_gt():
    spec = PhantomSpec(dims=(40, 40, 9), body="ellipsoid",
                       params={"center": [20, 20, 4], "radii": [13, 13, 3]})
    return generate(spec)


@pytest.mark.parametrize("style", ["skeleton-line", "sloppy-rect"])
def test_auto_seed_interior_inside_exterior_outside(style):
    _, gt = _ellipsoid_gt()
    session = auto_seed(gt, style=style)
    labels = rasterize(session, (40, 40, 9))
    fg = labels == 1
    bg = labels == -1
    assert fg.any() and bg.any()
    assert (gt[fg]).all(), "interior seeds must sit on the body"
    assert (~gt[bg]).all(), "exterior seeds must avoid the body"


def test_auto_seed_covers_content_slices_with_timing():
    _, gt = _ellipsoid_gt()
    session = auto_seed(gt)
    content = [z for z in range(9) if gt[z].any()]
    assert sorted(session.per_slice_time) == content
    assert all(t == SECONDS_PER_SLICE for t in session.per_slice_time.values())
    assert len(session.strokes) == 2 * len(content)


def test_auto_seed_slice_subset():
    _, gt = _ellipsoid_gt()
    content = [z for z in range(9) if gt[z].any()]
    subset = content[::2]
    session = auto_seed(gt, slice_set=subset)
    assert sorted(session.per_slice_time) == subset


def test_auto_seed_empty_slice_is_error():
    _, gt = _ellipsoid_gt()
    with pytest.raises(DataError, match="slice 0 has no foreground"):
        auto_seed(gt, slice_set=[0])


def test_auto_seed_unknown_style():
    _, gt = _ellipsoid_gt()
    with pytest.raises(DataError, match="unknown seed style"):
        auto_seed(gt, style="spiral")


def test_auto_seed_needs_room_for_exterior():
    gt = np.ones((1, 6, 6), dtype=bool)  # mask fills the slice
    with pytest.raises(DataError, match="no room for an exterior"):
        auto_seed(gt)


def test_auto_seed_rect_falls_back_to_line_on_thin_slices():
    gt = np.zeros((1, 20, 20), dtype=bool)
    gt[0, 10, 5:15] = True  # one-row body: no rectangle fits
    session = auto_seed(gt, style="sloppy-rect")
    labels = rasterize(session, (20, 20, 1))
    assert ((labels == 1) & ~gt).sum() == 0
    assert (labels == 1).any()


# ---------------------------------------------------------------------------
# suite and spec JSON


def test_default_suite_shape():
    suite = default_suite()
    assert len(suite) == 20
    for spec in suite:
        assert spec.dims == (64, 64, 9)
        assert spec.noise_sigma == pytest.approx(13.5)
        vol, gt = generate(spec)
        assert gt.any()
    assert len({tuple(s.params["radii"]) for s in suite}) > 1


def test_spec_json_round_trip(tmp_path):
    spec = PhantomSpec(dims=(10, 12, 4), body="box",
                       params={"lo": [2, 2, 1], "hi": [7, 9, 2]},
                       fg_intensity=80, bg_intensity=20,
                       noise_sigma=4.0, rng_seed=77)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec_to_dict(spec)))
    back = load_spec(path)
    assert back == spec
    vol_a, _ = generate(spec)
    vol_b, _ = generate(back)
    np.testing.assert_array_equal(vol_a.intensities, vol_b.intensities)


def test_spec_from_dict_defaults_and_errors():
    spec = spec_from_dict({"dims": [8, 8, 3]})
    assert spec.body == "ellipsoid"
    with pytest.raises(DataError, match="malformed phantom spec"):
        spec_from_dict({})


def test_load_spec_missing_file(tmp_path):
    with pytest.raises(DataError, match="no such file"):
        load_spec(tmp_path / "missing.json")

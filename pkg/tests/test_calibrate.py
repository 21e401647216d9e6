import json

import numpy as np
import pytest

from scipy import ndimage

from percdetect.pdlib.detection import calibrate as calibrate_module
from percdetect.pdlib.detection.calibrate import (
    CalibrationCache,
    CalibrationResult,
    calibrate,
    empirical_quantile,
    phi_from_quantile,
    simulate_null_max_clusters,
)
from percdetect.pdlib.detection.tail import max_cluster_samples
from percdetect.pdlib.errors import InvalidProbability
from percdetect.pdlib.mixins.reports import canonical_json
from percdetect.pdlib.mixins.utils import replicate_rng
from percdetect.pdlib.models.noise import NoiseModel


def test_phi_from_quantile_order_statistic() -> None:
    samples = list(range(1, 101))

    assert empirical_quantile(samples, 0.05) == 95
    assert phi_from_quantile(samples, 0.05, margin=1.0) == 96


def test_phi_from_quantile_all_zero_samples() -> None:
    assert phi_from_quantile([0] * 50, 0.05, margin=1.0) == 1
    assert phi_from_quantile([0] * 50, 0.5, margin=2.0) == 1


def test_phi_from_quantile_with_default_margin() -> None:
    samples = [191] * 960 + [300] * 40

    assert empirical_quantile(samples, 0.05) == 191
    assert phi_from_quantile(samples, 0.05) == 250


def test_phi_from_quantile_is_strictly_above_quantile(rng) -> None:
    samples = rng.integers(0, 400, size=777)

    for alpha in (0.01, 0.05, 0.2):
        q = empirical_quantile(samples, alpha)
        assert phi_from_quantile(samples, alpha, margin=1.0) > q
        assert np.mean(samples >= phi_from_quantile(samples, alpha, margin=1.0)) <= alpha


def test_phi_from_quantile_rejects_bad_arguments() -> None:
    with pytest.raises(ValueError, match="margin"):
        phi_from_quantile([1, 2, 3], 0.05, margin=0.5)

    with pytest.raises(ValueError, match="empty"):
        empirical_quantile([], 0.05)

    with pytest.raises(InvalidProbability):
        empirical_quantile([1, 2, 3], 0.0)


def test_single_pixel_null_matches_p_out(gaussian_18) -> None:
    samples = simulate_null_max_clusters(1, 1, gaussian_18, 0.5, 20000, seed=11)

    assert set(np.unique(samples).tolist()) <= {0, 1}
    assert np.mean(samples) == pytest.approx(0.3906, abs=0.01)


def test_unreachable_threshold_gives_empty_clusters(gaussian_18) -> None:
    samples = simulate_null_max_clusters(20, 20, gaussian_18, 1e9, 50, seed=1)

    assert not samples.any()


def test_null_samples_are_deterministic(gaussian_18) -> None:
    first = simulate_null_max_clusters(30, 20, gaussian_18, 0.5, 40, seed=0xC0FFEE)
    again = simulate_null_max_clusters(30, 20, gaussian_18, 0.5, 40, seed=0xC0FFEE)
    other = simulate_null_max_clusters(30, 20, gaussian_18, 0.5, 40, seed=1)

    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_null_samples_do_not_depend_on_worker_count(gaussian_18) -> None:
    inline = simulate_null_max_clusters(24, 24, gaussian_18, 0.5, 12, seed=5, workers=1)
    pooled = simulate_null_max_clusters(24, 24, gaussian_18, 0.5, 12, seed=5, workers=2)

    assert np.array_equal(inline, pooled)


def test_calibrate_result(gaussian_18) -> None:
    result = calibrate(32, 32, gaussian_18, 0.5, 0.05, 100, seed=9)

    assert result.phi == phi_from_quantile(result.samples, 0.05, 1.3)
    assert result.quantile == empirical_quantile(result.samples, 0.05)
    assert len(result.samples) == 100
    assert result.model == gaussian_18.descriptor()
    assert CalibrationResult.from_dict(result.to_dict()) == result


def test_calibrate_rejects_bad_alpha(gaussian_18) -> None:
    with pytest.raises(InvalidProbability):
        calibrate(8, 8, gaussian_18, 0.5, 1.5, 10, seed=0)


def test_calibrate_reports_are_byte_stable(gaussian_18) -> None:
    first = calibrate(40, 40, gaussian_18, 0.5, 0.05, 60, seed=42)
    again = calibrate(40, 40, gaussian_18, 0.5, 0.05, 60, seed=42)

    assert canonical_json(first.to_dict(timings=False)) == canonical_json(again.to_dict(timings=False))


def test_cache_round_trip(tmp_path, gaussian_18, monkeypatch) -> None:
    cache = CalibrationCache(tmp_path.joinpath("cache"))
    first = calibrate(20, 20, gaussian_18, 0.5, 0.05, 30, seed=3, cache=cache)
    key = CalibrationCache.key(20, 20, gaussian_18, 0.5, 30, 3)

    assert cache.path(key).exists()

    def fail(*args, **kwargs):
        raise AssertionError("cache hit expected")

    monkeypatch.setattr(calibrate_module, "simulate_null_max_clusters", fail)
    second = calibrate(20, 20, gaussian_18, 0.5, 0.1, 30, seed=3, cache=cache)

    assert second.samples == first.samples
    assert second.alpha == 0.1


def test_cache_key_depends_on_inputs(gaussian_18) -> None:
    key = CalibrationCache.key(20, 20, gaussian_18, 0.5, 30, 3)

    assert key == CalibrationCache.key(20, 20, gaussian_18, 0.5, 30, 3)
    assert key != CalibrationCache.key(20, 20, gaussian_18, 0.5, 30, 4)
    assert key != CalibrationCache.key(20, 20, gaussian_18, 0.501, 30, 3)
    assert key != CalibrationCache.key(20, 20, NoiseModel.gaussian(1.7), 0.5, 30, 3)


def test_cache_ignores_old_schema(tmp_path) -> None:
    cache = CalibrationCache(tmp_path)
    cache.path("abc").write_text(json.dumps({"schema": "0.9", "samples": [1, 2, 3]}), encoding="utf-8")

    assert cache.load("abc") is None
    assert cache.load("missing") is None


def test_phi_grows_as_alpha_shrinks(rng) -> None:
    samples = rng.integers(0, 300, size=500)
    phis = [phi_from_quantile(samples, alpha) for alpha in (0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.002)]

    assert phis == sorted(phis)


def test_raising_theta_shrinks_null_clusters(gaussian_18) -> None:
    # same seed, same noise draws: each picture only loses black pixels
    for seed in (1, 2, 3):
        low = simulate_null_max_clusters(40, 40, gaussian_18, 0.4, 30, seed=seed)
        high = simulate_null_max_clusters(40, 40, gaussian_18, 0.5, 30, seed=seed)

        assert np.all(low >= high)
        assert low.sum() > high.sum()


def labeled_null_max(width: int, height: int, model: NoiseModel, theta: float, seed: int, index: int) -> int:
    values = model.draw(replicate_rng(seed, index), (height, width))
    labels, count = ndimage.label(values >= theta)
    return int(np.bincount(labels.ravel())[1:].max()) if count else 0


def test_null_samples_match_scipy_labeling(gaussian_18) -> None:
    samples = simulate_null_max_clusters(60, 45, gaussian_18, 0.5, 25, seed=2026)

    assert samples.tolist() == [labeled_null_max(60, 45, gaussian_18, 0.5, 2026, i) for i in range(25)]


@pytest.mark.slow
def test_null_quantile_at_reference_size(gaussian_18) -> None:
    # at p_out ~ 0.39 the 95% largest cluster of a 450 x 450 picture sits near 115
    result = calibrate(450, 450, gaussian_18, 0.5, 0.05, 1000, seed=2026)

    assert 100 <= result.quantile <= 135
    assert result.phi == phi_from_quantile(result.samples, 0.05)
    assert result.phi < 250
    assert list(result.samples[:20]) == [labeled_null_max(450, 450, gaussian_18, 0.5, 2026, i) for i in range(20)]


@pytest.mark.slow
def test_denser_noise_reaches_larger_null_clusters() -> None:
    samples = max_cluster_samples(0.43, 450, 400, seed=2026)

    assert 170 <= empirical_quantile(samples, 0.05) <= 215

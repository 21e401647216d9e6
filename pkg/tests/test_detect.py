import time

import numpy as np
import pytest

from scipy import stats

from percdetect.pdlib.detection.detect import DetectionConfig, PhiSource, detect, false_detection_bound
from percdetect.pdlib.detection.experiment import add_noise, make_square_object
from percdetect.pdlib.errors import InconsistentDetectionConfig, InfeasibleThreshold, InvalidProbability
from percdetect.pdlib.models.images import BinaryImage, GrayImage


def test_noiseless_square_is_detected(noiseless) -> None:
    truth = make_square_object(450, 450, 40, (100, 100))
    config = DetectionConfig.for_theta(noiseless, 0.5, 1600)
    result = detect(add_noise(truth, noiseless, 1), config)

    assert result.detected
    assert result.witness.size == 1600
    assert result.witness.bbox == (100, 100, 139, 139)
    assert result.phi_used == 1600
    assert result.theta_used == 0.5


def test_noiseless_white_picture_is_not_detected(noiseless) -> None:
    config = DetectionConfig.for_theta(noiseless, 0.5, 1)
    result = detect(BinaryImage.blank(30, 20).as_gray(), config)

    assert not result.detected
    assert result.witness is None
    assert "witness" not in result.to_dict()


def test_result_dict_fields(gaussian_18) -> None:
    image = add_noise(BinaryImage.blank(40, 30), gaussian_18, 3)
    result = detect(image, DetectionConfig.for_theta(gaussian_18, 0.5, 1), seed=3)
    d = result.to_dict(timings=False)

    assert d["detected"] is True
    assert d["seed"] == 3
    assert (d["width"], d["height"]) == (40, 30)
    assert "elapsed_ms" not in d
    assert "elapsed_ms" in result.to_dict()


def test_exhaustive_mode_agrees_with_early_stop(gaussian_18) -> None:
    for seed in range(25):
        image = add_noise(BinaryImage.blank(64, 64), gaussian_18, seed)

        for phi in (5, 40, 150):
            config = DetectionConfig.for_theta(gaussian_18, 0.5, phi)
            fast = detect(image, config)
            full = detect(image, config, exhaustive=True)

            assert fast.detected == full.detected == (full.max_cluster >= phi)

            if full.detected:
                assert full.witness.size >= phi


def test_phi_must_fit_the_picture(noiseless) -> None:
    config = DetectionConfig.for_theta(noiseless, 0.5, 101)

    with pytest.raises(InconsistentDetectionConfig, match="exceeds the pixel count"):
        detect(GrayImage(np.zeros((10, 10))), config)


def test_config_validation(noiseless) -> None:
    with pytest.raises(InconsistentDetectionConfig):
        DetectionConfig.for_theta(noiseless, 0.5, 0)

    with pytest.raises(InvalidProbability):
        DetectionConfig.for_theta(noiseless, 0.5, 10, alpha=1.0)


def test_calibrated_phi_needs_feasible_threshold(gaussian_18) -> None:
    config = DetectionConfig.for_theta(gaussian_18, 2.0, 10, source_of_phi=PhiSource.CALIBRATED)

    with pytest.raises(InfeasibleThreshold, match="noise not 1-small"):
        detect(GrayImage(np.zeros((10, 10))), config)

    # a user-fixed phi runs regardless
    fixed = DetectionConfig.for_theta(gaussian_18, 2.0, 10)
    assert not detect(GrayImage(np.zeros((10, 10))), fixed).detected


def test_config_dict(gaussian_18) -> None:
    d = DetectionConfig.for_theta(gaussian_18, 0.5, 250, source_of_phi="calibrated").to_dict()

    assert d["source_of_phi"] == "calibrated"
    assert d["phi"] == 250
    assert d["threshold"]["p_out"] == pytest.approx(0.3906, abs=1e-4)
    assert set(d) == {"threshold", "phi", "alpha", "source_of_phi"}

    with pytest.raises(TypeError):
        DetectionConfig.for_theta(gaussian_18, 0.5, 250).to_dict(timings=False)


def test_false_detection_bound_values() -> None:
    assert false_detection_bound(450, 450, 250, 0.05) == pytest.approx(202500 * np.exp(-12.5), rel=1e-12)
    assert false_detection_bound(450, 450, 250, 0.05) == pytest.approx(0.755, abs=1e-3)
    assert false_detection_bound(450, 450, 250, 1e6) == 0.0
    assert false_detection_bound(450, 450, 1, 1e-9) == 1.0


def test_false_detection_bound_rejects_bad_arguments() -> None:
    with pytest.raises(ValueError):
        false_detection_bound(10, 10, 0, 0.1)

    with pytest.raises(ValueError):
        false_detection_bound(10, 10, 5, 0.0)


@pytest.mark.slow
def test_runtime_is_linear_in_pixel_count(gaussian_18) -> None:
    sizes = [256, 512, 1024, 2048]
    # warm up the compiled kernels
    detect(add_noise(BinaryImage.blank(64, 64), gaussian_18, 0), DetectionConfig.for_theta(gaussian_18, 0.5, 4096))
    medians = []

    for n in sizes:
        image = add_noise(BinaryImage.blank(n, n), gaussian_18, n)
        config = DetectionConfig.for_theta(gaussian_18, 0.5, n * n)
        timings = []

        for _ in range(5):
            start = time.perf_counter()
            detect(image, config)
            timings.append(time.perf_counter() - start)

        medians.append(float(np.median(timings)))

    fit = stats.linregress(np.log([n * n for n in sizes]), np.log(medians))
    assert 0.8 <= fit.slope <= 1.2


def test_lowering_theta_never_loses_a_detection(gaussian_18) -> None:
    truth = make_square_object(48, 48, 12, (18, 18))
    thetas = np.linspace(0.55, -0.40, 12)
    hits = np.zeros(thetas.size, dtype=int)

    for seed in range(30):
        image = add_noise(truth, gaussian_18, seed)
        verdicts = [detect(image, DetectionConfig.for_theta(gaussian_18, float(t), 120)).detected for t in thetas]

        assert verdicts == sorted(verdicts)
        hits += verdicts

    assert np.all(np.diff(hits) >= 0)

import math

import numpy as np
import pytest

from percdetect.pdlib.detection.tail import estimate_tail_rate, fit_tail_rate, max_cluster_samples, site_percolation
from percdetect.pdlib.errors import InvalidProbability


def test_fit_recovers_geometric_rate() -> None:
    q = 0.9
    samples = np.random.default_rng(0).geometric(1.0 - q, size=200000)
    lambda_hat, r_squared, used = fit_tail_rate(samples)

    assert lambda_hat == pytest.approx(-math.log(q), rel=0.05)
    assert r_squared > 0.99
    assert used.size >= 2


def test_fit_without_enough_sizes() -> None:
    lambda_hat, r_squared, used = fit_tail_rate(np.zeros(100, dtype=np.int64))

    assert math.isnan(lambda_hat)
    assert math.isnan(r_squared)
    assert used.size == 0


def test_empty_lattice_has_no_finite_estimate() -> None:
    estimate = estimate_tail_rate(0.0, 64, 20, seed=1)
    d = estimate.to_dict(timings=False)

    assert not estimate.finite
    assert estimate.reason
    assert "lambda_hat" not in d
    assert d["reason"] == estimate.reason


def test_subcritical_estimate_is_positive() -> None:
    estimate = estimate_tail_rate(0.3, 64, 300, seed=2)

    assert estimate.finite
    assert estimate.lambda_hat > 0
    assert estimate.to_dict()["lambda_hat"] == estimate.lambda_hat


@pytest.mark.parametrize("p", [0.6, 0.9, -0.1])
def test_estimate_rejects_non_subcritical_density(p) -> None:
    with pytest.raises(InvalidProbability):
        estimate_tail_rate(p, 64, 10, seed=0)


def test_estimate_rejects_small_lattice() -> None:
    with pytest.raises(ValueError, match="at least 64"):
        estimate_tail_rate(0.3, 32, 10, seed=0)


def test_site_percolation_density(rng) -> None:
    bits = site_percolation(rng, 0.3, 200, 300)

    assert bits.shape == (200, 300)
    assert bits.mean() == pytest.approx(0.3, abs=0.01)


def test_max_cluster_samples_are_deterministic() -> None:
    assert np.array_equal(max_cluster_samples(0.4, 64, 10, seed=3), max_cluster_samples(0.4, 64, 10, seed=3))


@pytest.mark.slow
def test_tail_rate_fit_quality_and_ordering() -> None:
    dense = estimate_tail_rate(0.4, 128, 2000, seed=10)
    sparse = estimate_tail_rate(0.1, 128, 2000, seed=11)

    assert dense.r_squared >= 0.9
    assert dense.lambda_hat > 0
    assert sparse.lambda_hat > dense.lambda_hat

import math

import numpy as np
import pytest

from percdetect.pdlib.errors import InvalidNoiseTable, InvalidProbability
from percdetect.pdlib.models.noise import NoiseKind, NoiseModel


def test_gaussian_cdf_values() -> None:
    model = NoiseModel.gaussian(1.0)

    assert model.cdf(0.0) == 0.5
    assert model.cdf(1.0) == pytest.approx(0.8413447, abs=1e-6)


def test_gaussian_cdf_is_vectorized() -> None:
    model = NoiseModel.gaussian(1.0)
    result = model.cdf(np.array([-1.0, 0.0, 1.0]))

    assert isinstance(result, np.ndarray)
    assert result[0] + result[2] == pytest.approx(1.0)


def test_interpolated_table_cdf_midpoint() -> None:
    model = NoiseModel.from_table([(0.0, 0.0), (1.0, 1.0)], interpolate=True)

    assert model.cdf(0.5) == pytest.approx(0.5)
    assert model.cdf(-3.0) == 0.0
    assert model.cdf(3.0) == 1.0


def test_step_table_cdf_is_right_continuous() -> None:
    model = NoiseModel.from_table([(0.0, 0.5), (2.0, 1.0)])

    assert model.cdf(-0.1) == 0.0
    assert model.cdf(0.0) == 0.5
    assert model.cdf(1.9) == 0.5
    assert model.cdf(2.0) == 1.0


def test_gaussian_quantile() -> None:
    model = NoiseModel.gaussian(1.0)

    assert model.quantile(0.5) == pytest.approx(0.0, abs=1e-12)
    assert model.quantile(0.8413) == pytest.approx(1.0, abs=1e-3)


def test_point_mass_quantile() -> None:
    assert NoiseModel.point_mass(0.0).quantile(0.3) == 0.0


def test_step_table_upper_quantile_skips_flat_stretch() -> None:
    model = NoiseModel.from_table([(0.0, 0.5), (2.0, 1.0)])

    assert model.quantile(0.5) == 0.0
    assert model.upper_quantile(0.5) == 2.0


@pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5])
def test_quantile_rejects_probabilities_outside_open_interval(p) -> None:
    with pytest.raises(InvalidProbability):
        NoiseModel.gaussian(1.0).quantile(p)


def test_sample_is_deterministic() -> None:
    model = NoiseModel.gaussian(1.8)

    assert np.array_equal(model.sample(7, 1000), model.sample(7, 1000))
    assert not np.array_equal(model.sample(7, 1000), model.sample(8, 1000))


def test_sample_moments() -> None:
    samples = NoiseModel.gaussian(1.8).sample(12345, 10**6)

    assert abs(samples.mean()) < 0.01
    assert samples.std() == pytest.approx(1.8, rel=0.01)


def test_table_sample_follows_the_table() -> None:
    samples = NoiseModel.from_table([(0.0, 0.5), (2.0, 1.0)]).sample(3, 20000)

    assert set(np.unique(samples).tolist()) == {0.0, 2.0}
    assert np.mean(samples == 0.0) == pytest.approx(0.5, abs=0.02)


def test_sample_rejects_empty_count() -> None:
    with pytest.raises(ValueError):
        NoiseModel.gaussian(1.0).sample(0, 0)


def test_white_exceed_prob() -> None:
    assert NoiseModel.gaussian(1.0).white_exceed_prob(0.0) == 0.5
    assert NoiseModel.gaussian(1.8).white_exceed_prob(0.5) == pytest.approx(0.3906, abs=1e-4)
    assert NoiseModel.gaussian(2.5).white_exceed_prob(1e9) == 0.0


def test_black_below_prob() -> None:
    assert NoiseModel.gaussian(0.7).black_below_prob(1.0) == 0.5
    assert NoiseModel.gaussian(1.8).black_below_prob(0.5) == pytest.approx(0.3906, abs=1e-4)
    assert NoiseModel.gaussian(1.0).black_below_prob(-1e9) == 0.0


def test_table_kind_ignores_sigma_scaling() -> None:
    model = NoiseModel.from_table([(-1.0, 0.25), (1.0, 1.0)])

    assert model.kind is NoiseKind.TABLE
    assert model.white_exceed_prob(0.0) == 0.75
    assert model.black_below_prob(0.5) == 0.25


@pytest.mark.parametrize(
    "rows",
    [
        [],
        [(1.0, 0.5), (0.0, 1.0)],
        [(0.0, 0.6), (1.0, 0.4), (2.0, 1.0)],
        [(0.0, 0.5), (1.0, 0.9)],
        [(0.0, -0.1), (1.0, 1.0)],
        [(0.0, math.nan), (1.0, 1.0)],
    ],
)
def test_invalid_tables_are_rejected(rows) -> None:
    with pytest.raises(InvalidNoiseTable):
        NoiseModel.from_table(rows)


@pytest.mark.parametrize("sigma", [0.0, -1.0, math.inf])
def test_invalid_sigma_is_rejected(sigma) -> None:
    with pytest.raises(InvalidProbability, match="sigma"):
        NoiseModel.gaussian(sigma)


def test_descriptor_rebuilds_the_model() -> None:
    model = NoiseModel.from_table([(-1.0, 0.2), (0.0, 0.7), (3.0, 1.0)], interpolate=True)

    assert NoiseModel.from_descriptor(model.descriptor()) == model
    assert NoiseModel.from_descriptor(NoiseModel.gaussian(1.8).descriptor()) == NoiseModel.gaussian(1.8)


def test_digest_tracks_the_law() -> None:
    assert NoiseModel.gaussian(1.8).digest() == NoiseModel.gaussian(1.8).digest()
    assert NoiseModel.gaussian(1.8).digest() != NoiseModel.gaussian(1.9).digest()


MODELS = [
    NoiseModel.gaussian(1.8),
    NoiseModel.from_table([(-2.0, 0.1), (-0.5, 0.4), (0.0, 0.55), (1.5, 0.9), (3.0, 1.0)]),
    NoiseModel.from_table([(-2.0, 0.1), (-0.5, 0.4), (0.0, 0.55), (1.5, 0.9), (3.0, 1.0)], interpolate=True),
]


@pytest.mark.parametrize("model", MODELS, ids=["gaussian", "step", "interpolated"])
def test_cdf_is_nondecreasing(model, rng) -> None:
    for _ in range(20):
        xs = np.sort(rng.uniform(-5.0, 5.0, size=200))

        assert np.all(np.diff(model.cdf(xs)) >= 0)


@pytest.mark.parametrize("model", MODELS, ids=["gaussian", "step", "interpolated"])
def test_quantile_and_cdf_form_a_galois_pair(model, rng) -> None:
    ps = rng.uniform(1e-6, 1 - 1e-6, size=500)
    xs = rng.uniform(-5.0, 5.0, size=500)
    inner = model.cdf(xs)
    inner_ps = inner[(inner > 0) & (inner < 1)]

    assert np.all(model.cdf(model.quantile(ps)) >= ps - 1e-12)
    assert np.all(model.quantile(inner_ps) <= xs[(inner > 0) & (inner < 1)] + 1e-9)


@pytest.mark.parametrize("model", MODELS, ids=["gaussian", "step", "interpolated"])
def test_exceedance_complements_the_cdf(model, rng) -> None:
    ys = rng.uniform(-4.0, 4.0, size=300)

    assert np.allclose(model.white_exceed_prob(ys) + model.cdf(model.standardize(ys)), 1.0, rtol=0, atol=1e-15)
    assert np.allclose(model.black_below_prob(ys), model.cdf(model.standardize(ys - 1.0)), rtol=0, atol=0)


def test_gaussian_black_and_white_tails_mirror() -> None:
    model = NoiseModel.gaussian(1.8)
    ys = np.linspace(-3.0, 3.0, 61)

    assert np.allclose(model.white_exceed_prob(ys), model.black_below_prob(1.0 - ys), atol=1e-15)


def test_gaussian_survival_keeps_deep_tails() -> None:
    model = NoiseModel.gaussian(1.0)

    assert model.sf(9.0) > 0
    assert model.sf(9.0) == pytest.approx(1.1285884e-19, rel=1e-6)
    assert model.tail_quantile(1e-17) == pytest.approx(8.4938, rel=1e-4)


@pytest.mark.parametrize("model", MODELS, ids=["gaussian", "step", "interpolated"])
def test_tail_quantile_is_the_smallest_bounded_point(model) -> None:
    for a in [1e-12, 0.05, 0.3, 0.45, 0.6, 0.9]:
        x = model.tail_quantile(a)

        assert model.sf(x) <= a + 1e-15
        assert model.sf(x - 1e-6) > a - 1e-15


def test_tail_quantile_rejects_bounds() -> None:
    for a in (0.0, 1.0):
        with pytest.raises(InvalidProbability):
            NoiseModel.gaussian(1.0).tail_quantile(a)

import numpy as np
import pytest
from sklearn.base import clone

from randsource.estimators import AcousticSourceReconstructor, ElasticSourceReconstructor
from randsource.sources import get_source

from builders import acoustic_measurements, elastic_measurements


@pytest.fixture(scope="module")
def acoustic_fitted():
    source = get_source("acoustic-default")
    measurements = acoustic_measurements(source, order=10, mesh_cells=128, quad_m=128)
    return source, AcousticSourceReconstructor().fit(measurements)


@pytest.fixture(scope="module")
def elastic_fitted():
    source = get_source("elastic-default")
    measurements = elastic_measurements(source, order=10, mesh_cells=128, quad_m=128)
    return source, ElasticSourceReconstructor().fit(measurements)


class TestSklearnContract:
    def test_get_set_params(self):
        est = AcousticSourceReconstructor(truncation=4)
        assert est.get_params() == {"truncation": 4}
        est.set_params(truncation=2)
        assert est.truncation == 2

    def test_clone(self):
        est = ElasticSourceReconstructor(truncation=3)
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()
        assert cloned is not est

    def test_unfitted_predict_raises(self):
        with pytest.raises(RuntimeError):
            AcousticSourceReconstructor().predict_mean([[0.0, 0.0]])

    def test_fit_rejects_wrong_measurement_type(self):
        source = get_source("acoustic-default")
        measurements = acoustic_measurements(source, order=1, mesh_cells=32, quad_m=32)
        with pytest.raises(TypeError):
            ElasticSourceReconstructor().fit(measurements)


class TestAcousticReconstructor:
    def test_predicts_mean_near_source(self, acoustic_fitted):
        source, est = acoustic_fitted
        rng = np.random.default_rng(0)
        pts = rng.uniform(-0.35, 0.35, size=(300, 2))
        predicted = est.predict_mean(pts)
        exact = source.mean(pts[:, 0], pts[:, 1])
        # N = 10 truncation: sub-percent in the sup norm.
        assert np.abs(predicted - exact).max() <= 0.01 * np.abs(exact).max()

    def test_predicts_variance_near_source(self, acoustic_fitted):
        source, est = acoustic_fitted
        rng = np.random.default_rng(1)
        pts = rng.uniform(-0.35, 0.35, size=(300, 2))
        predicted = est.predict_variance(pts)
        exact = source.variance(pts[:, 0], pts[:, 1])
        assert np.abs(predicted - exact).max() <= 0.08 * np.abs(exact).max()

    def test_gradient_prediction_matches_series(self, acoustic_fitted):
        _, est = acoustic_fitted
        pts = np.array([[0.05, 0.1], [-0.2, 0.25]])
        grad = est.predict_mean_gradient(pts)
        h = 1e-6
        fd = (est.predict_mean(pts + [h, 0]) - est.predict_mean(pts - [h, 0])) / (2 * h)
        np.testing.assert_allclose(grad[:, 0], fd, atol=1e-4)

    def test_truncation_parameter_subsets(self):
        source = get_source("acoustic-default")
        measurements = acoustic_measurements(source, order=4, mesh_cells=64, quad_m=64)
        est = AcousticSourceReconstructor(truncation=2).fit(measurements)
        assert est.truncation_ == 2
        assert est.mean_coefficients_.order == 2

    def test_single_point_prediction(self, acoustic_fitted):
        source, est = acoustic_fitted
        value = est.predict_mean((0.01, 0.12))
        assert np.isscalar(value) or np.asarray(value).ndim == 0


class TestElasticReconstructor:
    def test_predicts_vector_fields(self, elastic_fitted):
        source, est = elastic_fitted
        rng = np.random.default_rng(2)
        pts = rng.uniform(-0.35, 0.35, size=(200, 2))
        predicted = est.predict_mean(pts)
        assert predicted.shape == (200, 2)
        exact = np.stack([source.mean[c](pts[:, 0], pts[:, 1]) for c in (0, 1)], axis=-1)
        assert np.abs(predicted - exact).max() <= 0.05 * np.abs(exact).max()

    def test_variance_components(self, elastic_fitted):
        source, est = elastic_fitted
        pts = np.array([[0.01, 0.12], [0.1, -0.1]])
        predicted = est.predict_variance(pts)
        exact = np.stack([source.variance[c](pts[:, 0], pts[:, 1]) for c in (0, 1)], axis=-1)
        np.testing.assert_allclose(predicted, exact, atol=0.02)

    def test_gradient_shape(self, elastic_fitted):
        _, est = elastic_fitted
        grads = est.predict_mean_gradient(np.zeros((5, 2)))
        assert grads.shape == (5, 2, 2)

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from ghostsim.estimators import PhotonNumberTransformer, TomographyTransformer
from ghostsim.integrals import total_photon_number
from ghostsim.tomography import TomographyScenario, probe_visibility


def test_photon_number_matches_function():
    X = np.array([[10.0], [100.0], [1e3]])
    out = PhotonNumberTransformer(q=2.0).fit_transform(X)
    ref = [total_photon_number(x, q=2.0) for x in X[:, 0]]
    assert np.allclose(out[:, 0], ref, rtol=1e-14)
    assert np.allclose(out[:, 1], np.exp(-out[:, 0] / 2), rtol=1e-15)


def test_two_column_input():
    X = np.array([[100.0, 1.0], [100.0, 3.0]])
    out = PhotonNumberTransformer().fit_transform(X)
    assert out[1, 0] == pytest.approx(9 * out[0, 0], rel=1e-12)


def test_params_and_clone():
    est = PhotonNumberTransformer(q=3.0, n_nodes=256)
    assert est.get_params()["q"] == 3.0
    other = clone(est).set_params(q=1.0)
    assert other.q == 1.0 and est.q == 3.0


def test_not_fitted():
    with pytest.raises(NotFittedError):
        PhotonNumberTransformer().transform([[1.0]])


def test_feature_mismatch():
    est = PhotonNumberTransformer().fit([[1.0]])
    with pytest.raises(ValueError):
        est.transform([[1.0, 2.0]])


def test_pipeline():
    pipe = make_pipeline(FunctionTransformer(lambda x: 10.0**x), PhotonNumberTransformer(n_nodes=512))
    out = pipe.fit_transform(np.array([[1.0], [2.0], [3.0]]))
    assert np.all(np.diff(out[:, 0]) > 0)
    assert list(pipe[-1].get_feature_names_out()) == ["n", "visibility"]


def test_tomography_transformer():
    est = TomographyTransformer(spacing=10.0, n_nodes=512)
    out = est.fit_transform([[50.0], [500.0]])
    scn = TomographyScenario.symmetric(500.0, 10.0, grid=est.grid_)
    assert out[1, 1] == pytest.approx(probe_visibility(scn), rel=1e-14)
    assert np.all(np.abs(out[:, 2]) <= out[:, 1] + 1e-12)
    assert out.shape == (2, 5)

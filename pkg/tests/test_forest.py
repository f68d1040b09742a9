import numpy as np
import pytest
from sklearn.base import clone

from shapeletkit import ArtifactError, ForestClassifier, ForestConfig, InvalidInput, train
from shapeletkit import ShapeletTransformClassifier, TransformMatrix
from shapeletkit.forest import _gini, grow_tree


def _blobs(seed=0, n=60):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(0, 1, (n // 2, 3)), rng.normal(3, 1, (n // 2, 3))])
    y = np.array(["A"] * (n // 2) + ["B"] * (n // 2))
    return X, y


def test_gini_values():
    np.testing.assert_allclose(_gini(np.array([[2.0, 2.0], [4.0, 0.0]]), np.array([4.0, 4.0])),
                               [0.5, 0.0])


def test_single_tree_fits_training_data_exactly():
    X, y = _blobs()
    codes = (y == "B").astype(int)
    tree, inbag = grow_tree(X, codes, 2, np.random.default_rng(0), 3, bootstrap=False)
    assert inbag.all()
    assert np.array_equal(np.argmax(tree.predict_proba(X), axis=1), codes)


def test_probabilities_sum_to_one_and_accuracy():
    X, y = _blobs()
    f = ForestClassifier(n_estimators=50, random_state=1).fit(X, y)
    p = f.predict_proba(X)
    np.testing.assert_allclose(p.sum(axis=1), 1.0)
    Xt, yt = _blobs(seed=9)
    assert (f.predict(Xt) == yt).mean() >= 0.9


def test_same_seed_same_forest_any_threads():
    X, y = _blobs()
    a = ForestClassifier(n_estimators=30, random_state=4, n_jobs=1).fit(X, y).to_json()
    b = ForestClassifier(n_estimators=30, random_state=4, n_jobs=3).fit(X, y).to_json()
    c = ForestClassifier(n_estimators=30, random_state=5).fit(X, y).to_json()
    assert a == b and a != c


def test_unseeded_forest_records_seed():
    X, y = _blobs()
    f = ForestClassifier(n_estimators=5, random_state=None).fit(X, y)
    again = ForestClassifier(n_estimators=5, random_state=f.seed_).fit(X, y)
    np.testing.assert_array_equal(f.predict_proba(X), again.predict_proba(X))


def test_json_round_trip_predicts_identically():
    X, y = _blobs()
    f = ForestClassifier(n_estimators=20).fit(X, y)
    g = ForestClassifier.from_json(f.to_json({"note": "x"}))
    np.testing.assert_array_equal(f.predict_proba(X), g.predict_proba(X))
    assert g.metadata_ == {"note": "x"}
    assert g.to_json({"note": "x"}) == f.to_json({"note": "x"})


def test_bad_model_documents():
    with pytest.raises(ArtifactError):
        ForestClassifier.from_json("not json")
    with pytest.raises(ArtifactError):
        ForestClassifier.from_dict({"format": "shapeletkit/forest", "version": 99})


def test_input_errors():
    X, y = _blobs()
    with pytest.raises(InvalidInput):
        ForestClassifier().fit(X, np.array(["A"] * len(y)))
    with pytest.raises(InvalidInput):
        ForestClassifier(max_features=10).fit(X, y)
    f = ForestClassifier(n_estimators=3).fit(X, y)
    with pytest.raises(InvalidInput):
        f.predict_proba(X[:, :2])


def test_oob_score():
    X, y = _blobs()
    f = ForestClassifier(n_estimators=40, oob_score=True).fit(X, y)
    assert 0.8 <= f.oob_score_ <= 1.0


def test_constant_features_give_prior_leaves():
    X = np.zeros((6, 2))
    y = np.array(["A", "A", "A", "A", "B", "B"])
    f = ForestClassifier(n_estimators=10, bootstrap=False).fit(X, y)
    np.testing.assert_allclose(f.predict_proba(X[:1]), [[4 / 6, 2 / 6]])


def test_train_and_prediction_format():
    X, y = _blobs()
    m = TransformMatrix(X, ("a", "b", "c"), tuple(y))
    model = train(m, ForestConfig(n_trees=25, seed=2))
    pred = model.predict_one(X[0])
    assert pred.label == "A"
    assert abs(sum(pred.probabilities.values()) - 1.0) < 1e-12
    assert pred.format().startswith("A (prob(A) = ")


def test_sklearn_clone_and_params():
    f = ForestClassifier(n_estimators=7, max_depth=3)
    g = clone(f)
    assert g.get_params()["n_estimators"] == 7 and g.get_params()["max_depth"] == 3


def test_end_to_end_classifier(bursts):
    X, y = bursts(24, length=40, burst=10, seed=8)
    Xt, yt = bursts(16, length=40, burst=10, seed=9)
    clf = ShapeletTransformClassifier(min_len=10, max_len=10, n_estimators=50)
    clf.fit(X, y)
    assert (clf.predict(Xt) == np.array(yt)).mean() >= 0.9
    assert len(clf.shapelets_) > 0

import math

import numpy as np
import pytest

import nlasso


def test_soft_threshold():
    assert nlasso.soft_threshold(2.0, 0.5) == pytest.approx(1.5)
    assert nlasso.soft_threshold(-3.0, 1.0) == pytest.approx(-2.0)
    assert nlasso.soft_threshold(0.5, 1.0) == 0.0


def test_simulate_shapes_and_determinism():
    Xtr, ytr, Xte, yte, truth = nlasso.simulate(p=10, n_train=40, n_test=100, seed=3)
    assert Xtr.shape == (40, 10)
    assert ytr.shape == (40,)
    assert Xte.shape == (100, 10)
    assert sum(truth) == 4

    Xtr2, ytr2, _, _, truth2 = nlasso.simulate(p=10, n_train=40, n_test=100, seed=3)
    np.testing.assert_array_equal(Xtr, Xtr2)
    np.testing.assert_array_equal(ytr, ytr2)
    assert truth == truth2


def test_statistical_fit_recovers_signal():
    Xtr, ytr, Xte, yte, truth = nlasso.simulate(p=20, n_train=50, n_test=500, seed=11)
    model = nlasso.fit_statistical(Xtr, ytr, task="linear", k=5, seed=11)
    assert nlasso.support_recall(model, truth) == 1.0
    assert nlasso.test_mse(model, Xte, yte) < 2.5
    pred = model.predict(Xte)
    assert pred.shape == (500,)


def test_lambda_grid_is_log_spaced():
    Xtr, ytr, _, _, _ = nlasso.simulate(p=5, n_train=30, n_test=10, seed=2)
    grid = nlasso.lambda_grid(Xtr, ytr, task="linear", count=5, ratio=1e-2)
    assert len(grid) == 5
    ratios = [grid[i + 1] / grid[i] for i in range(4)]
    assert max(ratios) - min(ratios) < 1e-12
    assert grid[-1] == pytest.approx(grid[0] * 1e-2)


def test_voting_fit_votes_and_model():
    Xtr, ytr, Xte, yte, truth = nlasso.simulate(p=15, n_train=50, n_test=200, seed=5)
    model, votes, threshold = nlasso.fit_voting(
        Xtr, ytr, task="linear", k=5, grid_count=30, seed=5
    )
    assert threshold == 3
    assert len(votes) == 15
    selected = [v >= threshold for v in votes]
    assert selected == list(model.support)
    assert model.lambda_ == 0.0


def test_paired_t_test_identical():
    t, p = nlasso.paired_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert t == 0.0
    assert p == 1.0


def test_logistic_fit_smoke():
    Xtr, ytr, Xte, yte, truth = nlasso.simulate(
        p=8, n_train=80, n_test=200, logistic_response=True, seed=7
    )
    model = nlasso.fit_statistical(Xtr, ytr, task="logistic", k=5, grid_count=40, seed=7)
    acc = nlasso.test_accuracy(model, Xte, yte)
    assert 0.5 <= acc <= 1.0
    proba = model.predict(Xte)
    assert np.all(proba >= 0.0) and np.all(proba <= 1.0)


def test_error_propagation():
    X = np.ones((5, 2))
    y = np.arange(5.0)
    with pytest.raises(nlasso.NlassoError):
        nlasso.fit_statistical(X, y, task="linear")  # constant columns

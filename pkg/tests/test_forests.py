from fractions import Fraction

import numpy as np
import pytest

from jobfraud import forests
from jobfraud.errors import ShapeError
from jobfraud.forests import (
    EnsembleModel,
    GradientBoosting,
    LeafwiseGradientBoosting,
    RandomForest,
    TreeNode,
    best_split,
    build_tabular,
    compute_bins,
    count_terms,
    ensemble_from_dict,
    ensemble_predict,
    ensemble_to_dict,
    fit_gbm,
    fit_leafwise_gbm,
    fit_random_forest,
    fit_tree,
    select_terms,
    tree_predict,
)
from jobfraud.ndgrad import _sigmoid_values
from jobfraud.rng import SplitMix64


# --------------------------------------------------------------------------
# Exact-arithmetic oracles
# --------------------------------------------------------------------------

def gini_gain_exact(y, mask):
    """Impurity decrease as an exact rational."""
    y = [int(v) for v in y]
    n = len(y)

    def gini(sub):
        if not sub:
            return Fraction(0)
        p = Fraction(sum(sub), len(sub))
        return 2 * p * (1 - p)

    left = [v for v, m in zip(y, mask) if m]
    right = [v for v, m in zip(y, mask) if not m]
    return (
        gini(y)
        - Fraction(len(left), n) * gini(left)
        - Fraction(len(right), n) * gini(right)
    )


def variance_gain_exact(y, mask):
    ys = [Fraction(v).limit_denominator(10**6) for v in y]
    n = len(ys)

    def var(sub):
        if not sub:
            return Fraction(0)
        mean = sum(sub) / len(sub)
        return sum((v - mean) ** 2 for v in sub) / len(sub)

    left = [v for v, m in zip(ys, mask) if m]
    right = [v for v, m in zip(ys, mask) if not m]
    return (
        var(ys)
        - Fraction(len(left), n) * var(left)
        - Fraction(len(right), n) * var(right)
    )


def brute_force_best_gain(X, y, min_leaf, exact_gain):
    """Max exact gain over every (feature, midpoint threshold) pair."""
    best = Fraction(0)
    n, n_features = X.shape
    for f in range(n_features):
        values = sorted(set(X[:, f]))
        for lo, hi in zip(values, values[1:]):
            threshold = (lo + hi) / 2.0
            mask = X[:, f] <= threshold
            if mask.sum() < min_leaf or (~mask).sum() < min_leaf:
                continue
            gain = exact_gain(y, mask)
            if gain > best:
                best = gain
    return best


# --------------------------------------------------------------------------
# fit_tree
# --------------------------------------------------------------------------

def test_tree_simple_split_to_pure_leaves():
    X = np.array([[0.0], [1.0], [0.0], [1.0]])
    y = np.array([0, 1, 0, 1])
    tree = fit_tree(X, y)
    assert tree.feature == 0 and tree.threshold == 0.5
    assert tree.left.is_leaf and tree.left.value == 0.0
    assert tree.right.is_leaf and tree.right.value == 1.0


def test_tree_pure_labels_single_leaf():
    tree = fit_tree(np.array([[1.0], [2.0], [3.0]]), np.array([1, 1, 1]))
    assert tree.is_leaf and tree.value == 1.0


def test_tree_constant_features_mixed_labels_single_leaf():
    tree = fit_tree(np.ones((6, 3)), np.array([0, 1, 0, 1, 1, 0]))
    assert tree.is_leaf and tree.value == 0.5


def test_tree_tie_breaks_lowest_feature_then_threshold():
    # duplicated perfect feature: both give identical gain; feature 0 wins
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0], [1.0, 1.0]])
    found = best_split(X, np.array([0.0, 1.0, 0.0, 1.0]), range(2), 1, "gini")
    assert found[0] == 0
    # three identical-gain thresholds inside one feature: lowest wins
    X2 = np.array([[0.0], [1.0], [2.0], [3.0]])
    y2 = np.array([0.0, 0.0, 1.0, 1.0])
    f2 = best_split(X2, y2, range(1), 1, "gini")
    assert f2[1] == 1.5  # the maximizer; 0.5/2.5 are strictly worse


def test_tree_split_matches_brute_force_on_random_instances():
    """Chosen split's exact gain equals the exhaustive-search optimum."""
    rng = SplitMix64(2024)
    for case in range(100):
        n = 5 + rng.randrange(46)
        n_features = 1 + rng.randrange(5)
        X = np.array([[float(rng.randrange(5)) for _ in range(n_features)] for _ in range(n)])
        y = np.array([rng.randrange(2) for _ in range(n)], dtype=float)
        found = best_split(X, y, range(n_features), 1, "gini")
        brute = brute_force_best_gain(X, y, 1, gini_gain_exact)
        if found is None:
            assert brute == 0
            continue
        f, threshold, gain = found
        chosen_exact = gini_gain_exact(y, X[:, f] <= threshold)
        assert chosen_exact == brute, f"case {case}"
        assert gain == pytest.approx(float(brute), rel=1e-9)


def test_regression_split_matches_brute_force():
    rng = SplitMix64(77)
    for case in range(40):
        n = 5 + rng.randrange(30)
        X = np.array([[float(rng.randrange(4)) for _ in range(3)] for _ in range(n)])
        y = np.array([rng.randrange(5) / 2.0 for _ in range(n)])
        found = best_split(X, y, range(3), 1, "variance")
        brute = brute_force_best_gain(X, y, 1, variance_gain_exact)
        if found is None:
            assert brute == 0
            continue
        f, threshold, _ = found
        chosen = variance_gain_exact(y, X[:, f] <= threshold)
        assert chosen == brute, f"case {case}"


def test_tree_respects_min_samples_leaf():
    X = np.arange(10.0).reshape(-1, 1)
    y = np.array([0, 0, 0, 0, 0, 1, 1, 1, 1, 1])
    tree = fit_tree(X, y, min_samples_leaf=3)

    def check(node, rows):
        if node.is_leaf:
            assert len(rows) >= 3
            return
        mask = X[rows, node.feature] <= node.threshold
        check(node.left, rows[mask])
        check(node.right, rows[~mask])

    check(tree, np.arange(10))


def test_tree_max_depth():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(60, 3))
    y = (X[:, 0] + X[:, 1] > 0).astype(int)
    tree = fit_tree(X, y, max_depth=2)

    def depth(node):
        return 0 if node.is_leaf else 1 + max(depth(node.left), depth(node.right))

    assert depth(tree) <= 2


# --------------------------------------------------------------------------
# Random forest
# --------------------------------------------------------------------------

def _separable(n=60, seed=1):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 4))
    y = (X[:, 2] > 0).astype(int)
    return X, y


def test_forest_perfect_feature_generalizes():
    X, y = _separable()
    model = fit_random_forest(X, y, n_trees=20, seed=5)
    X_new, y_new = _separable(seed=2)
    preds = (ensemble_predict(model, X_new) >= 0.5).astype(int)
    assert (preds == y_new).mean() == 1.0


def test_single_tree_no_bootstrap_equals_fit_tree():
    X, y = _separable(n=40)
    model = fit_random_forest(
        X, y, n_trees=1, bootstrap=False, feature_subsample=4, max_depth=25, seed=9,
    )
    direct = fit_tree(X, y.astype(float), max_depth=25, min_samples_leaf=1)
    assert np.array_equal(ensemble_predict(model, X), tree_predict(direct, X))


def test_forest_same_seed_identical():
    X, y = _separable()
    a = fit_random_forest(X, y, n_trees=5, seed=3)
    b = fit_random_forest(X, y, n_trees=5, seed=3)
    assert ensemble_to_dict(a) == ensemble_to_dict(b)


def test_forest_probability_permutation_invariant():
    X, y = _separable()
    model = fit_random_forest(X, y, n_trees=7, seed=1)
    shuffled = EnsembleModel(
        kind=model.kind, trees=tuple(reversed(model.trees)),
        n_features=model.n_features,
    )
    assert np.allclose(ensemble_predict(model, X), ensemble_predict(shuffled, X))


# --------------------------------------------------------------------------
# GBM
# --------------------------------------------------------------------------

def test_gbm_degenerate_labels():
    X = np.random.default_rng(0).normal(size=(12, 2))
    model = fit_gbm(X, np.ones(12, dtype=int), n_rounds=5)
    assert model.base_score == 10.0
    assert len(model.trees) == 0
    assert (ensemble_predict(model, X) > 0.999).all()


def test_gbm_base_score_balanced():
    X = np.zeros((4, 1))
    model = fit_gbm(X, np.array([0, 1, 0, 1]), n_rounds=0)
    assert model.base_score == 0.0
    assert np.allclose(ensemble_predict(model, X), 0.5)


def test_gbm_first_round_reduces_log_loss():
    X, y = _separable()
    base = fit_gbm(X, y, n_rounds=0)
    one = fit_gbm(X, y, n_rounds=1)

    def log_loss(model):
        p = np.clip(ensemble_predict(model, X), 1e-12, 1 - 1e-12)
        return -(y * np.log(p) + (1 - y) * np.log(1 - p)).mean()

    assert log_loss(one) < log_loss(base)


def test_gbm_training_log_loss_non_increasing():
    X, y = _separable(n=50)
    losses = []
    for rounds in range(0, 16, 3):
        model = fit_gbm(X, y, n_rounds=rounds, learning_rate=0.1)
        p = np.clip(ensemble_predict(model, X), 1e-12, 1 - 1e-12)
        losses.append(-(y * np.log(p) + (1 - y) * np.log(1 - p)).mean())
    assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))


# --------------------------------------------------------------------------
# Leaf-wise GBM
# --------------------------------------------------------------------------

def test_leafwise_max_leaves_two_is_single_split():
    X, y = _separable(n=80)
    model = fit_leafwise_gbm(X, y, n_rounds=3, max_leaves=2, min_samples_leaf=5)
    for tree in model.trees:
        assert not tree.is_leaf
        assert tree.left.is_leaf and tree.right.is_leaf


def test_leafwise_histogram_gain_matches_exact_on_small_instances():
    """With more bins than distinct values the histogram search is exact."""
    rng = SplitMix64(99)
    for case in range(50):
        n = 10 + rng.randrange(41)
        X = np.array([[float(rng.randrange(6)) for _ in range(4)] for _ in range(n)])
        resid = np.array([rng.random() - 0.5 for _ in range(n)])
        bins = compute_bins(X, n_bins=255)
        edge_mask = np.zeros((4, bins.n_bins - 1), dtype=bool)
        for f, e in enumerate(bins.edges):
            edge_mask[f, : e.shape[0]] = True
        count, grad = forests._leaf_histograms(bins, np.arange(n), resid)
        hist = forests._best_hist_split(bins, count, grad, edge_mask, 1)
        exact = best_split(X, resid, range(4), 1, "variance")
        if hist is None or exact is None:
            assert hist is None and exact is None
            continue
        gain_hist = hist[0] / n  # same 1/n scaling as best_split
        assert gain_hist == pytest.approx(exact[2], rel=1e-9), f"case {case}"
        # and the split itself routes the same rows
        f_h, b_h = hist[1], hist[2]
        mask_hist = X[:, f_h] <= bins.edges[f_h][b_h]
        mask_exact = X[:, exact[0]] <= exact[1]
        assert np.array_equal(mask_hist, mask_exact), f"case {case}"


def test_leafwise_deterministic():
    X, y = _separable(n=70)
    a = fit_leafwise_gbm(X, y, n_rounds=4, min_samples_leaf=5)
    b = fit_leafwise_gbm(X, y, n_rounds=4, min_samples_leaf=5)
    assert ensemble_to_dict(a) == ensemble_to_dict(b)


def test_leafwise_learns_separable():
    X, y = _separable(n=100)
    model = fit_leafwise_gbm(X, y, n_rounds=30, min_samples_leaf=5)
    preds = (ensemble_predict(model, X) >= 0.5).astype(int)
    assert (preds == y).mean() >= 0.99


def test_leafwise_respects_min_samples_leaf():
    X, y = _separable(n=60)
    model = fit_leafwise_gbm(X, y, n_rounds=2, min_samples_leaf=10)

    def check(node, rows):
        if node.is_leaf:
            assert len(rows) >= 10
            return
        mask = X[rows, node.feature] <= node.threshold
        check(node.left, rows[mask])
        check(node.right, rows[~mask])

    for tree in model.trees:
        check(tree, np.arange(60))


# --------------------------------------------------------------------------
# ensemble_predict
# --------------------------------------------------------------------------

def test_predict_forest_of_identical_stumps():
    stump = TreeNode(feature=0, threshold=0.5, left=TreeNode(value=0.2), right=TreeNode(value=0.9))
    model = EnsembleModel(kind="random_forest", trees=(stump, stump, stump), n_features=1)
    out = ensemble_predict(model, np.array([[0.0], [1.0]]))
    assert np.allclose(out, [0.2, 0.9])


def test_predict_zero_rounds_is_constant_sigmoid():
    model = EnsembleModel(kind="gbm", trees=(), n_features=2, learning_rate=0.1, base_score=-1.3)
    out = ensemble_predict(model, np.zeros((4, 2)))
    assert np.allclose(out, _sigmoid_values(np.array([-1.3])))


def test_predict_probabilities_in_range():
    X, y = _separable()
    for model in (
        fit_random_forest(X, y, n_trees=5, seed=0),
        fit_gbm(X, y, n_rounds=10),
        fit_leafwise_gbm(X, y, n_rounds=10, min_samples_leaf=5),
    ):
        p = ensemble_predict(model, X)
        assert ((p >= 0.0) & (p <= 1.0)).all()


def test_predict_width_mismatch():
    model = EnsembleModel(kind="random_forest", trees=(TreeNode(value=0.5),), n_features=3)
    with pytest.raises(ShapeError):
        ensemble_predict(model, np.zeros((2, 4)))


def test_tree_serialization_round_trip():
    X, y = _separable(n=40)
    model = fit_gbm(X, y, n_rounds=3)
    clone = ensemble_from_dict(ensemble_to_dict(model))
    assert np.array_equal(ensemble_predict(model, X), ensemble_predict(clone, X))


# --------------------------------------------------------------------------
# Tabular featurization
# --------------------------------------------------------------------------

def test_count_terms_hand_case():
    counts = count_terms(["b b a"], ["a", "b"])
    assert counts.tolist() == [[1.0, 2.0]]


def test_count_terms_empty_text():
    assert count_terms([""], ["a", "b"]).tolist() == [[0.0, 0.0]]


def test_build_tabular_width_constant():
    numeric = np.zeros((3, 4))
    terms = select_terms(["a b c", "a a", "d"], top_k=3)
    X = build_tabular(numeric, ["a b", "c d", ""], terms)
    assert X.shape == (3, 4 + 3)


def test_estimator_wrappers_fit_predict():
    X, y = _separable(n=80)
    for est in (
        RandomForest(n_trees=10, seed=1),
        GradientBoosting(n_rounds=10),
        LeafwiseGradientBoosting(n_rounds=10, min_samples_leaf=5),
    ):
        est.fit(X, y)
        proba = est.predict_proba(X)
        assert proba.shape == (80, 2)
        assert ((est.predict(X) == 0) | (est.predict(X) == 1)).all()
        assert (est.predict(X) == y).mean() > 0.9

"""Tree-ensemble baselines: random forest, depth-wise gradient boosting,
and a leaf-wise histogram-boosting variant.

Split search is exact greedy CART over midpoints between consecutive
distinct sorted values (Gini for classification trees, variance reduction
for regression trees); ties in gain break toward the lowest feature index,
then the lowest threshold. The leaf-wise trainer bins features into
equal-frequency histograms once and always splits the highest-gain leaf.
"""

import heapq
import logging
from dataclasses import dataclass

import numpy as np

from . import features as features_mod
from .base import Estimator, check_labels, check_matrix
from .errors import ShapeError
from .ndgrad import _sigmoid_values
from .rng import SplitMix64

logger = logging.getLogger(__name__)

_NEWTON_EPS = 1e-12


@dataclass(slots=True)
class TreeNode:
    """Internal node (feature/threshold/left/right) or leaf (value).

    Rows with X[:, feature] <= threshold route left.
    """

    value: float = 0.0
    feature: int | None = None
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass(frozen=True)
class EnsembleModel:
    kind: str  # random_forest | gbm | leafwise_gbm
    trees: tuple
    n_features: int
    learning_rate: float | None = None
    base_score: float | None = None


# --------------------------------------------------------------------------
# Exact split search
# --------------------------------------------------------------------------

def best_split(X, y, feature_indices, min_samples_leaf, criterion):
    """Best (feature, threshold, gain) over exact midpoint candidates.

    Gain is the impurity decrease I(parent) - w_l I(left) - w_r I(right);
    returns None when no candidate strictly decreases impurity while
    leaving min_samples_leaf rows on each side.
    """
    n = y.shape[0]
    total = y.sum()
    if criterion == "gini":
        parent_term = total * (n - total) / n  # n/2 * parent impurity
    elif criterion == "variance":
        parent_term = total * total / n  # constant part of the score
    else:
        raise ValueError(f"unknown criterion {criterion!r}")

    best_score = -np.inf
    best_feature = None
    best_threshold = 0.0
    left_n = np.arange(1, n, dtype=np.float64)
    right_n = n - left_n

    for f in feature_indices:
        x = X[:, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        ys = y[order]
        boundary = xs[1:] != xs[:-1]
        if not boundary.any():
            continue
        cum = np.cumsum(ys)[:-1]
        if criterion == "gini":
            pos_l = cum
            pos_r = total - cum
            score = -(pos_l * (left_n - pos_l) / left_n + pos_r * (right_n - pos_r) / right_n)
        else:
            score = cum * cum / left_n + (total - cum) ** 2 / right_n
        valid = boundary & (left_n >= min_samples_leaf) & (right_n >= min_samples_leaf)
        if not valid.any():
            continue
        score = np.where(valid, score, -np.inf)
        i = int(np.argmax(score))  # first max: lowest threshold
        if score[i] > best_score:
            best_score = score[i]
            best_feature = f
            best_threshold = (xs[i] + xs[i + 1]) / 2.0

    if best_feature is None:
        return None
    if criterion == "gini":
        gain = 2.0 * (parent_term + best_score) / n
    else:
        gain = (best_score - parent_term) / n
    if gain <= 0.0:
        return None
    return best_feature, best_threshold, gain


def fit_tree(
    X,
    y,
    max_depth=None,
    min_samples_leaf=1,
    criterion="gini",
    feature_subsample=None,
    rng=None,
):
    """Greedy recursive best-split CART tree.

    `feature_subsample` is a per-node candidate count (None = all
    features), drawn from `rng`. Leaves carry the class-1 fraction
    (classification) or the mean target (regression).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n_features = X.shape[1]

    def grow(rows, depth):
        yr = y[rows]
        node = TreeNode(value=float(yr.mean()))
        if (
            rows.shape[0] < 2 * min_samples_leaf
            or (max_depth is not None and depth >= max_depth)
            or (yr == yr[0]).all()
        ):
            return node
        if feature_subsample is None or feature_subsample >= n_features:
            candidates = range(n_features)
        else:
            candidates = rng.sample_indices(n_features, feature_subsample)
        found = best_split(X[rows], yr, candidates, min_samples_leaf, criterion)
        if found is None:
            return node
        f, threshold, _ = found
        mask = X[rows, f] <= threshold
        node.feature = f
        node.threshold = threshold
        node.left = grow(rows[mask], depth + 1)
        node.right = grow(rows[~mask], depth + 1)
        return node

    return grow(np.arange(X.shape[0]), 0)


def tree_predict(root: TreeNode, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(X.shape[0])

    def route(node, idx):
        if node.is_leaf:
            out[idx] = node.value
            return
        mask = X[idx, node.feature] <= node.threshold
        route(node.left, idx[mask])
        route(node.right, idx[~mask])

    route(root, np.arange(X.shape[0]))
    return out


# --------------------------------------------------------------------------
# Random forest
# --------------------------------------------------------------------------

def fit_random_forest(
    X,
    y,
    n_trees=100,
    max_depth=25,
    min_samples_leaf=1,
    feature_subsample="sqrt",
    bootstrap=True,
    seed=42,
) -> EnsembleModel:
    """Bagged classification trees; tree i draws from stream seed + i."""
    X = check_matrix(X)
    y = check_labels(y, X.shape[0])
    n, n_features = X.shape
    if feature_subsample == "sqrt":
        per_node = max(1, int(np.sqrt(n_features)))
    else:
        per_node = feature_subsample
    trees = []
    for i in range(n_trees):
        rng = SplitMix64(seed + i)
        if bootstrap:
            rows = np.fromiter((rng.randrange(n) for _ in range(n)), np.int64, n)
            Xi, yi = X[rows], y[rows]
        else:
            Xi, yi = X, y
        trees.append(
            fit_tree(
                Xi,
                yi,
                max_depth=max_depth,
                min_samples_leaf=min_samples_leaf,
                criterion="gini",
                feature_subsample=per_node,
                rng=rng,
            )
        )
    return EnsembleModel(kind="random_forest", trees=tuple(trees), n_features=n_features)


# --------------------------------------------------------------------------
# Depth-wise gradient boosting
# --------------------------------------------------------------------------

def _clamped_log_odds(rate: float) -> float:
    if rate <= 0.0:
        return -10.0
    if rate >= 1.0:
        return 10.0
    return float(np.clip(np.log(rate / (1.0 - rate)), -10.0, 10.0))


def _newtonize(node: TreeNode, X, rows, residual, hessian, out) -> None:
    """Replace leaf means with Newton steps and emit per-row predictions."""
    if node.is_leaf:
        node.value = float(residual[rows].sum() / (hessian[rows].sum() + _NEWTON_EPS))
        out[rows] = node.value
        return
    mask = X[rows, node.feature] <= node.threshold
    _newtonize(node.left, X, rows[mask], residual, hessian, out)
    _newtonize(node.right, X, rows[~mask], residual, hessian, out)


def fit_gbm(
    X,
    y,
    n_rounds=100,
    learning_rate=0.1,
    max_depth=3,
    min_samples_leaf=1,
    seed=42,
) -> EnsembleModel:
    """Logistic-loss boosting on exact regression trees.

    Starts from the log-odds of the training positive rate; each round fits
    a depth-limited tree to the residuals y - sigmoid(F) and applies Newton
    leaf values (sum residual / sum p(1-p)).
    """
    X = check_matrix(X)
    y = check_labels(y, X.shape[0]).astype(np.float64)
    base = _clamped_log_odds(float(y.mean()))
    if y.min() == y.max():
        logger.warning("degenerate labels (all %d): base score clamped, no boosting rounds", int(y[0]))
        return EnsembleModel(
            kind="gbm", trees=(), n_features=X.shape[1],
            learning_rate=learning_rate, base_score=base,
        )
    scores = np.full(X.shape[0], base)
    trees = []
    all_rows = np.arange(X.shape[0])
    for _ in range(n_rounds):
        p = _sigmoid_values(scores)
        residual = y - p
        hessian = p * (1.0 - p)
        tree = fit_tree(
            X, residual, max_depth=max_depth, min_samples_leaf=min_samples_leaf,
            criterion="variance",
        )
        step = np.empty(X.shape[0])
        _newtonize(tree, X, all_rows, residual, hessian, step)
        scores += learning_rate * step
        trees.append(tree)
    return EnsembleModel(
        kind="gbm", trees=tuple(trees), n_features=X.shape[1],
        learning_rate=learning_rate, base_score=base,
    )


# --------------------------------------------------------------------------
# Leaf-wise histogram boosting
# --------------------------------------------------------------------------

@dataclass
class FeatureBins:
    """Per-feature split-candidate edges and the binned training matrix."""

    edges: list  # per feature, strictly increasing candidate thresholds
    codes: np.ndarray  # (n, F) bin index per value: count of edges < value
    flat_codes: np.ndarray  # codes offset by feature * n_bins, for bincount
    n_bins: int


def compute_bins(X, n_bins=255) -> FeatureBins:
    """Equal-frequency bins; features with few distinct values get one bin
    per value, with edges at midpoints."""
    X = np.asarray(X, dtype=np.float64)
    n, n_features = X.shape
    edges = []
    codes = np.empty((n, n_features), dtype=np.int64)
    for f in range(n_features):
        col = X[:, f]
        distinct = np.unique(col)
        if distinct.shape[0] <= 1:
            e = np.empty(0)
        elif distinct.shape[0] <= n_bins:
            e = (distinct[:-1] + distinct[1:]) / 2.0
        else:
            quantiles = np.quantile(col, np.arange(1, n_bins) / n_bins)
            e = np.unique(quantiles)
        edges.append(e)
        codes[:, f] = np.searchsorted(e, col, side="left")
    flat = codes + np.arange(n_features) * n_bins
    return FeatureBins(edges=edges, codes=codes, flat_codes=flat, n_bins=n_bins)


@dataclass(eq=False)  # identity comparison; fields hold arrays
class _LeafCandidate:
    node: TreeNode
    rows: np.ndarray
    hist_count: np.ndarray
    hist_grad: np.ndarray
    best: tuple | None = None  # (gain, feature, bin)


def _leaf_histograms(bins: FeatureBins, rows, residual):
    n_features = bins.codes.shape[1]
    size = n_features * bins.n_bins
    flat = bins.flat_codes[rows].ravel()
    count = np.bincount(flat, minlength=size).reshape(n_features, bins.n_bins)
    grad = np.bincount(
        flat, weights=np.repeat(residual[rows], n_features), minlength=size
    ).reshape(n_features, bins.n_bins)
    return count.astype(np.float64), grad


def _best_hist_split(bins: FeatureBins, count, grad, edge_mask, min_samples_leaf):
    """Highest variance-reduction split over bin boundaries, or None."""
    total_n = count[0].sum()
    total_g = float(grad[0].sum())  # same row set whichever feature sums it
    left_n = count.cumsum(axis=1)[:, :-1]
    left_g = grad.cumsum(axis=1)[:, :-1]
    right_n = total_n - left_n
    right_g = total_g - left_g
    score = left_g**2 / np.maximum(left_n, 1.0) + right_g**2 / np.maximum(right_n, 1.0)
    valid = edge_mask & (left_n >= min_samples_leaf) & (right_n >= min_samples_leaf)
    score = np.where(valid, score, -np.inf)
    flat_best = int(np.argmax(score))  # lowest feature, then lowest bin, on ties
    feature, b = divmod(flat_best, score.shape[1])
    gain = score[feature, b] - total_g * total_g / total_n
    if not np.isfinite(score[feature, b]) or gain <= 0.0:
        return None
    return gain, feature, b


def fit_leafwise_gbm(
    X,
    y,
    n_rounds=100,
    learning_rate=0.1,
    max_leaves=31,
    n_bins=255,
    min_samples_leaf=20,
    seed=42,
) -> EnsembleModel:
    """Boosting like fit_gbm, but trees grow leaf-wise over histograms:
    the leaf with the largest gain splits next, until max_leaves."""
    X = check_matrix(X)
    y = check_labels(y, X.shape[0]).astype(np.float64)
    base = _clamped_log_odds(float(y.mean()))
    if y.min() == y.max():
        logger.warning("degenerate labels (all %d): base score clamped, no boosting rounds", int(y[0]))
        return EnsembleModel(
            kind="leafwise_gbm", trees=(), n_features=X.shape[1],
            learning_rate=learning_rate, base_score=base,
        )
    bins = compute_bins(X, n_bins)
    # valid boundary bins per feature: those with an edge to split on
    edge_mask = np.zeros((X.shape[1], bins.n_bins - 1), dtype=bool)
    for f, e in enumerate(bins.edges):
        edge_mask[f, : e.shape[0]] = True

    scores = np.full(X.shape[0], base)
    trees = []
    for _ in range(n_rounds):
        p = _sigmoid_values(scores)
        residual = y - p
        hessian = p * (1.0 - p)

        root = TreeNode()
        root_rows = np.arange(X.shape[0])
        count, grad = _leaf_histograms(bins, root_rows, residual)
        heap = []
        counter = 0
        leaves = []

        def push(node, rows, count, grad):
            nonlocal counter
            cand = _LeafCandidate(node, rows, count, grad)
            cand.best = _best_hist_split(bins, count, grad, edge_mask, min_samples_leaf)
            if cand.best is not None:
                heapq.heappush(heap, (-cand.best[0], counter, cand))
                counter += 1
            leaves.append(cand)

        push(root, root_rows, count, grad)
        n_leaves = 1
        while n_leaves < max_leaves and heap:
            _, _, cand = heapq.heappop(heap)
            leaves.remove(cand)
            _, f, b = cand.best
            node = cand.node
            node.feature = f
            node.threshold = float(bins.edges[f][b])
            node.left = TreeNode()
            node.right = TreeNode()
            mask = bins.codes[cand.rows, f] <= b
            left_rows, right_rows = cand.rows[mask], cand.rows[~mask]
            # build the smaller child's histogram, subtract for the sibling
            if left_rows.shape[0] <= right_rows.shape[0]:
                lc, lg = _leaf_histograms(bins, left_rows, residual)
                rc, rg = cand.hist_count - lc, cand.hist_grad - lg
            else:
                rc, rg = _leaf_histograms(bins, right_rows, residual)
                lc, lg = cand.hist_count - rc, cand.hist_grad - rg
            push(node.left, left_rows, lc, lg)
            push(node.right, right_rows, rc, rg)
            n_leaves += 1

        for cand in leaves:
            rows = cand.rows
            cand.node.value = float(
                residual[rows].sum() / (hessian[rows].sum() + _NEWTON_EPS)
            )
            scores[rows] += learning_rate * cand.node.value
        trees.append(root)
    return EnsembleModel(
        kind="leafwise_gbm", trees=tuple(trees), n_features=X.shape[1],
        learning_rate=learning_rate, base_score=base,
    )


# --------------------------------------------------------------------------
# Prediction
# --------------------------------------------------------------------------

def ensemble_predict(model: EnsembleModel, X) -> np.ndarray:
    """Class-1 probability per row."""
    X = check_matrix(X)
    if X.shape[1] != model.n_features:
        raise ShapeError(
            f"matrix has {X.shape[1]} features, model expects {model.n_features}"
        )
    if model.kind == "random_forest":
        total = np.zeros(X.shape[0])
        for tree in model.trees:
            total += tree_predict(tree, X)
        return total / len(model.trees)
    if model.kind in ("gbm", "leafwise_gbm"):
        scores = np.full(X.shape[0], model.base_score)
        for tree in model.trees:
            scores += model.learning_rate * tree_predict(tree, X)
        return _sigmoid_values(scores)
    raise ValueError(f"unknown ensemble kind {model.kind!r}")


# --------------------------------------------------------------------------
# Serialization (trees live inside the bundle manifest)
# --------------------------------------------------------------------------

def tree_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"value": node.value}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": tree_to_dict(node.left),
        "right": tree_to_dict(node.right),
    }


def tree_from_dict(data: dict) -> TreeNode:
    if "feature" not in data:
        return TreeNode(value=data["value"])
    return TreeNode(
        feature=data["feature"],
        threshold=data["threshold"],
        left=tree_from_dict(data["left"]),
        right=tree_from_dict(data["right"]),
    )


def ensemble_to_dict(model: EnsembleModel) -> dict:
    return {
        "kind": model.kind,
        "n_features": model.n_features,
        "learning_rate": model.learning_rate,
        "base_score": model.base_score,
        "trees": [tree_to_dict(t) for t in model.trees],
    }


def ensemble_from_dict(data: dict) -> EnsembleModel:
    return EnsembleModel(
        kind=data["kind"],
        n_features=data["n_features"],
        learning_rate=data["learning_rate"],
        base_score=data["base_score"],
        trees=tuple(tree_from_dict(t) for t in data["trees"]),
    )


# --------------------------------------------------------------------------
# Tabular featurization (numeric block + term counts)
# --------------------------------------------------------------------------

def select_terms(texts, top_k=500) -> list:
    """The top_k corpus tokens, the count-feature columns for tabular models."""
    return [t for t, _ in features_mod.term_frequencies(texts, top_k)]


def count_terms(texts, terms) -> np.ndarray:
    index = {t: i for i, t in enumerate(terms)}
    out = np.zeros((len(texts), len(terms)), dtype=np.float64)
    for row, text in enumerate(texts):
        for token in text.split():
            col = index.get(token)
            if col is not None:
                out[row, col] += 1.0
    return out


def build_tabular(numeric, texts, terms) -> np.ndarray:
    """[numeric features | per-term counts]; column meaning fixed by terms."""
    numeric = check_matrix(numeric, "numeric")
    return np.hstack([numeric, count_terms(texts, terms)])


# --------------------------------------------------------------------------
# Estimators
# --------------------------------------------------------------------------

class _EnsembleEstimator(Estimator):
    def _fit_model(self, X, y) -> EnsembleModel:
        raise NotImplementedError

    def fit(self, X, y):
        self.model_ = self._fit_model(X, y)
        self.classes_ = np.array([0, 1])
        return self

    def decision_scores(self, X) -> np.ndarray:
        self._check_fitted("model_")
        return ensemble_predict(self.model_, X)

    def predict_proba(self, X) -> np.ndarray:
        scores = self.decision_scores(X)
        return np.column_stack([1.0 - scores, scores])

    def predict(self, X) -> np.ndarray:
        return (self.decision_scores(X) >= 0.5).astype(np.int64)


class RandomForest(_EnsembleEstimator):
    """Votes of bootstrapped Gini trees with sqrt feature subsampling."""

    def __init__(self, n_trees=100, max_depth=25, min_samples_leaf=1,
                 feature_subsample="sqrt", bootstrap=True, seed=42):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.feature_subsample = feature_subsample
        self.bootstrap = bootstrap
        self.seed = seed

    def _fit_model(self, X, y):
        return fit_random_forest(X, y, **self.get_params())


class GradientBoosting(_EnsembleEstimator):
    """Depth-wise logistic-loss boosting with exact split search."""

    def __init__(self, n_rounds=100, learning_rate=0.1, max_depth=3,
                 min_samples_leaf=1, seed=42):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.seed = seed

    def _fit_model(self, X, y):
        return fit_gbm(X, y, **self.get_params())


class LeafwiseGradientBoosting(_EnsembleEstimator):
    """Leaf-wise histogram boosting (highest-gain leaf splits first)."""

    def __init__(self, n_rounds=100, learning_rate=0.1, max_leaves=31,
                 n_bins=255, min_samples_leaf=20, seed=42):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_leaves = max_leaves
        self.n_bins = n_bins
        self.min_samples_leaf = min_samples_leaf
        self.seed = seed

    def _fit_model(self, X, y):
        return fit_leafwise_gbm(X, y, **self.get_params())

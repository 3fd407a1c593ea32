"""Gradient-boosted regression trees with a squared-error objective.

Implemented from scratch: per round, gradients are ``prediction - target``
and hessians are 1; each tree is grown by exact greedy split search over
midpoints of sorted unique feature values, maximizing

    gain = 1/2 * [G_L^2 / (H_L + lambda) + G_R^2 / (H_R + lambda)
                  - (G_L + G_R)^2 / (H_L + H_R + lambda)] - gamma

with leaf weight ``-G / (H + lambda)``. A node stays a leaf when no
candidate split has positive gain or either child's hessian sum would
fall below ``min_child_weight``. Ties in gain break toward the lowest
feature index, then the lowest threshold, and summation orders are
canonical, so training is fully deterministic and invariant to row
order. Final predictions are clipped to [0, 1] to honor the complexity
score range without distorting interior values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .errors import InputError, ModelIOError
from .validation import check_feature_matrix, check_target_vector

MODEL_FORMAT = "lexcomplex-gbdt"
MODEL_VERSION = 1


@dataclass(frozen=True)
class Leaf:
    weight: float


@dataclass(frozen=True)
class SplitNode:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Union[Leaf, SplitNode]


def _node_to_dict(node: Node) -> dict:
    if isinstance(node, Leaf):
        return {"weight": node.weight}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(obj: dict) -> Node:
    if "weight" in obj:
        return Leaf(weight=float(obj["weight"]))
    try:
        return SplitNode(
            feature=int(obj["feature"]),
            threshold=float(obj["threshold"]),
            left=_node_from_dict(obj["left"]),
            right=_node_from_dict(obj["right"]),
        )
    except KeyError as exc:
        raise ModelIOError(f"malformed tree node: missing {exc}") from None


@dataclass(frozen=True)
class RegressionTree:
    """A binary regression tree; internal nodes test feature <= threshold."""

    root: Node

    def predict_row(self, row: np.ndarray) -> float:
        node = self.root
        while isinstance(node, SplitNode):
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node.weight

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.predict_row(row) for row in X], dtype=np.float64)

    def depth(self) -> int:
        def walk(node: Node) -> int:
            if isinstance(node, Leaf):
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)


def _canonical_sum(values: np.ndarray) -> float:
    # summing in sorted order makes the result independent of row order
    return float(np.sort(values).sum())


def _leaf(g: np.ndarray, h_sum: float, reg_lambda: float) -> Leaf:
    return Leaf(weight=-_canonical_sum(g) / (h_sum + reg_lambda))


def _best_split(
    X: np.ndarray,
    g: np.ndarray,
    reg_lambda: float,
    gamma: float,
    min_child_weight: float,
) -> tuple[float, int, float] | None:
    """Best (gain, feature, threshold) over all exact splits, or None.

    Hessians are identically 1, so hessian sums are sample counts.
    """
    n = X.shape[0]
    g_total = _canonical_sum(g)
    h_total = float(n)
    parent_score = g_total * g_total / (h_total + reg_lambda)
    best: tuple[float, int, float] | None = None
    h_left = np.arange(1, n, dtype=np.float64)
    h_right = h_total - h_left
    for feature in range(X.shape[1]):
        values = X[:, feature]
        # secondary sort on gradients keeps prefix sums canonical when
        # equal feature values carry different gradients
        order = np.lexsort((g, values))
        v_sorted = values[order]
        valid = v_sorted[:-1] < v_sorted[1:]
        valid &= (h_left >= min_child_weight) & (h_right >= min_child_weight)
        if not valid.any():
            continue
        g_left = np.cumsum(g[order])[:-1]
        g_right = g_total - g_left
        gains = 0.5 * (
            g_left * g_left / (h_left + reg_lambda)
            + g_right * g_right / (h_right + reg_lambda)
            - parent_score
        ) - gamma
        gains[~valid] = -np.inf
        # first occurrence of the max picks the lowest threshold on ties
        i = int(np.argmax(gains))
        if gains[i] <= 0.0:
            continue
        threshold = float((v_sorted[i] + v_sorted[i + 1]) / 2.0)
        # recompute this candidate's gain with canonical (sorted) subset
        # sums: two features that induce the same sample partition then
        # yield bit-identical gains, so the tie-break below is exact
        left = values <= threshold
        g_left = _canonical_sum(g[left])
        g_right = _canonical_sum(g[~left])
        h_left_c = float(np.count_nonzero(left))
        gain = 0.5 * (
            g_left * g_left / (h_left_c + reg_lambda)
            + g_right * g_right / (h_total - h_left_c + reg_lambda)
            - parent_score
        ) - gamma
        if gain <= 0.0:
            continue
        # strict comparison keeps the lowest feature index on ties
        if best is None or gain > best[0]:
            best = (gain, feature, threshold)
    return best


def _grow_tree(
    X: np.ndarray,
    g: np.ndarray,
    depth_left: int,
    reg_lambda: float,
    gamma: float,
    min_child_weight: float,
) -> Node:
    if depth_left == 0 or X.shape[0] < 2:
        return _leaf(g, float(X.shape[0]), reg_lambda)
    found = _best_split(X, g, reg_lambda, gamma, min_child_weight)
    if found is None:
        return _leaf(g, float(X.shape[0]), reg_lambda)
    _, feature, threshold = found
    mask = X[:, feature] <= threshold
    return SplitNode(
        feature=feature,
        threshold=threshold,
        left=_grow_tree(
            X[mask], g[mask], depth_left - 1, reg_lambda, gamma,
            min_child_weight,
        ),
        right=_grow_tree(
            X[~mask], g[~mask], depth_left - 1, reg_lambda, gamma,
            min_child_weight,
        ),
    )


class GbdtRegressor(RegressorMixin, BaseEstimator):
    """Boosted regression trees for scores in [0, 1].

    Parameters
    ----------
    n_estimators : int
        Boosting rounds (default 100).
    max_depth : int
        Maximum tree depth (default 6).
    learning_rate : float in (0, 1]
        Shrinkage applied to each tree's contribution (default 0.3).
    reg_lambda : float >= 0
        L2 penalty on leaf weights (default 1.0).
    gamma : float >= 0
        Minimum gain required to keep a split (default 0.0).
    min_child_weight : float >= 0
        Minimum hessian sum per child; with unit hessians this is a
        minimum child sample count (default 1.0).
    base_score : float
        Initial prediction before any tree (default 0.5).
    """

    def __init__(
        self,
        n_estimators: int = 100,
        max_depth: int = 6,
        learning_rate: float = 0.3,
        reg_lambda: float = 1.0,
        gamma: float = 0.0,
        min_child_weight: float = 1.0,
        base_score: float = 0.5,
    ):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.learning_rate = learning_rate
        self.reg_lambda = reg_lambda
        self.gamma = gamma
        self.min_child_weight = min_child_weight
        self.base_score = base_score

    def _validate_params_(self) -> None:
        if self.n_estimators < 1:
            raise InputError("n_estimators must be a positive integer")
        if self.max_depth < 1:
            raise InputError("max_depth must be a positive integer")
        if not 0.0 < self.learning_rate <= 1.0:
            raise InputError("learning_rate must lie in (0, 1]")
        if self.reg_lambda < 0 or self.gamma < 0 or self.min_child_weight < 0:
            raise InputError(
                "reg_lambda, gamma and min_child_weight must be >= 0"
            )

    def fit(self, X, y) -> "GbdtRegressor":
        self._validate_params_()
        X = check_feature_matrix(X)
        y = check_target_vector(y, X.shape[0])
        predictions = np.full(X.shape[0], float(self.base_score))
        trees: list[RegressionTree] = []
        training_mse: list[float] = []
        for _ in range(self.n_estimators):
            gradients = predictions - y
            root = _grow_tree(
                X,
                gradients,
                depth_left=self.max_depth,
                reg_lambda=float(self.reg_lambda),
                gamma=float(self.gamma),
                min_child_weight=float(self.min_child_weight),
            )
            tree = RegressionTree(root=root)
            predictions = predictions + self.learning_rate * tree.predict(X)
            trees.append(tree)
            residuals = predictions - y
            training_mse.append(float(np.mean(residuals * residuals)))
        self.trees_ = tuple(trees)
        self.n_features_in_ = X.shape[1]
        self.training_mse_ = tuple(training_mse)
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "trees_"):
            raise NotFittedError(
                "this GbdtRegressor is not fitted yet; call fit first"
            )

    def _raw_predict(self, X: np.ndarray) -> np.ndarray:
        raw = np.full(X.shape[0], float(self.base_score))
        for tree in self.trees_:
            raw += self.learning_rate * tree.predict(X)
        return raw

    def predict(self, X) -> np.ndarray:
        """Boosted prediction, clipped to [0, 1]."""
        self._check_fitted()
        X = check_feature_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise InputError(
                f"X has {X.shape[1]} features but the model was trained "
                f"with {self.n_features_in_}"
            )
        return np.clip(self._raw_predict(X), 0.0, 1.0)

    def save(self, path) -> None:
        """Write the model as versioned JSON; loading reproduces
        predictions bit-exactly."""
        self._check_fitted()
        document = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "params": self.get_params(),
            "n_features": self.n_features_in_,
            "trees": [_node_to_dict(tree.root) for tree in self.trees_],
        }
        Path(path).write_text(
            json.dumps(document, indent=2) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path) -> "GbdtRegressor":
        try:
            document = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ModelIOError(f"{path}: malformed model file: {exc}") from None
        if not isinstance(document, dict) or document.get("format") != MODEL_FORMAT:
            raise ModelIOError(f"{path}: not a {MODEL_FORMAT} model file")
        if document.get("version") != MODEL_VERSION:
            raise ModelIOError(
                f"{path}: unsupported model version "
                f"{document.get('version')!r}; expected {MODEL_VERSION}"
            )
        try:
            model = cls(**document["params"])
            model.trees_ = tuple(
                RegressionTree(root=_node_from_dict(node))
                for node in document["trees"]
            )
            model.n_features_in_ = int(document["n_features"])
        except (KeyError, TypeError) as exc:
            raise ModelIOError(f"{path}: malformed model file: {exc}") from None
        return model

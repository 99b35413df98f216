"""
Per-pixel plume classifiers trained from scratch.

Every model maps an (n, 4) array of normalized (red, green, blue, nir)
reflectances to a plume decision per row. Training recipes are fixed and
seeded, see :class:`HyperParams`.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from plumedt.classify.features import pixel_samples, scene_features
from plumedt.classify.threshold import BandThreshold, fit_band_threshold
from plumedt.errors import PlumeInputError
from plumedt.raster import Scene

FORMAT_VERSION = 1


@dataclass(frozen=True)
class HyperParams:
    seed: int = 0
    max_samples: int | None = 50_000
    nb_var_floor: float = 1e-9
    lr_rate: float = 0.1
    lr_epochs: int = 500
    tree_max_depth: int | None = 12
    tree_min_leaf: int = 5
    forest_trees: int = 20
    forest_max_features: int = 2
    mlp_hidden: int = 16
    mlp_rate: float = 0.5
    mlp_epochs: int = 300
    mlp_init_std: float = 0.1


class PixelClassifier:
    """Shared prediction helpers; subclasses provide ``predict_proba``."""

    kind = "abstract"

    def predict(self, X) -> np.ndarray:
        return self.predict_proba(np.asarray(X, dtype=np.float64)) >= 0.5

    def predict_mask(self, scene: Scene) -> np.ndarray:
        return self.predict(scene_features(scene)).reshape(scene.shape)


def _check_binary(y, name):
    y = np.asarray(y).astype(bool)
    if y.size == 0:
        raise PlumeInputError("empty sample set")
    if y.all() or not y.any():
        raise PlumeInputError(f"{name} needs samples of both classes")
    return y


# --------------------------------------------------------------------------
# Gaussian naive Bayes


@dataclass
class GaussianNB(PixelClassifier):
    """Independent Gaussian likelihood per feature and class."""

    means: np.ndarray = None  # (2, d): row 0 background, row 1 plume
    variances: np.ndarray = None
    priors: np.ndarray = None
    kind = "gaussian_nb"

    def fit(self, X, y, var_floor: float = 1e-9) -> GaussianNB:
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y).astype(bool)
        if y.size == 0:
            raise PlumeInputError("empty sample set")
        d = X.shape[1]
        self.means = np.zeros((2, d))
        self.variances = np.full((2, d), var_floor)
        self.priors = np.zeros(2)
        for c in (0, 1):
            Xc = X[y == bool(c)]
            self.priors[c] = len(Xc) / len(X)
            if len(Xc):
                self.means[c] = Xc.mean(axis=0)
                self.variances[c] = np.maximum(Xc.var(axis=0), var_floor)
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty((len(X), 2))
        for c in (0, 1):
            if self.priors[c] == 0:
                out[:, c] = -np.inf
                continue
            var = self.variances[c]
            ll = -0.5 * np.log(2.0 * np.pi * var) - (X - self.means[c]) ** 2 / (2.0 * var)
            out[:, c] = np.log(self.priors[c]) + ll.sum(axis=1)
        return out

    def predict(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        return jll[:, 1] >= jll[:, 0]

    def predict_proba(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        with np.errstate(invalid="ignore"):
            p = expit(jll[:, 1] - jll[:, 0])
        return np.where(np.isnan(p), (jll[:, 1] >= jll[:, 0]).astype(float), p)

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "priors": self.priors.tolist(),
        }

    @classmethod
    def from_dict(cls, params: dict) -> GaussianNB:
        return cls(
            np.array(params["means"]), np.array(params["variances"]), np.array(params["priors"])
        )


# --------------------------------------------------------------------------
# logistic regression


def logistic_loss_grad(w: np.ndarray, b: float, X, y):
    """Mean log-loss of ``sigmoid(X @ w + b)`` and its gradient (dw, db)."""
    z = X @ w + b
    loss = np.mean(np.logaddexp(0.0, z) - y * z)
    r = (expit(z) - y) / len(y)
    return loss, X.T @ r, r.sum()


def _standardizer(X) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    return mean, np.where(std > 0, std, 1.0)


@dataclass
class LogisticRegression(PixelClassifier):
    """Linear logit on z-scored features (scaling fitted on the training set)."""

    weights: np.ndarray = None
    bias: float = 0.0
    mean: np.ndarray = None
    std: np.ndarray = None
    kind = "logistic_regression"

    def fit(self, X, y, rate: float = 0.1, epochs: int = 500) -> LogisticRegression:
        X = np.asarray(X, dtype=np.float64)
        y = _check_binary(y, "logistic regression").astype(np.float64)
        self.mean, self.std = _standardizer(X)
        X = (X - self.mean) / self.std
        w = np.zeros(X.shape[1])
        b = 0.0
        for _ in range(epochs):
            _, gw, gb = logistic_loss_grad(w, b, X, y)
            w -= rate * gw
            b -= rate * gb
        self.weights, self.bias = w, float(b)
        return self

    def predict_proba(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=np.float64) - self.mean) / self.std
        return expit(Z @ self.weights + self.bias)

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
        }

    @classmethod
    def from_dict(cls, params: dict) -> LogisticRegression:
        return cls(
            np.array(params["weights"], dtype=np.float64),
            float(params["bias"]),
            np.array(params["mean"], dtype=np.float64),
            np.array(params["std"], dtype=np.float64),
        )


# --------------------------------------------------------------------------
# multilayer perceptron


def mlp_forward(params: dict, X):
    h = expit(X @ params["W1"] + params["b1"])
    p = expit(h @ params["W2"] + params["b2"]).ravel()
    return h, p


def mlp_loss_grad(params: dict, X, y):
    """Mean log-loss of a one-hidden-layer sigmoid network and its gradients."""
    h = expit(X @ params["W1"] + params["b1"])
    z = (h @ params["W2"] + params["b2"]).ravel()
    loss = np.mean(np.logaddexp(0.0, z) - y * z)
    dz = ((expit(z) - y) / len(y))[:, None]
    grads = {"W2": h.T @ dz, "b2": dz.sum(axis=0)}
    dh = (dz @ params["W2"].T) * h * (1.0 - h)
    grads["W1"] = X.T @ dh
    grads["b1"] = dh.sum(axis=0)
    return loss, grads


@dataclass
class MLP(PixelClassifier):
    """4 -> hidden -> 1 network with logistic activations on z-scored features."""

    params: dict = field(default_factory=dict)
    mean: np.ndarray = None
    std: np.ndarray = None
    kind = "mlp"

    @staticmethod
    def init_params(n_in: int, n_hidden: int, std: float, seed: int) -> dict:
        rng = np.random.default_rng(seed)
        return {
            "W1": rng.normal(0.0, std, (n_in, n_hidden)),
            "b1": np.zeros(n_hidden),
            "W2": rng.normal(0.0, std, (n_hidden, 1)),
            "b2": np.zeros(1),
        }

    def fit(self, X, y, hidden=16, rate=0.5, epochs=300, init_std=0.1, seed=0) -> MLP:
        X = np.asarray(X, dtype=np.float64)
        y = _check_binary(y, "MLP").astype(np.float64)
        self.mean, self.std = _standardizer(X)
        X = (X - self.mean) / self.std
        params = self.init_params(X.shape[1], hidden, init_std, seed)
        for _ in range(epochs):
            _, grads = mlp_loss_grad(params, X, y)
            for k in params:
                params[k] = params[k] - rate * grads[k]
        self.params = params
        return self

    def predict_proba(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=np.float64) - self.mean) / self.std
        return mlp_forward(self.params, Z)[1]

    def to_dict(self) -> dict:
        out = {k: v.tolist() for k, v in self.params.items()}
        out["mean"], out["std"] = self.mean.tolist(), self.std.tolist()
        return out

    @classmethod
    def from_dict(cls, params: dict) -> MLP:
        arrays = {k: np.array(v, dtype=np.float64) for k, v in params.items()}
        mean, std = arrays.pop("mean"), arrays.pop("std")
        return cls(arrays, mean, std)


# --------------------------------------------------------------------------
# CART decision tree


def _best_split(X, y, idx, features, min_leaf):
    """Lowest weighted-Gini split of the samples `idx` over `features`.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values. Ties prefer the lower feature index, then the smaller threshold.
    Returns ``(feature, threshold)`` or None.
    """
    n = len(idx)
    ys = y[idx]
    pos_total = int(ys.sum())
    nl = np.arange(1, n)
    nr = n - nl
    size_ok = (nl >= min_leaf) & (nr >= min_leaf)
    best = (np.inf, None, None)
    for f in sorted(features):
        xs = X[idx, f]
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        valid = size_ok & (xs[:-1] != xs[1:])
        if not valid.any():
            continue
        pl = np.cumsum(ys[order])[:-1]
        pr = pos_total - pl
        # n * weighted Gini / 2
        cost = pl * (nl - pl) / nl + pr * (nr - pr) / nr
        cost = np.where(valid, cost, np.inf)
        k = int(np.argmin(cost))
        if cost[k] < best[0]:
            best = (cost[k], f, 0.5 * (xs[k] + xs[k + 1]))
    if best[1] is None:
        return None
    return best[1], best[2]


@dataclass
class DecisionTree(PixelClassifier):
    """Binary CART tree stored as flat node arrays.

    Internal nodes send ``x[feature] <= threshold`` left. Leaves have
    ``feature == -1`` and carry the plume fraction of their training samples.
    """

    feature: np.ndarray = None
    threshold: np.ndarray = None
    left: np.ndarray = None
    right: np.ndarray = None
    value: np.ndarray = None
    kind = "decision_tree"

    def fit(self, X, y, max_depth=12, min_leaf=5, max_features=None, rng=None) -> DecisionTree:
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y).astype(np.int64)
        if y.size == 0:
            raise PlumeInputError("empty sample set")
        d = X.shape[1]
        feat, thr, left, right, val = [], [], [], [], []

        def new_node(idx):
            feat.append(-1)
            thr.append(0.0)
            left.append(-1)
            right.append(-1)
            val.append(float(y[idx].mean()))
            return len(feat) - 1

        root = new_node(np.arange(len(y)))
        stack = [(root, np.arange(len(y)), 0)]
        while stack:
            node, idx, depth = stack.pop()
            p = val[node]
            if p == 0.0 or p == 1.0 or len(idx) < 2 * min_leaf:
                continue
            if max_depth is not None and depth >= max_depth:
                continue
            if max_features is None or max_features >= d:
                features = range(d)
            else:
                features = rng.choice(d, size=max_features, replace=False)
            split = _best_split(X, y, idx, features, min_leaf)
            if split is None:
                continue
            f, t = split
            go_left = X[idx, f] <= t
            li, ri = idx[go_left], idx[~go_left]
            feat[node], thr[node] = int(f), float(t)
            left[node] = new_node(li)
            right[node] = new_node(ri)
            # right pushed first so the left subtree is built first
            stack.append((right[node], ri, depth + 1))
            stack.append((left[node], li, depth + 1))
        self.feature = np.array(feat, dtype=np.int64)
        self.threshold = np.array(thr)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.value = np.array(val)
        return self

    @property
    def depth(self) -> int:
        depths = np.zeros(len(self.feature), dtype=np.int64)
        for node in range(len(self.feature)):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by each row."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        n_features = X.shape[1] if X.ndim == 2 else 1
        flat = X.ravel()
        node = np.zeros(len(X), dtype=np.int64)
        if self.feature[0] < 0:
            return node
        # only rows still sitting at internal nodes are advanced
        active = np.arange(len(X), dtype=np.int64)
        cur = node
        while active.size:
            f = self.feature[cur]
            go_left = flat.take(active * n_features + f) <= self.threshold[cur]
            cur = np.where(go_left, self.left[cur], self.right[cur])
            node[active] = cur
            internal = self.feature[cur] >= 0
            active, cur = active[internal], cur[internal]
        return node

    def predict_proba(self, X) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, params: dict) -> DecisionTree:
        return cls(
            np.array(params["feature"], dtype=np.int64),
            np.array(params["threshold"], dtype=np.float64),
            np.array(params["left"], dtype=np.int64),
            np.array(params["right"], dtype=np.int64),
            np.array(params["value"], dtype=np.float64),
        )


@dataclass
class RandomForest(PixelClassifier):
    """Bagged CART trees; plume when at least half the trees vote plume."""

    trees: list = field(default_factory=list)
    tree_seeds: list = field(default_factory=list)
    kind = "random_forest"

    def fit(self, X, y, n_trees=20, max_features=2, max_depth=12, min_leaf=5, seed=0):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y).astype(bool)
        if y.size == 0:
            raise PlumeInputError("empty sample set")
        seeds = np.random.SeedSequence(seed).generate_state(n_trees, dtype=np.uint64)
        self.tree_seeds = [int(s) for s in seeds]
        self.trees = []
        for s in self.tree_seeds:
            rng = np.random.default_rng(s)
            boot = rng.integers(0, len(y), size=len(y))
            tree = DecisionTree().fit(
                X[boot], y[boot], max_depth=max_depth, min_leaf=min_leaf,
                max_features=max_features, rng=rng,
            )
            self.trees.append(tree)
        return self

    def votes(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or not len(X) or not self.trees:
            return sum((t.predict_proba(X) >= 0.5).astype(np.int64) for t in self.trees)
        # Rows that sit between the same pair of split thresholds on every
        # feature follow the same path through every tree, so traversing one
        # representative per cell is exact and far cheaper on large scenes.
        cuts = [
            np.unique(np.concatenate([t.threshold[t.feature == j] for t in self.trees]))
            for j in range(X.shape[1])
        ]
        if np.prod([float(len(c) + 1) for c in cuts]) >= 2.0**62:
            return sum((t.predict_proba(X) >= 0.5).astype(np.int64) for t in self.trees)
        code = np.zeros(len(X), dtype=np.int64)
        for j, c in enumerate(cuts):
            code = code * (len(c) + 1) + np.searchsorted(c, X[:, j], side="left")
        _, first, inverse = np.unique(code, return_index=True, return_inverse=True)
        reps = X[first]
        v = sum((t.predict_proba(reps) >= 0.5).astype(np.int64) for t in self.trees)
        return v[inverse.ravel()]

    def predict(self, X) -> np.ndarray:
        return 2 * self.votes(X) >= len(self.trees)

    def predict_proba(self, X) -> np.ndarray:
        return self.votes(X) / len(self.trees)

    def to_dict(self) -> dict:
        return {"tree_seeds": self.tree_seeds, "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, params: dict) -> RandomForest:
        return cls(
            [DecisionTree.from_dict(t) for t in params["trees"]],
            [int(s) for s in params["tree_seeds"]],
        )


# --------------------------------------------------------------------------
# registry, training, serialization

MODEL_TYPES = {
    cls.kind: cls
    for cls in (BandThreshold, GaussianNB, LogisticRegression, DecisionTree, RandomForest, MLP)
}
KINDS = tuple(MODEL_TYPES)

DISPLAY_NAMES = {
    "band_threshold": "Band Threshold",
    "gaussian_nb": "Naive Bayes",
    "logistic_regression": "Logistic Regression",
    "decision_tree": "Decision Tree",
    "random_forest": "Random Forest",
    "mlp": "Multilayer Perceptron",
}


def fit_samples(kind: str, X, y, hyper: HyperParams | None = None):
    """Train a sample-based model kind on ``(X, y)``."""
    hp = hyper or HyperParams()
    if kind == "gaussian_nb":
        return GaussianNB().fit(X, y, var_floor=hp.nb_var_floor)
    if kind == "logistic_regression":
        return LogisticRegression().fit(X, y, rate=hp.lr_rate, epochs=hp.lr_epochs)
    if kind == "decision_tree":
        return DecisionTree().fit(X, y, max_depth=hp.tree_max_depth, min_leaf=hp.tree_min_leaf)
    if kind == "random_forest":
        return RandomForest().fit(
            X, y, n_trees=hp.forest_trees, max_features=hp.forest_max_features,
            max_depth=hp.tree_max_depth, min_leaf=hp.tree_min_leaf, seed=hp.seed,
        )
    if kind == "mlp":
        return MLP().fit(
            X, y, hidden=hp.mlp_hidden, rate=hp.mlp_rate, epochs=hp.mlp_epochs,
            init_std=hp.mlp_init_std, seed=hp.seed,
        )
    raise PlumeInputError(f"unknown or non-sample classifier kind {kind!r}; choose from {KINDS}")


def train_model(kind: str, scenes, hyper: HyperParams | None = None):
    """Train classifier `kind` on the labeled pixels of `scenes`."""
    hp = hyper or HyperParams()
    if kind == "band_threshold":
        return fit_band_threshold(scenes)
    if kind not in MODEL_TYPES:
        raise PlumeInputError(f"unknown classifier kind {kind!r}; choose from {KINDS}")
    X, y = pixel_samples(scenes, hp.max_samples, hp.seed)
    return fit_samples(kind, X, y, hp)


def predict_mask(model, scene: Scene) -> np.ndarray:
    return model.predict_mask(scene)


def model_to_json(model, hyper: HyperParams | None = None) -> str:
    doc = {"format_version": FORMAT_VERSION, "kind": model.kind, "params": model.to_dict()}
    if hyper is not None:
        doc["hyper"] = asdict(hyper)
    return json.dumps(doc)


def model_from_json(text: str):
    doc = json.loads(text)
    if doc.get("format_version") != FORMAT_VERSION:
        raise PlumeInputError(f"unsupported model format version {doc.get('format_version')!r}")
    kind = doc.get("kind")
    if kind not in MODEL_TYPES:
        raise PlumeInputError(f"unknown model kind {kind!r}")
    return MODEL_TYPES[kind].from_dict(doc["params"])


def save_model(model, path, hyper: HyperParams | None = None) -> None:
    Path(path).write_text(model_to_json(model, hyper), encoding="utf-8")


def load_model(path):
    return model_from_json(Path(path).read_text(encoding="utf-8"))

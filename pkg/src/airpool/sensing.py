"""Synthetic end-to-end sensing task.

A desk-scale stand-in for a multi-view recognition pipeline: K = 4 views of
N = 4 non-negative features per sample, a binary label derived from the
noiselessly pooled feature vector, a small fully-connected classifier trained
with plain mini-batch gradient descent, and an evaluation loop that feeds
pooled-over-the-air features back into the classifier to measure accuracy
against feature error.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ._mc import rng_from
from .channel import SystemParams
from .features import FeatureModel
from .pooling import AirPoolConfig, PoolingMode, true_pool

DEFAULT_VIEWS = 4
DEFAULT_FEATURES = 4


@dataclass(frozen=True)
class SyntheticDataset:
    """Multi-view samples with labels derived from the pooled ground truth."""

    views: np.ndarray            # (n, K, N), all entries >= 0
    labels: np.ndarray           # (n,), values in {0, 1}
    mode: PoolingMode            # pooling used to derive the labels
    generator_seed: int
    label_rule: str              # "tanh" or "linear"
    margin_gap: float = 0.0      # half-width of the excluded band around the boundary

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def k_views(self) -> int:
        return self.views.shape[1]

    @property
    def n_features(self) -> int:
        return self.views.shape[2]

    def pooled(self) -> np.ndarray:
        """Noiseless pooled feature vectors, (n, N)."""
        return true_pool(np.swapaxes(self.views, 1, 2), self.mode)

    def split(self, train_fraction: float = 0.8) -> Tuple[np.ndarray, np.ndarray]:
        """Deterministic train/test index split (a seed-derived permutation)."""
        order = rng_from(self.generator_seed, 77).permutation(len(self))
        cut = int(round(train_fraction * len(self)))
        return order[:cut], order[cut:]


def _label_projection(rng: np.random.Generator, n_features: int):
    mix = rng.standard_normal((n_features, n_features)) / math.sqrt(n_features)
    direction = rng.standard_normal(n_features)
    return mix, direction


def generate_dataset(n_samples: int, seed: int,
                     mode: Optional[PoolingMode] = None,
                     model: Optional[FeatureModel] = None,
                     k_views: int = DEFAULT_VIEWS,
                     n_features: int = DEFAULT_FEATURES,
                     linear_labels: bool = False,
                     margin_gap: float = 0.0) -> SyntheticDataset:
    """Draw i.i.d. non-negative views and label them by a pooled projection.

    The label is 1 when the projection score of the noiseless pooled vector
    exceeds the sample median, which balances the classes by construction.
    The default rule scores w . tanh(A g); the linear option scores w . g,
    which makes the classes linearly separable in feature space. With
    margin_gap > 0, samples whose normalized score falls within the gap of
    the threshold are rejected (extra samples are drawn to keep the count),
    planting a known margin around the boundary.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = rng_from(seed)
    mode = mode or PoolingMode.max()
    model = model or FeatureModel.rectified_gaussian()
    mix, direction = _label_projection(rng, n_features)
    factor = 4 if margin_gap > 0 else 1
    views = model.draw(rng, (factor * n_samples, k_views, n_features))
    g = true_pool(np.swapaxes(views, 1, 2), mode)
    if linear_labels:
        score = g @ direction / np.linalg.norm(direction)
    else:
        score = np.tanh(g @ mix.T) @ direction
    tau = float(np.median(score))
    if margin_gap > 0:
        keep = np.abs(score - tau) >= margin_gap
        if keep.sum() < n_samples:
            raise ValueError("margin_gap too wide for the requested sample count")
        keep_idx = np.flatnonzero(keep)[:n_samples]
        views, score = views[keep_idx], score[keep_idx]
    else:
        views, score = views[:n_samples], score[:n_samples]
    labels = (score > tau).astype(np.int64)
    return SyntheticDataset(views=views, labels=labels, mode=mode,
                            generator_seed=seed,
                            label_rule="linear" if linear_labels else "tanh",
                            margin_gap=margin_gap)


def save_dataset(dataset: SyntheticDataset, path) -> None:
    """Write one sample per line: label then K*N feature values, row-major."""
    with open(path, "w", encoding="utf-8") as fh:
        for views, label in zip(dataset.views, dataset.labels):
            flat = " ".join(f"{v:.17g}" for v in views.reshape(-1))
            fh.write(f"{int(label)} {flat}\n")


def load_dataset(path, k_views: int = DEFAULT_VIEWS,
                 n_features: int = DEFAULT_FEATURES,
                 mode: Optional[PoolingMode] = None) -> SyntheticDataset:
    """Read a dataset written by save_dataset."""
    rows, labels = [], []
    expected = k_views * n_features
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != expected + 1:
                raise ValueError(
                    f"{path}:{lineno}: expected 1 label + {expected} values, got {len(parts)}")
            labels.append(int(parts[0]))
            rows.append([float(p) for p in parts[1:]])
    views = np.asarray(rows, dtype=float).reshape(-1, k_views, n_features)
    if np.any(views < 0):
        raise ValueError(f"{path}: feature values must be >= 0")
    return SyntheticDataset(views=views, labels=np.asarray(labels, dtype=np.int64),
                            mode=mode or PoolingMode.max(), generator_seed=0,
                            label_rule="loaded")


class ShallowClassifier:
    """Two tanh hidden layers and a softmax output, trained by plain SGD."""

    def __init__(self, sizes: Tuple[int, ...] = (DEFAULT_FEATURES, 5, 5, 2),
                 seed: int = 0):
        rng = rng_from(seed, 11)
        self.sizes = tuple(sizes)
        self.weights = [rng.standard_normal((fan_in, fan_out)) / math.sqrt(fan_in)
                        for fan_in, fan_out in zip(sizes[:-1], sizes[1:])]
        self.biases = [np.zeros(fan_out) for fan_out in sizes[1:]]

    # -- forward ----------------------------------------------------------
    def _activations(self, x: np.ndarray) -> List[np.ndarray]:
        acts = [np.atleast_2d(np.asarray(x, dtype=float))]
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = acts[-1] @ w + b
            acts.append(_softmax(z) if layer == len(self.weights) - 1 else np.tanh(z))
        return acts

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return self._activations(x)[-1]

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.predict_proba(x).argmax(axis=1)

    def accuracy(self, x: np.ndarray, labels: np.ndarray) -> float:
        return float((self.predict(x) == labels).mean())

    def loss(self, x: np.ndarray, labels: np.ndarray) -> float:
        p = self.predict_proba(x)
        with np.errstate(divide="ignore"):
            return float(-np.mean(np.log(p[np.arange(len(labels)), labels])))

    # -- backward ---------------------------------------------------------
    def gradients(self, x: np.ndarray, labels: np.ndarray):
        """Mean cross-entropy gradients for every weight and bias."""
        acts = self._activations(x)
        n = len(acts[0])
        onehot = np.eye(self.sizes[-1])[labels]
        delta = (acts[-1] - onehot) / n
        grads_w, grads_b = [], []
        for layer in range(len(self.weights) - 1, -1, -1):
            grads_w.append(acts[layer].T @ delta)
            grads_b.append(delta.sum(axis=0))
            if layer > 0:
                delta = (delta @ self.weights[layer].T) * (1.0 - acts[layer] ** 2)
        return grads_w[::-1], grads_b[::-1]

    def apply_gradients(self, grads_w, grads_b, learning_rate: float) -> None:
        for w, gw in zip(self.weights, grads_w):
            w -= learning_rate * gw
        for b, gb in zip(self.biases, grads_b):
            b -= learning_rate * gb


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class TrainingReport:
    classifier: ShallowClassifier
    clean_accuracy: float        # accuracy on noiselessly pooled test features
    final_loss: float
    epochs: int


def train_classifier(dataset: SyntheticDataset, epochs: int = 200,
                     learning_rate: float = 0.5, batch_size: int = 32,
                     seed: int = 0) -> TrainingReport:
    """Mini-batch gradient descent on the noiselessly pooled features.

    Deterministic given (dataset, seed). Raises if the loss turns non-finite,
    reporting the last stable epoch.
    """
    pooled = dataset.pooled()
    train_idx, test_idx = dataset.split()
    x_train, y_train = pooled[train_idx], dataset.labels[train_idx]
    x_test, y_test = pooled[test_idx], dataset.labels[test_idx]
    clf = ShallowClassifier(sizes=(dataset.n_features, 5, 5, 2), seed=seed)
    shuffle_rng = rng_from(seed, 13)
    loss = clf.loss(x_train, y_train)
    for epoch in range(epochs):
        last_stable = loss
        order = shuffle_rng.permutation(len(x_train))
        for start in range(0, len(order), batch_size):
            batch = order[start:start + batch_size]
            grads_w, grads_b = clf.gradients(x_train[batch], y_train[batch])
            clf.apply_gradients(grads_w, grads_b, learning_rate)
        loss = clf.loss(x_train, y_train)
        if not math.isfinite(loss):
            raise ArithmeticError(
                f"training diverged at epoch {epoch + 1}; "
                f"last stable loss was {last_stable:.6g}")
    return TrainingReport(classifier=clf, clean_accuracy=clf.accuracy(x_test, y_test),
                          final_loss=loss, epochs=epochs)


def gradient_check(clf: ShallowClassifier, x: np.ndarray, labels: np.ndarray,
                   epsilon: float = 1e-6) -> float:
    """Max relative error between backprop and central finite differences."""
    grads_w, grads_b = clf.gradients(x, labels)
    worst = 0.0
    for params, grads in ((clf.weights, grads_w), (clf.biases, grads_b)):
        for p, g in zip(params, grads):
            flat_p, flat_g = p.reshape(-1), np.asarray(g).reshape(-1)
            for i in range(flat_p.size):
                keep = flat_p[i]
                flat_p[i] = keep + epsilon
                up = clf.loss(x, labels)
                flat_p[i] = keep - epsilon
                down = clf.loss(x, labels)
                flat_p[i] = keep
                numeric = (up - down) / (2.0 * epsilon)
                scale = max(abs(numeric), abs(flat_g[i]), 1e-8)
                worst = max(worst, abs(numeric - flat_g[i]) / scale)
    return worst


def evaluate_accuracy(clf: ShallowClassifier, dataset: SyntheticDataset,
                      cfg: AirPoolConfig, params: SystemParams,
                      trials_per_sample: int = 8, seed: int = 0) -> Tuple[float, float]:
    """Accuracy and summed feature error of the classifier on pooled-over-
    the-air features.

    Every test sample is pooled `trials_per_sample` times with independent
    per-dimension noise; returns (mean accuracy, mean squared feature-vector
    error). Equivalent to one `airpool_round` per (sample, trial), evaluated
    batched.
    """
    from .pooling import aggregate_with_noise, postprocess, powered_sum

    _, test_idx = dataset.split()
    pooled_true = dataset.pooled()[test_idx]
    labels = dataset.labels[test_idx]
    per_dim = np.swapaxes(dataset.views[test_idx], 1, 2)  # (n_test, N, K)
    v_sum = powered_sum(per_dim, cfg)
    hits, sq_err, count = 0.0, 0.0, 0
    for trial in range(trials_per_sample):
        v_hat = aggregate_with_noise(v_sum, cfg, rng_from(seed, trial))
        g_hat = postprocess(v_hat, cfg)
        hits += float((clf.predict(g_hat) == labels).sum())
        sq_err += float(((g_hat - pooled_true) ** 2).sum(axis=1).sum())
        count += len(labels)
    return hits / count, sq_err / count


@dataclass(frozen=True)
class LinearMarginModel:
    """A linear separator with its empirical margin on correct points."""

    weight: np.ndarray
    bias: float
    margin: float
    clean_accuracy: float
    separable: bool

    def decision(self, g: np.ndarray) -> np.ndarray:
        return np.atleast_2d(g) @ self.weight + self.bias

    def predict(self, g: np.ndarray) -> np.ndarray:
        return (self.decision(g) > 0).astype(np.int64)


def measure_linear_margin(dataset: SyntheticDataset, seed: int = 0,
                          epochs: int = 4000,
                          learning_rate: float = 2.0) -> LinearMarginModel:
    """Fit a linear separator by logistic descent and report its margin.

    The margin is the minimum distance of correctly classified pooled points
    to the fitted boundary. On non-separable data the margin of the correct
    subset is returned with `separable=False`.
    """
    pooled = dataset.pooled()
    y = dataset.labels.astype(float)
    w = np.zeros(pooled.shape[1])
    b = 0.0
    decay = 1e-4
    for _ in range(epochs):
        z = pooled @ w + b
        p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        gw = pooled.T @ (p - y) / len(y) + decay * w
        gb = float((p - y).mean())
        w -= learning_rate * gw
        b -= learning_rate * gb
    z = pooled @ w + b
    correct = (z > 0) == (y == 1)
    if not np.any(correct):
        raise ArithmeticError("linear fit classified nothing correctly")
    norm = float(np.linalg.norm(w))
    margin = float(np.min(np.abs(z[correct])) / norm)
    return LinearMarginModel(weight=w, bias=float(b), margin=margin,
                             clean_accuracy=float(correct.mean()),
                             separable=bool(np.all(correct)))

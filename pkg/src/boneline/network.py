"""Fracture/non-fracture line classifier: a 16-17-17-1 tanh network trained
with mini-batch gradient descent on mean-squared error.

Inputs are z-scored with statistics stored in the model, targets are +/-1,
and the tanh output node keeps the network outcome inside [-1, 1].  Training
is bit-for-bit deterministic for a fixed seed.
"""

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import ConfigError, DivergenceError, EmptyInputError, InvalidInputError

LAYER_SIZES = (16, 17, 17, 1)


@dataclass
class TrainingConfig:
    max_epochs: int = 50_000
    desired_error: float = 1e-4
    shuffle: bool = True
    learning_rate: float = 0.01
    batch_size: int = 16

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be >= 1")
        if self.desired_error <= 0:
            raise ConfigError("desired_error must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")


@dataclass
class LabeledDataset:
    """Feature rows with +/-1 targets and per-line provenance."""

    X: np.ndarray
    y: np.ndarray
    image_ids: list = field(default_factory=list)
    line_ids: list = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.X.ndim != 2:
            raise InvalidInputError("dataset X must be 2-D")
        if self.y.shape != (self.X.shape[0],):
            raise InvalidInputError("dataset y must have one target per row")
        if len(self.y) and not np.isin(self.y, (-1.0, 1.0)).all():
            raise InvalidInputError("targets must be +1 or -1")
        if not self.image_ids:
            self.image_ids = [""] * len(self.y)
        if not self.line_ids:
            self.line_ids = list(range(len(self.y)))

    def __len__(self):
        return len(self.y)


@dataclass
class NetworkModel:
    """Layer sizes, weights W[l] of shape (n_out, n_in), biases, activation,
    and the input standardization statistics applied before the first layer."""

    layer_sizes: tuple
    weights: list
    biases: list
    activation: str
    seed: int
    input_mean: np.ndarray
    input_std: np.ndarray
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        for l, (n_in, n_out) in enumerate(zip(self.layer_sizes[:-1], self.layer_sizes[1:])):
            if self.weights[l].shape != (n_out, n_in) or self.biases[l].shape != (n_out,):
                raise InvalidInputError(f"layer {l} parameter shapes do not match layer sizes")

    def to_json(self):
        return json.dumps({
            "layer_sizes": list(self.layer_sizes),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "activation": self.activation,
            "seed": self.seed,
            "input_mean": self.input_mean.tolist(),
            "input_std": self.input_std.tolist(),
            "config": self.config,
        })

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        return cls(
            layer_sizes=tuple(doc["layer_sizes"]),
            weights=[np.array(w, dtype=np.float64) for w in doc["weights"]],
            biases=[np.array(b, dtype=np.float64) for b in doc["biases"]],
            activation=doc["activation"],
            seed=doc["seed"],
            input_mean=np.array(doc["input_mean"], dtype=np.float64),
            input_std=np.array(doc["input_std"], dtype=np.float64),
            config=doc.get("config", {}),
        )


def init_model(seed=0, layer_sizes=LAYER_SIZES, n_inputs=None):
    """Seeded uniform +/-1/sqrt(fan_in) weight init with zero biases."""
    sizes = list(layer_sizes)
    if n_inputs is not None:
        sizes[0] = n_inputs
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / math.sqrt(n_in)
        weights.append(rng.uniform(-bound, bound, size=(n_out, n_in)))
        biases.append(np.zeros(n_out))
    return NetworkModel(layer_sizes=tuple(sizes), weights=weights, biases=biases,
                        activation="tanh", seed=seed,
                        input_mean=np.zeros(sizes[0]), input_std=np.ones(sizes[0]))


def _forward(model, X):
    """Activations per layer for standardized input X of shape (B, n_in)."""
    a = (X - model.input_mean) / model.input_std
    activations = [a]
    for W, b in zip(model.weights, model.biases):
        a = np.tanh(a @ W.T + b)
        activations.append(a)
    return activations


def infer(model, x):
    """Network outcome for one 16-feature row; always inside [-1, 1]."""
    arr = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if arr.shape[1] != model.layer_sizes[0]:
        raise InvalidInputError(f"expected {model.layer_sizes[0]} inputs, got {arr.shape[1]}")
    if not np.isfinite(arr).all():
        raise InvalidInputError("inference input contains non-finite values")
    return float(_forward(model, arr)[-1][0, 0])


def infer_batch(model, X):
    arr = np.asarray(X, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise InvalidInputError("inference input contains non-finite values")
    return _forward(model, arr)[-1][:, 0]


def classify(o_f):
    """Fracture decision: True on [0, 1], False on [-1, 0)."""
    if not np.isfinite(o_f) or not -1.0 <= o_f <= 1.0:
        raise InvalidInputError(f"network outcome {o_f} outside [-1, 1]")
    return o_f >= 0.0


def _backward(model, activations, targets):
    """Gradients of mean((output - target)^2) over the batch."""
    B = activations[0].shape[0]
    out = activations[-1]
    delta = 2.0 * (out - targets.reshape(B, 1)) / B * (1.0 - out ** 2)
    grads_w, grads_b = [], []
    for l in range(len(model.weights) - 1, -1, -1):
        grads_w.insert(0, delta.T @ activations[l])
        grads_b.insert(0, delta.sum(axis=0))
        if l > 0:
            delta = (delta @ model.weights[l]) * (1.0 - activations[l] ** 2)
    return grads_w, grads_b


def _dataset_mse(model, X, y):
    out = _forward(model, X)[-1][:, 0]
    return float(np.mean((out - y) ** 2))


def train(data, cfg=None, seed=0):
    """Train a fresh network on the dataset; returns (model, epoch MSE trace).

    Stops once the full-pass MSE drops to desired_error, else at max_epochs.
    Rows are reshuffled every epoch when cfg.shuffle is set.  Standardization
    statistics come from the training data and ride along in the model.
    """
    cfg = cfg or TrainingConfig()
    if len(data) == 0:
        raise EmptyInputError("training dataset is empty")
    X, y = data.X, data.y
    if not np.isfinite(X).all():
        raise InvalidInputError("training rows must be finite")
    model = init_model(seed=seed, n_inputs=X.shape[1])
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0] = 1.0
    model.input_mean, model.input_std = mean, std
    model.config = asdict(cfg)

    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xB0E)))
    trace = []
    for epoch in range(cfg.max_epochs):
        order = rng.permutation(len(y)) if cfg.shuffle else np.arange(len(y))
        for start in range(0, len(y), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            activations = _forward(model, X[batch])
            grads_w, grads_b = _backward(model, activations, y[batch])
            for l in range(len(model.weights)):
                model.weights[l] -= cfg.learning_rate * grads_w[l]
                model.biases[l] -= cfg.learning_rate * grads_b[l]
        mse = _dataset_mse(model, X, y)
        if not np.isfinite(mse):
            raise DivergenceError(epoch)
        trace.append(mse)
        if mse <= cfg.desired_error:
            break
    return model, trace


def gradient_check(model, x, target, step=1e-5):
    """Max deviation between analytic and central finite-difference gradients
    of the squared error on one row, relative to the gradient scale.

    The deviation is ||g_analytic - g_numeric||_inf divided by the larger of
    the two gradient infinity norms (floored to avoid division by zero).
    """
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    target = np.asarray([float(target)])
    activations = _forward(model, x)
    grads_w, grads_b = _backward(model, activations, target)
    analytic = np.concatenate([g.ravel() for g in grads_w + grads_b])

    def loss():
        out = _forward(model, x)[-1][0, 0]
        return (out - target[0]) ** 2

    numeric = []
    for params in (model.weights, model.biases):
        for p in params:
            flat = p.ravel()
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                up = loss()
                flat[i] = orig - step
                down = loss()
                flat[i] = orig
                numeric.append((up - down) / (2.0 * step))
    numeric = np.array(numeric)
    scale = max(np.abs(analytic).max(initial=0.0), np.abs(numeric).max(initial=0.0), 1e-8)
    return float(np.abs(analytic - numeric).max() / scale)


def analytic_gradient_norm(model, x, target):
    """Infinity norm of the analytic gradient on one row."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    activations = _forward(model, x)
    grads_w, grads_b = _backward(model, activations, np.asarray([float(target)]))
    return float(max(np.abs(g).max(initial=0.0) for g in grads_w + grads_b))


class FractureLineClassifier(BaseEstimator, ClassifierMixin):
    """sklearn-style front end: fit trains the network, predict returns +/-1."""

    def __init__(self, max_epochs=50_000, desired_error=1e-4, shuffle=True,
                 learning_rate=0.01, batch_size=16, seed=0):
        self.max_epochs = max_epochs
        self.desired_error = desired_error
        self.shuffle = shuffle
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.seed = seed

    def _config(self):
        return TrainingConfig(max_epochs=self.max_epochs, desired_error=self.desired_error,
                              shuffle=self.shuffle, learning_rate=self.learning_rate,
                              batch_size=self.batch_size)

    def fit(self, X, y):
        data = LabeledDataset(X=np.asarray(X), y=np.asarray(y))
        self.model_, self.loss_trace_ = train(data, self._config(), seed=self.seed)
        return self

    def decision_function(self, X):
        return infer_batch(self.model_, X)

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0.0, 1.0, -1.0)

    def score(self, X, y):
        return float(np.mean(self.predict(X) == np.asarray(y, dtype=np.float64)))

"""Softmax classification head, backpropagation, SGD, and gradient verification.

The model pools a variable-length sequence into a fixed vector p (by one of
four pooling kinds), computes probs = softmax(W p + b), and trains all
parameters with per-instance SGD on the negative log-likelihood.  For the
convolutional pooling kind the gradient flows through the segment max
pooling (to the first maximal response of each segment) and the ReLU (zero
at nonpositive pre-activations) into the filter banks.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .convpool import FilterBankSet, oacp_forward_details
from .errors import DivergenceError, ParseError, ShapeMismatchError, StaleCacheError
from .pooling import PyramidConfig, average_pool, max_pool, temporal_pyramid_pool
from .sequences import FeatureSequence, LabeledSequence

POOLING_KINDS = ("average", "max", "pyramid", "oacp")

# Floor inside the log of the instance loss; softmax output is strictly
# positive so this never changes results measurably.
LOG_EPS = 1e-15

CHECKPOINT_FORMAT = "oacpool-model"
CHECKPOINT_VERSION = 1


@dataclass
class TrainConfig:
    """Hyperparameters of the per-instance SGD loop.

    learning_rate 0 is allowed and performs null updates (useful as a
    determinism check).  momentum and weight_decay default to plain SGD.
    """

    learning_rate: float
    epochs: int
    momentum: float = 0.0
    weight_decay: float = 0.0
    seed: int = 0
    shuffle_each_epoch: bool = True

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")


@dataclass
class EpochStats:
    epoch: int
    mean_loss: float
    accuracy: float


@dataclass(eq=False)
class ClassifierModel:
    """Pooling stage plus softmax head; the trainable artifact.

    Parameters are mutated in place only by sgd_train; `version` is bumped
    on every update so stale forward caches can be detected.  sample_rate
    and normalize record how training data was prepared, so evaluation can
    reproduce the same ingestion.
    """

    pooling_kind: str
    num_features: int
    num_classes: int
    w_head: np.ndarray  # (num_classes, pooled_length)
    b_head: np.ndarray  # (num_classes,)
    filter_banks: FilterBankSet | None = None
    pyramid: PyramidConfig | None = None
    sample_rate: int = 1
    normalize: bool = False
    version: int = field(default=0, repr=False)

    def __post_init__(self):
        if self.pooling_kind not in POOLING_KINDS:
            raise ValueError(f"unknown pooling kind {self.pooling_kind!r}")
        if self.num_features < 1 or self.num_classes < 1:
            raise ValueError("num_features and num_classes must be >= 1")
        if self.pooling_kind in ("pyramid", "oacp") and self.pyramid is None:
            raise ValueError(f"{self.pooling_kind} pooling needs a PyramidConfig")
        if self.pooling_kind == "oacp":
            if self.filter_banks is None:
                raise ValueError("oacp pooling needs a FilterBankSet")
            if self.filter_banks.num_dims != self.num_features:
                raise ShapeMismatchError(
                    f"bank set covers {self.filter_banks.num_dims} dimensions, "
                    f"model expects {self.num_features}"
                )
        elif self.filter_banks is not None:
            raise ValueError(f"{self.pooling_kind} pooling takes no filter banks")
        self.w_head = np.array(self.w_head, dtype=np.float64, order="C")
        self.b_head = np.array(self.b_head, dtype=np.float64, order="C")
        expected = (self.num_classes, self.pooled_length)
        if self.w_head.shape != expected:
            raise ShapeMismatchError(f"w_head shape {self.w_head.shape}, expected {expected}")
        if self.b_head.shape != (self.num_classes,):
            raise ShapeMismatchError(
                f"b_head shape {self.b_head.shape}, expected ({self.num_classes},)"
            )
        if not (np.isfinite(self.w_head).all() and np.isfinite(self.b_head).all()):
            raise ValueError("head parameters contain NaN or infinite values")
        if self.sample_rate < 1:
            raise ValueError(f"sample_rate must be >= 1, got {self.sample_rate}")

    @property
    def pooled_length(self) -> int:
        """P: length of the pooled representation implied by kind and shapes."""
        if self.pooling_kind in ("average", "max"):
            return self.num_features
        if self.pooling_kind == "pyramid":
            return self.num_features * self.pyramid.total_segments
        return (
            self.num_features
            * self.filter_banks.n_filters
            * self.pyramid.total_segments
        )

    @classmethod
    def build(
        cls,
        pooling_kind: str,
        num_features: int,
        num_classes: int,
        *,
        interval: int = 8,
        stride: int = 1,
        n_filters: int = 3,
        pyramid=(1, 2),
        sample_rate: int = 1,
        normalize: bool = False,
        seed=0,
    ) -> "ClassifierModel":
        """Seeded initialization: weights uniform in +-sqrt(6/(fan_in+fan_out)), biases 0.

        Filter banks are drawn before the head, so a given seed fixes every
        parameter of the model.
        """
        if pooling_kind not in POOLING_KINDS:
            raise ValueError(f"unknown pooling kind {pooling_kind!r}")
        rng = np.random.default_rng(seed)
        banks = None
        pyr = None
        if pooling_kind in ("pyramid", "oacp"):
            pyr = PyramidConfig(tuple(pyramid))
        if pooling_kind == "oacp":
            bound = math.sqrt(6.0 / (interval + n_filters))
            banks = FilterBankSet(
                weights=rng.uniform(-bound, bound, (num_features, n_filters, interval)),
                biases=np.zeros((num_features, n_filters)),
                stride=stride,
            )
        if pooling_kind in ("average", "max"):
            pooled_len = num_features
        elif pooling_kind == "pyramid":
            pooled_len = num_features * pyr.total_segments
        else:
            pooled_len = num_features * n_filters * pyr.total_segments
        bound = math.sqrt(6.0 / (pooled_len + num_classes))
        return cls(
            pooling_kind=pooling_kind,
            num_features=num_features,
            num_classes=num_classes,
            w_head=rng.uniform(-bound, bound, (num_classes, pooled_len)),
            b_head=np.zeros(num_classes),
            filter_banks=banks,
            pyramid=pyr,
            sample_rate=sample_rate,
            normalize=normalize,
        )

    def parameters(self) -> list[np.ndarray]:
        """Trainable arrays in checkpoint order: head weights, head biases, then banks."""
        params = [self.w_head, self.b_head]
        if self.filter_banks is not None:
            params.extend([self.filter_banks.weights, self.filter_banks.biases])
        return params

    def parameter_total(self) -> int:
        return sum(p.size for p in self.parameters())


@dataclass(eq=False)
class ForwardCache:
    """Opaque forward state consumed by backward()."""

    version: int
    pooled: np.ndarray
    probs: np.ndarray
    pre_activation: np.ndarray | None = None
    windows: np.ndarray | None = None
    segment_argmax: np.ndarray | None = None


@dataclass(eq=False)
class Gradients:
    """Loss gradients, same shapes as the trainable parameters."""

    w_head: np.ndarray
    b_head: np.ndarray
    bank_weights: np.ndarray | None = None
    bank_biases: np.ndarray | None = None

    def arrays(self) -> list[np.ndarray]:
        out = [self.w_head, self.b_head]
        if self.bank_weights is not None:
            out.extend([self.bank_weights, self.bank_biases])
        return out


def softmax(z) -> np.ndarray:
    """Max-shifted softmax: strictly positive, sums to 1, overflow-safe."""
    z = np.asarray(z, dtype=np.float64)
    if not np.isfinite(z).all():
        raise ValueError("logits contain NaN or infinite values")
    shifted = np.exp(z - z.max())
    return shifted / shifted.sum()


def pooled_representation(model: ClassifierModel, seq: FeatureSequence) -> np.ndarray:
    if seq.num_features != model.num_features:
        raise ShapeMismatchError(
            f"sequence has {seq.num_features} features, model expects {model.num_features}"
        )
    if model.pooling_kind == "average":
        return average_pool(seq)
    if model.pooling_kind == "max":
        return max_pool(seq)
    if model.pooling_kind == "pyramid":
        return temporal_pyramid_pool(seq, model.pyramid)
    return oacp_forward_details(seq, model.filter_banks, model.pyramid).pooled


def forward(model: ClassifierModel, seq: FeatureSequence) -> tuple[np.ndarray, ForwardCache]:
    """Class probabilities for one sequence plus the state backward() needs."""
    if seq.num_features != model.num_features:
        raise ShapeMismatchError(
            f"sequence has {seq.num_features} features, model expects {model.num_features}"
        )
    if model.pooling_kind == "oacp":
        details = oacp_forward_details(seq, model.filter_banks, model.pyramid)
        pooled = details.pooled
        extras = dict(
            pre_activation=details.pre_activation,
            windows=details.windows,
            segment_argmax=details.segment_argmax,
        )
    else:
        pooled = pooled_representation(model, seq)
        extras = {}
    probs = softmax(model.w_head @ pooled + model.b_head)
    return probs, ForwardCache(model.version, pooled, probs, **extras)


def instance_loss(probs, label: int) -> float:
    """Negative log-likelihood of the true class: -log(probs[label] + LOG_EPS)."""
    probs = np.asarray(probs, dtype=np.float64)
    if not 0 <= label < probs.shape[0]:
        raise ValueError(f"label {label} out of range for {probs.shape[0]} classes")
    return float(-np.log(probs[label] + LOG_EPS))


def backward(model: ClassifierModel, cache: ForwardCache, label: int) -> Gradients:
    """Gradients of the instance loss for every trainable parameter.

    Logit gradient is probs - onehot(label).  The segment max routes each
    pooled slot's gradient to its first maximal response row; ReLU passes
    gradient only where the pre-activation is strictly positive.
    """
    if cache.version != model.version:
        raise StaleCacheError(
            f"cache built at version {cache.version}, model is at {model.version}"
        )
    if not 0 <= label < model.num_classes:
        raise ValueError(f"label {label} out of range for {model.num_classes} classes")
    dlogits = cache.probs.copy()
    dlogits[label] -= 1.0
    g_w_head = np.outer(dlogits, cache.pooled)
    g_b_head = dlogits
    if model.pooling_kind != "oacp":
        return Gradients(g_w_head, g_b_head)

    banks = model.filter_banks
    pre = cache.pre_activation
    d_pooled = model.w_head.T @ dlogits
    d_slots = d_pooled.reshape(
        model.num_features, cache.segment_argmax.shape[0], banks.n_filters
    )
    d_resp = np.zeros_like(pre)
    dim_idx = np.arange(model.num_features)[:, None]
    chan_idx = np.arange(banks.n_filters)[None, :]
    for m in range(cache.segment_argmax.shape[0]):
        np.add.at(d_resp, (cache.segment_argmax[m], dim_idx, chan_idx), d_slots[:, m, :])
    d_resp *= pre > 0
    g_bank_w = np.einsum("tkj,tki->kji", d_resp, cache.windows)
    g_bank_b = d_resp.sum(axis=0)
    return Gradients(g_w_head, g_b_head, g_bank_w, g_bank_b)


def _finite_parameters(model: ClassifierModel) -> bool:
    return all(np.isfinite(p).all() for p in model.parameters())


def sgd_train(
    model: ClassifierModel, data: list[LabeledSequence], cfg: TrainConfig
) -> tuple[ClassifierModel, list[EpochStats]]:
    """Per-instance SGD: theta <- theta - lr * (grad + weight_decay * theta).

    With momentum mu > 0 the update uses a velocity v <- mu*v + g.  Instance
    order is reshuffled each epoch by a generator seeded from cfg.seed, so a
    given (seed, data order, cfg) is bit-deterministic.  History records each
    epoch's mean loss and online accuracy (prediction taken before the update).
    """
    if not data:
        raise ValueError("training data is empty")
    for i, item in enumerate(data):
        if item.label >= model.num_classes:
            raise ValueError(
                f"instance {i} has label {item.label}, model has {model.num_classes} classes"
            )
        if item.sequence.num_features != model.num_features:
            raise ShapeMismatchError(
                f"instance {i} has {item.sequence.num_features} features, "
                f"model expects {model.num_features}"
            )
    rng = np.random.default_rng(cfg.seed)
    velocities = [np.zeros_like(p) for p in model.parameters()]
    order = np.arange(len(data))
    history: list[EpochStats] = []
    for epoch in range(cfg.epochs):
        if cfg.shuffle_each_epoch:
            rng.shuffle(order)
        total_loss = 0.0
        correct = 0
        for idx in order:
            item = data[idx]
            try:
                # shapes were validated upfront, so a ValueError here means
                # the numbers blew up (e.g. overflowing logits)
                probs, cache = forward(model, item.sequence)
                loss = instance_loss(probs, item.label)
            except ValueError as exc:
                raise DivergenceError(
                    f"divergence at epoch {epoch}, instance {int(idx)}: {exc}"
                ) from None
            if not math.isfinite(loss):
                raise DivergenceError(
                    f"non-finite loss at epoch {epoch}, instance {int(idx)}"
                )
            total_loss += loss
            if int(np.argmax(probs)) == item.label:
                correct += 1
            grads = backward(model, cache, item.label)
            for param, grad, vel in zip(model.parameters(), grads.arrays(), velocities):
                if cfg.weight_decay > 0:
                    grad = grad + cfg.weight_decay * param
                if cfg.momentum > 0:
                    vel *= cfg.momentum
                    vel += grad
                    param -= cfg.learning_rate * vel
                else:
                    param -= cfg.learning_rate * grad
            model.version += 1
            if not _finite_parameters(model):
                raise DivergenceError(
                    f"non-finite parameters after epoch {epoch}, instance {int(idx)}"
                )
        history.append(EpochStats(epoch, total_loss / len(data), correct / len(data)))
    return model, history


def evaluate(
    model: ClassifierModel, data: list[LabeledSequence]
) -> tuple[float, np.ndarray]:
    """Accuracy and a (true, predicted) confusion count matrix.

    Prediction is argmax of the probabilities; exact ties go to the lowest
    class index.
    """
    if not data:
        raise ValueError("evaluation data is empty")
    confusion = np.zeros((model.num_classes, model.num_classes), dtype=np.int64)
    for i, item in enumerate(data):
        if item.label >= model.num_classes:
            raise ValueError(
                f"instance {i} has label {item.label}, model has {model.num_classes} classes"
            )
        probs, _ = forward(model, item.sequence)
        confusion[item.label, int(np.argmax(probs))] += 1
    accuracy = float(np.trace(confusion)) / len(data)
    return accuracy, confusion


def _loss_at(model: ClassifierModel, example: LabeledSequence) -> float:
    probs, _ = forward(model, example.sequence)
    return instance_loss(probs, example.label)


def grad_check(
    model: ClassifierModel,
    example: LabeledSequence,
    eps: float = 1e-5,
    *,
    seed=0,
    perturbation: float = 1e-2,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    The model's parameters are first nudged by seeded uniform noise of the
    given magnitude; finite differences are meaningless exactly at ReLU and
    max-pool ties, and the nudge moves the model off them.  The original
    model is not modified.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError(f"eps must be in [1e-7, 1e-3], got {eps}")
    work = copy.deepcopy(model)
    rng = np.random.default_rng(seed)
    for p in work.parameters():
        p += rng.uniform(-perturbation, perturbation, p.shape)
    work.version += 1

    probs, cache = forward(work, example.sequence)
    grads = backward(work, cache, example.label)

    worst = 0.0
    for param, grad in zip(work.parameters(), grads.arrays()):
        flat_p = param.reshape(-1)
        flat_g = grad.reshape(-1)
        for j in range(flat_p.size):
            saved = flat_p[j]
            flat_p[j] = saved + eps
            loss_plus = _loss_at(work, example)
            flat_p[j] = saved - eps
            loss_minus = _loss_at(work, example)
            flat_p[j] = saved
            fd = (loss_plus - loss_minus) / (2.0 * eps)
            denom = max(abs(flat_g[j]), abs(fd), 1e-8)
            worst = max(worst, abs(flat_g[j] - fd) / denom)
    return worst


def _effective_receptive_field(model: ClassifierModel) -> int | None:
    if model.filter_banks is None:
        return None
    return model.filter_banks.interval * model.sample_rate


def save_model(model: ClassifierModel, path) -> None:
    """Write a self-describing JSON checkpoint; round-trips bit-exactly."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "format_version": CHECKPOINT_VERSION,
        "pooling_kind": model.pooling_kind,
        "num_features": model.num_features,
        "num_classes": model.num_classes,
        "pooled_length": model.pooled_length,
        "pyramid": list(model.pyramid.segments_per_level) if model.pyramid else None,
        "interval": model.filter_banks.interval if model.filter_banks else None,
        "stride": model.filter_banks.stride if model.filter_banks else None,
        "n_filters": model.filter_banks.n_filters if model.filter_banks else None,
        "sample_rate": model.sample_rate,
        "normalize": model.normalize,
        "effective_receptive_field": _effective_receptive_field(model),
        "w_head": model.w_head.tolist(),
        "b_head": model.b_head.tolist(),
        "bank_weights": model.filter_banks.weights.tolist() if model.filter_banks else None,
        "bank_biases": model.filter_banks.biases.tolist() if model.filter_banks else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path) -> ClassifierModel:
    """Read a checkpoint written by save_model."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: not a valid checkpoint: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != CHECKPOINT_FORMAT:
        raise ParseError(f"{path}: not a {CHECKPOINT_FORMAT} checkpoint")
    if doc.get("format_version") != CHECKPOINT_VERSION:
        raise ParseError(
            f"{path}: unsupported checkpoint version {doc.get('format_version')!r}"
        )
    try:
        banks = None
        if doc["bank_weights"] is not None:
            banks = FilterBankSet(
                weights=doc["bank_weights"],
                biases=doc["bank_biases"],
                stride=doc["stride"],
            )
        pyramid = PyramidConfig(tuple(doc["pyramid"])) if doc["pyramid"] else None
        model = ClassifierModel(
            pooling_kind=doc["pooling_kind"],
            num_features=doc["num_features"],
            num_classes=doc["num_classes"],
            w_head=np.asarray(doc["w_head"], dtype=np.float64),
            b_head=np.asarray(doc["b_head"], dtype=np.float64),
            filter_banks=banks,
            pyramid=pyramid,
            sample_rate=doc["sample_rate"],
            normalize=bool(doc["normalize"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed checkpoint: {exc}") from None
    if model.pooled_length != doc["pooled_length"]:
        raise ParseError(
            f"{path}: pooled_length {doc['pooled_length']} does not match shapes"
        )
    return model


def export_parameters_text(model: ClassifierModel, path) -> None:
    """Debugging export: one full-precision parameter value per line.

    Order: w_head row-major, b_head, bank weights by (dimension, filter,
    tap), bank biases by (dimension, filter).  Lines starting with '#'
    describe the model.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {CHECKPOINT_FORMAT} text export, format_version {CHECKPOINT_VERSION}\n")
        fh.write(
            f"# pooling_kind={model.pooling_kind} num_features={model.num_features} "
            f"num_classes={model.num_classes} pooled_length={model.pooled_length}\n"
        )
        fh.write(
            "# order: w_head row-major, b_head, bank weights (dimension, filter, tap), "
            "bank biases (dimension, filter)\n"
        )
        for param in model.parameters():
            for value in param.reshape(-1):
                fh.write(repr(float(value)) + "\n")

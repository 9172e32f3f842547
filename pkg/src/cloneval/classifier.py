"""Type III classification: featurization, training-set curation,
training, prediction, and model persistence.

The model interface is pluggable; two reference implementations ship:
a logistic regression and a small feedforward network, both trained on
the 48 pair features (24 metrics per method) with z-score scaling and a
fully seeded, deterministic procedure.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .actions import extract_action_tokens, overlap_similarity, passes_action_filter
from .errors import DegenerateData, EmptyIntersection, VersionMismatch
from .javasrc.methods import MethodRecord
from .javasrc.summary import MethodSummary
from .knowledge import PairKey
from .metrics import METRIC_DICTIONARY_VERSION, compute_metrics

FEATURE_COUNT = 48


def _endpoint(m: MethodRecord):
    return (m.file.folder_name, m.file.file_name, m.start_line, m.end_line)


def featurize(pair) -> np.ndarray:
    """48-feature vector; halves ordered by the canonical PairKey so that
    featurize(a, b) == featurize(b, a)."""
    from .pipeline import _summary_of

    left, right = pair.left, pair.right
    if _endpoint(left) != pair.key.left:
        left, right = right, left
    return featurize_summaries(
        pair.key, _summary_of(left.source), _summary_of(right.source)
    )


def featurize_summaries(
    key: PairKey, s_left: MethodSummary, s_right: MethodSummary
) -> np.ndarray:
    v1 = compute_metrics(s_left).as_floats()
    v2 = compute_metrics(s_right).as_floats()
    return np.array(v1 + v2, dtype=np.float64)


@dataclass
class TrainingSet:
    rows: List[Tuple[np.ndarray, int, str]]  # (features, label, provenance)

    def __len__(self) -> int:
        return len(self.rows)

    def matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        X = np.stack([r[0] for r in self.rows])
        y = np.array([r[1] for r in self.rows], dtype=np.float64)
        return X, y

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            for fv, label, prov in self.rows:
                cols = [f"{v:.10g}" for v in fv] + [str(label), prov]
                fh.write("\t".join(cols) + "\n")

    @staticmethod
    def load(path: str) -> "TrainingSet":
        rows = []
        with open(path) as fh:
            for line in fh:
                cols = line.rstrip("\n").split("\t")
                fv = np.array([float(c) for c in cols[:FEATURE_COUNT]])
                rows.append((fv, int(cols[FEATURE_COUNT]), cols[FEATURE_COUNT + 1]))
        return TrainingSet(rows)


def curate_training_set(
    tool_outputs: Sequence[Sequence],
    union_outputs: Sequence[Sequence],
    corpus_methods: Sequence[MethodRecord],
    theta: float = 0.9,
    seed: int = 0,
) -> TrainingSet:
    """Assumed positives and mined negatives for classifier training.

    Positives: pairs every tool reported, minus Type I and Type II pairs,
    kept only when they pass the action filter at `theta`.  Negatives:
    method pairs from the corpus whose action similarity clears `theta`
    but that no tool in `union_outputs` reported (and that are not
    Type I/II), down-sampled to the positive count.
    """
    from .pipeline import CandidatePair, _summary_of, resolve_type1, resolve_type2

    if len(tool_outputs) < 2:
        raise EmptyIntersection("need at least two tool outputs to intersect")

    by_key: Dict[PairKey, object] = {}
    key_sets = []
    for output in tool_outputs:
        keys = set()
        for pair in output:
            by_key.setdefault(pair.key, pair)
            keys.add(pair.key)
        key_sets.append(keys)
    inter = set.intersection(*key_sets)
    if not inter:
        raise EmptyIntersection("tool outputs share no pairs")

    positives = []
    for key in sorted(inter):
        pair = by_key[key]
        if resolve_type1(pair.left, pair.right):
            continue
        if resolve_type2(pair.left, pair.right):
            continue
        a1 = extract_action_tokens(_summary_of(pair.left.source))
        a2 = extract_action_tokens(_summary_of(pair.right.source))
        if not passes_action_filter(a1, a2, theta):
            continue
        positives.append(pair)
    if not positives:
        raise EmptyIntersection("no positives survive Type I/II and filter removal")

    union_keys = set()
    for output in union_outputs:
        for pair in output:
            union_keys.add(pair.key)

    methods = sorted(corpus_methods, key=_endpoint)
    negatives = []
    for i in range(len(methods)):
        for j in range(i + 1, len(methods)):
            pair = CandidatePair.make(methods[i], methods[j])
            if pair.key in union_keys:
                continue
            a1 = extract_action_tokens(_summary_of(pair.left.source))
            a2 = extract_action_tokens(_summary_of(pair.right.source))
            if not passes_action_filter(a1, a2, theta):
                continue
            if resolve_type1(pair.left, pair.right):
                continue
            if resolve_type2(pair.left, pair.right):
                continue
            negatives.append(pair)

    pos_keys = {p.key for p in positives}
    negatives = [n for n in negatives if n.key not in pos_keys]
    rng = random.Random(seed)
    if len(negatives) > len(positives):
        negatives = rng.sample(sorted(negatives, key=lambda p: p.key), len(positives))

    rows = [(featurize(p), 1, "intersection_positive") for p in positives]
    rows += [(featurize(n), 0, "mined_negative") for n in negatives]
    return TrainingSet(rows)


# -- models ---------------------------------------------------------------


@dataclass
class ClassifierModel:
    kind: str  # "logistic" | "feedforward"
    parameters: Dict[str, list]
    metric_dictionary_version: str
    scaling_mean: list
    scaling_std: list
    seed: int
    training_fingerprint: str
    holdout_metrics: Dict[str, float] = field(default_factory=dict)

    def predict(self, fv: np.ndarray) -> float:
        if self.metric_dictionary_version != METRIC_DICTIONARY_VERSION:
            raise VersionMismatch(
                f"model built against {self.metric_dictionary_version}, "
                f"current dictionary is {METRIC_DICTIONARY_VERSION}"
            )
        x = (np.asarray(fv, dtype=np.float64) - np.array(self.scaling_mean)) / np.array(
            self.scaling_std
        )
        if self.kind == "logistic":
            w = np.array(self.parameters["w"])
            b = self.parameters["b"]
            return float(_sigmoid(x @ w + b))
        w1 = np.array(self.parameters["w1"])
        b1 = np.array(self.parameters["b1"])
        w2 = np.array(self.parameters["w2"])
        b2 = self.parameters["b2"]
        h = np.tanh(x @ w1 + b1)
        return float(_sigmoid(h @ w2 + b2))

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(
                {
                    "kind": self.kind,
                    "parameters": self.parameters,
                    "metric_dictionary_version": self.metric_dictionary_version,
                    "scaling_mean": self.scaling_mean,
                    "scaling_std": self.scaling_std,
                    "seed": self.seed,
                    "training_fingerprint": self.training_fingerprint,
                    "holdout_metrics": self.holdout_metrics,
                },
                fh,
                sort_keys=True,
                separators=(",", ":"),
            )

    @staticmethod
    def load(path: str) -> "ClassifierModel":
        with open(path) as fh:
            data = json.load(fh)
        if data["metric_dictionary_version"] != METRIC_DICTIONARY_VERSION:
            raise VersionMismatch(
                f"model dictionary {data['metric_dictionary_version']} != "
                f"{METRIC_DICTIONARY_VERSION}"
            )
        return ClassifierModel(**data)


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


@dataclass(frozen=True)
class Hyperparams:
    kind: str = "logistic"
    learning_rate: float = 0.5
    epochs: int = 400
    hidden: int = 16
    l2: float = 1e-4
    holdout_fraction: float = 0.2
    cutoff: float = 0.5


def train(ts: TrainingSet, hp: Hyperparams = Hyperparams(), seed: int = 0) -> ClassifierModel:
    """Deterministic full-batch training with a seeded held-out split."""
    X, y = ts.matrices()
    if len(np.unique(y)) < 2:
        raise DegenerateData("training set contains a single class")

    fingerprint = hashlib.sha256(X.tobytes() + y.tobytes()).hexdigest()

    rng = np.random.default_rng(seed)
    idx = rng.permutation(len(y))
    n_hold = max(1, int(len(y) * hp.holdout_fraction))
    hold_idx, train_idx = idx[:n_hold], idx[n_hold:]
    if len(np.unique(y[train_idx])) < 2:
        train_idx = idx  # tiny sets: train on everything, holdout advisory
    Xtr, ytr = X[train_idx], y[train_idx]

    mean = Xtr.mean(axis=0)
    std = Xtr.std(axis=0)
    std[std == 0] = 1.0
    Z = (Xtr - mean) / std

    if hp.kind == "logistic":
        params = _fit_logistic(Z, ytr, hp)
    elif hp.kind == "feedforward":
        params = _fit_feedforward(Z, ytr, hp, rng)
    else:
        raise ValueError(f"unknown model kind {hp.kind!r}")

    model = ClassifierModel(
        kind=hp.kind,
        parameters=params,
        metric_dictionary_version=METRIC_DICTIONARY_VERSION,
        scaling_mean=[float(v) for v in mean],
        scaling_std=[float(v) for v in std],
        seed=seed,
        training_fingerprint=fingerprint,
    )
    tp = fp = fn = tn = 0
    for i in hold_idx:
        p = model.predict(X[i])
        pred = 1 if p >= hp.cutoff else 0
        if pred and y[i]:
            tp += 1
        elif pred and not y[i]:
            fp += 1
        elif not pred and y[i]:
            fn += 1
        else:
            tn += 1
    model.holdout_metrics = {
        "holdout_size": float(len(hold_idx)),
        "precision": tp / (tp + fp) if tp + fp else 1.0,
        "recall": tp / (tp + fn) if tp + fn else 1.0,
        "cutoff": hp.cutoff,
    }
    return model


def _fit_logistic(Z, y, hp) -> Dict[str, list]:
    w = np.zeros(Z.shape[1])
    b = 0.0
    n = len(y)
    for _ in range(hp.epochs):
        p = _sigmoid(Z @ w + b)
        grad_w = Z.T @ (p - y) / n + hp.l2 * w
        grad_b = float(np.mean(p - y))
        w -= hp.learning_rate * grad_w
        b -= hp.learning_rate * grad_b
    return {"w": [float(v) for v in w], "b": float(b)}


def _fit_feedforward(Z, y, hp, rng) -> Dict[str, list]:
    n, d = Z.shape
    w1 = rng.normal(0, 0.5 / np.sqrt(d), size=(d, hp.hidden))
    b1 = np.zeros(hp.hidden)
    w2 = rng.normal(0, 0.5 / np.sqrt(hp.hidden), size=hp.hidden)
    b2 = 0.0
    lr = hp.learning_rate
    for _ in range(hp.epochs):
        h = np.tanh(Z @ w1 + b1)
        p = _sigmoid(h @ w2 + b2)
        delta = (p - y) / n
        grad_w2 = h.T @ delta + hp.l2 * w2
        grad_b2 = float(np.sum(delta))
        dh = np.outer(delta, w2) * (1 - h * h)
        grad_w1 = Z.T @ dh + hp.l2 * w1
        grad_b1 = dh.sum(axis=0)
        w1 -= lr * grad_w1
        b1 -= lr * grad_b1
        w2 -= lr * grad_w2
        b2 -= lr * grad_b2
    return {
        "w1": [[float(v) for v in row] for row in w1],
        "b1": [float(v) for v in b1],
        "w2": [float(v) for v in w2],
        "b2": float(b2),
    }


def predict(model: ClassifierModel, fv: np.ndarray) -> float:
    return model.predict(fv)

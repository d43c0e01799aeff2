"""Linear-separability evaluation of embedding spaces.

Classifiers are deterministic in-repo surrogates:

* linear: one-vs-rest L2-regularized hinge loss, full-batch subgradient
  descent with the 1/(lambda t) step schedule, zero initialization, internal
  feature standardization. No randomness.
* nonlinear-rff: a 500-dimensional random Fourier feature map approximating
  an RBF kernel (bandwidth = median pairwise training distance), drawn once
  from a fixed documented seed, followed by the same linear trainer.
* knn: cosine 5-nearest-neighbor vote.

Folds are deterministic and stratified: nodes are ordered inside each class
by CRC32 of their external token and dealt round robin, so per-fold class
counts deviate from the global split by at most one node per class.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from math import erfc, sqrt

import numpy as np
from scipy.special import stdtr

__all__ = [
    "ClassificationResult",
    "SeparabilityVerdict",
    "LinearModel",
    "train_linear",
    "train_nonlinear",
    "train_knn",
    "kfold_f1",
    "stratified_folds",
    "weighted_f1",
    "tied_ranks",
    "mann_whitney_u",
    "pearson",
    "classify_separability",
]

RFF_DIM = 500
RFF_SEED = 97  # the one stochastic ingredient in the pipeline, fixed here
_EPOCHS = 500
_LAMBDA = 1e-4


@dataclass(frozen=True)
class ClassificationResult:
    classifier_name: str
    fold_f1: np.ndarray

    @property
    def mean_f1(self) -> float:
        return float(self.fold_f1.mean())


@dataclass(frozen=True)
class SeparabilityVerdict:
    verdict: str  # fully-linear | sufficiently-linear | non-linear
    linear_mean: float
    nonlinear_means: dict
    p_values: dict


class _Standardizer:
    def __init__(self, x: np.ndarray):
        self.mu = x.mean(axis=0)
        sd = x.std(axis=0)
        self.sd = np.where(sd < 1e-12, 1.0, sd)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mu) / self.sd


@dataclass
class LinearModel:
    w: np.ndarray  # (d + 1, C), last row is the bias
    classes: np.ndarray
    scaler: _Standardizer
    multi_label: bool = False

    def margins(self, x: np.ndarray) -> np.ndarray:
        z = self.scaler(x)
        z1 = np.hstack([z, np.ones((len(z), 1))])
        return z1 @ self.w

    def predict(self, x: np.ndarray):
        m = self.margins(x)
        if self.multi_label:
            return m > 0
        return self.classes[np.argmax(m, axis=1)]


def _fit_hinge(z1: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Full-batch subgradient descent on the one-vs-rest hinge objective.

    targets: (m, C) in {-1, +1}. Returns (d + 1, C) weights.
    """
    m, d1 = z1.shape
    w = np.zeros((d1, targets.shape[1]))
    for t in range(1, _EPOCHS + 1):
        marg = targets * (z1 @ w)
        viol = (marg < 1.0).astype(np.float64)
        grad_fit = z1.T @ (targets * viol) / m
        eta = 1.0 / (_LAMBDA * t)
        w = (1.0 - 1.0 / t) * w + eta * grad_fit
    return w


def train_linear(x: np.ndarray, y, multi_label: bool = False) -> LinearModel:
    """One-vs-rest linear hinge classifier.

    y is an int vector for single-label data, or a boolean membership matrix
    (n, L) for multi-label data.
    """
    x = np.asarray(x, dtype=np.float64)
    scaler = _Standardizer(x)
    z1 = np.hstack([scaler(x), np.ones((len(x), 1))])
    if multi_label:
        memb = np.asarray(y, dtype=bool)
        if memb.ndim != 2:
            raise ValueError("multi-label targets must be a membership matrix")
        classes = np.arange(memb.shape[1])
        targets = np.where(memb, 1.0, -1.0)
    else:
        y = np.asarray(y)
        classes = np.unique(y)
        if len(classes) < 2:
            raise ValueError("training data has a single class")
        targets = np.where(y[:, None] == classes[None, :], 1.0, -1.0)
    w = _fit_hinge(z1, targets)
    return LinearModel(w=w, classes=classes, scaler=scaler, multi_label=multi_label)


@dataclass
class RffModel:
    proj: np.ndarray
    phase: np.ndarray
    scaler: _Standardizer
    linear: LinearModel

    def _features(self, x: np.ndarray) -> np.ndarray:
        z = self.scaler(x)
        return np.sqrt(2.0 / self.proj.shape[1]) * np.cos(z @ self.proj + self.phase)

    def predict(self, x: np.ndarray):
        return self.linear.predict(self._features(x))


def _median_distance(z: np.ndarray) -> float:
    sub = z[: min(len(z), 400)]
    sq = (sub * sub).sum(axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (sub @ sub.T), 0.0)
    vals = np.sqrt(d2[np.triu_indices(len(sub), k=1)])
    med = float(np.median(vals)) if vals.size else 0.0
    return med if med > 1e-12 else 1.0


def train_nonlinear(
    x: np.ndarray, y, multi_label: bool = False, dim: int = RFF_DIM, seed: int = RFF_SEED
) -> RffModel:
    """Random-feature RBF surrogate: cos(xW + b) features, then the linear trainer."""
    x = np.asarray(x, dtype=np.float64)
    scaler = _Standardizer(x)
    z = scaler(x)
    sigma = _median_distance(z)
    rng = np.random.default_rng(seed)
    proj = rng.normal(0.0, 1.0 / sigma, size=(z.shape[1], dim))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=dim)
    feats = np.sqrt(2.0 / dim) * np.cos(z @ proj + phase)
    linear = train_linear(feats, y, multi_label=multi_label)
    return RffModel(proj=proj, phase=phase, scaler=scaler, linear=linear)


@dataclass
class KnnModel:
    train: np.ndarray  # row-normalized
    y: np.ndarray
    classes: np.ndarray
    k: int = 5
    multi_label: bool = False

    def predict(self, x: np.ndarray):
        q = _row_normalize(np.asarray(x, dtype=np.float64))
        sims = q @ self.train.T
        # stable top-k: distance first, then smaller train index
        order = np.argsort(-sims, axis=1, kind="stable")[:, : self.k]
        if self.multi_label:
            votes = self.y[order]  # (m, k, L) bool
            return votes.mean(axis=1) >= 0.5
        votes = self.y[order]  # (m, k) int
        out = np.empty(len(q), dtype=self.classes.dtype)
        for i, row in enumerate(votes):
            counts = np.bincount(
                np.searchsorted(self.classes, row), minlength=len(self.classes)
            )
            out[i] = self.classes[int(np.argmax(counts))]  # tie -> smallest class
        return out


def _row_normalize(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    return x / np.where(norms < 1e-12, 1.0, norms)


def train_knn(x: np.ndarray, y, multi_label: bool = False, k: int = 5) -> KnnModel:
    x = np.asarray(x, dtype=np.float64)
    if multi_label:
        y = np.asarray(y, dtype=bool)
        classes = np.arange(y.shape[1])
    else:
        y = np.asarray(y)
        classes = np.unique(y)
    return KnnModel(
        train=_row_normalize(x), y=y, classes=classes, k=k, multi_label=multi_label
    )


_TRAINERS = {
    "linear": train_linear,
    "nonlinear-rff": train_nonlinear,
    "knn": train_knn,
}


def weighted_f1(y_true, y_pred, multi_label: bool = False) -> float:
    """Support-weighted mean of per-class binary F1 scores."""
    if multi_label:
        t = np.asarray(y_true, dtype=bool)
        p = np.asarray(y_pred, dtype=bool)
        scores, weights = [], []
        for j in range(t.shape[1]):
            support = int(t[:, j].sum())
            if support == 0:
                continue
            scores.append(_binary_f1(t[:, j], p[:, j]))
            weights.append(support)
        return float(np.average(scores, weights=weights)) if scores else 0.0
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    scores, weights = [], []
    for c in np.unique(t):
        scores.append(_binary_f1(t == c, p == c))
        weights.append(int((t == c).sum()))
    return float(np.average(scores, weights=weights))


def _binary_f1(t: np.ndarray, p: np.ndarray) -> float:
    tp = int((t & p).sum())
    fp = int((~t & p).sum())
    fn = int((t & ~p).sum())
    if tp == 0:
        return 0.0
    prec = tp / (tp + fp)
    rec = tp / (tp + fn)
    return 2.0 * prec * rec / (prec + rec)


def _token_hash(token: str) -> int:
    return zlib.crc32(token.encode("utf-8"))


def stratified_folds(names, strata, k: int = 10) -> np.ndarray:
    """Deterministic fold index per item, -1 for items with stratum None."""
    folds = np.full(len(names), -1, dtype=np.int64)
    by_stratum: dict = {}
    for i, s in enumerate(strata):
        if s is None:
            continue
        by_stratum.setdefault(s, []).append(i)
    for c_idx, (s, members) in enumerate(sorted(by_stratum.items())):
        members.sort(key=lambda i: (_token_hash(str(names[i])), str(names[i])))
        for j, i in enumerate(members):
            folds[i] = (j + c_idx) % k
    return folds


def kfold_f1(
    embeddings: np.ndarray,
    labels,
    names,
    classifier: str = "linear",
    k: int = 10,
) -> ClassificationResult:
    """k-fold cross-validated weighted F1 over the annotated nodes.

    labels is an aligned LabelSet; multi-label sets train one-vs-rest binary
    models and aggregate per-label F1 by support.
    """
    trainer = _TRAINERS.get(classifier)
    if trainer is None:
        raise ValueError(f"unknown classifier {classifier!r}")
    x = np.asarray(embeddings, dtype=np.float64)
    n = len(x)
    multi = labels.kind == "multi"
    if multi:
        memb = labels.membership_matrix(n)
        ann_ids = np.flatnonzero(memb.any(axis=1))
        strata = [
            min(labels.labels_of[i]) if i in labels.labels_of else None
            for i in range(n)
        ]
        y_all = memb
    else:
        y_arr = labels.single_array(n)
        ann_ids = np.flatnonzero(y_arr >= 0)
        strata = [int(y) if y >= 0 else None for y in y_arr]
        y_all = y_arr
    if len(ann_ids) < k:
        raise ValueError(f"need at least {k} annotated nodes for {k}-fold CV")
    folds = stratified_folds(names, strata, k=k)
    scores = []
    for fold in range(k):
        test = np.flatnonzero(folds == fold)
        train = ann_ids[folds[ann_ids] != fold]
        if len(test) == 0:
            raise ValueError(f"fold {fold} is empty")
        if multi and not y_all[test].any():
            raise ValueError(f"fold {fold} has no positive labels")
        model = trainer(x[train], y_all[train], multi_label=multi)
        pred = model.predict(x[test])
        scores.append(weighted_f1(y_all[test], pred, multi_label=multi))
    return ClassificationResult(classifier_name=classifier, fold_f1=np.array(scores))


def tied_ranks(values: np.ndarray) -> tuple[np.ndarray, float]:
    """1-based ranks with average ties, plus the tie term sum(t^3 - t)."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    boundaries = np.flatnonzero(np.diff(sorted_vals) != 0) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [len(values)]])
    tie_term = 0.0
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = (s + e - 1) / 2.0 + 1.0
        t = e - s
        tie_term += t**3 - t
    return ranks, tie_term


def mann_whitney_u(sample_a, sample_b) -> float:
    """Two-sided p, normal approximation with tie correction (no continuity).

    Fully tied input returns 1.0 by convention.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both samples must be non-empty")
    n1, n2 = len(a), len(b)
    ranks, tie_term = tied_ranks(np.concatenate([a, b]))
    u1 = float(ranks[:n1].sum()) - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0
    nn = n1 + n2
    var = n1 * n2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)))
    if var <= 0:
        return 1.0
    z = (u1 - mu) / sqrt(var)
    return min(1.0, erfc(abs(z) / sqrt(2.0)))


def pearson(xs, ys) -> tuple[float, float]:
    """Sample Pearson r and its two-sided t-distribution p-value."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if len(x) != len(y) or len(x) < 3:
        raise ValueError("need equal-length samples of size >= 3")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ValueError("constant input vector")
    xc = x - x.mean()
    yc = y - y.mean()
    r = float((xc @ yc) / sqrt((xc @ xc) * (yc @ yc)))
    r = max(-1.0, min(1.0, r))
    df = len(x) - 2
    if abs(r) == 1.0:
        return r, 0.0
    t = r * sqrt(df / (1.0 - r * r))
    p = 2.0 * float(stdtr(df, -abs(t)))
    return r, min(1.0, p)


def classify_separability(
    linear: ClassificationResult, *nonlinear: ClassificationResult, alpha: float = 0.05
) -> SeparabilityVerdict:
    """fully-linear / sufficiently-linear / non-linear verdict.

    fully-linear: linear mean F1 > 0.8 and no significant difference (p >=
    alpha) against every non-linear result. sufficiently-linear: linear mean
    at least every non-linear mean, or no significant difference. Otherwise
    non-linear.
    """
    if not nonlinear:
        raise ValueError("need at least one non-linear result")
    p_values = {
        r.classifier_name: mann_whitney_u(linear.fold_f1, r.fold_f1) for r in nonlinear
    }
    nl_means = {r.classifier_name: r.mean_f1 for r in nonlinear}
    lin = linear.mean_f1
    all_nonsig = all(p >= alpha for p in p_values.values())
    if lin > 0.8 and all_nonsig:
        verdict = "fully-linear"
    elif all(lin >= m for m in nl_means.values()) or all_nonsig:
        verdict = "sufficiently-linear"
    else:
        verdict = "non-linear"
    return SeparabilityVerdict(
        verdict=verdict, linear_mean=lin, nonlinear_means=nl_means, p_values=p_values
    )

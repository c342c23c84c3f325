"""End-to-end orchestration: two-phase training, inference, evaluation,
region analysis and model persistence."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classifier as out_layer
from . import som
from .config import PipelineConfig, config_from_dict, config_to_raw
from .dataset import ActionSample, Corpus
from .errors import (ConfigMismatch, CorruptFile, EmptyCorpus, UnknownClass,
                     VersionMismatch)
from .preprocess import FeatureSequence, preprocess_sample
from .trace import compute_n_max, extract_trace, ordered_vector

_MAGIC = b"SOMACTION-MODEL v1\n"


@dataclass
class PipelineModel:
    config: PipelineConfig
    layer1: som.SomModel
    n_max: int
    layer2: som.SomModel
    output: out_layer.OutputLayer
    manifest: dict = field(default_factory=dict)


def _preprocess(model_cfg: PipelineConfig, frames: np.ndarray,
                class_hint: str | None) -> FeatureSequence:
    mask = model_cfg.mask()
    hint = class_hint if mask.per_class is not None else None
    if mask.per_class is not None and class_hint is None:
        raise UnknownClass(
            "config uses per-class attention masks; a class hint is required "
            "(use a global mask for hint-free classification)")
    return preprocess_sample(frames, mask, model_cfg.channels,
                             model_cfg.trunk_length, hint)


def _normalize_ov(cfg: PipelineConfig, ov: np.ndarray) -> np.ndarray:
    if not cfg.normalize_ordered_vectors:
        return ov
    n = np.linalg.norm(ov)
    return ov / n if n > 0 else ov


def _decay(v0: float, v1: float, total: int) -> np.ndarray:
    t = np.arange(total, dtype=np.float64) / total
    return v0 * (v1 / v0) ** t


def train_system(train: Corpus, cfg: PipelineConfig) -> PipelineModel:
    """Two-phase training.

    Phase 1 trains the first-layer map on the pooled per-frame feature
    vectors of the whole training set.  Phase 2 freezes it, encodes every
    sample as an ordered vector, and trains the second-layer map together
    with the output layer.  Deterministic under cfg.seed.
    """
    if not train.samples:
        raise EmptyCorpus("empty training corpus")
    feats = [_preprocess(cfg, s.frames, s.label) for s in train.samples]
    dim = feats[0].dim

    l1 = cfg.layer1
    layer1 = som.create_som(l1.rows, l1.cols, dim, sigma=l1.sigma,
                            seed=cfg.seed,
                            squared_neighborhood=l1.squared_neighborhood)
    pooled = np.vstack([f.data for f in feats])
    som.train(layer1, pooled, epochs=l1.epochs, alpha0=l1.alpha0,
              alpha1=l1.alpha1, sigma_n0=l1.sigma_n0, sigma_n1=l1.sigma_n1,
              seed=cfg.seed + 1)

    traces = [extract_trace(layer1, f) for f in feats]
    n_max = compute_n_max(traces)
    ovs = np.array([_normalize_ov(cfg, ordered_vector(tr, n_max))
                    for tr in traces])
    labels = [s.label for s in train.samples]

    l2 = cfg.layer2
    layer2 = som.create_som(l2.rows, l2.cols, 2 * (n_max + 1), sigma=l2.sigma,
                            seed=cfg.seed + 2,
                            squared_neighborhood=l2.squared_neighborhood)
    output = out_layer.create_output_layer(
        train.classes, dim=l2.rows * l2.cols, beta=cfg.classifier.beta,
        seed=cfg.seed + 3, strict_update=cfg.classifier.strict_update)

    n = len(ovs)
    sigma_n0 = l2.sigma_n0 if l2.sigma_n0 is not None else max(l2.rows, l2.cols) / 2.0
    if cfg.phase2_mode == "interleaved":
        total = l2.epochs * n
        alphas = _decay(l2.alpha0, l2.alpha1, total)
        sigmas = _decay(sigma_n0, l2.sigma_n1, total)
        rng = np.random.default_rng(cfg.seed + 4)
        step = 0
        for _ in range(l2.epochs):
            for idx in rng.permutation(n):
                x = ovs[idx]
                c = som.best_matching_unit(layer2, x)
                som.adapt(layer2, x, c, alphas[step], sigmas[step])
                amap = som.activity_map(layer2, x,
                                        sigma=cfg.classifier.map_sigma)
                out_layer.train_step(output, amap.ravel(), labels[idx])
                step += 1
    else:
        som.train(layer2, ovs, epochs=l2.epochs, alpha0=l2.alpha0,
                  alpha1=l2.alpha1, sigma_n0=sigma_n0, sigma_n1=l2.sigma_n1,
                  seed=cfg.seed + 4)
        rng = np.random.default_rng(cfg.seed + 5)
        maps = np.array([som.activity_map(layer2, x,
                                          sigma=cfg.classifier.map_sigma).ravel()
                         for x in ovs])
        for _ in range(l2.epochs):
            for idx in rng.permutation(n):
                out_layer.train_step(output, maps[idx], labels[idx])

    class_counts = {c: labels.count(c) for c in train.classes}
    manifest = {
        "format_version": 1,
        "backend": som.BACKEND,
        "config": config_to_raw(cfg),
        "provenance": train.provenance,
        "classes": list(train.classes),
        "n_samples": n,
        "class_counts": class_counts,
        "feature_dim": dim,
        "n_max": n_max,
    }
    return PipelineModel(config=cfg, layer1=layer1, n_max=n_max,
                         layer2=layer2, output=output, manifest=manifest)


def ordered_vector_of(model: PipelineModel, frames: np.ndarray,
                      class_hint: str | None = None) -> np.ndarray:
    """Second-layer input vector for one sample (normalized per config)."""
    feats = _preprocess(model.config, frames, class_hint)
    if feats.dim != model.layer1.dim:
        raise ConfigMismatch(
            f"feature dim {feats.dim} does not match trained map "
            f"dim {model.layer1.dim}")
    tr = extract_trace(model.layer1, feats)
    return _normalize_ov(model.config, ordered_vector(tr, model.n_max))


def classify(model: PipelineModel, sample: ActionSample | np.ndarray,
             class_hint: str | None = None) -> str:
    """Predicted class for one action sample."""
    frames = sample.frames if isinstance(sample, ActionSample) else sample
    ov = ordered_vector_of(model, frames, class_hint)
    amap = som.activity_map(model.layer2, ov,
                            sigma=model.config.classifier.map_sigma)
    return out_layer.predict(model.output, amap.ravel())


# ---------------------------------------------------------------------------
# evaluation

@dataclass
class EvalReport:
    classes: tuple[str, ...]
    confusion: np.ndarray            # (C, C) counts, rows = true class
    overall_accuracy: float          # percent
    per_class_accuracy: np.ndarray   # (C,) percent

    def to_text(self) -> str:
        lines = [f"overall accuracy: {self.overall_accuracy:.2f}%", ""]
        width = max(len(c) for c in self.classes)
        for c, acc, row in zip(self.classes, self.per_class_accuracy,
                               self.confusion):
            counts = " ".join(f"{v:4d}" for v in row)
            lines.append(f"{c:<{width}}  {acc:6.2f}%  [{counts}]")
        return "\n".join(lines) + "\n"

    def confusion_csv(self) -> str:
        lines = ["true\\predicted," + ",".join(self.classes)]
        for c, row in zip(self.classes, self.confusion):
            lines.append(c + "," + ",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"

    def per_class_csv(self) -> str:
        lines = ["class,accuracy_percent"]
        for c, acc in zip(self.classes, self.per_class_accuracy):
            lines.append(f"{c},{acc:.4f}")
        return "\n".join(lines) + "\n"


def evaluate(model: PipelineModel, test: Corpus) -> EvalReport:
    """Confusion matrix and accuracies over a test corpus.

    With per-class attention masks the true label selects the mask, as in
    the original protocol; note this leaks the label into preprocessing
    (use a global mask for a leak-free evaluation).
    """
    if not test.samples:
        raise EmptyCorpus("empty test corpus")
    classes = model.output.classes
    index = {c: k for k, c in enumerate(classes)}
    conf = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for s in test.samples:
        pred = classify(model, s, class_hint=s.label)
        conf[index[s.label], index[pred]] += 1
    totals = conf.sum(axis=1)
    correct = np.diag(conf)
    per_class = np.where(totals > 0, 100.0 * correct / np.maximum(totals, 1), 0.0)
    overall = 100.0 * correct.sum() / conf.sum()
    return EvalReport(classes=classes, confusion=conf,
                      overall_accuracy=float(overall),
                      per_class_accuracy=per_class)


# ---------------------------------------------------------------------------
# region analysis

def _band(idx: int, size: int) -> int:
    # 3 bands of floor(size/3); the remainder rows/cols join the last band
    return min(idx // (size // 3), 2)


def region_of(model: PipelineModel, coord: tuple[int, int]) -> int:
    """1..9 region of a second-layer grid coordinate.

    The 3x3 partition is numbered from the bottom-left square (region 1,
    row 0 = bottom) to the top-right square (region 9).
    """
    i, j = coord
    return 3 * _band(i, model.layer2.rows) + _band(j, model.layer2.cols) + 1


@dataclass
class RegionHistogram:
    classes: tuple[str, ...]
    counts: np.ndarray       # (C, 9)
    percentages: np.ndarray  # (C, 9), rows sum to 100

    def to_text(self) -> str:
        width = max(max(len(c) for c in self.classes), len("action"))
        header = f"{'action':<{width}}" + "".join(
            f"{f'R{r}':>8}" for r in range(1, 10))
        lines = [header]
        for c, row in zip(self.classes, self.percentages):
            lines.append(f"{c:<{width}}" + "".join(f"{v:8.1f}" for v in row))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["class," + ",".join(f"region{r}" for r in range(1, 10))]
        for c, row in zip(self.classes, self.percentages):
            lines.append(c + "," + ",".join(f"{v:.4f}" for v in row))
        return "\n".join(lines) + "\n"


def region_histogram(model: PipelineModel, corpus: Corpus) -> RegionHistogram:
    """Per-class percentage of second-layer BMU activations per region."""
    if not corpus.samples:
        raise EmptyCorpus("empty corpus")
    classes = model.output.classes
    index = {c: k for k, c in enumerate(classes)}
    counts = np.zeros((len(classes), 9), dtype=np.int64)
    for s in corpus.samples:
        ov = ordered_vector_of(model, s.frames, class_hint=s.label)
        c = som.best_matching_unit(model.layer2, ov)
        counts[index[s.label], region_of(model, c) - 1] += 1
    totals = counts.sum(axis=1, keepdims=True)
    pct = 100.0 * counts / np.maximum(totals, 1)
    return RegionHistogram(classes=classes, counts=counts, percentages=pct)


# ---------------------------------------------------------------------------
# persistence

def _som_meta(m: som.SomModel) -> dict:
    return {"rows": m.rows, "cols": m.cols, "dim": m.dim, "sigma": m.sigma,
            "seed": m.seed, "squared_neighborhood": m.squared_neighborhood,
            "normalize_weights": m.normalize_weights, "schedule": m.schedule}


def save_model(model: PipelineModel, path: str | Path) -> None:
    """Versioned container: magic, JSON header, raw weight arrays."""
    arrays = [
        ("layer1.weights", model.layer1.weights),
        ("layer2.weights", model.layer2.weights),
        ("output.weights", model.output.weights),
    ]
    header = {
        "config": config_to_raw(model.config),
        "manifest": model.manifest,
        "n_max": model.n_max,
        "layer1": _som_meta(model.layer1),
        "layer2": _som_meta(model.layer2),
        "output": {"classes": list(model.output.classes),
                   "beta": model.output.beta,
                   "strict_update": model.output.strict_update},
        "arrays": [{"name": n, "dtype": str(a.dtype), "shape": list(a.shape)}
                   for n, a in arrays],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack(">Q", len(blob)))
        fh.write(blob)
        for _, a in arrays:
            fh.write(np.ascontiguousarray(a).tobytes())


def load_model(path: str | Path) -> PipelineModel:
    data = Path(path).read_bytes()
    if not data.startswith(b"SOMACTION-MODEL"):
        raise CorruptFile(f"{path}: not a model file")
    if not data.startswith(_MAGIC):
        raise VersionMismatch(
            f"{path}: unsupported model version "
            f"{data.splitlines()[0]!r}, expected {_MAGIC.strip()!r}")
    off = len(_MAGIC)
    try:
        (hlen,) = struct.unpack(">Q", data[off:off + 8])
        off += 8
        header = json.loads(data[off:off + hlen].decode("utf-8"))
        off += hlen
    except (struct.error, ValueError) as exc:
        raise CorruptFile(f"{path}: bad header ({exc})") from None

    arrays = {}
    for spec in header["arrays"]:
        nbytes = int(np.dtype(spec["dtype"]).itemsize * np.prod(spec["shape"]))
        chunk = data[off:off + nbytes]
        if len(chunk) != nbytes:
            raise CorruptFile(f"{path}: truncated array {spec['name']!r}")
        arrays[spec["name"]] = np.frombuffer(
            chunk, dtype=spec["dtype"]).reshape(spec["shape"]).copy()
        off += nbytes
    if off != len(data):
        raise CorruptFile(f"{path}: {len(data) - off} trailing bytes")

    cfg = config_from_dict(header["config"])

    def make_som(meta: dict, w: np.ndarray) -> som.SomModel:
        return som.SomModel(rows=meta["rows"], cols=meta["cols"],
                            dim=meta["dim"], sigma=meta["sigma"],
                            seed=meta["seed"],
                            squared_neighborhood=meta["squared_neighborhood"],
                            normalize_weights=meta["normalize_weights"],
                            weights=w, schedule=meta["schedule"])

    out_meta = header["output"]
    output = out_layer.OutputLayer(
        classes=tuple(out_meta["classes"]), weights=arrays["output.weights"],
        beta=out_meta["beta"], strict_update=out_meta["strict_update"])
    return PipelineModel(
        config=cfg,
        layer1=make_som(header["layer1"], arrays["layer1.weights"]),
        n_max=header["n_max"],
        layer2=make_som(header["layer2"], arrays["layer2.weights"]),
        output=output,
        manifest=header["manifest"])

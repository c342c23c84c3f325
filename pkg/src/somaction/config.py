"""Run configuration: one YAML file drives training, evaluation and the CLI.

Documented keys (all optional, defaults below):

seed                     master seed; sub-seeds for init/shuffles derive from it
channels                 list drawn from [pos, vel, acc]
trunk_length             canonical Neck-Stomach length after scaling
split_fraction           train fraction for the stratified split
attention:
  joints                 global joint-name list, or
  per_class              {class name: joint-name list} (all the same size)
layer1 / layer2:         rows, cols, sigma, epochs, alpha0, alpha1,
                         sigma_n0 (null = max(rows, cols)/2), sigma_n1,
                         squared_neighborhood
classifier:              beta, map_sigma (activation factor for the maps fed
                         to the output layer), strict_update
normalize_ordered_vectors  unit-normalize layer-2 inputs
phase2_mode              interleaved | sequential
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigMismatch
from .preprocess import AttentionMask, FULL_MASK


@dataclass
class SomConfig:
    rows: int = 30
    cols: int = 30
    sigma: float = 1e6
    epochs: int = 20
    alpha0: float = 0.1
    alpha1: float = 0.01
    sigma_n0: float | None = None
    sigma_n1: float = 1.0
    squared_neighborhood: bool = False


@dataclass
class ClassifierConfig:
    beta: float = 0.1
    map_sigma: float = 0.1
    strict_update: bool = False


@dataclass
class PipelineConfig:
    seed: int = 0
    channels: tuple[str, ...] = ("pos",)
    trunk_length: float = 1.0
    split_fraction: float = 0.8
    attention_joints: tuple[str, ...] | None = None
    attention_per_class: dict[str, tuple[str, ...]] | None = None
    layer1: SomConfig = field(default_factory=SomConfig)
    layer2: SomConfig = field(default_factory=lambda: SomConfig(
        rows=35, cols=35, epochs=50))
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    normalize_ordered_vectors: bool = True
    phase2_mode: str = "interleaved"

    def mask(self) -> AttentionMask:
        if self.attention_joints is not None:
            return AttentionMask.from_names(names=self.attention_joints)
        if self.attention_per_class is not None:
            return AttentionMask.from_names(per_class=self.attention_per_class)
        return FULL_MASK

    def to_dict(self) -> dict:
        return asdict(self)


_SOM_KEYS = set(SomConfig.__dataclass_fields__)
_CLS_KEYS = set(ClassifierConfig.__dataclass_fields__)
_TOP_KEYS = {"seed", "channels", "trunk_length", "split_fraction", "attention",
             "layer1", "layer2", "classifier", "normalize_ordered_vectors",
             "phase2_mode"}


def _som_config(raw: dict, base: SomConfig) -> SomConfig:
    bad = set(raw) - _SOM_KEYS
    if bad:
        raise ConfigMismatch(f"unknown map keys: {sorted(bad)}")
    return SomConfig(**{**asdict(base), **raw})


def config_from_dict(raw: dict) -> PipelineConfig:
    bad = set(raw) - _TOP_KEYS
    if bad:
        raise ConfigMismatch(f"unknown config keys: {sorted(bad)}")
    cfg = PipelineConfig()
    if "seed" in raw:
        cfg.seed = int(raw["seed"])
    if "channels" in raw:
        cfg.channels = tuple(raw["channels"])
    if "trunk_length" in raw:
        cfg.trunk_length = float(raw["trunk_length"])
    if "split_fraction" in raw:
        cfg.split_fraction = float(raw["split_fraction"])
    att = raw.get("attention") or {}
    if att:
        bad = set(att) - {"joints", "per_class"}
        if bad or len(att) != 1:
            raise ConfigMismatch(
                "attention takes exactly one of: joints, per_class")
        if "joints" in att:
            cfg.attention_joints = tuple(att["joints"])
        else:
            cfg.attention_per_class = {k: tuple(v)
                                       for k, v in att["per_class"].items()}
    cfg.layer1 = _som_config(raw.get("layer1") or {}, cfg.layer1)
    cfg.layer2 = _som_config(raw.get("layer2") or {}, cfg.layer2)
    cls = raw.get("classifier") or {}
    bad = set(cls) - _CLS_KEYS
    if bad:
        raise ConfigMismatch(f"unknown classifier keys: {sorted(bad)}")
    cfg.classifier = ClassifierConfig(**{**asdict(cfg.classifier), **cls})
    if "normalize_ordered_vectors" in raw:
        cfg.normalize_ordered_vectors = bool(raw["normalize_ordered_vectors"])
    if "phase2_mode" in raw:
        if raw["phase2_mode"] not in ("interleaved", "sequential"):
            raise ConfigMismatch(f"bad phase2_mode {raw['phase2_mode']!r}")
        cfg.phase2_mode = raw["phase2_mode"]
    return cfg


def config_to_raw(cfg: PipelineConfig) -> dict:
    """Documented-key dict form; config_from_dict(config_to_raw(c)) == c."""
    raw = {
        "seed": cfg.seed,
        "channels": list(cfg.channels),
        "trunk_length": cfg.trunk_length,
        "split_fraction": cfg.split_fraction,
        "layer1": asdict(cfg.layer1),
        "layer2": asdict(cfg.layer2),
        "classifier": asdict(cfg.classifier),
        "normalize_ordered_vectors": cfg.normalize_ordered_vectors,
        "phase2_mode": cfg.phase2_mode,
    }
    if cfg.attention_joints is not None:
        raw["attention"] = {"joints": list(cfg.attention_joints)}
    elif cfg.attention_per_class is not None:
        raw["attention"] = {"per_class": {k: list(v)
                            for k, v in sorted(cfg.attention_per_class.items())}}
    return raw


def load_config(path: str | Path) -> PipelineConfig:
    raw = yaml.safe_load(Path(path).read_text())
    return config_from_dict(raw or {})

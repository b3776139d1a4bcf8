"""Run configuration: one JSON document covering every knob.

Unspecified keys take the defaults below; unknown keys are rejected so a
typo cannot silently fall back to a default.
"""

import dataclasses
import json
from dataclasses import dataclass, field

from .errors import UsageError

# CLI model tokens -> canonical kind names.
MODEL_ALIASES = {
    "bilstm": "bilstm",
    "rf": "random_forest",
    "random_forest": "random_forest",
    "gbm": "gbm",
    "lgbt": "leafwise_gbm",
    "leafwise_gbm": "leafwise_gbm",
}
MODEL_KINDS = ("bilstm", "random_forest", "gbm", "leafwise_gbm")


@dataclass(frozen=True)
class FeatureSection:
    max_tokens: int = 10000
    sequence_length: int = 256
    tabular_terms: int = 500


@dataclass(frozen=True)
class BilstmSection:
    embedding_dim: int = 32
    hidden_units: int = 64
    dense_units: int = 64


@dataclass(frozen=True)
class TrainSection:
    max_epochs: int = 25
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    patience: int = 2


@dataclass(frozen=True)
class RandomForestSection:
    n_trees: int = 100
    max_depth: int = 25
    min_samples_leaf: int = 1
    bootstrap: bool = True


@dataclass(frozen=True)
class GbmSection:
    n_rounds: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    min_samples_leaf: int = 1


@dataclass(frozen=True)
class LeafwiseSection:
    n_rounds: int = 100
    learning_rate: float = 0.1
    max_leaves: int = 31
    n_bins: int = 255
    min_samples_leaf: int = 20


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    model: str = "bilstm"
    threshold: float = 0.5
    features: FeatureSection = field(default_factory=FeatureSection)
    bilstm: BilstmSection = field(default_factory=BilstmSection)
    train: TrainSection = field(default_factory=TrainSection)
    random_forest: RandomForestSection = field(default_factory=RandomForestSection)
    gbm: GbmSection = field(default_factory=GbmSection)
    leafwise_gbm: LeafwiseSection = field(default_factory=LeafwiseSection)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _build_section(cls, data: dict, path: str):
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise UsageError(f"unknown config key(s) {', '.join(repr(path + k) for k in unknown)}")
    kwargs = {}
    for name, value in data.items():
        section_cls = known[name].type
        if dataclasses.is_dataclass(section_cls):
            if not isinstance(value, dict):
                raise UsageError(f"config key {path + name!r} must be an object")
            kwargs[name] = _build_section(section_cls, value, f"{path}{name}.")
        else:
            kwargs[name] = value
    return cls(**kwargs)


def config_from_dict(data: dict) -> RunConfig:
    cfg = _build_section(RunConfig, data, "")
    if cfg.model not in MODEL_ALIASES:
        raise UsageError(
            f"unknown model {cfg.model!r}; choose one of bilstm, rf, gbm, lgbt"
        )
    return cfg.replace(model=MODEL_ALIASES[cfg.model])


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return config_from_dict(data)

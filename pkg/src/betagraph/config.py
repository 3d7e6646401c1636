"""Run configuration: one JSON document holding every component's settings."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .datasets import DatasetSpec
from .denoiser.model import DenoiserConfig
from .denoiser.training import TrainConfig
from .errors import ConfigurationError
from .evaluation.report import EvalConfig
from .features import SCHEMES
from .graph import TransformParams
from .losses import LossConfig
from .modulation import ModulationStrategy
from .numerics import NoiseSchedule


@dataclass(frozen=True)
class DataConfig:
    kind: str = "community_small"
    count: int | None = None
    params: dict = field(default_factory=dict)
    features: str = "degree_onehot"
    train_fraction: float = 0.8

    def __post_init__(self):
        if self.features not in SCHEMES + ("none",):
            raise ConfigurationError(f"unknown feature scheme {self.features!r}")
        if not 0 < self.train_fraction < 1:
            raise ConfigurationError("train_fraction must lie in (0, 1)")

    def spec(self, seed: int) -> DatasetSpec:
        return DatasetSpec(self.kind, self.count, seed, dict(self.params))


@dataclass(frozen=True)
class SamplingConfig:
    count: int = 20
    threshold: float = 0.5
    trajectory_every: int = 100
    batch_size: int = 64
    use_ema: bool = True

    def __post_init__(self):
        if self.count < 1 or self.batch_size < 1:
            raise ConfigurationError("count and batch_size must be >= 1")
        if not 0 < self.threshold < 1:
            raise ConfigurationError("threshold must lie in (0, 1)")
        if self.trajectory_every < 1:
            raise ConfigurationError("trajectory_every must be >= 1")


@dataclass(frozen=True)
class TrainingSection:
    steps: int = 2000
    batch_size: int = 16
    lr: float = 0.002
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8
    ema_decay: float = 0.999
    domain: str = "logit"
    precondition: bool = True
    K: int = 1000
    checkpoint_every: int = 500

    def train_config(self, seed: int) -> TrainConfig:
        kw = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "checkpoint_every"}
        return TrainConfig(seed=seed, **kw)


_SECTIONS = {
    "dataset": DataConfig,
    "transform": TransformParams,
    "schedule": NoiseSchedule,
    "modulation": ModulationStrategy,
    "loss": LossConfig,
    "denoiser": DenoiserConfig,
    "training": TrainingSection,
    "sampling": SamplingConfig,
    "eval": EvalConfig,
}
_EXCLUDED = {"denoiser": {"n_features"}, "eval": {"dataset_kind", "seed"}, "schedule": {"alphas"}}


def _section_dict(name: str, obj) -> dict:
    d = asdict(obj)
    for k in _EXCLUDED.get(name, ()):
        d.pop(k, None)
    return d


def _build(name: str, cls, raw: dict):
    allowed = {f.name for f in fields(cls) if f.init} - _EXCLUDED.get(name, set())
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigurationError(f"unknown keys in [{name}]: {sorted(unknown)}")
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"[{name}]: {exc}") from None


@dataclass(frozen=True)
class RunConfig:
    seed: int
    dataset: DataConfig = DataConfig()
    transform: TransformParams = TransformParams()
    schedule: NoiseSchedule = NoiseSchedule()
    modulation: ModulationStrategy = ModulationStrategy()
    loss: LossConfig = LossConfig()
    denoiser: DenoiserConfig = DenoiserConfig()
    training: TrainingSection = TrainingSection()
    sampling: SamplingConfig = SamplingConfig()
    eval: EvalConfig = EvalConfig()

    @classmethod
    def from_dict(cls, raw: dict[str, Any], seed: int | None = None) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigurationError("config must be a JSON object")
        unknown = set(raw) - set(_SECTIONS) - {"seed"}
        if unknown:
            raise ConfigurationError(f"unknown config sections: {sorted(unknown)}")
        if seed is None:
            seed = raw.get("seed")
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigurationError("a non-negative integer seed is required (config 'seed' or --seed)")
        built = {}
        for name, sec in _SECTIONS.items():
            part = raw.get(name, {})
            if not isinstance(part, dict):
                raise ConfigurationError(f"[{name}] must be an object")
            built[name] = _build(name, sec, part)
        return cls(seed=seed, **built)

    @classmethod
    def load(cls, path, seed: int | None = None) -> "RunConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
        return cls.from_dict(raw, seed)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"seed": self.seed}
        for name in _SECTIONS:
            out[name] = _section_dict(name, getattr(self, name))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]

"""JSON run configuration. Every section maps onto a dataclass; unknown keys are errors."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .dataset import Schema
from .errors import ConfigError
from .features import DEFAULT_RF_FEATURES, DEFAULT_SPACING
from .lif import LifParams
from .liquid import LiquidConfig
from .som import SomConfig, StdpParams

__all__ = ["Config", "DatasetConfig", "EncoderSection", "RunSection", "load_config"]


@dataclass(frozen=True)
class DatasetConfig:
    paths: tuple[str, ...] = ()
    schema: Schema = field(default_factory=Schema)
    stratified: bool = True
    split_seed: int = 0
    # subsample (stratified, seeded by split_seed) before splitting; None keeps all
    max_records: int | None = None


COUNT_TRANSFORMS = ("log1p", "none")


@dataclass(frozen=True)
class FeatureSection:
    rf_features: tuple[str, ...] = DEFAULT_RF_FEATURES
    padding_spacing: int = DEFAULT_SPACING
    # applied to liquid spike counts before min-max scaling: "log1p" or "none"
    count_transform: str = "log1p"

    def __post_init__(self):
        if self.count_transform not in COUNT_TRANSFORMS:
            raise ConfigError(f"count_transform must be one of {COUNT_TRANSFORMS}")


@dataclass(frozen=True)
class EncoderSection:
    steps: int = 250
    max_rate: float = 0.5


@dataclass(frozen=True)
class RunSection:
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    strategies: tuple[int, ...] = tuple(range(1, 11))
    synthetic_samples: int = 2000
    synthetic_seed: int = 0


def _default_rf_liquid() -> LiquidConfig:
    return LiquidConfig(n_neurons=400, w_scale_in=0.1, w_scale_rec=0.02)


def _default_cir_liquid() -> LiquidConfig:
    return LiquidConfig(n_neurons=500, w_scale_in=0.05, w_scale_rec=0.01)


@dataclass(frozen=True)
class Config:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    features: FeatureSection = field(default_factory=FeatureSection)
    encoder: EncoderSection = field(default_factory=EncoderSection)
    lif: LifParams = field(default_factory=LifParams)
    liquid_rf: LiquidConfig = field(default_factory=_default_rf_liquid)
    liquid_cir: LiquidConfig = field(default_factory=_default_cir_liquid)
    som: SomConfig = field(default_factory=SomConfig)
    run: RunSection = field(default_factory=RunSection)

    def to_dict(self) -> dict:
        def plain(obj):
            if dataclasses.is_dataclass(obj):
                return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
            if isinstance(obj, (list, tuple)):
                return [plain(v) for v in obj]
            return obj

        d = plain(self)
        d["liquid"] = {"rf": d.pop("liquid_rf"), "cir": d.pop("liquid_cir")}
        # liquids and SOM share the top-level LIF parameters
        for sub in (d["liquid"]["rf"], d["liquid"]["cir"], d["som"]):
            sub.pop("lif")
        return d

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


def _section(cls, data: Any, where: str, **fixed):
    if not isinstance(data, Mapping):
        raise ConfigError(f"{where}: expected an object")
    names = {f.name for f in dataclasses.fields(cls)} - set(fixed)
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        kwargs[key] = tuple(value) if isinstance(value, list) else value
    try:
        return cls(**kwargs, **fixed)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(data: Mapping) -> Config:
    known = {"dataset", "features", "encoder", "lif", "liquid", "som", "run"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    lif = _section(LifParams, data.get("lif", {}), "lif")

    ds = dict(data.get("dataset", {}))
    schema = Schema.from_mapping(ds.pop("schema", {}))
    dataset = _section(DatasetConfig, ds, "dataset", schema=schema)

    liquid = dict(data.get("liquid", {}))
    bad = set(liquid) - {"rf", "cir"}
    if bad:
        raise ConfigError(f"liquid: unknown keys {sorted(bad)}")
    rf_defaults = dataclasses.asdict(_default_rf_liquid())
    cir_defaults = dataclasses.asdict(_default_cir_liquid())
    for d in (rf_defaults, cir_defaults):
        d.pop("lif")
    liquid_rf = _section(LiquidConfig, {**rf_defaults, **liquid.get("rf", {})}, "liquid.rf", lif=lif)
    liquid_cir = _section(LiquidConfig, {**cir_defaults, **liquid.get("cir", {})}, "liquid.cir", lif=lif)

    som_raw = dict(data.get("som", {}))
    stdp = _section(StdpParams, som_raw.pop("stdp", {}), "som.stdp")
    som = _section(SomConfig, som_raw, "som", stdp=stdp, lif=lif)

    return Config(
        dataset=dataset,
        features=_section(FeatureSection, data.get("features", {}), "features"),
        encoder=_section(EncoderSection, data.get("encoder", {}), "encoder"),
        lif=lif,
        liquid_rf=liquid_rf,
        liquid_cir=liquid_cir,
        som=som,
        run=_section(RunSection, data.get("run", {}), "run"),
    )


def load_config(path) -> Config:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    cfg = config_from_dict(data)
    # relative dataset paths resolve against the config file's directory
    paths = tuple(str((path.parent / p).resolve()) if not Path(p).is_absolute() else p
                  for p in cfg.dataset.paths)
    return dataclasses.replace(cfg, dataset=dataclasses.replace(cfg.dataset, paths=paths))

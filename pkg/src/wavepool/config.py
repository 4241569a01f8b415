"""Experiment configuration: plain-text key=value files with sections.

A config file is line-oriented: ``[section]`` headers, ``key = value``
pairs, blank lines and ``#`` comments ignored.  Unknown sections or keys
are rejected rather than silently dropped, so a typo cannot quietly change
an experiment.  ``serialize_config(parse_config(text))`` is the identity on
canonical form, and the canonical text is what gets hashed into output
file names, so a config hash pins the exact experiment.

Sections and keys (defaults in parentheses):

[dataset]
  kind (synthetic) | cifar100 | file        file: a .wvds image-set path
  path ()                                   dataset dir/file; may be
                                            relative to WAVEPOOL_DATA_DIR
  n_train (2000)   n_test (500)
  image_size (32)  object_size (6)  classes (4)

[model]
  schedule (micro) | resnet50
  pool (wavelet:haar)                       see pooling.parse_pool
  variant (c)                               a | b | c
  bottom_heavy_shift (0)
  conv_pad (circular) | same

[train]
  epochs (10)  batch_size (50)
  lr (0.05)  momentum (0.9)  weight_decay (0.0)
  lr_schedule (constant) | step | cosine
  milestones ()                             comma ints, step schedule
  factor (0.1)  lr_min (0.0)  period (0)    period 0: one cosine arc
  mode (plain) | short | kd
  teacher ()  teacher_pool (max)  alpha (0.5)  temperature (4.0)
  seed (0)

[output]
  dir (runs)
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields

from .errors import InvalidConfig


@dataclass
class DatasetConfig:
    kind: str = "synthetic"
    path: str = ""
    n_train: int = 2000
    n_test: int = 500
    image_size: int = 32
    object_size: int = 6
    classes: int = 4


@dataclass
class ModelConfig:
    schedule: str = "micro"
    pool: str = "wavelet:haar"
    variant: str = "c"
    bottom_heavy_shift: int = 0
    conv_pad: str = "circular"


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 50
    lr: float = 0.05
    momentum: float = 0.9
    weight_decay: float = 0.0
    lr_schedule: str = "constant"
    milestones: str = ""
    factor: float = 0.1
    lr_min: float = 0.0
    period: int = 0
    mode: str = "plain"
    teacher: str = ""
    teacher_pool: str = "max"
    alpha: float = 0.5
    temperature: float = 4.0
    seed: int = 0


@dataclass
class OutputConfig:
    dir: str = "runs"


@dataclass
class ExperimentConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def milestone_list(self) -> list[int]:
        text = self.train.milestones.strip()
        if not text:
            return []
        try:
            return [int(tok) for tok in text.split(",")]
        except ValueError:
            raise InvalidConfig(f"bad milestones list: {self.train.milestones!r}") from None


_SECTIONS = {
    "dataset": DatasetConfig,
    "model": ModelConfig,
    "train": TrainConfig,
    "output": OutputConfig,
}

_CHOICES = {
    ("dataset", "kind"): ("synthetic", "cifar100", "file"),
    ("model", "schedule"): ("micro", "resnet50"),
    ("model", "variant"): ("a", "b", "c"),
    ("model", "conv_pad"): ("circular", "same"),
    ("train", "lr_schedule"): ("constant", "step", "cosine"),
    ("train", "mode"): ("plain", "short", "kd"),
}


def _coerce(section: str, key: str, raw: str, target_type):
    try:
        if target_type is int:
            value = int(raw)
        elif target_type is float:
            value = float(raw)
        else:
            value = raw
    except ValueError:
        raise InvalidConfig(f"[{section}] {key}: cannot parse {raw!r}") from None
    choices = _CHOICES.get((section, key))
    if choices and value not in choices:
        raise InvalidConfig(f"[{section}] {key}: {value!r} not one of {choices}")
    return value


def parse_config(text: str) -> ExperimentConfig:
    """Parse config text; unknown sections/keys raise InvalidConfig."""
    cfg = ExperimentConfig()
    section = None
    section_fields: dict[str, type] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            name = stripped[1:-1].strip()
            if name not in _SECTIONS:
                raise InvalidConfig(f"line {lineno}: unknown section [{name}]")
            section = name
            section_fields = {f.name: f.type for f in fields(_SECTIONS[name])}
            continue
        if "=" not in stripped:
            raise InvalidConfig(f"line {lineno}: expected key = value, got {stripped!r}")
        if section is None:
            raise InvalidConfig(f"line {lineno}: key before any [section]")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in section_fields:
            raise InvalidConfig(f"line {lineno}: unknown key {key!r} in [{section}]")
        target = getattr(cfg, section)
        current = getattr(target, key)
        setattr(target, key, _coerce(section, key, raw, type(current)))
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    t = cfg.train
    if t.epochs < 1 or t.batch_size < 1:
        raise InvalidConfig("epochs and batch_size must be >= 1")
    if t.mode == "kd" and not t.teacher:
        raise InvalidConfig("kd mode requires a teacher checkpoint path")
    if cfg.dataset.kind in ("cifar100", "file") and not cfg.dataset.path:
        raise InvalidConfig(f"dataset kind {cfg.dataset.kind!r} requires a path")
    cfg.milestone_list()


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical text form: fixed section and key order, one key per line."""
    lines = []
    for section, klass in _SECTIONS.items():
        lines.append(f"[{section}]")
        target = getattr(cfg, section)
        for f in fields(klass):
            value = getattr(target, f.name)
            if isinstance(value, float):
                value = repr(value)
            lines.append(f"{f.name} = {value}")
        lines.append("")
    return "\n".join(lines)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return parse_config(f.read())
    except FileNotFoundError:
        raise InvalidConfig(f"config file not found: {path}") from None


def config_hash(cfg: ExperimentConfig) -> str:
    """Twelve hex digits of the canonical form's SHA-256; names run files."""
    return hashlib.sha256(serialize_config(cfg).encode("utf-8")).hexdigest()[:12]

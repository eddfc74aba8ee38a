"""Flat dotted-key configuration files.

One `key = value` pair per line, `#` comments, no sections.  Keys mirror
the dataclass tree (`policy.cutout.probability = 0.15`).  Parsing and
formatting round-trip losslessly: format(parse(text)) == normalize(text)
up to comment and ordering normalization.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, replace
from typing import Any

from .transforms import KindPolicy, SchedulePolicy

# config key -> SchedulePolicy field
_KIND_KEYS = {
    "shift": "shift",
    "rescale": "rescale",
    "flip": "flip",
    "shear": "shear",
    "cutout": "cutout",
    "shaking_blur": "shaking_blur",
    "color_jitter": "color_jitter",
    "similar_patch_paste": "similar_patch_paste",
}


@dataclass(frozen=True)
class PairGeometry:
    template_size: int = 127
    search_size: int = 255
    template_context: float = 2.0
    search_context: float = 4.0


@dataclass(frozen=True)
class Config:
    master_seed: int = 0
    pad_ratio: float = 0.1
    background_mode: str = "same"  # "same" | "different"
    samples_per_sequence: int = 64
    library_per_sequence: int = 4  # distractor pool entries cropped per sequence
    dataset_root: str = "."
    out_root: str = "out"
    policy: SchedulePolicy = field(default_factory=SchedulePolicy)
    pairs: PairGeometry = field(default_factory=PairGeometry)

    def __post_init__(self) -> None:
        if self.background_mode not in ("same", "different"):
            raise ValueError(f"unknown background_mode: {self.background_mode!r}")
        if self.samples_per_sequence < 1:
            raise ValueError("samples_per_sequence must be >= 1")
        if self.library_per_sequence < 1:
            raise ValueError("library_per_sequence must be >= 1")


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float, str)):
        return str(value)
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    raise TypeError(f"cannot format {type(value).__name__}")


def _parse_scalar(text: str) -> Any:
    t = text.strip()
    if t == "true":
        return True
    if t == "false":
        return False
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    return t


def _parse_value(text: str) -> Any:
    if "," in text:
        return tuple(_parse_scalar(part) for part in text.split(","))
    return _parse_scalar(text)


def config_to_items(config: Config) -> list[tuple[str, Any]]:
    """Flatten a Config into (dotted key, value) pairs, declaration order."""
    items: list[tuple[str, Any]] = [
        ("master_seed", config.master_seed),
        ("pad_ratio", config.pad_ratio),
        ("background_mode", config.background_mode),
        ("samples_per_sequence", config.samples_per_sequence),
        ("library_per_sequence", config.library_per_sequence),
        ("dataset_root", config.dataset_root),
        ("out_root", config.out_root),
    ]
    for key, attr in _KIND_KEYS.items():
        kp: KindPolicy = getattr(config.policy, attr)
        items.append((f"policy.{key}.enable", kp.enable))
        items.append((f"policy.{key}.probability", kp.probability))
        if kp.range:
            items.append((f"policy.{key}.range", kp.range))
    for f in dataclasses.fields(PairGeometry):
        items.append((f"pairs.{f.name}", getattr(config.pairs, f.name)))
    return items


def format_config(config: Config) -> str:
    return "".join(f"{k} = {_format_value(v)}\n" for k, v in config_to_items(config))


def _apply_key(config: Config, key: str, value: Any) -> Config:
    parts = key.split(".")
    if len(parts) == 1:
        if not any(f.name == key for f in dataclasses.fields(Config)):
            raise KeyError(key)
        if key in ("policy", "pairs"):
            raise KeyError(key)
        return replace(config, **{key: value})
    if parts[0] == "policy" and len(parts) == 3:
        kind_key, fname = parts[1], parts[2]
        if kind_key not in _KIND_KEYS:
            raise KeyError(key)
        if fname not in ("enable", "probability", "range"):
            raise KeyError(key)
        kp = getattr(config.policy, _KIND_KEYS[kind_key])
        if fname == "range":
            # a bare number is a 1-tuple (the similar-patch count)
            parts_v = value if isinstance(value, tuple) else (value,)
            value = tuple(float(v) for v in parts_v)
        new_kp = replace(kp, **{fname: value})
        policy = replace(config.policy, **{_KIND_KEYS[kind_key]: new_kp})
        return replace(config, policy=policy)
    if parts[0] == "pairs" and len(parts) == 2:
        if not any(f.name == parts[1] for f in dataclasses.fields(PairGeometry)):
            raise KeyError(key)
        return replace(config, pairs=replace(config.pairs, **{parts[1]: value}))
    raise KeyError(key)


def apply_overrides(config: Config, overrides: dict[str, Any]) -> Config:
    for key, value in overrides.items():
        try:
            config = _apply_key(config, key, value)
        except KeyError:
            raise ValueError(f"unknown config key: {key}") from None
    return config


def parse_config(text: str, base: Config | None = None) -> Config:
    """Parse dotted-key lines into a Config; errors carry line numbers."""
    config = base if base is not None else Config()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value_text = line.partition("=")
        key = key.strip()
        if not key:
            raise ValueError(f"line {lineno}: empty key")
        value = _parse_value(value_text)
        try:
            config = _apply_key(config, key, value)
        except KeyError:
            raise ValueError(f"line {lineno}: unknown config key: {key}") from None
        except (TypeError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return config


def load_config(path: str, base: Config | None = None) -> Config:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_config(text, base)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None

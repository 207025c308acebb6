"""Tolerances and policies for the merge pipeline, plus the flat config file.

The config file is plain ``key = value`` text, one key per line, ``#``
comments allowed. Keys mirror the :class:`MergeConfig` fields; the two
dedup thresholds are spelled ``dedup_max_offset`` and
``dedup_min_overlap_ratio``.
"""

from __future__ import annotations

import configparser
import dataclasses
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError

log = logging.getLogger(__name__)

CONFIG_ENV_VAR = "PID_LINKER_CONFIG"


@dataclass(frozen=True)
class DedupConfig:
    max_offset: float = 6.0
    min_overlap_ratio: float = 0.6

    def __post_init__(self):
        if not self.max_offset > 0:
            raise ConfigError(f"dedup max_offset must be > 0, got {self.max_offset}")
        if not 0 < self.min_overlap_ratio <= 1:
            raise ConfigError(
                f"dedup min_overlap_ratio must be in (0, 1], got {self.min_overlap_ratio}")


@dataclass(frozen=True)
class MergeConfig:
    eps_gap: float = 10.0
    delta_collinear: float = 8.0
    eps_contact: float = 5.0
    crossing_margin: float = 2.0
    corner_merge: bool = True
    dedup: DedupConfig = field(default_factory=DedupConfig)
    attach_inflation: float = 10.0
    # ingestion policy
    angle_tol_deg: float = 2.0
    strict_axis: bool = False

    def __post_init__(self):
        for name in ("eps_gap", "delta_collinear", "eps_contact",
                     "crossing_margin", "attach_inflation", "angle_tol_deg"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"{name} must be > 0, got {value}")
        if self.eps_contact > self.eps_gap:
            log.warning("eps_contact (%s) exceeds eps_gap (%s)", self.eps_contact, self.eps_gap)

    @property
    def search_radius(self) -> float:
        """Largest distance at which two segments can still form a merge pair."""
        return max(self.eps_gap, self.eps_contact)

    def replace(self, **changes: Any) -> "MergeConfig":
        return dataclasses.replace(self, **changes)

    def to_flat(self) -> dict[str, Any]:
        flat = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "dedup"}
        flat["dedup_max_offset"] = self.dedup.max_offset
        flat["dedup_min_overlap_ratio"] = self.dedup.min_overlap_ratio
        return flat

    @classmethod
    def from_flat(cls, values: dict[str, Any], base: "MergeConfig | None" = None) -> "MergeConfig":
        base = base or cls()
        current = base.to_flat()
        for key, raw in values.items():
            if key not in current:
                raise ConfigError(f"unknown config key {key!r}")
            current[key] = _coerce(key, raw, current[key])
        dedup = DedupConfig(current.pop("dedup_max_offset"), current.pop("dedup_min_overlap_ratio"))
        return cls(dedup=dedup, **current)


def _coerce(key: str, raw: Any, default: Any) -> Any:
    if isinstance(default, bool):
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


def parse_config_text(text: str) -> dict[str, str]:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string("[merge]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config file: {exc}") from None
    return dict(parser["merge"])


def load_config(path: str | os.PathLike | None = None,
                overrides: dict[str, Any] | None = None) -> MergeConfig:
    """Resolve a MergeConfig: defaults < config file < explicit overrides.

    With no ``path``, the ``PID_LINKER_CONFIG`` environment variable is
    consulted.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    values: dict[str, Any] = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text(encoding="utf-8")))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return MergeConfig.from_flat(values)


def format_config(cfg: MergeConfig) -> str:
    return "\n".join(f"{k} = {str(v).lower() if isinstance(v, bool) else v}"
                     for k, v in cfg.to_flat().items())

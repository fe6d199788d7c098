# utils/config_loader.py
import copy
import os
import re
from pathlib import Path
from typing import IO, Any, Iterable, Optional, Union

import yaml
from pydantic import ValidationError

from ..config.settings import ExperimentSettings, SimConfig
from ..exception.custom_exception import ConfigError
from ..logger import GLOBAL_LOGGER as log

# flat key -> path into the nested model dict
FLAT_KEYS: dict[str, tuple[str, ...]] = {
    "count": ("workload", "count"),
    "mem_fraction": ("workload", "mem_fraction"),
    "addr_low": ("workload", "addr_low"),
    "addr_high": ("workload", "addr_high"),
    "seq_base": ("workload", "seq_base"),
    "per_thread_offset": ("workload", "per_thread_offset"),
    "count_is_total": ("workload", "count_is_total"),
    "trace_path": ("workload", "trace_path"),
    "decode_width": ("pipeline", "decode_width"),
    "decode_period": ("pipeline", "decode_period"),
    "decode_sigma": ("pipeline", "decode_sigma"),
    "execute_width": ("pipeline", "execute_width"),
    "execute_period": ("pipeline", "execute_period"),
    "execute_sigma": ("pipeline", "execute_sigma"),
    "window_capacity": ("pipeline", "window_capacity"),
    "strict_width": ("pipeline", "strict_width"),
    "park_idle": ("pipeline", "park_idle"),
    "policy": ("mem", "policy", "variant"),
    "partitions": ("mem", "policy", "num_partitions"),
    "mlp_width": ("mem", "mlp_width"),
    "base_period": ("mem", "base_period"),
    "threads": ("threads",),
    "prefetch": ("prefetch", "enabled"),
    "prefetch_degree": ("prefetch", "degree"),
    "prefetch_level": ("prefetch", "target_level"),
    "prefetch_partitioned": ("prefetch", "partitioned"),
    "seed": ("seed",),
    "seeds": ("seeds",),
    "deterministic": ("deterministic_latencies",),
}

# keys that reshape the level list rather than set a single field
LEVEL_LIST_KEYS = ("levels", "capacities", "latencies", "latency_sigma")
_LEVEL_KEY = re.compile(r"^l(\d+)_(capacity|latency|sigma)$")
_LEVEL_FIELD = {
    "capacity": "capacity",
    "latency": "fetch_latency_mean",
    "sigma": "fetch_latency_sigma",
}

EXPERIMENT_KEYS: dict[str, str] = {
    "total_instructions": "total_instructions",
    "depths": "hierarchy_depths",
    "cores": "coresweep_cores",
    "coresweep_l1_capacity": "coresweep_l1_capacity",
    "coresweep_l1_latency": "coresweep_l1_latency",
    "degrees": "prefetchsweep_degrees",
    "technique_threads": "technique_threads",
    "technique_degree": "technique_prefetch_degree",
    "technique_level": "technique_prefetch_level",
}

Source = Union[str, bytes, IO[str], IO[bytes], None]


def _project_root() -> Path:
    # .../utils/config_loader.py -> parents[1] == package root
    return Path(__file__).resolve().parents[1]


def load_defaults(config_path: str | None = None) -> dict:
    """
    Load the nested YAML defaults.
    Priority: explicit arg > SIMCACHE_CONFIG_PATH env > <package_root>/config/config.yaml
    """
    env_path = os.getenv("SIMCACHE_CONFIG_PATH")
    from_env = config_path is None and bool(env_path)
    if config_path is None:
        config_path = env_path or str(_project_root() / "config" / "config.yaml")

    path = Path(config_path)
    if not path.is_absolute():
        path = _project_root() / path

    if not path.exists():
        raise ConfigError(f"defaults file not found: {path}", key="SIMCACHE_CONFIG_PATH" if from_env else None)

    try:
        with open(path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot load defaults file {path}: {e}", error_details=e) from e


def parse_pairs(source: Source) -> list[tuple[str, str, Optional[int]]]:
    """Split flat `key=value` text into (key, value, line) triples."""
    if source is None:
        return []
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ConfigError("config is not valid UTF-8", error_details=e) from e

    pairs = []
    for lineno, raw in enumerate(str(source).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw.strip()!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=lineno)
        pairs.append((key.lower(), value, lineno))
    return pairs


def split_override(text: str) -> tuple[str, str, None]:
    if "=" not in text:
        raise ConfigError(f"override must be key=value, got {text!r}")
    key, value = (part.strip() for part in text.split("=", 1))
    return key.lower(), value, None


def _csv_values(key: str, value: str, line: Optional[int]) -> list[str]:
    items = [v.strip() for v in value.split(",") if v.strip()]
    if not items:
        raise ConfigError("expected a comma separated list", key=key, line=line)
    return items


def _set_path(raw: dict, path: tuple[str, ...], value: Any) -> None:
    node = raw
    for part in path[:-1]:
        node = node.setdefault(part, {})
    node[path[-1]] = value


def _apply_level_key(raw: dict, key: str, value: str, line: Optional[int]) -> None:
    levels = raw.setdefault("mem", {}).setdefault("levels", [])
    if key == "levels":
        try:
            n = int(value)
        except ValueError as e:
            raise ConfigError(f"expected an integer, got {value!r}", key=key, line=line, error_details=e) from e
        if n < 1 or n > len(levels):
            raise ConfigError(f"levels must be between 1 and {len(levels)}", key=key, line=line)
        del levels[n:]
        return
    if key == "latency_sigma":
        for level in levels:
            level["fetch_latency_sigma"] = value
        return

    items = _csv_values(key, value, line)
    field = "capacity" if key == "capacities" else "fetch_latency_mean"
    # a list key defines the number of levels; missing fields keep the deepest default
    template = levels[-1] if levels else {"fetch_latency_sigma": 0.5}
    while len(levels) < len(items):
        levels.append(dict(template))
    del levels[len(items):]
    for level, item in zip(levels, items):
        level[field] = item


def _apply_single_level(raw: dict, match: re.Match, value: str, key: str, line: Optional[int]) -> None:
    levels = raw.setdefault("mem", {}).setdefault("levels", [])
    index = int(match.group(1)) - 1
    if index < 0 or index >= len(levels):
        raise ConfigError(f"no cache level {index + 1} (configured: {len(levels)})", key=key, line=line)
    levels[index][_LEVEL_FIELD[match.group(2)]] = value


def apply_pairs(raw: dict, pairs: Iterable[tuple[str, str, Optional[int]]]) -> dict[tuple, tuple[str, Optional[int]]]:
    """Apply flat pairs onto a nested defaults dict, in place.

    Returns a map from nested path to (flat key, line) so validation errors can
    be reported against what the user wrote.
    """
    origins: dict[tuple, tuple[str, Optional[int]]] = {}
    for key, value, line in pairs:
        if key in FLAT_KEYS:
            path = FLAT_KEYS[key]
            if key == "policy":
                value = value.lower()
            if key in ("trace_path", "partitions") and value.lower() in ("", "none", "null"):
                value = None
            _set_path(raw, path, value)
            origins[path] = (key, line)
        elif key in LEVEL_LIST_KEYS:
            _apply_level_key(raw, key, value, line)
            origins[("mem", "levels")] = (key, line)
        elif (match := _LEVEL_KEY.match(key)) is not None:
            _apply_single_level(raw, match, value, key, line)
            index = int(match.group(1)) - 1
            origins[("mem", "levels", index, _LEVEL_FIELD[match.group(2)])] = (key, line)
        else:
            raise ConfigError("unknown key", key=key, line=line)
    return origins


def _origin_of(loc: tuple, origins: dict[tuple, tuple[str, Optional[int]]]) -> tuple[str, Optional[int]]:
    # longest recorded prefix of the pydantic error location wins, then the
    # last key written below it (model-level validators report a short loc)
    for n in range(len(loc), 0, -1):
        if loc[:n] in origins:
            return origins[loc[:n]]
    below = [origin for path, origin in origins.items() if path[: len(loc)] == loc]
    if below:
        return below[-1]
    return ".".join(str(p) for p in loc) or "<config>", None


def build_config(raw: dict, origins: dict[tuple, tuple[str, Optional[int]]]) -> SimConfig:
    try:
        return SimConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        loc = tuple(first["loc"])
        key, line = _origin_of(loc, origins)
        raise ConfigError(first["msg"], key=key, line=line, error_details=e) from e


def _defaults_without_experiments(defaults: dict | None) -> dict:
    raw = copy.deepcopy(defaults if defaults is not None else load_defaults())
    raw.pop("experiments", None)
    return raw


def load_config(source: Source = None, overrides: Iterable[str] = (), defaults: dict | None = None) -> SimConfig:
    """Parse flat `key=value` text on top of the YAML defaults.

    `source` may be text, bytes or a readable stream; `overrides` are extra
    `key=value` strings applied last (command-line `--set`).
    """
    raw = _defaults_without_experiments(defaults)
    pairs = parse_pairs(source) + [split_override(o) for o in overrides]
    origins = apply_pairs(raw, pairs)
    cfg = build_config(raw, origins)
    log.info("Config loaded", keys=[k for k, _, _ in pairs], fingerprint=cfg.fingerprint()[:12])
    return cfg


def load_config_file(path: str | os.PathLike, overrides: Iterable[str] = ()) -> SimConfig:
    try:
        with open(path, "rb") as f:
            return load_config(f, overrides)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}", error_details=e) from e


def with_overrides(cfg: SimConfig, overrides: Iterable[tuple[str, Any]]) -> SimConfig:
    """Apply flat key/value pairs to an existing config (values may be typed)."""
    raw = cfg.model_dump(mode="json")
    pairs = [(k, v if isinstance(v, str) else json_scalar(v), None) for k, v in overrides]
    origins = apply_pairs(raw, pairs)
    return build_config(raw, origins)


def json_scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(json_scalar(v) for v in value)
    if value is None:
        return "null"
    return str(value)


def load_experiment_settings(overrides: Iterable[str] = (), defaults: dict | None = None) -> tuple[ExperimentSettings, list[str]]:
    """Split `--set` overrides into experiment constants and run-config overrides."""
    raw = dict((defaults if defaults is not None else load_defaults()).get("experiments") or {})
    remaining = []
    for text in overrides:
        key, value, _ = split_override(text)
        if key in EXPERIMENT_KEYS:
            field = EXPERIMENT_KEYS[key]
            if field in ("hierarchy_depths", "coresweep_cores", "prefetchsweep_degrees"):
                raw[field] = _csv_values(key, value, None)
            else:
                raw[field] = value
        else:
            remaining.append(text)
    try:
        return ExperimentSettings.model_validate(raw), remaining
    except ValidationError as e:
        first = e.errors()[0]
        if first["loc"]:
            field = str(first["loc"][0])
        else:
            # model-level checks name the offending field in their message
            field = next((f for f in EXPERIMENT_KEYS.values() if f in first["msg"]), "experiments")
        key = next((k for k, f in EXPERIMENT_KEYS.items() if f == field), field)
        raise ConfigError(first["msg"], key=key, error_details=e) from e

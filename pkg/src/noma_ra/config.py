"""Sectioned key-value configuration files.

Example::

    [channel]
    num_users = 16
    shadowing_std_db = 3

    [experiment]
    pairing = nlupa, dnlupa, random
    power_grid_dbm = 0, 10, 20, 30
    trials = 10000
    seed = 1

    [qos]
    min_rate_bps_hz = 1.0

Omitted keys take their defaults.  A ``[run]`` section (written into run
manifests) is accepted and ignored, so a manifest is itself a valid config.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import fields, replace

from .channel import ChannelConfig
from .experiments import ExperimentSpec
from .power import QosTarget


class ConfigError(ValueError):
    """Invalid configuration; ``key`` and ``line`` locate the offending entry."""

    def __init__(self, message, *, key=None, line=None, path=None):
        self.key, self.line, self.path = key, line, path
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        if key is not None:
            message = f"key '{key}': {message}"
        super().__init__(where + message)


def _bool(text):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _words(text):
    return tuple(w.strip() for w in text.split(",") if w.strip())


def _floats(text):
    return tuple(float(w) for w in _words(text))


def _int(text):
    return int(text.strip(), 0)


# section -> key -> (target field, parser)
SCHEMA = {
    "channel": {
        "cell_radius_m": float,
        "min_distance_m": float,
        "path_loss_exponent": float,
        "shadowing_std_db": float,
        "noise_power_w": float,
        "num_users": _int,
        "fading": _bool,
    },
    "experiment": {
        "pairing": _words,
        "sweep_pairing": str.strip,
        "z": _int,
        "fpa_ratio_weak": float,
        "transmit_power_w": float,
        "power_grid_dbm": _floats,
        "schemes": _words,
        "trials": _int,
        "seed": _int,
        "bin_width_db": float,
        "workers": _int,
        "oma_lone_full_band": _bool,
    },
    "qos": {"min_rate_bps_hz": float},
}
META_SECTION = "run"
_FIELD = {"pairing": "pairing_algorithms"}


def _line_index(text):
    """Map ``(section, key)`` to its 1-based line number."""
    out = {}
    section = None
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip().lower()
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and section is not None:
            out.setdefault((section, m.group(1).strip().lower()), no)
    return out


def parse_config_text(text: str, overrides: dict | None = None, *, path=None) -> ExperimentSpec:
    """Parse config ``text``; ``overrides`` (field -> value) win over the file."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        cp.read_string(text, source=str(path or "<config>"))
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], line=line, path=path) from None
    lines = _line_index(text)
    values = {"channel": {}, "experiment": {}, "qos": {}}
    origin = {}
    for section in cp.sections():
        name = section.strip().lower()
        if name == META_SECTION:
            continue
        if name not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", path=path)
        for key, raw in cp.items(section):
            line = lines.get((name, key))
            if key not in SCHEMA[name]:
                raise ConfigError("unknown key", key=key, line=line, path=path)
            try:
                val = SCHEMA[name][key](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value {raw!r} ({exc})", key=key, line=line,
                                  path=path) from None
            fname = _FIELD.get(key, key)
            values[name][fname] = val
            origin[fname] = (key, line)
    for fname, val in (overrides or {}).items():
        if val is None:
            continue
        section = "channel" if fname in _channel_fields() else "experiment"
        values[section][fname] = val
        origin[fname] = (fname, None)
    try:
        channel = ChannelConfig(**values["channel"])
        qos = QosTarget(**values["qos"])
        return ExperimentSpec(channel=channel, qos=qos, **values["experiment"])
    except ValueError as exc:
        msg = str(exc)
        for test in (str.startswith, str.__contains__):
            for fname, (key, line) in origin.items():
                if test(msg, fname) or test(msg, key):
                    raise ConfigError(msg, key=key, line=line, path=path) from None
        raise ConfigError(msg, path=path) from None


def _channel_fields():
    return {f.name for f in fields(ChannelConfig)}


def parse_config(path=None, overrides: dict | None = None) -> ExperimentSpec:
    """Read the config at ``path`` (``None`` means all defaults)."""
    text = ""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_config_text(text, overrides, path=path)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def spec_to_config(spec: ExperimentSpec, meta: dict | None = None) -> str:
    """Serialise ``spec`` (plus optional ``[run]`` metadata) as config text."""
    lines = []
    if meta:
        lines.append(f"[{META_SECTION}]")
        lines += [f"{k} = {v}" for k, v in meta.items()]
        lines.append("")
    lines.append("[channel]")
    for f in fields(ChannelConfig):
        lines.append(f"{f.name} = {_fmt(getattr(spec.channel, f.name))}")
    lines += ["", "[experiment]"]
    inverse = {v: k for k, v in _FIELD.items()}
    for key in SCHEMA["experiment"]:
        fname = _FIELD.get(key, key)
        lines.append(f"{inverse.get(fname, key)} = {_fmt(getattr(spec, fname))}")
    lines += ["", "[qos]", f"min_rate_bps_hz = {_fmt(spec.qos.min_rate_bps_hz)}", ""]
    return "\n".join(lines)


def with_overrides(spec: ExperimentSpec, **kw) -> ExperimentSpec:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(spec, **kw) if kw else spec

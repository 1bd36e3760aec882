"""Run configuration: TOML parsing and schema validation.

A config looks like::

    suites = ["axioms", "unitarity"]

    [model]
    kind = "virasoro"
    c = "1/2"
    e_max = 8

    [unitarity]
    levels = 8

    [output]
    dir = "out"
    formats = ["json", "csv"]

Schema errors raise ConfigError whose message names the offending field.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .models import ModelSpec
from .scalar import format_scalar, parse_scalar
from .smearing import Arc

DEFAULT_HARD_CAP = 16
SUITES = ("axioms", "unitarity", "energy-bounds", "smearing", "net")
FORMATS = ("json", "csv")

MODEL_KINDS = {
    "heisenberg": {"parameters": {"e_max": "int >= 0"}, "central_charge": "1"},
    "virasoro": {"parameters": {"e_max": "int >= 0", "c": "exact rational string 'p/q'"},
                 "central_charge": "c"},
    "tensor": {"parameters": {"e_max": "int >= 0", "left": "model sub-spec",
                              "right": "model sub-spec"},
               "central_charge": "c_left + c_right"},
}

# suite -> (required keys, {optional key: default})
SUITE_SCHEMA = {
    "axioms": ((), {"index_range": 4, "level_cap": None, "locality": None,
                    "locality_index_range": 6}),
    "unitarity": (("levels",), {"c_sweep": None, "index_range": 4, "level_cap": 6,
                                "field": "generator", "N": None}),
    "energy-bounds": (("s", "k"), {"field": "generator", "index_range": 6, "windows": None}),
    "smearing": (("arcs", "F"), {"field": "generator", "bump": None}),
    "net": (("arcs", "F"), {"locality_F": [8, 16, 32], "bump": None}),
}


class ConfigError(ValueError):
    """Schema violation; ``field`` is the dotted path of the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    model: ModelSpec
    suites: list
    params: dict
    out_dir: Path
    formats: tuple
    hard_cap: int = DEFAULT_HARD_CAP
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Normalized, serializable view of the configuration."""
        return {
            "model": _spec_json(self.model),
            "suites": list(self.suites),
            "parameters": {s: _jsonable(self.params[s]) for s in self.suites},
            "formats": list(self.formats),
            "hard_cap": self.hard_cap,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Arc):
        return [format_scalar(x.start), format_scalar(x.end)]
    if isinstance(x, Fraction):
        return format_scalar(x)
    return x


def _spec_json(spec: ModelSpec) -> dict:
    d = {"kind": spec.kind, "e_max": spec.e_max}
    if spec.c is not None:
        d["c"] = format_scalar(spec.c)
    if spec.kind == "tensor":
        d["left"] = _spec_json(spec.left)
        d["right"] = _spec_json(spec.right)
    return d


def _int(value, name, lo=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(name, f"must be >= {lo}, got {value}")
    return value


def _rational(value, name):
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(name, "must be an exact rational (int or string 'p/q'), not a float")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ConfigError(name, f"expected a string 'p/q', got {value!r}")
    try:
        q = parse_scalar(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(name, f"malformed rational {value!r}") from exc
    if not isinstance(q, Fraction):
        raise ConfigError(name, f"must be real, got {value!r}")
    return q


def _model_spec(d, name, cap, e_max=None) -> ModelSpec:
    if not isinstance(d, dict):
        raise ConfigError(name, "expected a table")
    kind = d.get("kind")
    if kind is None:
        raise ConfigError(f"{name}.kind", "missing required field")
    if kind not in MODEL_KINDS:
        raise ConfigError(f"{name}.kind", f"unknown model kind {kind!r} (known: {', '.join(MODEL_KINDS)})")
    allowed = {"kind", "e_max", "c", "left", "right"}
    for key in d:
        if key not in allowed:
            raise ConfigError(f"{name}.{key}", "unknown field")
    if "e_max" in d:
        e = _int(d["e_max"], f"{name}.e_max", 0)
    elif e_max is not None:
        e = e_max
    else:
        raise ConfigError(f"{name}.e_max", "missing required field")
    if e_max is not None and e != e_max:
        raise ConfigError(f"{name}.e_max", f"sub-model window {e} differs from tensor window {e_max}")
    if e > cap:
        raise ConfigError(f"{name}.e_max", f"{e} exceeds the hard cap {cap}")
    c = None
    if kind == "virasoro":
        if "c" not in d:
            raise ConfigError(f"{name}.c", "missing required field for kind 'virasoro'")
        c = _rational(d["c"], f"{name}.c")
    elif "c" in d:
        raise ConfigError(f"{name}.c", f"not a parameter of kind {kind!r}")
    left = right = None
    if kind == "tensor":
        for side in ("left", "right"):
            if side not in d:
                raise ConfigError(f"{name}.{side}", "missing required sub-model for kind 'tensor'")
        left = _model_spec(d["left"], f"{name}.left", cap, e)
        right = _model_spec(d["right"], f"{name}.right", cap, e)
    else:
        for side in ("left", "right"):
            if side in d:
                raise ConfigError(f"{name}.{side}", f"not a parameter of kind {kind!r}")
    return ModelSpec(kind, e, c, left, right)


def _arc(value, name):
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(name, "an arc is a pair [start, end] of multiples of π")
    start = _rational(value[0], f"{name}[0]")
    end = _rational(value[1], f"{name}[1]")
    try:
        return Arc(start, end)
    except ValueError as exc:
        raise ConfigError(name, str(exc)) from exc


def _bump(value, name):
    if value is None:
        return None
    if not isinstance(value, dict):
        raise ConfigError(name, "expected a table")
    out = {}
    for key, v in value.items():
        if key in ("lo", "hi"):
            out[key] = _rational(v, f"{name}.{key}")
        elif key == "samples_log2":
            out[key] = _int(v, f"{name}.{key}", 2)
        else:
            raise ConfigError(f"{name}.{key}", "unknown field")
    lo, hi = out.get("lo", Fraction(1, 16)), out.get("hi", Fraction(15, 16))
    if not 0 < lo < hi < 1:
        raise ConfigError(name, "need 0 < lo < hi < 1 (fractions of the arc)")
    return out


def _int_list(value, name, lo=None):
    if not isinstance(value, list) or not value:
        raise ConfigError(name, "expected a non-empty list of integers")
    return [_int(v, f"{name}[{i}]", lo) for i, v in enumerate(value)]


def _suite_params(suite, table, spec: ModelSpec, cap):
    required, optional = SUITE_SCHEMA[suite]
    if table is None:
        table = {}
    if not isinstance(table, dict):
        raise ConfigError(suite, "expected a table")
    for key in required:
        if key not in table:
            raise ConfigError(f"{suite}.{key}", f"missing required parameter of suite {suite!r}")
    for key in table:
        if key not in required and key not in optional:
            raise ConfigError(f"{suite}.{key}", "unknown parameter")
    p = {**optional, **table}
    if suite == "axioms":
        p["index_range"] = _int(p["index_range"], "axioms.index_range", 0)
        p["locality_index_range"] = _int(p["locality_index_range"], "axioms.locality_index_range", 0)
        if p["level_cap"] is not None:
            p["level_cap"] = _int(p["level_cap"], "axioms.level_cap", 0)
        if p["locality"] is not None:
            if not isinstance(p["locality"], list):
                raise ConfigError("axioms.locality", "expected a list of {a, b, N} tables")
            pairs = []
            for i, entry in enumerate(p["locality"]):
                nm = f"axioms.locality[{i}]"
                if not isinstance(entry, dict) or set(entry) != {"a", "b", "N"}:
                    raise ConfigError(nm, "expected a table with keys a, b, N")
                pairs.append({"a": str(entry["a"]), "b": str(entry["b"]),
                              "N": _int(entry["N"], f"{nm}.N", 0)})
            p["locality"] = pairs
    elif suite == "unitarity":
        p["levels"] = _int(p["levels"], "unitarity.levels", 0)
        if p["levels"] > cap:
            raise ConfigError("unitarity.levels", f"{p['levels']} exceeds the hard cap {cap}")
        if p["levels"] > spec.e_max:
            raise ConfigError("unitarity.levels", f"{p['levels']} exceeds model.e_max = {spec.e_max}")
        if p["c_sweep"] is not None:
            if not isinstance(p["c_sweep"], list):
                raise ConfigError("unitarity.c_sweep", "expected a list of rationals")
            p["c_sweep"] = [_rational(v, f"unitarity.c_sweep[{i}]") for i, v in enumerate(p["c_sweep"])]
        p["index_range"] = _int(p["index_range"], "unitarity.index_range", 0)
        p["level_cap"] = _int(p["level_cap"], "unitarity.level_cap", 0)
        if p["N"] is not None:
            p["N"] = _int(p["N"], "unitarity.N", 0)
    elif suite == "energy-bounds":
        p["s"] = _int(p["s"], "energy-bounds.s", 0)
        p["k"] = _int(p["k"], "energy-bounds.k", 0)
        p["index_range"] = _int(p["index_range"], "energy-bounds.index_range", 0)
        windows = [spec.e_max] if p["windows"] is None else _int_list(p["windows"], "energy-bounds.windows", 0)
        for i, w in enumerate(windows):
            if w > cap:
                raise ConfigError(f"energy-bounds.windows[{i}]", f"{w} exceeds the hard cap {cap}")
        p["windows"] = windows
    elif suite in ("smearing", "net"):
        if not isinstance(p["arcs"], list) or not p["arcs"]:
            raise ConfigError(f"{suite}.arcs", "expected a non-empty list of arcs")
        p["arcs"] = [_arc(a, f"{suite}.arcs[{i}]") for i, a in enumerate(p["arcs"])]
        p["bump"] = _bump(p["bump"], f"{suite}.bump")
        if suite == "smearing":
            if len(p["arcs"]) != 2:
                raise ConfigError("smearing.arcs", "expected exactly two arcs")
            if not p["arcs"][0].disjoint(p["arcs"][1]):
                raise ConfigError("smearing.arcs", "arcs must be disjoint")
            p["F"] = _int_list(p["F"], "smearing.F", 0)
        else:
            p["F"] = _int(p["F"], "net.F", 0)
            p["locality_F"] = _int_list(p["locality_F"], "net.locality_F", 0)
    for key in ("field",):
        if key in p and not isinstance(p[key], str):
            raise ConfigError(f"{suite}.{key}", "expected a field name string")
    return p


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    """Parse and validate TOML text; raises ConfigError (with line info for syntax errors)."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<toml>", f"syntax error: {exc}") from exc
    known = {"model", "suites", "output", "limits", *SUITES}
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown top-level field")
    cap = DEFAULT_HARD_CAP
    if "limits" in raw:
        limits = raw["limits"]
        if not isinstance(limits, dict) or set(limits) - {"hard_cap"}:
            raise ConfigError("limits", "only 'hard_cap' is supported")
        cap = _int(limits.get("hard_cap", cap), "limits.hard_cap", 0)
    if "model" not in raw:
        raise ConfigError("model", "missing required table")
    spec = _model_spec(raw["model"], "model", cap)
    suites = raw.get("suites")
    if suites is None:
        raise ConfigError("suites", "missing required field")
    if not isinstance(suites, list) or not suites:
        raise ConfigError("suites", "expected a non-empty list")
    for i, s in enumerate(suites):
        if s not in SUITES:
            raise ConfigError(f"suites[{i}]", f"unknown suite {s!r} (known: {', '.join(SUITES)})")
    if len(set(suites)) != len(suites):
        raise ConfigError("suites", "duplicate suite names")
    if "unitarity" in suites and raw.get("unitarity", {}).get("c_sweep") and spec.kind != "virasoro":
        raise ConfigError("unitarity.c_sweep", "a central-charge sweep needs a virasoro model")
    params = {s: _suite_params(s, raw.get(s), spec, cap) for s in suites}
    output = raw.get("output", {})
    if not isinstance(output, dict) or set(output) - {"dir", "formats"}:
        raise ConfigError("output", "only 'dir' and 'formats' are supported")
    out_dir = Path(output.get("dir", "voanet-out"))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir
    formats = output.get("formats", ["json"])
    if not isinstance(formats, list) or not formats or any(f not in FORMATS for f in formats):
        raise ConfigError("output.formats", f"expected a non-empty subset of {list(FORMATS)}")
    return RunConfig(spec, list(suites), params, out_dir, tuple(formats), cap, raw)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, path.parent)


def list_models() -> dict:
    """Supported model kinds with their parameter schemas."""
    return {"models": MODEL_KINDS,
            "suites": {s: {"required": list(r), "optional": sorted(o)} for s, (r, o) in SUITE_SCHEMA.items()}}

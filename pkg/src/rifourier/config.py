"""Config loading, schema validation and construction of library objects."""

from __future__ import annotations

import hashlib
import json
import math
import re

import jsonschema
import numpy as np
import yaml

from .funcore import QuadSpec, StepFn
from .norms import (Convexified, Gamma, KInterpolation, Lambda, LargestDomain, Lebesgue,
                    NormSpec, Orlicz)
from .orlicz import PowerN, SampledN
from .fourier import RadialStep, random_family
from .weights import Weight, gamma_lambda_counterexample

__all__ = ["ConfigError", "load_config", "config_digest", "build_weight", "build_norm",
           "build_nfunction", "build_steps", "build_family", "build_quad", "SCHEMA"]


class ConfigError(ValueError):
    """Invalid configuration (exit code 2)."""


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads ``1e3`` and ``1.0e-3`` as floats."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^[-+]?(?:[0-9][0-9_]*\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                   |[0-9][0-9_]*[eE][-+]?[0-9]+
                   |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                   |[-+]?\.(?:inf|Inf|INF)
                   |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))


_num = {"type": "number"}
_bound = {"oneOf": [{"type": "number"}, {"enum": ["inf", "Infinity"]}]}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer"},
        "quadrature": {
            "type": "object", "additionalProperties": False,
            "properties": {"rel_tol": _num, "abs_tol": _num, "max_panels": {"type": "integer"}},
        },
        "norms": {"type": "array", "items": {"$ref": "#/$defs/norm"}},
        "inputs": {"type": "array", "items": {"$ref": "#/$defs/input"}},
        "transforms": {"type": "array", "items": {"$ref": "#/$defs/transform"}},
        "grid": {"$ref": "#/$defs/grid"},
        "checks": {"type": "array", "items": {"$ref": "#/$defs/check"}},
        "family": {"$ref": "#/$defs/family"},
        "runs": {"type": "array", "items": {"$ref": "#/$defs/run"}},
        "window": {
            "type": "object", "additionalProperties": False,
            "properties": {"xi_max": _num, "n_samples": {"type": "integer", "minimum": 64}},
        },
    },
    "$defs": {
        "grid": {
            "type": "object", "additionalProperties": False,
            "properties": {"lo": _num, "hi": _num, "per_decade": {"type": "integer", "minimum": 1}},
        },
        "pairs": {"type": "array", "items": {"type": "array", "items": _num,
                                             "minItems": 2, "maxItems": 2}},
        "piece": {
            "type": "object", "additionalProperties": False, "required": ["interval"],
            "properties": {"interval": {"type": "array", "items": _bound, "minItems": 2,
                                        "maxItems": 2},
                           "c": _num, "a": _num, "b": _num},
        },
        "weight": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "power": _num, "c": _num,
                "pieces": {"type": "array", "items": {"$ref": "#/$defs/piece"}},
                "counterexample": {
                    "type": "object", "additionalProperties": False, "required": ["p", "alpha"],
                    "properties": {"p": _num, "alpha": _num}},
                "step": {"$ref": "#/$defs/pairs"},
            },
            "minProperties": 1,
        },
        "nfunction": {
            "type": "object", "additionalProperties": False, "required": ["kind"],
            "properties": {"kind": {"enum": ["power", "power_scaled", "sampled"]}, "p": _num,
                           "x": {"type": "array", "items": _num},
                           "phi": {"type": "array", "items": _num}},
        },
        "norm": {
            "type": "object", "additionalProperties": False, "required": ["kind"],
            "properties": {
                "kind": {"enum": ["lebesgue", "lambda", "gamma", "orlicz", "convexified",
                                  "k_interpolation", "largest_domain"]},
                "p": _num, "weight": {"$ref": "#/$defs/weight"},
                "phi": {"$ref": "#/$defs/nfunction"},
                "base": {"$ref": "#/$defs/norm"}, "mu": {"$ref": "#/$defs/norm"},
                "name": {"type": "string"},
            },
        },
        "input": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "step": {"$ref": "#/$defs/pairs"},
                "radial": {"$ref": "#/$defs/radial"},
                "random_steps": {
                    "type": "object", "additionalProperties": False,
                    "properties": {"count": {"type": "integer", "minimum": 1},
                                   "max_pieces": {"type": "integer", "minimum": 1}}},
                "name": {"type": "string"},
            },
            "minProperties": 1,
        },
        "radial": {
            "type": "object", "additionalProperties": False, "required": ["n", "radii", "coeffs"],
            "properties": {"n": {"enum": [1, 3]}, "radii": {"type": "array", "items": _num},
                           "coeffs": {"type": "array", "items": _num}},
        },
        "transform": {
            "type": "object", "additionalProperties": False, "required": ["op", "weight", "p"],
            "properties": {"op": {"enum": ["reflect", "down_dual", "level", "fourier_range"]},
                           "weight": {"$ref": "#/$defs/weight"}, "p": _num,
                           "name": {"type": "string"}},
        },
        "check": {
            "type": "object", "additionalProperties": False, "required": ["criterion"],
            "properties": {
                "criterion": {"enum": ["gamma_lambda_equivalence", "l2_linf_interpolation",
                                       "fundamental_suffix_sup", "gamma_fourier_conditions",
                                       "dilation_integral", "indices", "orlicz_monotonicity",
                                       "admissible"]},
                "p": _num, "q": _num, "exponent": _num,
                "weight": {"$ref": "#/$defs/weight"}, "alphas": {"type": "array", "items": _num},
                "u": {"$ref": "#/$defs/weight"}, "v": {"$ref": "#/$defs/weight"},
                "norm": {"$ref": "#/$defs/norm"}, "phi": {"$ref": "#/$defs/nfunction"},
                "direction": {"enum": ["nonincreasing", "nondecreasing"]},
                "grid": {"$ref": "#/$defs/grid"}, "name": {"type": "string"},
            },
        },
        "family": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "random": {
                    "type": "object", "additionalProperties": False, "required": ["n", "size"],
                    "properties": {"n": {"enum": [1, 3]}, "size": {"type": "integer", "minimum": 1},
                                   "max_terms": {"type": "integer", "minimum": 1}}},
                "explicit": {"type": "array", "items": {"$ref": "#/$defs/radial"}},
            },
            "minProperties": 1, "maxProperties": 1,
        },
        "run": {
            "type": "object", "additionalProperties": False, "required": ["kind"],
            "properties": {"kind": {"enum": ["jt", "reverse", "norm_pair"]},
                           "rho": {"$ref": "#/$defs/norm"}, "sigma": {"$ref": "#/$defs/norm"},
                           "t_grid": {"$ref": "#/$defs/grid"}, "name": {"type": "string"}},
        },
    },
}

REQUIRED = {
    "norm": ("norms", "inputs"),
    "transform-weight": ("transforms",),
    "check": ("checks",),
    "verify-fourier": ("family", "runs"),
}


def load_config(path, command: str, seed: int | None = None) -> dict:
    """Read and validate a YAML (or JSON) config for ``command``."""
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = yaml.load(fh, Loader=_Loader)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if cfg is None:
        cfg = {}
    if seed is not None:
        cfg["seed"] = seed
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from exc
    for key in REQUIRED[command]:
        if key not in cfg:
            raise ConfigError(f"config for '{command}' needs key '{key}'")
    if _needs_seed(cfg) and "seed" not in cfg:
        raise ConfigError("a seed is required for random families")
    return cfg


def _needs_seed(cfg):
    if any("random_steps" in i for i in cfg.get("inputs", [])):
        return True
    return "random" in cfg.get("family", {})


def config_digest(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _f(x):
    return math.inf if x in ("inf", "Infinity") else float(x)


def build_quad(cfg: dict, tol: float | None = None) -> QuadSpec:
    q = dict(cfg.get("quadrature", {}))
    if tol is not None:
        q["rel_tol"] = tol
    try:
        return QuadSpec(**q)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_weight(spec: dict) -> Weight:
    try:
        if "pieces" in spec:
            return Weight.from_records([{**r, "interval": [_f(x) for x in r["interval"]]}
                                        for r in spec["pieces"]])
        if "counterexample" in spec:
            c = spec["counterexample"]
            return gamma_lambda_counterexample(float(c["p"]), float(c["alpha"]))
        if "step" in spec:
            return Weight.from_step(StepFn.from_pairs(spec["step"]))
        if "power" in spec:
            return Weight.power(float(spec["power"]), float(spec.get("c", 1.0)))
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad weight: {exc}") from exc
    raise ConfigError("weight needs one of power, pieces, counterexample, step")


def build_nfunction(spec: dict):
    kind = spec["kind"]
    try:
        if kind == "power":
            return PowerN(float(spec["p"]))
        if kind == "power_scaled":
            p = float(spec["p"])
            return PowerN(p, 1.0 / p)
        return SampledN(spec["x"], spec["phi"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad N-function: {exc}") from exc


def build_norm(spec: dict) -> NormSpec:
    kind = spec["kind"]
    try:
        if kind == "lebesgue":
            return Lebesgue(float(spec["p"]))
        if kind == "lambda":
            return Lambda(float(spec["p"]), build_weight(spec["weight"]))
        if kind == "gamma":
            return Gamma(float(spec["p"]), build_weight(spec["weight"]))
        if kind == "orlicz":
            return Orlicz(build_nfunction(spec["phi"]))
        if kind == "convexified":
            return Convexified(build_norm(spec["base"]), float(spec["p"]))
        if kind == "k_interpolation":
            return KInterpolation(build_norm(spec["mu"]), float(spec["p"]))
        return LargestDomain(build_norm(spec["base"]))
    except KeyError as exc:
        raise ConfigError(f"norm '{kind}' is missing {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad norm '{kind}': {exc}") from exc


def build_steps(cfg: dict):
    """Expand the ``inputs`` list into ``(label, StepFn)`` pairs."""
    from .fourier import radial_rearrange

    rng = np.random.default_rng(cfg.get("seed"))
    out = []
    for i, item in enumerate(cfg["inputs"]):
        label = item.get("name", f"input{i}")
        try:
            if "step" in item:
                out.append((label, StepFn.from_pairs(item["step"])))
            elif "radial" in item:
                r = item["radial"]
                out.append((label, radial_rearrange(RadialStep(r["n"], tuple(r["radii"]),
                                                               tuple(r["coeffs"])))))
            elif "random_steps" in item:
                rs = item["random_steps"]
                for j in range(rs.get("count", 1)):
                    k = int(rng.integers(1, rs.get("max_pieces", 10) + 1))
                    b = np.cumsum(rng.uniform(0.1, 2.0, k))
                    v = np.append(rng.uniform(0.0, 3.0, k), 0.0)
                    out.append((f"{label}.{j}", StepFn(b, v)))
        except ValueError as exc:
            raise ConfigError(f"bad input {label}: {exc}") from exc
    return out


def build_family(cfg: dict):
    fam = cfg["family"]
    try:
        if "random" in fam:
            r = fam["random"]
            return random_family(r["n"], r["size"], cfg["seed"], r.get("max_terms", 4))
        return [RadialStep(r["n"], tuple(r["radii"]), tuple(r["coeffs"]))
                for r in fam["explicit"]]
    except ValueError as exc:
        raise ConfigError(f"bad family: {exc}") from exc

"""Run configuration: JSON loading, validation and defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigInvalid, NonPositiveDefinite
from .theta import PeriodMatrix

SUITES = ("theta", "models", "canonical", "legendre", "symbolic", "bidouble")

DEFAULT_TAU = np.diag([1.0j, 1.3j, 0.7j])
DEFAULT_COEFFS = (0.9 + 0.1j, 1.1 - 0.2j, 0.8 + 0.3j)
DEFORMED_TAU12 = 0.15 + 0.05j

DEFAULT_TOLERANCES = {
    "functional_equation": 1e-9,
    "odd_vanishing": 1e-12,
    "even_gradient": 1e-10,
    "finite_difference": 1e-6,
    "membership": 1e-9,
    "legendre": 1e-9,
    "torsion_floor": 1e-3,
    "v3": 1e-9,
    "rank_separation": 1e-4,
    "degeneracy": 1e-7,
    "involution": 1e-8,
    "alignment": 1e-6,
    "affine_relation": 1e-9,
    "bitangency": 1e-8,
}


@dataclass(frozen=True)
class RunConfig:
    tau: np.ndarray = field(default_factory=lambda: DEFAULT_TAU.copy())
    coeffs: tuple = DEFAULT_COEFFS
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    samples: int = 200
    seed: int = 0
    suites: tuple = ("all",)

    def period_matrix(self) -> PeriodMatrix:
        return PeriodMatrix(self.tau)

    def deformed_tau(self) -> np.ndarray:
        t = np.array(self.tau, dtype=complex)
        t[0, 1] = t[1, 0] = DEFORMED_TAU12
        t[0, 2] = t[2, 0] = t[1, 2] = t[2, 1] = 0
        return t

    def expanded_suites(self) -> tuple:
        if "all" in self.suites:
            return SUITES
        return tuple(s for s in SUITES if s in self.suites)


def _pair(v, what):
    if not (isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v)):
        raise ConfigInvalid(f"{what} must be a [re, im] pair, got {v!r}")
    return complex(v[0], v[1])


def _validate_suites(suites):
    suites = tuple(suites)
    if not suites:
        raise ConfigInvalid("no suites requested")
    bad = [s for s in suites if s not in SUITES + ("all",)]
    if bad:
        raise ConfigInvalid(f"unknown suite(s) {bad}; choose from {list(SUITES) + ['all']}")
    return suites


def _validate_seed(seed):
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigInvalid(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigInvalid("config must be a JSON object")
    unknown = set(data) - {"tau", "coeffs", "tolerances", "samples", "seed", "suites"}
    if unknown:
        raise ConfigInvalid(f"unknown config field(s) {sorted(unknown)}")
    cfg = RunConfig()
    kw = {}
    if "tau" in data:
        rows = data["tau"]
        if not (isinstance(rows, list) and len(rows) == 3 and all(isinstance(r, list) and len(r) == 3 for r in rows)):
            raise ConfigInvalid("tau must be a 3x3 matrix of [re, im] pairs")
        kw["tau"] = np.array([[_pair(v, "tau entry") for v in r] for r in rows])
    if "coeffs" in data:
        cs = data["coeffs"]
        if not isinstance(cs, dict) or set(cs) != {"b", "c", "d"}:
            raise ConfigInvalid("coeffs must be an object with keys b, c, d")
        kw["coeffs"] = tuple(_pair(cs[k], f"coefficient {k}") for k in "bcd")
    if "tolerances" in data:
        tol = data["tolerances"]
        if not isinstance(tol, dict) or any(not isinstance(v, (int, float)) or v <= 0 for v in tol.values()):
            raise ConfigInvalid("tolerances must map names to positive numbers")
        bad = set(tol) - set(DEFAULT_TOLERANCES)
        if bad:
            raise ConfigInvalid(f"unknown tolerance(s) {sorted(bad)}")
        kw["tolerances"] = {**DEFAULT_TOLERANCES, **{k: float(v) for k, v in tol.items()}}
    if "samples" in data:
        s = data["samples"]
        if not isinstance(s, int) or isinstance(s, bool) or s < 1:
            raise ConfigInvalid("samples must be a positive integer")
        kw["samples"] = s
    if "seed" in data:
        kw["seed"] = _validate_seed(data["seed"])
    if "suites" in data:
        if not isinstance(data["suites"], list):
            raise ConfigInvalid("suites must be a list")
        kw["suites"] = _validate_suites(data["suites"])
    cfg = replace(cfg, **kw)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> RunConfig:
    try:
        PeriodMatrix(cfg.tau)
    except NonPositiveDefinite as exc:
        raise ConfigInvalid(f"tau: {exc}") from None
    except ValueError as exc:
        raise ConfigInvalid(f"tau: {exc}") from None
    if np.asarray(cfg.tau).shape != (3, 3):
        raise ConfigInvalid("tau must be 3x3")
    if any(c == 0 for c in cfg.coeffs):
        raise ConfigInvalid("coefficients b, c, d must be nonzero")
    _validate_suites(cfg.suites)
    _validate_seed(cfg.seed)
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    return {
        "tau": [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(cfg.tau, dtype=complex)],
        "coeffs": {k: [float(v.real), float(v.imag)] for k, v in zip("bcd", cfg.coeffs)},
        "tolerances": dict(cfg.tolerances),
        "samples": cfg.samples,
        "seed": cfg.seed,
        "suites": list(cfg.suites),
    }

"""Scan configuration and its INI file format.

Example file:

    [scan]
    x_bound = 1000000
    X_bound = 1000
    method = both
    eps = 0.1
    eta = 0.5235670383
    kappa = 1.0
    constants = toy

``constants = toy`` replaces kappa by the value making C = N^(1/8); with
``full`` the configured kappa is used as is.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .descent import ETA, C_constant, toy_kappa
from .search import Method, SearchConfig

CONSTANT_MODES = ("toy", "full")


@dataclass(frozen=True)
class ScanConfig:
    x_bound: int = 10**6
    X_bound: int = 10**3
    method: str = "both"
    eps: float = 0.1
    eta: float = ETA
    kappa: float = 1.0
    constants: str = "toy"

    def __post_init__(self):
        Method(self.method)
        if self.constants not in CONSTANT_MODES:
            raise ValueError(f"constants must be one of {CONSTANT_MODES}, got {self.constants!r}")
        if not 0 < self.eps < 0.5:
            raise ValueError(f"eps must lie in (0, 1/2), got {self.eps}")
        if self.eta <= 0 or self.kappa <= 0:
            raise ValueError("eta and kappa must be positive")

    @property
    def search(self) -> SearchConfig:
        return SearchConfig(self.x_bound, self.X_bound, Method(self.method))

    def effective_kappa(self, N: int) -> float:
        return toy_kappa(N) if self.constants == "toy" else self.kappa

    def C(self, N: int) -> float:
        return C_constant(N, self.effective_kappa(N))

    def full_C(self, N: int) -> float:
        return C_constant(N, self.kappa)

    def as_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **kw) -> "ScanConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_TYPES = {f.name: f.type for f in fields(ScanConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def load_config(path: str | Path | None) -> ScanConfig:
    if path is None:
        return ScanConfig()
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep X_bound distinct from x_bound
    with open(path) as fh:
        parser.read_file(fh)
    if not parser.has_section("scan"):
        raise ValueError(f"{path}: missing [scan] section")
    kw = {}
    for key, raw in parser.items("scan"):
        if key not in _TYPES:
            raise ValueError(f"{path}: unknown key {key!r}")
        cast = _CASTS[_TYPES[key]]
        kw[key] = int(float(raw)) if cast is int and "e" in raw.lower() else cast(raw)
    return ScanConfig(**kw)


def loglog(N: int) -> float:
    return math.log(math.log(N))

"""Strict experiment configuration for the command line runner."""

from __future__ import annotations

import hashlib
import json
import math
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

EXPERIMENTS = (
    "simulate-closed",
    "simulate-joint",
    "derive-master",
    "lindblad-demo",
    "temperature-sweep",
    "rate-report",
    "oracle-compare",
    "detailed-balance",
)

Experiment = Literal[
    "simulate-closed",
    "simulate-joint",
    "derive-master",
    "lindblad-demo",
    "temperature-sweep",
    "rate-report",
    "oracle-compare",
    "detailed-balance",
]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, ser_json_inf_nan="strings")


def _finite(v: float) -> float:
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


class KitaevModel(_Strict):
    n_sites: int = Field(ge=2, le=400)
    t_hop: float = 1.0
    delta_sc: float = 1.0
    mu: float = 0.0

    _check = field_validator("t_hop", "delta_sc", "mu")(_finite)


class ModelSpec(_Strict):
    name: Literal["kitaev"] = "kitaev"
    params: KitaevModel


class BathLattice(_Strict):
    lx: int = Field(ge=1, le=2000)
    ly: int = Field(default=1, ge=1, le=200)
    hopping: float = 1.0
    boundary: Literal["open", "periodic"] = "open"

    _check = field_validator("hopping")(_finite)


class BathSpec(_Strict):
    name: Literal["bath2d"] = "bath2d"
    params: BathLattice
    betas: list[Union[float, Literal["inf"]]] = Field(default_factory=lambda: ["inf"], min_length=1)

    @field_validator("betas")
    @classmethod
    def _betas(cls, v):
        out = []
        for b in v:
            b = math.inf if b == "inf" else float(b)
            if math.isnan(b) or b < 0:
                raise ValueError("beta must be >= 0 or 'inf'")
            out.append(b)
        return out


class CouplingSpec(_Strict):
    name: Literal["endpoint"] = "endpoint"
    strength: float
    bath_site: int = Field(default=0, ge=0)
    sys_majorana: int = Field(default=0, ge=0)

    _check = field_validator("strength")(_finite)


class TimesSpec(_Strict):
    """Either an explicit list of ``values`` or a uniform grid ``start, stop, num``."""

    values: Optional[list[float]] = None
    start: float = 0.0
    stop: Optional[float] = None
    num: int = Field(default=11, ge=1, le=100000)

    @model_validator(mode="after")
    def _one_form(self):
        if (self.values is None) == (self.stop is None):
            raise ValueError("give either 'values' or 'stop'")
        for v in (self.values or []) + [self.start] + ([self.stop] if self.stop is not None else []):
            if not math.isfinite(v) or v < 0:
                raise ValueError("times must be finite and non-negative")
        return self

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.array(self.values, dtype=float)
        return np.linspace(self.start, self.stop, self.num)


class LindbladSection(_Strict):
    name: Literal["uniform_loss"] = "uniform_loss"
    eta: float = Field(ge=0)

    _check = field_validator("eta")(_finite)


class MarkovSection(_Strict):
    alphas: list[float] = Field(min_length=1)
    eta: float
    steps: int = Field(default=20, ge=1, le=100000)
    v0: tuple[float, float] = (1.0, 0.0)

    @field_validator("alphas")
    @classmethod
    def _alphas(cls, v):
        if any(not 0.0 <= a <= 1.0 for a in v):
            raise ValueError("alphas must lie in [0, 1]")
        return v


class OracleSection(_Strict):
    instances: int = Field(default=5, ge=1, le=1000)
    n_modes: list[int] = Field(default_factory=lambda: [2, 3])
    n_lindblad: int = Field(default=2, ge=1, le=10)

    @field_validator("n_modes")
    @classmethod
    def _modes(cls, v):
        if any(not 1 <= n <= 6 for n in v):
            raise ValueError("oracle mode counts must lie in [1, 6]")
        return v


class DerivationSection(_Strict):
    epsilon_fraction: float = Field(default=0.05, gt=0)
    secular: Literal["full", "relaxed", "none"] = "full"


class ExperimentConfig(_Strict):
    experiment: Experiment
    model: Optional[ModelSpec] = None
    bath: Optional[BathSpec] = None
    coupling: Optional[CouplingSpec] = None
    times: Optional[TimesSpec] = None
    output: str
    convention: Literal["calibrated", "literal"] = "calibrated"
    seed: int = 0
    lindblad: Optional[LindbladSection] = None
    markov: Optional[MarkovSection] = None
    oracle: Optional[OracleSection] = None
    derivation: DerivationSection = DerivationSection()

    @model_validator(mode="after")
    def _required_sections(self):
        need = {
            "simulate-closed": ("model", "times"),
            "simulate-joint": ("model", "bath", "coupling", "times"),
            "temperature-sweep": ("model", "bath", "coupling", "times"),
            "derive-master": ("model", "bath", "coupling"),
            "rate-report": ("model", "times"),
            "lindblad-demo": ("model", "lindblad", "times"),
            "oracle-compare": ("oracle", "times"),
            "detailed-balance": ("markov",),
        }[self.experiment]
        missing = [k for k in need if getattr(self, k) is None]
        if missing:
            raise ValueError(f"experiment {self.experiment!r} needs section(s): {', '.join(missing)}")
        if self.experiment == "rate-report" and (self.lindblad is None) == (self.bath is None or self.coupling is None):
            raise ValueError("rate-report needs either a 'lindblad' section or both 'bath' and 'coupling'")
        return self

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def json_schema() -> dict:
    return ExperimentConfig.model_json_schema()

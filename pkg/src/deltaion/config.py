"""Strict JSON run configuration.

Unknown keys are rejected at every level and errors name the offending
path (``solver.h``, ``scenario.pairs.1``).  Flags given on the command
line are overlaid on the parsed document before validation, so the stored
manifest always round-trips to the same run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError, DeltaIonError
from .experiments import ScenarioSpec
from .ladder import MAX_DEPTH
from .volterra import SolverConfig


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=False, allow_inf_nan=False)


class ScenarioModel(_Strict):
    id: Literal["survival_curves", "gamma_sweep", "threshold_50", "ionization_vs_r", "route_xval"]
    omegas: Optional[list[float]] = None
    rs: Optional[list[float]] = None
    pairs: Optional[list[tuple[float, float]]] = None
    t_max: Optional[float] = Field(default=None, gt=0)
    oscillations: Optional[float] = Field(default=None, gt=0)
    clock: Literal["periods", "inverse_omega"] = "periods"
    stark: Literal["none", "midpoint"] = "none"
    h: Optional[float] = Field(default=None, gt=0)
    spot_omegas: Optional[list[float]] = None
    tol_time_spectral: float = Field(default=0.10, gt=0)
    tol_staircase_floor: float = Field(default=0.05, gt=0)
    tol_staircase_r2: float = Field(default=5.0, ge=0)
    tol_resonance: float = Field(default=0.20, gt=0)
    gate_resonance: bool = False


class SolverModel(_Strict):
    h: float = Field(default=0.005, gt=0)
    t_max: float = Field(default=100.0, gt=0)
    scheme_order: Literal[1, 2] = 2
    norm_check_interval: int = Field(default=0, ge=0)
    kernel_crossover: float = Field(default=2.0, ge=0.5, le=3.0)


class SpectralModel(_Strict):
    depth_cap: int = Field(default=MAX_DEPTH, ge=64, le=MAX_DEPTH)
    newton_tol: float = Field(default=1e-10, gt=0, le=1e-6)


class RunModel(_Strict):
    scenario: ScenarioModel
    solver: SolverModel = SolverModel()
    spectral: SpectralModel = SpectralModel()
    output: str = "out"
    workers: Optional[int] = Field(default=None, ge=1)


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioSpec
    solver: SolverConfig
    depth_cap: int
    newton_tol: float
    output: str
    workers: Optional[int]
    document: dict

    def to_json(self) -> str:
        return json.dumps(self.document, sort_keys=True)


def _format_errors(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def _overlay(doc: dict, overrides: dict | None) -> dict:
    if not overrides:
        return doc
    merged = json.loads(json.dumps(doc))
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = merged
        keys = dotted.split(".")
        for k in keys[:-1]:
            node = node.setdefault(k, {})
        node[keys[-1]] = value
    return merged


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Validate a JSON document (plus dotted-key overrides) into a RunConfig."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("<root>: configuration must be a JSON object")
    return config_from_dict(doc, overrides)


def config_from_dict(doc: dict, overrides: dict | None = None) -> RunConfig:
    doc = _overlay(doc, overrides)
    try:
        model = RunModel.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None
    sc = model.scenario
    values = {
        "omegas": tuple(sc.omegas) if sc.omegas is not None else None,
        "rs": tuple(sc.rs) if sc.rs is not None else None,
        "pairs": tuple(tuple(p) for p in sc.pairs) if sc.pairs is not None else None,
        "t_max": sc.t_max,
        "oscillations": sc.oscillations,
        "clock": sc.clock,
        "stark": sc.stark,
        "h": sc.h,
        "spot_omegas": tuple(sc.spot_omegas) if sc.spot_omegas is not None else None,
        "tol_time_spectral": sc.tol_time_spectral,
        "tol_staircase_floor": sc.tol_staircase_floor,
        "tol_staircase_r2": sc.tol_staircase_r2,
        "tol_resonance": sc.tol_resonance,
        "gate_resonance": sc.gate_resonance,
    }
    try:
        scenario = ScenarioSpec.default(sc.id, **values)
    except DeltaIonError as exc:
        raise ConfigError(f"scenario: {exc}") from None
    try:
        solver = SolverConfig(**model.solver.model_dump())
    except DeltaIonError as exc:
        raise ConfigError(f"solver: {exc}") from None
    return RunConfig(
        scenario=scenario,
        solver=solver,
        depth_cap=model.spectral.depth_cap,
        newton_tol=model.spectral.newton_tol,
        output=model.output,
        workers=model.workers,
        document=model.model_dump(mode="json"),
    )

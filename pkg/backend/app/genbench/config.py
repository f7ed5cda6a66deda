"""
config.py - Generator configuration, ground-truth manifest and seeding.
"""

import json
from pathlib import Path
from typing import Dict, List, Literal, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.errors import InstanceError
from app.core.schema import read_json


class GenConfig(BaseModel):
    """Counts shared by every generator plus model-specific extras.

    Field names follow the benchmark's camelCase keys in config files.
    """
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    num_web_services: int = Field(100, ge=1, alias="numWebServices")
    pars_per_service: int = Field(5, ge=1, alias="parsPerService")
    num_parameters: int = Field(200, ge=1, alias="numParameters")
    num_ws_in_solution: int = Field(10, ge=1, alias="numWSinSolution")
    seed: int = Field(0, ge=0, lt=2 ** 64)

    # hierarchical
    taxonomy_size: int = Field(20, ge=1, alias="taxonomySize")
    taxonomy_shape: Literal["flat", "random", "chain"] = Field("random", alias="taxonomyShape")

    # relational
    stage_count: int = Field(4, ge=1, alias="stageCount")
    relation_count: int = Field(1, ge=0, alias="relationCount")
    noise_ratio: float = Field(0.5, ge=0.0, alias="noiseRatio")
    planted_rules: int = Field(1, ge=0, alias="plantedRules")

    # object-oriented
    concept_count: int = Field(10, ge=1, alias="conceptCount")
    property_count: int = Field(10, ge=1, alias="propertyCount")

    # online
    query_count: int = Field(1, ge=1, alias="queryCount")

    @model_validator(mode="after")
    def _check_chain(self) -> "GenConfig":
        if self.num_ws_in_solution > self.num_web_services:
            raise ValueError("numWSinSolution cannot exceed numWebServices")
        return self


class GroundTruth(BaseModel):
    """What a generator guarantees about the instance it emitted."""
    model_config = ConfigDict(populate_by_name=True)

    model: str
    seed: int
    planted: List[str] = Field(default_factory=list)
    stages: List[List[str]] = Field(default_factory=list)
    rules: List[str] = Field(default_factory=list)
    queries: Dict[str, Dict] = Field(default_factory=dict)

    def to_json(self) -> Dict:
        return self.model_dump(exclude_defaults=False)


def load_config(path: Union[str, Path], seed: int = None) -> GenConfig:
    data = read_json(path)
    if seed is not None:
        data = {**data, "seed": seed}
    try:
        return GenConfig.model_validate(data)
    except ValidationError as exc:
        raise InstanceError(f"Invalid generator config {path}: {exc}") from exc


def phase_rngs(seed: int, phases: Sequence[str]) -> Dict[str, np.random.Generator]:
    """One independent generator per named phase, all derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(len(phases))
    return {name: np.random.default_rng(child) for name, child in zip(phases, children)}


def pick(rng: np.random.Generator, pool: Sequence, size: int) -> List:
    """Uniform sample without replacement; ``pool`` order must be deterministic."""
    size = min(size, len(pool))
    if size <= 0:
        return []
    idx = rng.choice(len(pool), size=size, replace=False)
    return [pool[i] for i in sorted(idx)]


def set_size(rng: np.random.Generator, upper: int) -> int:
    """Random size in [1, upper]."""
    return int(rng.integers(1, upper + 1))


def dump_json(data, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=False)
        f.write("\n")

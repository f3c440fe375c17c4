# src/scpkit/config.py

from dataclasses import asdict, dataclass
from enum import StrEnum
from typing import Any, Mapping

from .syntax import Calculus


class Suite(StrEnum):
    SUBJECT_REDUCTION = "subject-reduction"
    ADEQUACY = "adequacy"
    LEMMAS = "lemmas"
    DUALITY = "duality"
    SYNTAX_DIRECTEDNESS = "syntax-directedness"
    AGREEMENT = "agreement"
    ROUND_TRIP = "round-trip"
    ALL = "all"


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _raise_if(errors: list[str], what: str) -> None:
    if errors:
        raise ValueError(f"Invalid {what}:\n- " + "\n- ".join(errors))


def _pick(cls: type, config: Mapping[str, Any], aliases: Mapping[str, str]) -> dict[str, Any]:
    values = {}
    for key, value in config.items():
        field_name = aliases.get(key)
        if field_name is None:
            raise ValueError(f"unknown {cls.__name__} key: {key}")
        values[field_name] = value
    return values


@dataclass(frozen=True)
class GenConfig:
    """Seeded generator settings for well-typed terms."""

    seed: int = 0
    max_depth: int = 3
    type_depth: int = 2
    calculus: Calculus = Calculus.CP

    def __post_init__(self) -> None:
        errors = []
        if not _is_int(self.seed):
            errors.append(f"seed must be an integer; got {self.seed!r}")
        if not _is_int(self.max_depth) or self.max_depth < 1:
            errors.append(f"max_depth must be an integer >= 1; got {self.max_depth!r}")
        if not _is_int(self.type_depth) or self.type_depth < 1:
            errors.append(f"type_depth must be an integer >= 1; got {self.type_depth!r}")
        try:
            object.__setattr__(self, "calculus", Calculus(self.calculus))
        except ValueError:
            errors.append(f"calculus must be 'cp' or 'scp'; got {self.calculus!r}")
        _raise_if(errors, "generator config")

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> "GenConfig":
        aliases = {
            "seed": "seed",
            "max_depth": "max_depth",
            "depth": "max_depth",
            "type_depth": "type_depth",
            "calculus": "calculus",
        }
        return cls(**_pick(cls, config, aliases))

    def to_config(self) -> dict[str, Any]:
        return {**asdict(self), "calculus": str(self.calculus)}


@dataclass(frozen=True)
class SuiteConfig:
    """What `properties` runs: which suite, how many generated cases, how big the exhaustive sweep."""

    suite: Suite = Suite.ALL
    seed: int = 0
    count: int = 100
    size: int = 3
    max_depth: int = 4
    equiv_depth: int = 2

    def __post_init__(self) -> None:
        errors = []
        try:
            object.__setattr__(self, "suite", Suite(self.suite))
        except ValueError:
            errors.append(f"unknown suite: {self.suite!r}")
        if not _is_int(self.seed):
            errors.append(f"seed must be an integer; got {self.seed!r}")
        if not _is_int(self.count) or self.count < 0:
            errors.append(f"count must be an integer >= 0; got {self.count!r}")
        if not _is_int(self.size) or self.size < 0:
            errors.append(f"size must be an integer >= 0; got {self.size!r}")
        if not _is_int(self.max_depth) or self.max_depth < 1:
            errors.append(f"max_depth must be an integer >= 1; got {self.max_depth!r}")
        if not _is_int(self.equiv_depth) or self.equiv_depth < 0:
            errors.append(f"equiv_depth must be an integer >= 0; got {self.equiv_depth!r}")
        _raise_if(errors, "suite config")

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> "SuiteConfig":
        aliases = {
            "suite": "suite",
            "seed": "seed",
            "count": "count",
            "size": "size",
            "max_size": "size",
            "max_depth": "max_depth",
            "depth": "max_depth",
            "equiv_depth": "equiv_depth",
        }
        return cls(**_pick(cls, config, aliases))

    def to_config(self) -> dict[str, Any]:
        return {**asdict(self), "suite": str(self.suite)}

    def generator(self, index: int, calculus: Calculus = Calculus.CP) -> GenConfig:
        return GenConfig(seed=self.seed + index, max_depth=self.max_depth, calculus=calculus)

    def suites(self) -> list[Suite]:
        if self.suite is Suite.ALL:
            return [suite for suite in Suite if suite is not Suite.ALL]
        return [self.suite]

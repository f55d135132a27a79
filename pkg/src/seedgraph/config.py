"""Experiment manifest: the frozen configuration of a harness run.

A manifest is a versioned JSON (or YAML) file; every knob that affects
results lives here, so a manifest plus a corpus reproduces a run byte for
byte. Unknown keys are rejected rather than ignored — a typo that
silently falls back to a default would un-freeze the experiment.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from seedgraph.citescore import Approach
from seedgraph.corpus import ReviewCriteria
from seedgraph.textsim import TextParams

MANIFEST_VERSION = 1

DEFAULT_APPROACHES = tuple(a.value for a in Approach)


class ManifestError(ValueError):
    """Manifest file is unreadable, has unknown keys, or a bad version."""


@dataclass(frozen=True)
class CorpusConfig:
    """Where the corpus comes from and where its snapshot cache lives."""

    citations_path: str = ""
    citations_format: str = "occ_csv"
    metadata_path: str | None = None
    metadata_format: str = "tsv"
    snapshot_path: str | None = None


@dataclass(frozen=True)
class ScoringConfig:
    """Citation-score cutoffs and blend weights."""

    bc_min_score: int = 2
    cc_min_score: int = 2
    dc_weight: float = 1.0
    bc_weight: float = 0.1
    cc_weight: float = 0.1
    combine_mode: str = "union"

    @property
    def weights(self) -> tuple[float, float, float]:
        return (self.dc_weight, self.bc_weight, self.cc_weight)


@dataclass(frozen=True)
class TextConfig:
    """Lexical-similarity weighting and candidate pooling."""

    title_weight: float = 2.0
    k1: float = 1.2
    b_len: float = 0.75
    pool_per_seed: int = 2000

    def params(self) -> TextParams:
        return TextParams(
            title_weight=self.title_weight, k1=self.k1, b_len=self.b_len
        )


@dataclass(frozen=True)
class EvalConfig:
    """Seeding, curve depth, and artifact retention for the harness."""

    n_seeds: int = 5
    k_max: int = 2000
    approaches: tuple[str, ...] = DEFAULT_APPROACHES
    audit_m: int = 3
    keep_rankings: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    manifest_version: int = MANIFEST_VERSION
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    criteria: ReviewCriteria = field(default_factory=ReviewCriteria)
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    text: TextConfig = field(default_factory=TextConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    master_seed: int = 0
    workers: int = 1

    def enabled_approaches(self) -> tuple[Approach, ...]:
        return tuple(Approach.parse(a) for a in self.eval.approaches)

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["eval"]["approaches"] = list(self.eval.approaches)
        return out


def _from_dict(cls: type, data: Any, where: str) -> Any:
    if not isinstance(data, dict):
        raise ManifestError(f"{where}: expected a mapping, got {type(data).__name__}")
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ManifestError(f"{where}: unknown keys {unknown}")
    kwargs: dict[str, Any] = {}
    for name, value in data.items():
        f = known[name]
        type_name = f.type if isinstance(f.type, str) else f.type.__name__
        if type_name in _NESTED:
            kwargs[name] = _from_dict(_NESTED[type_name], value, f"{where}.{name}")
        elif name == "approaches":
            kwargs[name] = tuple(str(v) for v in value)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{where}: {exc}") from exc


_NESTED = {
    "CorpusConfig": CorpusConfig,
    "ReviewCriteria": ReviewCriteria,
    "ScoringConfig": ScoringConfig,
    "TextConfig": TextConfig,
    "EvalConfig": EvalConfig,
}


def config_from_dict(data: dict[str, Any]) -> ExperimentConfig:
    config = _from_dict(ExperimentConfig, data, "manifest")
    if config.manifest_version != MANIFEST_VERSION:
        raise ManifestError(
            f"manifest_version {config.manifest_version} unsupported "
            f"(this build reads version {MANIFEST_VERSION})"
        )
    for name in config.eval.approaches:
        Approach.parse(name)
    if config.workers < 1:
        raise ManifestError("workers must be >= 1")
    if config.eval.k_max < 1 or config.eval.n_seeds < 1:
        raise ManifestError("k_max and n_seeds must be >= 1")
    return config


def load_manifest(path: str | Path) -> ExperimentConfig:
    """Read a manifest file; YAML when the extension says so, else JSON."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml

        data = yaml.safe_load(text)
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: not valid JSON ({exc})") from exc
    if data is None:
        data = {}
    return config_from_dict(data)


def save_manifest(config: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

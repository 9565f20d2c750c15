"""Training-pipeline stage descriptors and their expansion into data plans.

Pipelines are declarative: each stage names its datasets, validation
datasets, mixing temperature, and step-count mode. Expansion turns a
pipeline into per-stage mixture plans, step counts, and output shard
names — launching a trainer on those files is the user's job.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ConfigError, ValidationError
from .mixing import DatasetStat, EpochMode, MixturePlan, compute_plan, steps_per_epoch

DROP = "DROP"
DROP_CLASS = "DROP-class"
NUM = "NUM"
TXT = "TXT"
SQUAD = "SQuAD"

KNOWN_DATASETS = (DROP, DROP_CLASS, NUM, TXT, SQUAD)


@dataclass(frozen=True)
class StageSpec:
    name: str
    datasets: tuple[str, ...]
    validation: tuple[str, ...]
    temperature: float = 1.0
    mode: EpochMode = EpochMode.COVER_ALL

    def __post_init__(self):
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "validation", tuple(self.validation))
        object.__setattr__(self, "mode", EpochMode(self.mode))
        if not self.datasets:
            raise ConfigError(f"stage {self.name!r} has no datasets")
        stray = set(self.validation) - set(self.datasets)
        if stray:
            raise ConfigError(f"stage {self.name!r} validates on unknown datasets: {sorted(stray)}")
        if self.temperature <= 0:
            raise ConfigError(f"stage {self.name!r}: temperature must be > 0")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "datasets": list(self.datasets),
            "validation": list(self.validation),
            "temperature": self.temperature,
            "mode": self.mode.value,
        }


@dataclass(frozen=True)
class PipelineSpec:
    name: str
    stages: tuple[StageSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ConfigError(f"pipeline {self.name!r} has no stages")
        names = [stage.name for stage in self.stages]
        if len(set(names)) != len(names):
            raise ConfigError(f"pipeline {self.name!r} has duplicate stage names: {names}")

    def to_json(self) -> dict:
        return {"name": self.name, "stages": [stage.to_json() for stage in self.stages]}


def _stage(name, datasets, validation=None, temperature=1.0, mode=EpochMode.COVER_ALL):
    return StageSpec(
        name=name,
        datasets=tuple(datasets),
        validation=tuple(validation if validation is not None else datasets),
        temperature=temperature,
        mode=mode,
    )


def builtin_pipelines() -> tuple[PipelineSpec, ...]:
    """The five built-in experiment pipelines.

    All pre-train on a mix that always includes DROP, then fine-tune on
    DROP classification and DROP. The two validation variants differ in
    which dev sets select checkpoints during synthetic pre-training; the
    two RC variants place SQuAD in pre-training vs. fine-tuning; the
    multitask variant mixes everything in one first stage at T=10, stepping
    one DROP-sized epoch, validating on DROP only.
    """
    validation_1 = PipelineSpec(
        "validation-1",
        (
            _stage("pretrain-num", (DROP, NUM), (DROP,)),
            _stage("pretrain-txt", (DROP, TXT), (DROP,)),
            _stage("finetune-class", (DROP, DROP_CLASS)),
            _stage("finetune-drop", (DROP,)),
        ),
    )
    validation_2 = PipelineSpec(
        "validation-2",
        (
            _stage("pretrain-num", (DROP, NUM), (NUM,)),
            _stage("pretrain-txt", (DROP, TXT), (TXT,)),
            _stage("finetune-class", (DROP, DROP_CLASS)),
            _stage("finetune-drop", (DROP,)),
        ),
    )
    rc_1 = PipelineSpec(
        "rc-1",
        (
            _stage("pretrain-squad", (DROP, SQUAD)),
            _stage("finetune-class", (DROP, DROP_CLASS)),
            _stage("finetune-drop", (DROP,)),
        ),
    )
    rc_2 = PipelineSpec(
        "rc-2",
        (
            _stage("finetune-squad-class", (DROP, DROP_CLASS, SQUAD)),
            _stage("finetune-drop", (DROP,)),
        ),
    )
    multitask = PipelineSpec(
        "multitask",
        (
            _stage(
                "pretrain-all",
                (DROP, TXT, NUM, SQUAD),
                (DROP,),
                temperature=10.0,
                mode=EpochMode.DROP_EXCEPTION,
            ),
            _stage("finetune-class", (DROP, DROP_CLASS)),
            _stage("finetune-drop", (DROP,)),
        ),
    )
    return (validation_1, validation_2, rc_1, rc_2, multitask)


def load_pipeline_spec(source) -> PipelineSpec:
    """Load a pipeline spec from a JSON file/dict mirroring PipelineSpec.

    Stage fields ``validation`` (default: the stage's datasets),
    ``temperature`` (default 1.0) and ``mode`` (default cover_all_epoch)
    are optional.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            source = json.load(handle)
    if not isinstance(source, dict) or "name" not in source or "stages" not in source:
        raise ConfigError("pipeline spec needs 'name' and 'stages'")
    stages = []
    for raw in source["stages"]:
        stages.append(
            _stage(
                raw["name"],
                tuple(raw["datasets"]),
                tuple(raw["validation"]) if "validation" in raw else None,
                float(raw.get("temperature", 1.0)),
                EpochMode(raw.get("mode", EpochMode.COVER_ALL.value)),
            )
        )
    return PipelineSpec(source["name"], tuple(stages))


@dataclass(frozen=True)
class StagePlan:
    stage: StageSpec
    mixture: MixturePlan
    steps: int
    shards: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "stage": self.stage.to_json(),
            "plan": self.mixture.to_json(),
            "steps": self.steps,
            "shards": list(self.shards),
        }


@dataclass(frozen=True)
class PipelinePlan:
    name: str
    seed: int
    batch_size: int
    stages: tuple[StagePlan, ...]

    def to_json(self) -> dict:
        return {
            "pipeline": self.name,
            "seed": self.seed,
            "batch_size": self.batch_size,
            "stages": [stage.to_json() for stage in self.stages],
        }


def expand(
    spec: PipelineSpec,
    stats: Mapping[str, DatasetStat] | Sequence[DatasetStat],
    batch_size: int,
    seed: int = 0,
) -> PipelinePlan:
    """Expand a pipeline into per-stage mixture plans, steps, and shard names.

    Pure: identical (spec, stats, batch_size, seed) give identical plans.
    """
    if not isinstance(stats, Mapping):
        stats = {stat.name: stat for stat in stats}
    plans = []
    for index, stage in enumerate(spec.stages):
        missing = [name for name in stage.datasets if name not in stats]
        if missing:
            raise ValidationError(f"stage {stage.name!r} references unknown datasets: {missing}")
        stage_stats = [stats[name] for name in stage.datasets]
        mixture = compute_plan(stage_stats, stage.temperature)
        steps = steps_per_epoch(stage_stats, batch_size, stage.mode, reference=DROP)
        shards = (f"{spec.name}/{index:02d}-{stage.name}.jsonl",)
        plans.append(StagePlan(stage, mixture, steps, shards))
    return PipelinePlan(spec.name, seed, batch_size, tuple(plans))

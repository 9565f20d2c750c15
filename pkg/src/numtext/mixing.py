"""Temperature-scaled mixture planning and deterministic multitask sampling.

A dataset's unnormalized rate is ``min(length * scale, cap) ** (1/T)``
(cap defaults to +inf, so the uncapped case is the plain power law);
normalizing the rates gives the sampling ratios. T=1 reproduces
examples-proportional mixing and large T approaches uniform. Rates are
computed relative to the largest capped size before exponentiation, which
keeps tiny temperatures finite and makes common scale factors cancel.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, Sequence

from .errors import ConfigError, StreamError
from .seeding import derive_seed


@dataclass(frozen=True)
class DatasetStat:
    """Size and weighting knobs for one dataset in the mix."""

    name: str
    length: int
    scale: float = 1.0
    cap: float | None = None

    def __post_init__(self):
        if self.length < 1:
            raise ConfigError(f"dataset {self.name!r}: length must be >= 1")
        if self.scale <= 0:
            raise ConfigError(f"dataset {self.name!r}: scale must be > 0")
        if self.cap is not None and self.cap <= 0:
            raise ConfigError(f"dataset {self.name!r}: cap must be > 0")

    @property
    def capped_size(self) -> float:
        size = self.length * self.scale
        return min(size, self.cap) if self.cap is not None else size


@dataclass(frozen=True)
class MixEntry:
    name: str
    length: int
    scale: float
    cap: float | None
    rate: float  # relative to the largest capped size (largest dataset: 1.0)
    ratio: float

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "length": self.length,
            "scale": self.scale,
            "cap": self.cap,
            "r": self.rate,
            "p": self.ratio,
        }


@dataclass(frozen=True)
class MixturePlan:
    temperature: float
    entries: tuple[MixEntry, ...]

    @property
    def ratios(self) -> dict[str, float]:
        return {entry.name: entry.ratio for entry in self.entries}

    def to_json(self) -> dict:
        return {"T": self.temperature, "datasets": [entry.to_json() for entry in self.entries]}


def compute_plan(stats: Sequence[DatasetStat], temperature: float) -> MixturePlan:
    """Compute normalized sampling ratios for the given temperature."""
    if not stats:
        raise ConfigError("need at least one dataset")
    if temperature <= 0:
        raise ConfigError("temperature must be > 0")
    names = [stat.name for stat in stats]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate dataset names: {names}")

    sizes = [stat.capped_size for stat in stats]
    largest = max(sizes)
    rates = [(size / largest) ** (1.0 / temperature) for size in sizes]
    if any(rate == 0.0 for rate in rates):
        raise ConfigError("temperature too small: a mixing rate underflowed to zero")
    total = sum(rates)
    entries = tuple(
        MixEntry(stat.name, stat.length, stat.scale, stat.cap, rate, rate / total)
        for stat, rate in zip(stats, rates)
    )
    return MixturePlan(temperature, entries)


class _EpochCursor:
    """Walks one dataset in epoch-shuffled order: a full random permutation
    is consumed before any item repeats."""

    def __init__(self, items: Sequence, rng: random.Random, name: str, allow_repeats: bool):
        self.items = items
        self.rng = rng
        self.name = name
        self.allow_repeats = allow_repeats
        self.order: list[int] = []
        self.exhausted_once = False

    def next(self):
        if not self.order:
            if not self.items:
                raise StreamError(f"dataset {self.name!r} is empty")
            if self.exhausted_once and not self.allow_repeats:
                raise StreamError(f"dataset {self.name!r} exhausted with repeats disabled")
            self.order = list(range(len(self.items)))
            self.rng.shuffle(self.order)
        index = self.order.pop()
        if not self.order:
            self.exhausted_once = True
        return self.items[index]


def sample_stream(
    plan: MixturePlan,
    sources: Mapping[str, Sequence],
    total: int,
    seed: int = 0,
    allow_repeats: bool = True,
) -> Iterator:
    """Draw ``total`` examples, dataset chosen i.i.d. from the plan's ratios.

    Deterministic per seed: dataset selection uses one derived stream and
    each dataset's shuffle another, so the output is independent of how
    the sources were produced.
    """
    if total < 1:
        raise ConfigError("total must be >= 1")
    missing = [entry.name for entry in plan.entries if entry.name not in sources]
    if missing:
        raise ConfigError(f"no source for datasets: {missing}")
    return _sample_stream(plan, sources, total, seed, allow_repeats)


def _sample_stream(plan, sources, total, seed, allow_repeats) -> Iterator:
    select_rng = random.Random(derive_seed(seed, "mix", "select"))
    cursors = [
        _EpochCursor(
            sources[entry.name],
            random.Random(derive_seed(seed, "mix", "shuffle", entry.name)),
            entry.name,
            allow_repeats,
        )
        for entry in plan.entries
    ]
    cumulative: list[float] = []
    running = 0.0
    for entry in plan.entries:
        running += entry.ratio
        cumulative.append(running)

    for _ in range(total):
        pick = bisect_right(cumulative, select_rng.random())
        pick = min(pick, len(cursors) - 1)  # guard the p-sum rounding edge
        yield cursors[pick].next()


class EpochMode(str, Enum):
    COVER_ALL = "cover_all_epoch"
    DROP_EXCEPTION = "drop_epoch_exception"


def steps_per_epoch(
    stats: Sequence[DatasetStat],
    batch_size: int,
    mode: EpochMode = EpochMode.COVER_ALL,
    reference: str = "DROP",
) -> int:
    """Steps for one epoch: cover every example, or one pass of the
    reference dataset in the multitask-exception mode."""
    if batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    mode = EpochMode(mode)
    if mode is EpochMode.COVER_ALL:
        return -(-sum(stat.length for stat in stats) // batch_size)
    for stat in stats:
        if stat.name == reference:
            return -(-stat.length // batch_size)
    raise ConfigError(f"reference dataset {reference!r} not in stats")

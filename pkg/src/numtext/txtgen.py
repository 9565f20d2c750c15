"""Synthetic word-problem data driven by container/entity state simulation.

Each example narrates 2-6 events over a small world state (who holds how
many of what), rendered through sentence templates, and asks a question
whose gold answer is read off the simulated final state. The default
vocabulary and templates are stand-ins and fully overridable; quantities
are non-negative integers unless fractional digits are enabled.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from typing import Iterator, Mapping

from .corpus import AnswerType, Example, TaskTag, format_input
from .decimals import canonical, parse_decimal, render
from .errors import ConfigError, SimulationError, ValidationError
from .seeding import derive_seed


class VerbClass(str, Enum):
    OBSERVE = "observe"
    GAIN = "gain"
    LOSE = "lose"
    TRANSFER = "transfer"


class QuestionKind(str, Enum):
    HOW_MANY = "how_many"
    HOW_MANY_MORE = "how_many_more"
    TOTAL = "total"


@dataclass(frozen=True)
class Event:
    """One state change: a container observes/gains/loses/transfers an entity."""

    verb: VerbClass
    container: str
    entity: str
    quantity: Decimal
    target: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "verb", VerbClass(self.verb))
        object.__setattr__(self, "quantity", Decimal(self.quantity))
        if self.quantity < 0:
            raise ValidationError("event quantity must be >= 0")
        if self.verb is VerbClass.TRANSFER:
            if not self.target or self.target == self.container:
                raise ValidationError("transfer needs a distinct target container")
        elif self.target is not None:
            raise ValidationError(f"{self.verb.value} event takes no target")

    def to_json(self) -> dict:
        row = {
            "verb": self.verb.value,
            "container": self.container,
            "entity": self.entity,
            "quantity": render(self.quantity),
        }
        if self.target is not None:
            row["target"] = self.target
        return row

    @classmethod
    def from_json(cls, row: dict) -> "Event":
        return cls(
            verb=VerbClass(row["verb"]),
            container=row["container"],
            entity=row["entity"],
            quantity=parse_decimal(row["quantity"]),
            target=row.get("target"),
        )


@dataclass
class WorldState:
    """Counts per (container, entity); absent cells read as zero."""

    containers: dict[str, dict[str, Decimal]] = field(default_factory=dict)

    def count(self, container: str, entity: str) -> Decimal:
        return self.containers.get(container, {}).get(entity, Decimal(0))

    def total(self, entity: str) -> Decimal:
        value = Decimal(0)
        for held in self.containers.values():
            value += held.get(entity, Decimal(0))
        return value

    def copy(self) -> "WorldState":
        return WorldState({name: dict(held) for name, held in self.containers.items()})

    def _set(self, container: str, entity: str, value: Decimal) -> None:
        self.containers.setdefault(container, {})[entity] = value


def apply_event(state: WorldState, event: Event) -> WorldState:
    """Return the world state after one event; the input state is untouched."""
    out = state.copy()
    held = out.count(event.container, event.entity)
    if event.verb is VerbClass.OBSERVE:
        out._set(event.container, event.entity, event.quantity)
    elif event.verb is VerbClass.GAIN:
        out._set(event.container, event.entity, held + event.quantity)
    elif event.verb is VerbClass.LOSE:
        if held < event.quantity:
            raise SimulationError(
                f"{event.container} holds {render(held)} {event.entity}, cannot lose {render(event.quantity)}"
            )
        out._set(event.container, event.entity, held - event.quantity)
    else:  # transfer
        if held < event.quantity:
            raise SimulationError(
                f"{event.container} holds {render(held)} {event.entity}, cannot transfer {render(event.quantity)}"
            )
        out._set(event.container, event.entity, held - event.quantity)
        out._set(event.target, event.entity, out.count(event.target, event.entity) + event.quantity)
    return out


def simulate(events, initial: WorldState | None = None) -> WorldState:
    state = initial.copy() if initial is not None else WorldState()
    for event in events:
        state = apply_event(state, event)
    return state


@dataclass(frozen=True)
class QuestionSpec:
    """What the question asks of the final state."""

    kind: QuestionKind
    entity: str
    container: str = ""
    other: str = ""

    def to_json(self) -> dict:
        row = {"kind": self.kind.value, "entity": self.entity}
        if self.container:
            row["container"] = self.container
        if self.other:
            row["other"] = self.other
        return row

    @classmethod
    def from_json(cls, row: dict) -> "QuestionSpec":
        return cls(
            kind=QuestionKind(row["kind"]),
            entity=row["entity"],
            container=row.get("container", ""),
            other=row.get("other", ""),
        )


def answer_question(state: WorldState, question: QuestionSpec) -> str:
    """Answer a question from the final state, rendered as decimal text."""
    if question.kind is QuestionKind.HOW_MANY:
        if question.container not in state.containers:
            raise ValidationError(f"container {question.container!r} never appeared")
        return render(state.count(question.container, question.entity))
    if question.kind is QuestionKind.HOW_MANY_MORE:
        for name in (question.container, question.other):
            if name not in state.containers:
                raise ValidationError(f"container {name!r} never appeared")
        return render(state.count(question.container, question.entity) - state.count(question.other, question.entity))
    if not any(question.entity in held for held in state.containers.values()):
        raise ValidationError(f"entity {question.entity!r} never appeared")
    return render(state.total(question.entity))


@dataclass(frozen=True)
class TxtExample:
    context: str
    question: str
    answer: str
    events: tuple[Event, ...]
    question_spec: QuestionSpec
    rng_seed: int = 0

    def to_json(self) -> dict:
        return {
            "context": self.context,
            "question": self.question,
            "answer": self.answer,
            "events": [event.to_json() for event in self.events],
            "question_spec": self.question_spec.to_json(),
            "seed": self.rng_seed,
        }


# ---------------------------------------------------------------------------
# Vocabulary and rendering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Vocabulary:
    containers: tuple[str, ...]
    entities: tuple[str, ...]
    sentence_templates: Mapping[VerbClass, tuple[str, ...]]
    question_templates: Mapping[QuestionKind, tuple[str, ...]]

    def __post_init__(self):
        if len(set(self.containers)) < 2:
            raise ConfigError("vocabulary needs at least 2 distinct container names")
        if len(set(self.entities)) < 2:
            raise ConfigError("vocabulary needs at least 2 distinct entity names")
        for verb in VerbClass:
            if not self.sentence_templates.get(verb):
                raise ConfigError(f"no sentence template for verb {verb.value!r}")
        for kind in QuestionKind:
            if not self.question_templates.get(kind):
                raise ConfigError(f"no question template for kind {kind.value!r}")

    @classmethod
    def from_json(cls, obj: dict) -> "Vocabulary":
        return cls(
            containers=tuple(obj["containers"]),
            entities=tuple(obj["entities"]),
            sentence_templates={
                VerbClass(k): tuple(v) for k, v in obj["sentence_templates"].items()
            },
            question_templates={
                QuestionKind(k): tuple(v) for k, v in obj["question_templates"].items()
            },
        )

    @classmethod
    def from_file(cls, path) -> "Vocabulary":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_json(json.load(handle))


DEFAULT_VOCAB = Vocabulary(
    containers=(
        "Mary", "John", "Sara", "Tom", "Emma", "Lucas",
        "Nina", "Omar", "Priya", "Chen", "Ava", "Leo",
    ),
    entities=(
        "apples", "marbles", "books", "pencils", "coins", "stickers",
        "oranges", "cards", "shells", "stamps", "balloons", "cookies",
        "crayons", "buttons", "ribbons", "acorns", "peaches", "tokens",
    ),
    sentence_templates={
        VerbClass.OBSERVE: (
            "{container} had {qty} {entity}.",
            "{container} started with {qty} {entity}.",
            "{container} kept {qty} {entity} in a box.",
            "At first, {container} held {qty} {entity}.",
            "{container} owned {qty} {entity}.",
        ),
        VerbClass.GAIN: (
            "{container} bought {qty} more {entity}.",
            "{container} found {qty} {entity}.",
            "{container} picked up {qty} {entity}.",
            "{container} received {qty} {entity} as a gift.",
            "Then {container} collected {qty} more {entity}.",
        ),
        VerbClass.LOSE: (
            "{container} lost {qty} {entity}.",
            "{container} gave away {qty} {entity}.",
            "{container} dropped {qty} {entity}.",
            "{container} used {qty} {entity}.",
            "{container} sold {qty} {entity}.",
        ),
        VerbClass.TRANSFER: (
            "{container} gave {qty} {entity} to {target}.",
            "{container} handed {qty} {entity} to {target}.",
            "{container} passed {qty} {entity} to {target}.",
            "{container} sent {qty} {entity} to {target}.",
            "{container} shared {qty} {entity} with {target}.",
        ),
    },
    question_templates={
        QuestionKind.HOW_MANY: (
            "How many {entity} does {container} have now?",
            "How many {entity} does {container} have in the end?",
        ),
        QuestionKind.HOW_MANY_MORE: (
            "How many more {entity} does {container} have than {other}?",
            "How many more {entity} does {container} have compared to {other}?",
        ),
        QuestionKind.TOTAL: (
            "How many {entity} are there in total?",
            "How many {entity} do they have altogether?",
        ),
    },
)


@dataclass(frozen=True)
class TxtGenConfig:
    vocab: Vocabulary = DEFAULT_VOCAB
    min_events: int = 2
    max_events: int = 6
    max_quantity: int = 20
    frac_digits: int = 0  # countable entities by default; >0 opts into fractions

    def __post_init__(self):
        if not (2 <= self.min_events <= self.max_events):
            raise ConfigError("need 2 <= min_events <= max_events")
        if self.max_quantity < 1:
            raise ConfigError("max_quantity must be >= 1")
        if self.frac_digits < 0:
            raise ConfigError("frac_digits must be >= 0")


def _draw_quantity(rng: random.Random, config: TxtGenConfig, upper: Decimal | None = None) -> Decimal:
    scale = config.frac_digits
    high = Decimal(config.max_quantity).scaleb(scale)
    if upper is not None:
        high = min(high, upper.scaleb(scale))
    low = min(Decimal(1), high)
    return canonical(Decimal(rng.randint(int(low), int(high))).scaleb(-scale))


def generate_txt(count: int, config: TxtGenConfig = TxtGenConfig(), seed: int = 0) -> Iterator[TxtExample]:
    """Yield ``count`` reproducible word problems, answers from simulation.

    Example i draws from a child seed (seed, "txt", i); lose/transfer
    amounts never exceed the holder's count, and how_many_more questions
    order their arguments so the difference is never negative.
    """
    if count < 1:
        raise ConfigError("count must be >= 1")
    return _generate_txt(count, config, seed)


def _generate_txt(count, config, seed) -> Iterator[TxtExample]:
    vocab = config.vocab
    for index in range(count):
        child = derive_seed(seed, "txt", index)
        rng = random.Random(child)

        entity = rng.choice(vocab.entities)
        n_events = rng.randint(config.min_events, config.max_events)
        n_containers = 3 if n_events >= 5 and len(vocab.containers) >= 3 and rng.random() < 0.5 else 2
        cast = rng.sample(vocab.containers, n_containers)

        state = WorldState()
        events: list[Event] = []
        for name in cast:
            event = Event(VerbClass.OBSERVE, name, entity, _draw_quantity(rng, config))
            state = apply_event(state, event)
            events.append(event)
        while len(events) < n_events:
            actor = rng.choice(cast)
            held = state.count(actor, entity)
            choices = [VerbClass.GAIN]
            if held >= Decimal(1).scaleb(-config.frac_digits):
                choices += [VerbClass.LOSE, VerbClass.TRANSFER]
            verb = rng.choice(choices)
            if verb is VerbClass.GAIN:
                event = Event(verb, actor, entity, _draw_quantity(rng, config))
            elif verb is VerbClass.LOSE:
                event = Event(verb, actor, entity, _draw_quantity(rng, config, upper=held))
            else:
                target = rng.choice([c for c in cast if c != actor])
                event = Event(verb, actor, entity, _draw_quantity(rng, config, upper=held), target=target)
            state = apply_event(state, event)
            events.append(event)

        kind = rng.choice(list(QuestionKind))
        if kind is QuestionKind.HOW_MANY:
            spec = QuestionSpec(kind, entity, container=rng.choice(cast))
        elif kind is QuestionKind.HOW_MANY_MORE:
            first, second = rng.sample(cast, 2)
            if state.count(first, entity) < state.count(second, entity):
                first, second = second, first
            spec = QuestionSpec(kind, entity, container=first, other=second)
        else:
            spec = QuestionSpec(kind, entity)

        sentences = [
            rng.choice(vocab.sentence_templates[event.verb]).format(
                container=event.container,
                qty=render(event.quantity),
                entity=event.entity,
                target=event.target or "",
            )
            for event in events
        ]
        question = rng.choice(vocab.question_templates[kind]).format(
            entity=spec.entity, container=spec.container, other=spec.other
        )
        yield TxtExample(
            context=" ".join(sentences),
            question=question,
            answer=answer_question(state, spec),
            events=tuple(events),
            question_spec=spec,
            rng_seed=child,
        )


def txt_to_example(example: TxtExample) -> Example:
    """Wrap a TxtExample as an answer_me corpus record."""
    return Example(
        input=format_input(TaskTag.ANSWER_ME, example.question, example.context),
        target=example.answer,
        task=TaskTag.ANSWER_ME,
        answer_type=AnswerType.NUMBER,
        source_id=f"txt-{example.rng_seed:016x}",
    )

"""Ingestion, tagging, auditing, and serialization of QA records.

Reads the public DROP and SQuAD v1.1 JSON layouts, derives the
question-type classification task, formats prefix-tagged text-to-text
examples (question placed before context so truncation eats the passage
tail, never the question), audits length cutoffs under a pluggable token
counter, and round-trips the canonical JSONL record stream byte-stably.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import ParseError, ValidationError


class TaskTag(str, Enum):
    """Prefix tags naming the task of a text-to-text example."""

    ANSWER_ME = "answer_me"
    CALCULATE = "calculate"
    CLASSIFY_ME = "classify_me"
    SQUAD_CONTEXT = "squad_context"


class AnswerType(str, Enum):
    """DROP-style answer classes (plus ``none`` for untyped records)."""

    NUMBER = "number"
    DATE = "date"
    SPAN = "span"
    SPANS = "spans"
    NONE = "none"


CONTEXT_MARKER = " context: "

#: JSONL field order; fixed so golden files are bit-exact.
EXAMPLE_FIELDS = ("input", "target", "task", "answer_type", "source_id")


def format_input(task: TaskTag | str, question: str, context: str = "") -> str:
    """Build the prefix-tagged input text, question before context.

    Returns ``"<prefix>: <question> context: <context>"``; a calculate
    task with no context yields just ``"calculate: <question>"``.
    """
    try:
        tag = TaskTag(task)
    except ValueError:
        raise ValidationError(f"unknown task tag: {task!r}") from None
    question = question.strip()
    context = context.strip()
    if not question:
        raise ValidationError("question must be non-empty")
    if not context:
        if tag is not TaskTag.CALCULATE:
            raise ValidationError(f"context required for task {tag.value!r}")
        return f"{tag.value}: {question}"
    return f"{tag.value}: {question}{CONTEXT_MARKER}{context}"


def parse_input(text: str) -> tuple[TaskTag, str, str | None]:
    """Inverse of :func:`format_input`: recover (task, question, context)."""
    prefix, sep, body = text.partition(": ")
    if not sep:
        raise ValidationError(f"no task prefix in {text!r}")
    try:
        tag = TaskTag(prefix)
    except ValueError:
        raise ValidationError(f"unknown task prefix: {prefix!r}") from None
    question, sep, context = body.partition(CONTEXT_MARKER)
    if not question.strip():
        raise ValidationError("empty question")
    return tag, question, context if sep else None


@dataclass(frozen=True)
class Example:
    """One prefix-tagged input/target pair, the universal pipeline record."""

    input: str
    target: str
    task: TaskTag
    answer_type: AnswerType = AnswerType.NONE
    source_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "task", TaskTag(self.task))
        object.__setattr__(self, "answer_type", AnswerType(self.answer_type))
        if not self.input.startswith(f"{self.task.value}: "):
            raise ValidationError(
                f"input must start with {self.task.value!r} prefix: {self.input[:40]!r}"
            )
        body = self.input[len(self.task.value) + 2 :]
        question = body.split(CONTEXT_MARKER, 1)[0]
        if not question.strip():
            raise ValidationError("input question is empty")
        if not self.target:
            raise ValidationError("target must be non-empty")


@dataclass(frozen=True)
class DateParts:
    day: str = ""
    month: str = ""
    year: str = ""

    def populated(self) -> bool:
        return bool(self.day.strip() or self.month.strip() or self.year.strip())

    def to_text(self) -> str:
        """Canonical "DD month YYYY" rendering, empty fields omitted."""
        return " ".join(p for p in (self.day.strip(), self.month.strip(), self.year.strip()) if p)


@dataclass(frozen=True)
class GoldAnswer:
    """One gold answer: a number, a list of spans, or a date."""

    number: str = ""
    spans: tuple[str, ...] = ()
    date: DateParts = field(default_factory=DateParts)

    def is_empty(self) -> bool:
        return not (
            self.number.strip()
            or any(s.strip() for s in self.spans)
            or self.date.populated()
        )


@dataclass(frozen=True)
class DropRecord:
    """One DROP question with its passage and all gold answers."""

    passage: str
    question: str
    answers: tuple[GoldAnswer, ...]
    query_id: str

    def __post_init__(self):
        if not self.answers or all(a.is_empty() for a in self.answers):
            raise ValidationError(f"record {self.query_id!r} has no non-empty gold answer")


@dataclass(frozen=True)
class SquadRecord:
    """One SQuAD v1.1 question with its passage and answer texts."""

    passage: str
    question: str
    answers: tuple[str, ...]
    qa_id: str

    def __post_init__(self):
        if not self.answers:
            raise ValidationError(f"record {self.qa_id!r} has no answers")


@dataclass(frozen=True)
class LengthLimits:
    """Encoder/decoder token budgets used by the truncation audit."""

    encoder_max: int = 512
    decoder_max: int = 54

    def __post_init__(self):
        if self.encoder_max < 1 or self.decoder_max < 1:
            raise ValidationError("length limits must be >= 1")


@dataclass(frozen=True)
class IngestIssue:
    """A skipped record: which question and why."""

    question_id: str
    message: str


@dataclass
class IngestResult:
    records: list
    errors: list[IngestIssue]


def derive_answer_type(answer: GoldAnswer) -> AnswerType:
    """Classify a gold answer as number / date / span / spans.

    Priority (number > date > spans) only matters for malformed answers
    where more than one field is populated; valid answers have exactly one.
    """
    if answer.number.strip():
        return AnswerType.NUMBER
    if answer.date.populated():
        return AnswerType.DATE
    spans = [s for s in answer.spans if s.strip()]
    if len(spans) == 1:
        return AnswerType.SPAN
    if len(spans) >= 2:
        return AnswerType.SPANS
    raise ValidationError("cannot type a fully empty gold answer")


#: Separator between spans when a multi-span answer is serialized to one string.
SPAN_DELIMITER = "; "


def gold_target(answer: GoldAnswer, span_delimiter: str = SPAN_DELIMITER) -> str:
    """Serialize a gold answer to the single target string a model must emit."""
    kind = derive_answer_type(answer)
    if kind is AnswerType.NUMBER:
        return answer.number.strip()
    if kind is AnswerType.DATE:
        return answer.date.to_text()
    return span_delimiter.join(s.strip() for s in answer.spans if s.strip())


def make_classification_example(record: DropRecord) -> Example:
    """Build the question-type classification example for one DROP record."""
    kind = derive_answer_type(record.answers[0])
    return Example(
        input=format_input(TaskTag.CLASSIFY_ME, record.question, record.passage),
        target=kind.value,
        task=TaskTag.CLASSIFY_ME,
        answer_type=kind,
        source_id=record.query_id,
    )


def make_drop_example(record: DropRecord, span_delimiter: str = SPAN_DELIMITER) -> Example:
    """Build the answer_me example for one DROP record (first gold as target)."""
    kind = derive_answer_type(record.answers[0])
    return Example(
        input=format_input(TaskTag.ANSWER_ME, record.question, record.passage),
        target=gold_target(record.answers[0], span_delimiter),
        task=TaskTag.ANSWER_ME,
        answer_type=kind,
        source_id=record.query_id,
    )


def make_squad_example(record: SquadRecord) -> Example:
    """Build the squad_context example for one SQuAD record."""
    return Example(
        input=format_input(TaskTag.SQUAD_CONTEXT, record.question, record.passage),
        target=record.answers[0],
        task=TaskTag.SQUAD_CONTEXT,
        answer_type=AnswerType.SPAN,
        source_id=record.qa_id,
    )


# ---------------------------------------------------------------------------
# Source-file ingestion
# ---------------------------------------------------------------------------

def _load_json(source) -> dict:
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = source.read()
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        byte_offset = len(text[: exc.pos].encode("utf-8"))
        raise ParseError(f"malformed JSON: {exc.msg}", offset=byte_offset) from None


def _gold_from_json(raw: dict) -> GoldAnswer:
    number = raw.get("number", "")
    if number is None:
        number = ""
    date_raw = raw.get("date") or {}
    return GoldAnswer(
        number=str(number),
        spans=tuple(str(s) for s in raw.get("spans", []) or []),
        date=DateParts(
            day=str(date_raw.get("day", "") or ""),
            month=str(date_raw.get("month", "") or ""),
            year=str(date_raw.get("year", "") or ""),
        ),
    )


def ingest_drop(source) -> IngestResult:
    """Parse a DROP-layout JSON file into records, one per qa pair.

    All gold answers (primary plus validated) are retained in order,
    empty ones dropped. A qa pair whose every answer is empty is skipped
    and tallied in ``errors`` rather than aborting the whole file.
    """
    data = _load_json(source)
    if not isinstance(data, dict):
        raise ParseError("DROP file must be a JSON object keyed by passage id")
    records: list[DropRecord] = []
    errors: list[IngestIssue] = []
    for passage_id, block in data.items():
        if not isinstance(block, dict) or "passage" not in block:
            raise ParseError(f"passage block {passage_id!r} missing 'passage'")
        passage = str(block["passage"])
        for index, qa in enumerate(block.get("qa_pairs", [])):
            query_id = str(qa.get("query_id") or f"{passage_id}.{index}")
            golds = [_gold_from_json(qa.get("answer", {}) or {})]
            golds.extend(_gold_from_json(v) for v in qa.get("validated_answers", []) or [])
            golds = [g for g in golds if not g.is_empty()]
            if not golds:
                errors.append(IngestIssue(query_id, "every gold answer is empty"))
                continue
            records.append(
                DropRecord(
                    passage=passage,
                    question=str(qa.get("question", "")),
                    answers=tuple(golds),
                    query_id=query_id,
                )
            )
    return IngestResult(records, errors)


def ingest_squad(source) -> IngestResult:
    """Parse a SQuAD v1.1 JSON file into records, one per qa pair."""
    data = _load_json(source)
    if not isinstance(data, dict) or not isinstance(data.get("data", None), list):
        raise ParseError("SQuAD file must be a JSON object with a 'data' list")
    records: list[SquadRecord] = []
    errors: list[IngestIssue] = []
    for article in data["data"]:
        for paragraph in article.get("paragraphs", []):
            context = str(paragraph.get("context", ""))
            for qa in paragraph.get("qas", []):
                qa_id = str(qa.get("id", ""))
                texts = [str(a.get("text", "")) for a in qa.get("answers", []) or []]
                texts = [t for t in texts if t.strip()]
                if not texts:
                    errors.append(IngestIssue(qa_id, "every answer is empty"))
                    continue
                records.append(
                    SquadRecord(
                        passage=context,
                        question=str(qa.get("question", "")),
                        answers=tuple(texts),
                        qa_id=qa_id,
                    )
                )
    return IngestResult(records, errors)


# ---------------------------------------------------------------------------
# Digit tokenization and the truncation audit
# ---------------------------------------------------------------------------

_NUMBER_RUN = re.compile(r"\d+(?:\.\d+)*")


def digit_tokenize(text: str) -> list[str]:
    """Split text into tokens, exploding numbers digit-by-digit.

    Whitespace separates tokens; non-numeric runs stay whole; each digit
    and each decimal point inside a number becomes its own token
    (e.g. ``"pay 51.4 now"`` -> ``["pay", "5", "1", ".", "4", "now"]``).
    """
    tokens: list[str] = []
    for word in text.split():
        pos = 0
        for match in _NUMBER_RUN.finditer(word):
            if match.start() > pos:
                tokens.append(word[pos : match.start()])
            tokens.extend(match.group())
            pos = match.end()
        if pos < len(word):
            tokens.append(word[pos:])
    return tokens


_NUMBER_PIECE = re.compile(r"\d|\.")  # same \d as the tokenizer (Nd only;
                                      # str.isdigit would also claim e.g. '²')


def _is_number_piece(token: str) -> bool:
    return len(token) == 1 and _NUMBER_PIECE.fullmatch(token) is not None


def digit_detokenize(tokens: Sequence[str]) -> str:
    """Rebuild text from digit tokens: single spaces between words, none
    between the digit/point pieces of one number."""
    out: list[str] = []
    prev_numeric = False
    for token in tokens:
        numeric = _is_number_piece(token)
        if out and not (numeric and prev_numeric):
            out.append(" ")
        out.append(token)
        prev_numeric = numeric
    return "".join(out)


def count_tokens(text: str) -> int:
    """Default token counter: whitespace words with digits split out."""
    return len(digit_tokenize(text))


@dataclass(frozen=True)
class TruncationAudit:
    total: int
    encoder_over: int
    decoder_over: int

    @property
    def encoder_fraction(self) -> float:
        return self.encoder_over / self.total if self.total else 0.0

    @property
    def decoder_fraction(self) -> float:
        return self.decoder_over / self.total if self.total else 0.0

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "encoder_over": self.encoder_over,
            "decoder_over": self.decoder_over,
            "encoder_fraction": self.encoder_fraction,
            "decoder_fraction": self.decoder_fraction,
        }


def audit_truncation(
    examples: Iterable[Example],
    limits: LengthLimits = LengthLimits(),
    counter: Callable[[str], int] = count_tokens,
) -> TruncationAudit:
    """Count examples whose input or target would be cut off at the limits."""
    total = encoder_over = decoder_over = 0
    for example in examples:
        total += 1
        if counter(example.input) > limits.encoder_max:
            encoder_over += 1
        if counter(example.target) > limits.decoder_max:
            decoder_over += 1
    return TruncationAudit(total, encoder_over, decoder_over)


# ---------------------------------------------------------------------------
# JSONL record stream
# ---------------------------------------------------------------------------

def example_to_json(example: Example) -> dict:
    return {
        "input": example.input,
        "target": example.target,
        "task": example.task.value,
        "answer_type": example.answer_type.value,
        "source_id": example.source_id,
    }


def example_from_json(obj: dict) -> Example:
    if not isinstance(obj, dict) or set(obj) != set(EXAMPLE_FIELDS):
        raise ValidationError(f"expected exactly the fields {EXAMPLE_FIELDS}")
    if not all(isinstance(obj[k], str) for k in EXAMPLE_FIELDS):
        raise ValidationError("all example fields must be strings")
    try:
        return Example(
            input=obj["input"],
            target=obj["target"],
            task=TaskTag(obj["task"]),
            answer_type=AnswerType(obj["answer_type"]),
            source_id=obj["source_id"],
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def write_examples(examples: Iterable[Example], sink, meta: dict | None = None) -> int:
    """Write examples as UTF-8 JSONL (fixed key order, \\n-terminated).

    ``sink`` is a binary stream or a path. When ``meta`` is given it is
    written first as a ``{"meta": ...}`` record; readers skip it.
    Returns the number of example records written.
    """
    if isinstance(sink, (str, Path)):
        with open(sink, "wb") as handle:
            return write_examples(examples, handle, meta)
    count = 0
    if meta is not None:
        sink.write(json.dumps({"meta": meta}, ensure_ascii=False).encode("utf-8") + b"\n")
    for example in examples:
        line = json.dumps(example_to_json(example), ensure_ascii=False)
        sink.write(line.encode("utf-8") + b"\n")
        count += 1
    return count


def read_examples(source) -> list[Example]:
    """Read a JSONL record stream written by :func:`write_examples`.

    A line that is not valid JSON or fails the record schema raises
    :class:`ParseError` / :class:`ValidationError` naming the line number.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as handle:
            return read_examples(handle)
    examples: list[Example] = []
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from None
        if lineno == 1 and isinstance(obj, dict) and set(obj) == {"meta"}:
            continue
        try:
            examples.append(example_from_json(obj))
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    return examples


def read_meta(source) -> dict | None:
    """Return the leading ``{"meta": ...}`` record of a JSONL file, if any."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as handle:
            return read_meta(handle)
    first = source.readline()
    if isinstance(first, bytes):
        first = first.decode("utf-8")
    if not first.strip():
        return None
    try:
        obj = json.loads(first)
    except json.JSONDecodeError:
        return None
    if isinstance(obj, dict) and set(obj) == {"meta"}:
        return obj["meta"]
    return None

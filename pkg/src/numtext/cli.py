"""Command-line entry point.

Subcommands: gen-num, gen-txt, ingest, derive-class, mix, lr-table,
audit, score, pipeline. Every output embeds a metadata record (tool
version, seed, config hash), all randomness flows from the --seed flag,
files are written atomically (temp + rename), diagnostics go to stderr,
and exit codes are 0 (ok), 1 (validation/config error), 2 (I/O error).
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .corpus import (
    LengthLimits,
    audit_truncation,
    count_tokens,
    ingest_drop,
    ingest_squad,
    make_classification_example,
    make_drop_example,
    make_squad_example,
    read_examples,
    write_examples,
)
from .decimals import parse_decimal
from .errors import ConfigError, ParseError, ToolkitError, ValidationError
from .mixing import DatasetStat, compute_plan, sample_stream
from .numgen import NumGenConfig, TemplateFamily, ValueRange, generate_num, num_to_example
from .pipelines import builtin_pipelines, expand, load_pipeline_spec
from .schedule import LrConfig, LrSchedule, emit_table
from .scoring import build_report
from .txtgen import TxtGenConfig, Vocabulary, generate_txt, txt_to_example


def _config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _meta(config: dict, seed: int | None = None, **extra) -> dict:
    meta = {"tool": f"numtext {__version__}"}
    if seed is not None:
        meta["seed"] = seed
    meta["config_sha256"] = _config_hash(config)
    meta.update(extra)
    return meta


def _atomic_write_bytes(path: str, payload: bytes) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        _atomic_write_bytes(out, text.encode("utf-8"))


def _apply_config_file(args: argparse.Namespace, keys: list[str]) -> None:
    """Fill unset flags from --config, then record the effective values."""
    file_values = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as handle:
            file_values = json.load(handle)
        if not isinstance(file_values, dict):
            raise ConfigError("--config file must hold a JSON object")
    for key in keys:
        if getattr(args, key, None) is None and key in file_values:
            setattr(args, key, file_values[key])


def _effective_config(args: argparse.Namespace, keys: list[str]) -> dict:
    return {key: getattr(args, key) for key in keys}


def _maybe_dump_config(args: argparse.Namespace, config: dict) -> None:
    if getattr(args, "dump_config", None):
        _atomic_write_bytes(args.dump_config, (json.dumps(config, indent=2) + "\n").encode("utf-8"))


def _default(args, key, value):
    if getattr(args, key, None) is None:
        setattr(args, key, value)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

_GEN_NUM_KEYS = ["count", "seed", "min_value", "max_value", "max_frac_digits", "families", "emit"]


def cmd_gen_num(args) -> int:
    _apply_config_file(args, _GEN_NUM_KEYS)
    _default(args, "seed", 0)
    _default(args, "min_value", "0")
    _default(args, "max_value", "20000")
    _default(args, "max_frac_digits", 2)
    _default(args, "emit", "examples")
    if args.count is None:
        raise ConfigError("--count is required")
    config = _effective_config(args, _GEN_NUM_KEYS)
    _maybe_dump_config(args, config)

    weights = {family: 1.0 for family in TemplateFamily}
    if args.families:
        weights = {}
        for part in str(args.families).split(","):
            name, _, weight = part.partition("=")
            weights[TemplateFamily(name.strip())] = float(weight) if weight else 1.0
    gen_config = NumGenConfig(
        ranges=ValueRange(
            min_value=parse_decimal(str(args.min_value)),
            max_value=parse_decimal(str(args.max_value)),
            max_frac_digits=int(args.max_frac_digits),
        ),
        family_weights=weights,
    )
    examples = generate_num(int(args.count), gen_config, int(args.seed))
    meta = _meta(config, seed=int(args.seed))
    buffer = io.BytesIO()
    if args.emit == "raw":
        buffer.write(json.dumps({"meta": meta}, ensure_ascii=False).encode("utf-8") + b"\n")
        for example in examples:
            buffer.write(json.dumps(example.to_json(), ensure_ascii=False).encode("utf-8") + b"\n")
    else:
        write_examples((num_to_example(e) for e in examples), buffer, meta=meta)
    _atomic_write_bytes(args.out, buffer.getvalue())
    return 0


_GEN_TXT_KEYS = ["count", "seed", "min_events", "max_events", "max_quantity", "frac_digits", "emit"]


def cmd_gen_txt(args) -> int:
    _apply_config_file(args, _GEN_TXT_KEYS)
    _default(args, "seed", 0)
    _default(args, "min_events", 2)
    _default(args, "max_events", 6)
    _default(args, "max_quantity", 20)
    _default(args, "frac_digits", 0)
    _default(args, "emit", "examples")
    if args.count is None:
        raise ConfigError("--count is required")
    config = _effective_config(args, _GEN_TXT_KEYS)
    _maybe_dump_config(args, config)

    vocab = Vocabulary.from_file(args.vocab) if args.vocab else TxtGenConfig().vocab
    gen_config = TxtGenConfig(
        vocab=vocab,
        min_events=int(args.min_events),
        max_events=int(args.max_events),
        max_quantity=int(args.max_quantity),
        frac_digits=int(args.frac_digits),
    )
    examples = generate_txt(int(args.count), gen_config, int(args.seed))
    meta = _meta(config, seed=int(args.seed))
    buffer = io.BytesIO()
    if args.emit == "raw":
        buffer.write(json.dumps({"meta": meta}, ensure_ascii=False).encode("utf-8") + b"\n")
        for example in examples:
            buffer.write(json.dumps(example.to_json(), ensure_ascii=False).encode("utf-8") + b"\n")
    else:
        write_examples((txt_to_example(e) for e in examples), buffer, meta=meta)
    _atomic_write_bytes(args.out, buffer.getvalue())
    return 0


def cmd_ingest(args) -> int:
    ingest = ingest_drop if args.format == "drop" else ingest_squad
    result = ingest(args.input)
    if args.format == "drop":
        examples = [make_drop_example(record) for record in result.records]
    else:
        examples = [make_squad_example(record) for record in result.records]
    config = {"format": args.format, "input": str(args.input)}
    buffer = io.BytesIO()
    written = write_examples(examples, buffer, meta=_meta(config, records=len(examples)))
    _atomic_write_bytes(args.out, buffer.getvalue())
    for issue in result.errors:
        print(f"skipped {issue.question_id}: {issue.message}", file=sys.stderr)
    print(f"wrote {written} examples ({len(result.errors)} skipped)", file=sys.stderr)
    return 0


def cmd_derive_class(args) -> int:
    result = ingest_drop(args.input)
    examples = [make_classification_example(record) for record in result.records]
    config = {"input": str(args.input)}
    buffer = io.BytesIO()
    written = write_examples(examples, buffer, meta=_meta(config, records=len(examples)))
    _atomic_write_bytes(args.out, buffer.getvalue())
    print(f"wrote {written} classification examples", file=sys.stderr)
    return 0


def _load_stats(path: str) -> list[DatasetStat]:
    with open(path, "r", encoding="utf-8") as handle:
        rows = json.load(handle)
    if not isinstance(rows, list):
        raise ConfigError("stats file must hold a JSON list")
    return [
        DatasetStat(
            name=row["name"],
            length=int(row["length"]),
            scale=float(row.get("scale", 1.0)),
            cap=float(row["cap"]) if row.get("cap") is not None else None,
        )
        for row in rows
    ]


def cmd_mix(args) -> int:
    stats = _load_stats(args.stats)
    plan = compute_plan(stats, float(args.temperature))
    config = {"stats": str(args.stats), "temperature": float(args.temperature)}

    if args.sample is None:
        payload = {"meta": _meta(config), **plan.to_json()}
        _emit_text(json.dumps(payload, indent=2) + "\n", args.out)
        return 0

    if not args.sources or args.out is None:
        raise ConfigError("--sample needs --sources and --out")
    sources = {}
    for part in args.sources.split(","):
        name, _, path = part.partition("=")
        if not path:
            raise ConfigError(f"bad --sources entry: {part!r}")
        sources[name.strip()] = read_examples(path)
    seed = int(args.seed or 0)
    config.update({"sample": int(args.sample), "seed": seed})
    stream = sample_stream(plan, sources, int(args.sample), seed, allow_repeats=not args.no_repeats)
    buffer = io.BytesIO()
    write_examples(stream, buffer, meta=_meta(config, seed=seed, plan=plan.to_json()))
    _atomic_write_bytes(args.out, buffer.getvalue())
    return 0


_LR_KEYS = ["epochs", "batches_per_epoch", "warmup_start", "warmup_end", "decay_rate", "warmup_fraction"]


def cmd_lr_table(args) -> int:
    _apply_config_file(args, _LR_KEYS)
    _default(args, "warmup_start", 1e-8)
    _default(args, "warmup_end", 1e-4)
    _default(args, "decay_rate", 1e-3)
    _default(args, "warmup_fraction", 0.10)
    if args.epochs is None or args.batches_per_epoch is None:
        raise ConfigError("--epochs and --batches-per-epoch are required")
    config = _effective_config(args, _LR_KEYS)
    _maybe_dump_config(args, config)

    schedule = LrSchedule(
        LrConfig(
            total_epochs=int(args.epochs),
            batches_per_epoch=int(args.batches_per_epoch),
            warmup_start=float(args.warmup_start),
            warmup_end=float(args.warmup_end),
            decay_rate=float(args.decay_rate),
            warmup_fraction=float(args.warmup_fraction),
        )
    )
    meta = _meta(config)
    out = io.StringIO()
    emit_table(schedule, out, meta=f"{meta['tool']} config_sha256={meta['config_sha256']}")
    _emit_text(out.getvalue(), args.out)
    return 0


def cmd_audit(args) -> int:
    examples = read_examples(args.input)
    limits = LengthLimits(encoder_max=int(args.encoder_max), decoder_max=int(args.decoder_max))
    audit = audit_truncation(examples, limits, count_tokens)
    config = {"input": str(args.input), "encoder_max": limits.encoder_max, "decoder_max": limits.decoder_max}
    payload = {"meta": _meta(config), **audit.to_json()}
    _emit_text(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_score(args) -> int:
    result = ingest_drop(args.gold)
    predictions = {}
    with open(args.pred, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from None
            if (lineno == 1 and isinstance(row, dict) and set(row) == {"meta"}):
                continue
            if "id" not in row or "prediction" not in row:
                raise ValidationError(f"line {lineno}: prediction rows need 'id' and 'prediction'")
            predictions[str(row["id"])] = str(row["prediction"])
    report = build_report(result.records, predictions, span_delimiter=args.delimiter)
    config = {"gold": str(args.gold), "pred": str(args.pred), "delimiter": args.delimiter}
    payload = {"meta": _meta(config), **report.to_json()}
    _emit_text(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_pipeline(args) -> int:
    pipelines = {spec.name: spec for spec in builtin_pipelines()}
    if args.list:
        payload = {"meta": _meta({}), "pipelines": [spec.to_json() for spec in pipelines.values()]}
        _emit_text(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    if bool(args.name) == bool(args.spec):
        raise ConfigError("pass exactly one of --name or --spec")
    if args.name and args.name not in pipelines:
        raise ConfigError(f"unknown pipeline {args.name!r}; builtins: {sorted(pipelines)}")
    spec = pipelines[args.name] if args.name else load_pipeline_spec(args.spec)
    if args.stats is None or args.batch_size is None:
        raise ConfigError("--stats and --batch-size are required")
    stats = _load_stats(args.stats)
    seed = int(args.seed or 0)
    plan = expand(spec, stats, int(args.batch_size), seed)
    config = {
        "pipeline": spec.name,
        "stats": str(args.stats),
        "batch_size": int(args.batch_size),
        "seed": seed,
    }
    payload = {"meta": _meta(config, seed=seed), **plan.to_json()}
    _emit_text(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="numtext", description=__doc__)
    parser.add_argument("--version", action="version", version=f"numtext {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, func, help_text):
        sub = commands.add_parser(name, help=help_text)
        sub.set_defaults(func=func)
        return sub

    sub = add("gen-num", cmd_gen_num, "generate synthetic arithmetic expressions")
    sub.add_argument("--count", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", required=True)
    sub.add_argument("--min-value", dest="min_value")
    sub.add_argument("--max-value", dest="max_value")
    sub.add_argument("--max-frac-digits", dest="max_frac_digits", type=int)
    sub.add_argument("--families", help="comma list of family[=weight]")
    sub.add_argument("--emit", choices=["examples", "raw"])
    sub.add_argument("--config")
    sub.add_argument("--dump-config", dest="dump_config")

    sub = add("gen-txt", cmd_gen_txt, "generate synthetic word problems")
    sub.add_argument("--count", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", required=True)
    sub.add_argument("--min-events", dest="min_events", type=int)
    sub.add_argument("--max-events", dest="max_events", type=int)
    sub.add_argument("--max-quantity", dest="max_quantity", type=int)
    sub.add_argument("--frac-digits", dest="frac_digits", type=int)
    sub.add_argument("--vocab", help="JSON vocabulary file")
    sub.add_argument("--emit", choices=["examples", "raw"])
    sub.add_argument("--config")
    sub.add_argument("--dump-config", dest="dump_config")

    sub = add("ingest", cmd_ingest, "convert a DROP/SQuAD JSON file to tagged examples")
    sub.add_argument("--format", choices=["drop", "squad"], required=True)
    sub.add_argument("--in", dest="input", required=True)
    sub.add_argument("--out", required=True)

    sub = add("derive-class", cmd_derive_class, "derive the DROP question-type task")
    sub.add_argument("--in", dest="input", required=True)
    sub.add_argument("--out", required=True)

    sub = add("mix", cmd_mix, "compute a mixture plan; optionally sample a stream")
    sub.add_argument("--stats", required=True, help="JSON list of {name, length, scale?, cap?}")
    sub.add_argument("--temperature", "-T", default=1.0, type=float)
    sub.add_argument("--sample", type=int, help="draw this many examples")
    sub.add_argument("--sources", help="comma list of name=examples.jsonl")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--no-repeats", dest="no_repeats", action="store_true")
    sub.add_argument("--out")

    sub = add("lr-table", cmd_lr_table, "emit the learning-rate schedule as CSV")
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--batches-per-epoch", dest="batches_per_epoch", type=int)
    sub.add_argument("--warmup-start", dest="warmup_start", type=float)
    sub.add_argument("--warmup-end", dest="warmup_end", type=float)
    sub.add_argument("--decay-rate", dest="decay_rate", type=float)
    sub.add_argument("--warmup-fraction", dest="warmup_fraction", type=float)
    sub.add_argument("--out")
    sub.add_argument("--config")
    sub.add_argument("--dump-config", dest="dump_config")

    sub = add("audit", cmd_audit, "report encoder/decoder truncation fractions")
    sub.add_argument("--in", dest="input", required=True)
    sub.add_argument("--encoder-max", dest="encoder_max", default=512)
    sub.add_argument("--decoder-max", dest="decoder_max", default=54)
    sub.add_argument("--out")

    sub = add("score", cmd_score, "score predictions against DROP gold answers")
    sub.add_argument("--gold", required=True, help="DROP-layout JSON file")
    sub.add_argument("--pred", required=True, help="JSONL of {id, prediction}")
    sub.add_argument("--delimiter", default="; ")
    sub.add_argument("--out")

    sub = add("pipeline", cmd_pipeline, "list built-in pipelines or expand one")
    sub.add_argument("--list", action="store_true")
    sub.add_argument("--name")
    sub.add_argument("--spec", help="JSON pipeline spec file")
    sub.add_argument("--stats")
    sub.add_argument("--batch-size", dest="batch_size", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out")

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except (ConfigError, ValidationError, ParseError, ToolkitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse --help / --version
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""End-to-end demo: build a small training-data drop with the CLI.

Generates NUM and TXT corpora, ingests a tiny DROP-layout file, derives
the classification task, computes a temperature-scaled mixture and samples
a multitask stream, emits the learning-rate table, expands the multitask
pipeline, audits truncation, and scores a trivial self-prediction run.

Usage: python scripts/build_demo_corpus.py [out_dir]
"""

import json
import sys
from pathlib import Path

from numtext.cli import run

DEMO_DROP = {
    "history_1": {
        "passage": (
            "In March 1768, Ming Rui began his retreat, pursued by a Burmese "
            "army of 10,000 men and 2000 cavalry."
        ),
        "qa_pairs": [
            {
                "question": "How many more men did Ming Rui have than cavalry?",
                "query_id": "demo-1",
                "answer": {"number": "8000", "spans": [], "date": {"day": "", "month": "", "year": ""}},
                "validated_answers": [],
            },
            {
                "question": "In which month did the retreat begin?",
                "query_id": "demo-2",
                "answer": {"number": "", "spans": [], "date": {"day": "", "month": "March", "year": "1768"}},
                "validated_answers": [],
            },
            {
                "question": "Who pursued Ming Rui?",
                "query_id": "demo-3",
                "answer": {"number": "", "spans": ["a Burmese army"], "date": {"day": "", "month": "", "year": ""}},
                "validated_answers": [],
            },
        ],
    }
}


def check(argv):
    code = run(argv)
    if code != 0:
        raise SystemExit(f"command failed ({code}): {' '.join(argv)}")


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
    out.mkdir(parents=True, exist_ok=True)
    seed = "7"

    num = out / "num.jsonl"
    txt = out / "txt.jsonl"
    check(["gen-num", "--count", "2000", "--seed", seed, "--out", str(num)])
    check(["gen-txt", "--count", "2000", "--seed", seed, "--out", str(txt)])

    drop_file = out / "drop_mini.json"
    drop_file.write_text(json.dumps(DEMO_DROP, indent=2), encoding="utf-8")
    drop_examples = out / "drop.jsonl"
    drop_class = out / "drop_class.jsonl"
    check(["ingest", "--format", "drop", "--in", str(drop_file), "--out", str(drop_examples)])
    check(["derive-class", "--in", str(drop_file), "--out", str(drop_class)])

    stats = out / "stats.json"
    stats.write_text(
        json.dumps([{"name": "num", "length": 2000}, {"name": "txt", "length": 2000}]),
        encoding="utf-8",
    )
    check(["mix", "--stats", str(stats), "--temperature", "10", "--out", str(out / "plan.json")])
    check(
        [
            "mix", "--stats", str(stats), "--temperature", "10",
            "--sample", "1000", "--sources", f"num={num},txt={txt}",
            "--seed", seed, "--out", str(out / "pretrain_stream.jsonl"),
        ]
    )

    check(["lr-table", "--epochs", "10", "--batches-per-epoch", "100", "--out", str(out / "lr.csv")])

    full_stats = out / "full_stats.json"
    full_stats.write_text(
        json.dumps(
            [
                {"name": "DROP", "length": 96_000},
                {"name": "DROP-class", "length": 96_000},
                {"name": "NUM", "length": 1_000_000},
                {"name": "TXT", "length": 2_000_000},
                {"name": "SQuAD", "length": 87_599},
            ]
        ),
        encoding="utf-8",
    )
    check(
        [
            "pipeline", "--name", "multitask", "--stats", str(full_stats),
            "--batch-size", "32", "--seed", seed, "--out", str(out / "multitask_plan.json"),
        ]
    )

    check(["audit", "--in", str(out / "pretrain_stream.jsonl"), "--out", str(out / "audit.json")])

    predictions = out / "predictions.jsonl"
    with open(drop_examples, "r", encoding="utf-8") as handle:
        rows = [json.loads(line) for line in handle if line.strip()]
    with open(predictions, "w", encoding="utf-8") as handle:
        for row in rows:
            if "source_id" in row:
                handle.write(json.dumps({"id": row["source_id"], "prediction": row["target"]}) + "\n")
    check(["score", "--gold", str(drop_file), "--pred", str(predictions), "--out", str(out / "report.json")])

    print(f"demo artifacts in {out}/:")
    for path in sorted(out.iterdir()):
        print(f"  {path.name}")


if __name__ == "__main__":
    main()

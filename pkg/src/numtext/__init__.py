"""Deterministic toolkit for numeric-reasoning-over-text training data:
synthetic arithmetic (NUM) and word-problem (TXT) generation, DROP/SQuAD
ingestion with prefix-tagged formatting, temperature-scaled multitask
mixing, warmup/inverse-decay learning-rate schedules, and DROP-style
EM / numeracy-gated F1 scoring."""

__version__ = "0.1.0"

"""Bundled sample languages and fixtures."""

from __future__ import annotations

from importlib import resources

from ..model import load_bundle

LANGUAGES = ("expr", "logLang", "stateMachine")
FIXTURES = ("ex1", "ex2", "ex3", "postorder_gap", "straight_line", "left_rec")


def sample_path(name: str):
    return resources.files(__name__).joinpath(f"{name}.json")


def sample_text(name: str) -> str:
    return sample_path(name).read_text(encoding="utf-8")


def load_sample(name: str):
    return load_bundle(sample_text(name))


def corpus() -> dict:
    """Every well-formed sample, by name."""
    return {name: load_sample(name) for name in LANGUAGES + FIXTURES}

"""Bundled corpus quivers."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import QuiverParseError
from .quiver import Quiver, load_quiver, quiver_from_json

CORPUS = ("jordan", "a2", "a3", "kronecker", "affine_a2", "two_loop", "a2_loop")


def corpus_path(name: str):
    return resources.files("kacbps").joinpath("corpus", f"{name}.json")


def corpus_entry(name: str) -> dict:
    if name not in CORPUS:
        raise QuiverParseError(f"unknown corpus quiver {name!r}; choose from {', '.join(CORPUS)}")
    return json.loads(corpus_path(name).read_text(encoding="utf-8"))


def corpus_quiver(name: str) -> Quiver:
    return quiver_from_json(corpus_entry(name))


def resolve_quiver(source: str) -> Quiver:
    """A path to a quiver JSON file, or the name of a bundled quiver."""
    path = Path(source)
    if path.exists():
        return load_quiver(path)
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    if stem in CORPUS:
        return corpus_quiver(stem)
    raise QuiverParseError(f"no quiver file or corpus entry named {source!r}")

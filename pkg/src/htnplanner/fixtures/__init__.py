"""Bundled domain and problem files (.hddl-lite) and benchmark suites."""

from importlib import resources
from pathlib import Path


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def names(suffix: str = ".hddl-lite") -> list:
    return sorted(p.name for p in resources.files(__name__).iterdir() if p.name.endswith(suffix))

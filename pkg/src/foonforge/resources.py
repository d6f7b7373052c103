"""Access to data files shipped inside the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def data_path(*parts: str) -> Path:
    """Filesystem path of a packaged data file or directory."""
    root = resources.files("foonforge") / "data"
    for part in parts:
        root = root / part
    return Path(str(root))


def read_data_text(*parts: str) -> str:
    return data_path(*parts).read_text(encoding="utf-8")

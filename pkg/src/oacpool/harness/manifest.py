"""Dataset manifests: a list of feature files with labels and class names.

Format (one manifest per split)::

    classes=rising,falling
    split=train
    rising_0000.txt 0
    falling_0000.txt 1

``classes=`` is required; ``split=`` is optional.  Entry lines hold a path
and a label separated by whitespace (the label is the last token).  Paths
are resolved relative to the manifest's directory.  Blank lines and lines
starting with '#' are ignored.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ParseError, ShapeMismatchError
from ..sequences import LabeledSequence
from .featfile import load_features


@dataclass
class DatasetManifest:
    """Entries of (resolved path, label) plus class names and a split tag."""

    entries: list[tuple[Path, int]]
    class_names: tuple[str, ...]
    split_tag: str = ""

    def __post_init__(self):
        if not self.class_names:
            raise ValueError("a manifest needs at least one class name")
        self.class_names = tuple(self.class_names)
        for path, label in self.entries:
            if not 0 <= label < len(self.class_names):
                raise ValueError(
                    f"label {label} out of range for {len(self.class_names)} classes ({path})"
                )

    @property
    def num_classes(self) -> int:
        return len(self.class_names)


def load_manifest(path) -> DatasetManifest:
    """Parse a manifest; every referenced feature file must exist."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    class_names: tuple[str, ...] | None = None
    split_tag = ""
    entries: list[tuple[Path, int]] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("classes="):
            names = tuple(n for n in stripped[len("classes=") :].split(",") if n)
            if not names:
                raise ParseError(f"{path}: line {lineno}: empty class list")
            class_names = names
            continue
        if stripped.startswith("split="):
            split_tag = stripped[len("split=") :]
            continue
        pieces = stripped.rsplit(None, 1)
        if len(pieces) != 2:
            raise ParseError(
                f"{path}: line {lineno}: expected '<path> <label>', got {stripped!r}"
            )
        entry_path, label_text = pieces
        try:
            label = int(label_text)
        except ValueError:
            raise ParseError(
                f"{path}: line {lineno}: label {label_text!r} is not an integer"
            ) from None
        resolved = (path.parent / entry_path).resolve()
        if not resolved.is_file():
            raise ParseError(f"{path}: line {lineno}: no such feature file: {resolved}")
        entries.append((resolved, label))
    if class_names is None:
        raise ParseError(f"{path}: missing required 'classes=' line")
    if not entries:
        raise ParseError(f"{path}: manifest lists no feature files")
    try:
        return DatasetManifest(entries, class_names, split_tag)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write a manifest; entry paths are stored relative to the manifest."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("classes=" + ",".join(manifest.class_names) + "\n")
        if manifest.split_tag:
            fh.write(f"split={manifest.split_tag}\n")
        for entry_path, label in manifest.entries:
            rel = os.path.relpath(entry_path, path.parent)
            fh.write(f"{rel} {label}\n")


def load_dataset(manifest: DatasetManifest) -> list[LabeledSequence]:
    """Load every entry; all sequences must share one feature dimensionality."""
    data = []
    feature_dim = None
    for entry_path, label in manifest.entries:
        seq = load_features(entry_path)
        if feature_dim is None:
            feature_dim = seq.num_features
        elif seq.num_features != feature_dim:
            raise ShapeMismatchError(
                f"{entry_path}: has {seq.num_features} features, dataset uses {feature_dim}"
            )
        data.append(LabeledSequence(seq, label))
    return data


def labeled_frames(data: list[LabeledSequence]) -> list[tuple[np.ndarray, int]]:
    """Flatten sequences into (frame vector, label) pairs for signature building."""
    return [(frame, item.label) for item in data for frame in item.sequence.frames]

# This code is part of fakp and is licensed under the MIT license.
"""Dataset manifests: one ``id label path`` line per sample, paths relative
to the manifest."""
from __future__ import annotations

import pathlib
from dataclasses import dataclass
from typing import Iterable

from fakp.exceptions import ManifestParseError
from .shapes import LabeledCloud
from .xyz import PathLike, load_xyz, save_xyz


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    label: int
    path: str


def write_manifest(path: PathLike, entries: Iterable[ManifestEntry]) -> None:
    with open(path, "w") as f:
        for entry in entries:
            f.write(f"{entry.id} {entry.label} {entry.path}\n")


def read_manifest(path: PathLike) -> list[ManifestEntry]:
    entries = []
    with open(path, "r") as f:
        for lineno, line in enumerate(f, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 3:
                errmsg = f"expected 'id label path', got '{line.strip()}'"
                raise ManifestParseError(errmsg, lineno)
            sample_id, label, rel = fields
            try:
                label = int(label)
            except ValueError:
                raise ManifestParseError(f"label '{label}' is not an integer",
                                         lineno) from None
            entries.append(ManifestEntry(sample_id, label, rel))
    return entries


def save_split(directory: PathLike, samples: Iterable[LabeledCloud],
               manifest_name: str = "manifest.txt") -> pathlib.Path:
    """Write every sample as ``<directory>/<id>.xyz`` plus a manifest."""
    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for sample in samples:
        name = f"{sample.id}.xyz"
        save_xyz(directory / name, sample.cloud)
        entries.append(ManifestEntry(sample.id, sample.label, name))
    manifest = directory / manifest_name
    write_manifest(manifest, entries)
    return manifest


def load_manifest_dataset(path: PathLike, d: int = 3) -> list[LabeledCloud]:
    """Load every cloud listed in a manifest, in manifest order."""
    root = pathlib.Path(path).parent
    return [LabeledCloud(load_xyz(root / entry.path, d), entry.label, entry.id)
            for entry in read_manifest(path)]

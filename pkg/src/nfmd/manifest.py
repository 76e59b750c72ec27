"""Run manifests: provenance records emitted alongside every output.

Two manifests describing the same inputs, configuration, and seed imply
byte-identical output files; the recorded output digests make that
checkable without re-reading the data.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

IDENTITY_FIELDS = ("command", "config_hash", "seed", "input_digest", "version", "outputs")


def _version() -> str:
    from . import __version__

    return __version__


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def config_hash(obj) -> str:
    """Stable digest of a JSON-serializable configuration description."""
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, default=repr).encode()
    ).hexdigest()


def write_manifest(
    path,
    command: list,
    cfg_hash: str,
    seed,
    input_digest: str,
    outputs: dict,
    wall_time_s: float,
) -> dict:
    """Write the manifest JSON next to a command's outputs.

    outputs maps output filenames to their sha256 digests. wall_time_s
    is informational and excluded from identity comparisons.
    """
    doc = {
        "command": list(command),
        "config_hash": cfg_hash,
        "seed": seed,
        "input_digest": input_digest,
        "version": _version(),
        "outputs": {str(k): v for k, v in outputs.items()},
        "wall_time_s": wall_time_s,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return doc


def manifest_identity(doc: dict) -> dict:
    """The reproducibility-relevant subset of a manifest."""
    return {k: doc[k] for k in IDENTITY_FIELDS}


def digest_outputs(paths) -> dict:
    return {Path(p).name: sha256_file(p) for p in paths}


class Stopwatch:
    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self._start
        return False

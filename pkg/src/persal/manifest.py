"""Run manifests: a deterministic snapshot of a CLI invocation.

Every CLI run writes one next to its outputs. Re-running from a manifest
replays the stored argv (with all defaults already resolved), which together
with seeded randomness makes outputs bit-for-bit reproducible. No timestamps
are recorded, so the manifest itself is deterministic too.
"""

from __future__ import annotations

import hashlib
import json
from importlib import metadata
from pathlib import Path


def tool_version() -> str:
    try:
        return metadata.version("persal")
    except metadata.PackageNotFoundError:
        return "unknown"


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(
    path: str | Path,
    command: str,
    argv: list[str],
    config: dict,
    input_paths: list[str | Path],
) -> None:
    doc = {
        "tool": "persal",
        "tool_version": tool_version(),
        "command": command,
        "argv": list(argv),
        "config": config,
        "inputs": {str(p): file_digest(p) for p in sorted(map(str, input_paths))},
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def read_manifest(path: str | Path) -> dict:
    with open(path) as f:
        return json.load(f)

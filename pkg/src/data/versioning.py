"""Run manifests and provenance for exported experiment data."""

import hashlib
import json
import platform
import sys
from datetime import datetime
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import scipy

# Version constants
VERSION = "1.0.0"
__version__ = VERSION

MANIFEST_SUFFIX = ".manifest.json"


def get_version() -> str:
    """Get the current version string."""
    return VERSION


def manifest_path_for(output_file: Path) -> Path:
    """Return the manifest path written next to a data file."""
    return output_file.with_name(output_file.name + MANIFEST_SUFFIX)


class RunManifestManager:
    """Record what produced a data file and whether it completed."""

    def __init__(self, output_file: Path):
        """Initialize the RunManifestManager.

        Args:
            output_file: Data file the manifest describes.
        """
        self.output_file = output_file
        self.manifest_file = manifest_path_for(output_file)

    def compute_file_hash(self, file_path: Path) -> str:
        """Compute SHA-256 hash of file."""
        sha256_hash = hashlib.sha256()
        with open(file_path, "rb") as f:
            for chunk in iter(lambda: f.read(4096), b""):
                sha256_hash.update(chunk)
        return sha256_hash.hexdigest()

    def create_manifest(
        self,
        experiment: str,
        parameters: dict[str, Any],
        rows: int,
        errors: list[dict[str, Any]] | None = None,
    ) -> dict[str, Any]:
        """Create the manifest of one sweep run."""
        errors = errors or []
        exists = self.output_file.exists()
        return {
            "version": VERSION,
            "timestamp": datetime.now().isoformat(),
            "experiment": experiment,
            "status": "failed" if errors else "complete",
            "parameters": parameters,
            "output": {
                "file": str(self.output_file),
                "hash": self.compute_file_hash(self.output_file) if exists else None,
                "size_bytes": self.output_file.stat().st_size if exists else None,
                "rows": rows,
            },
            "errors": errors,
            "environment": create_environment_info(),
        }

    def save_manifest(self, manifest: dict[str, Any]) -> Path:
        """Save the manifest next to the data file."""
        with open(self.manifest_file, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, default=str)
        return self.manifest_file

    def validate_reproducibility(self, original_hash: str) -> bool:
        """Check that the data file still hashes to ``original_hash``."""
        return self.compute_file_hash(self.output_file) == original_hash

    def load_manifest(self) -> dict[str, Any] | None:
        """Load the saved manifest, if any."""
        if not self.manifest_file.exists():
            return None
        with open(self.manifest_file, encoding="utf-8") as f:
            data: dict[str, Any] = json.load(f)
        return data


def create_environment_info() -> dict[str, str]:
    """Describe the interpreter and numerical stack of the current run."""
    return {
        "python_version": sys.version.split()[0],
        "platform": platform.platform(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }

"""Advisory on-disk cache of Kac polynomials.

Entries are keyed by (quiver hash, d, class, method). A file that cannot be
read is reported with a warning and ignored; results are then recomputed.
"""

from __future__ import annotations

import json
import os
import tempfile
import warnings
from pathlib import Path
from typing import Sequence

from ..quiver import Quiver
from .polynomial import KacPolynomial

FORMAT = 1


class KacCache:
    def __init__(self, path: str | Path | None):
        self.path = Path(path) if path else None
        self.entries: dict[str, list[int]] = {}
        self.dirty = False
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self):
        try:
            data = json.loads(self.path.read_text())
            if data.get("format") != FORMAT or not isinstance(data.get("entries"), dict):
                raise ValueError("unexpected layout")
            entries = {}
            for key, coeffs in data["entries"].items():
                if not isinstance(coeffs, list) or not all(isinstance(c, int) for c in coeffs):
                    raise ValueError(f"bad entry {key}")
                entries[str(key)] = coeffs
            self.entries = entries
        except (OSError, ValueError, AttributeError) as exc:
            warnings.warn(f"ignoring unreadable cache {self.path}: {exc}", RuntimeWarning, stacklevel=3)
            self.entries = {}

    @staticmethod
    def key(q: Quiver, d: Sequence[int], cls: str, method: str) -> str:
        return f"{q.canonical_hash()}|{','.join(map(str, d))}|{cls}|{method}"

    def get(self, q: Quiver, d: Sequence[int], cls: str, method: str) -> KacPolynomial | None:
        coeffs = self.entries.get(self.key(q, d, cls, method))
        if coeffs is None:
            return None
        return KacPolynomial.from_coefficients(q, d, coeffs)

    def put(self, q: Quiver, d: Sequence[int], cls: str, method: str, poly: KacPolynomial):
        self.entries[self.key(q, d, cls, method)] = [int(c) for c in poly.coefficients]
        self.dirty = True

    def save(self):
        if self.path is None or not self.dirty:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        payload = json.dumps({"format": FORMAT, "entries": dict(sorted(self.entries.items()))}, indent=1)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".kaccache")
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, self.path)
        self.dirty = False

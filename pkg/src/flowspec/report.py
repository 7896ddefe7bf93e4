"""Plain ``key: value`` reports with dotted keys, one entry per line."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return "none"
    return str(v)


class Report:
    """Ordered key-value document.

    Each section records the module version and seed that produced it, so every
    numeric entry under ``prefix.`` is tagged by ``prefix.module`` and
    ``prefix.seed``.
    """

    def __init__(self):
        self.entries: list[tuple[str, str]] = []

    def add(self, key: str, value) -> None:
        if any(k == key for k, _ in self.entries):
            raise KeyError(f"duplicate report key {key!r}")
        self.entries.append((key, format_value(value)))

    def section(self, prefix: str, record: dict, module: str | None = None, seed: int | None = None) -> None:
        record = dict(record)
        module = record.pop("module", module)
        seed = record.pop("seed", seed)
        if module is not None:
            self.add(f"{prefix}.module", module)
        if seed is not None:
            self.add(f"{prefix}.seed", seed)
        for k, v in record.items():
            self.add(f"{prefix}.{k}", v)

    def __getitem__(self, key: str) -> str:
        for k, v in self.entries:
            if k == key:
                return v
        raise KeyError(key)

    def to_text(self) -> str:
        return "".join(f"{k}: {v}\n" for k, v in self.entries)

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())


def parse_report(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, _, value = line.partition(": ")
        out[key] = value
    return out

"""Structured, human-diffable text reports.

A report is a header of `key: value` lines followed by named sections,
each a tab-separated table with a header row. Field order is stable, so
reruns on unchanged inputs differ only in the generated_at line. The
first line carries the schema version for machine consumers.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .core import DataError

MAGIC = "phonoscore-report"
SCHEMA_VERSION = "1"


@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list[tuple[str, ...]] = field(default_factory=list)

    def add(self, *values) -> None:
        row = tuple(str(v) for v in values)
        if len(row) != len(self.columns):
            raise DataError(
                f"row width {len(row)} does not match {len(self.columns)} columns"
            )
        self.rows.append(row)

    def column(self, name: str) -> list[str]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def as_dicts(self) -> list[dict[str, str]]:
        return [dict(zip(self.columns, row)) for row in self.rows]


@dataclass
class Report:
    command: str
    meta: dict[str, str] = field(default_factory=dict)
    sections: dict[str, Table] = field(default_factory=dict)

    def section(self, name: str, columns) -> Table:
        table = Table(tuple(columns))
        self.sections[name] = table
        return table

    def render(self) -> str:
        lines = [f"{MAGIC}\t{SCHEMA_VERSION}", f"command: {self.command}"]
        for key, value in self.meta.items():
            lines.append(f"{key}: {value}")
        for name, table in self.sections.items():
            lines.append("")
            lines.append(f"[{name}]")
            lines.append("\t".join(table.columns))
            for row in table.rows:
                lines.append("\t".join(row))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        atomic_write_text(path, self.render())

    @classmethod
    def read(cls, path) -> "Report":
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if not lines or not lines[0].startswith(MAGIC):
            raise DataError(f"{path}: not a report file")
        magic = lines[0].split("\t")
        if len(magic) != 2 or magic[1] != SCHEMA_VERSION:
            raise DataError(f"{path}: unsupported report version {lines[0]!r}")
        report = cls(command="")
        current: Table | None = None
        pending_section: str | None = None
        for line in lines[1:]:
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                pending_section = line[1:-1]
                current = None
                continue
            if pending_section is not None:
                current = report.section(pending_section, line.split("\t"))
                pending_section = None
                continue
            if current is not None:
                current.rows.append(tuple(line.split("\t")))
                continue
            key, _, value = line.partition(": ")
            if key == "command":
                report.command = value
            else:
                report.meta[key] = value
        return report


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-report-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")

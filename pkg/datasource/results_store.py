"""
Deterministic report writer and loader for the bundled sample data.

Reports are written with a fixed key order, floats at 17 significant digits,
UTF-8 and LF line endings, so identical runs give byte-identical files.
"""
import csv
import io
import json
import logging
import math
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

from pydantic import BaseModel

from models.request_models import LemmaPreset

logger = logging.getLogger(__name__)

SAMPLE_DATA = Path(__file__).parent / "SampleData"


def format_float(value: float) -> str:
    if not math.isfinite(value):
        return "null"
    text = format(value, ".17g")
    # keep floats recognizable as floats
    if all(c not in text for c in ".e"):
        text += ".0"
    return text


def to_json(value: Any, indent: int = 0) -> str:
    """Serialize plain data with deterministic float formatting."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(value, BaseModel):
        value = value.model_dump(mode="python", by_alias=True)
    if isinstance(value, Enum):
        value = value.value
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {to_json(v, indent + 1)}"
                 for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(to_json(v) for v in value) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 1) for v in value) + "\n" + pad + "]"
    if hasattr(value, "tolist"):
        return to_json(value.tolist(), indent)
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


class ResultsStore:
    """Writes reports to a file or to stdout."""

    def __init__(self, output: Optional[str] = None):
        self.output = output

    def write_text(self, text: str) -> None:
        if self.output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        path = Path(self.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.info(f"Wrote {path}")

    def write_report(self, report: BaseModel) -> None:
        self.write_text(to_json(report) + "\n")

    def write_table(self, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
        self.write_text(to_csv(header, rows))


def load_sample(name: str) -> Any:
    """Parsed JSON from the bundled sample data directory."""
    path = SAMPLE_DATA / name
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def load_presets(lemma: str) -> List[LemmaPreset]:
    """Validated presets of one identity, in file order."""
    catalog = load_sample("lemma_presets.json")
    if lemma not in catalog:
        raise KeyError(f"No presets for {lemma!r}")
    return [LemmaPreset.model_validate(entry) for entry in catalog[lemma]]

"""Domain model, in-memory repository, and CSV ingestion for circuit test data.

The repository holds circuits, campaigns and measurements keyed by id, in
file/insertion order, and guarantees referential integrity after every
successful operation. Readers may share it freely; the only mutation path
(:meth:`Repository.annotate`) is serialized through a single writer lock and
optionally journaled to an append-only JSONL file.
"""

from __future__ import annotations

import csv
import json
import math
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import (
    DanglingReference,
    MalformedRow,
    MissingFile,
    UnknownField,
    UnknownMeasurement,
)

SECTORS = ("S12", "S23", "S34", "S45", "S56", "S67", "S78", "S81")


class MachineState(str, Enum):
    COLD = "cold"
    WARM = "warm"
    COOLING_DOWN = "cooling_down"
    WARMING_UP = "warming_up"


class TestType(str, Enum):
    TP4 = "TP4"
    DOC = "DOC"
    MIC = "MIC"
    HVQ = "HVQ"


class Variant(str, Enum):
    M1 = "M1"
    M2 = "M2"


class Verdict(str, Enum):
    ASSURED = "assured"
    TEST_ONLY = "test_only"
    SUSPECT = "suspect"


def parse_utc(s: str) -> datetime:
    """Parse an ISO-8601 UTC timestamp ('Z' or explicit offset)."""
    raw = s.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {s!r} lacks a UTC offset")
    return dt.astimezone(timezone.utc)


def format_utc(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Circuit:
    circuit_id: str
    circuit_type: str
    sector: str
    magnet_position: str
    manufacturer: str

    def __post_init__(self):
        if self.sector not in SECTORS:
            raise ValueError(f"unknown sector {self.sector!r}")


@dataclass(frozen=True)
class Campaign:
    campaign_id: str
    label: str
    machine_state: MachineState
    started_at: datetime


@dataclass(frozen=True)
class Sample:
    """One acquired point; a missing channel value is None, never a sentinel."""

    t_s: float
    voltage_V: float | None = None
    current_A: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.t_s) or self.t_s < 0:
            raise ValueError(f"sample time must be finite and >= 0, got {self.t_s}")


@dataclass(frozen=True)
class Annotation:
    verdict: Verdict
    author: str
    note: str
    created_at: datetime


@dataclass
class Measurement:
    measurement_id: str
    circuit_id: str
    campaign_id: str
    test_type: TestType
    variant: Variant
    operator: str
    performed_at: datetime
    tunnel_temperature_C: float | None = None
    tunnel_humidity_pct: float | None = None
    samples: tuple[Sample, ...] = ()
    annotation: Annotation | None = None

    def __post_init__(self):
        self.samples = tuple(self.samples)
        for a, b in zip(self.samples, self.samples[1:]):
            if not b.t_s > a.t_s:
                raise ValueError(
                    f"sample times must be strictly increasing in {self.measurement_id}"
                )


_DISTINCT_FIELDS = ("circuit_type", "sector", "test_type", "campaign_id")


class Repository:
    """In-memory store with query, distinct-value and annotation operations."""

    def __init__(self, journal_path: str | Path | None = None):
        self.circuits: dict[str, Circuit] = {}
        self.campaigns: dict[str, Campaign] = {}
        self.measurements: dict[str, Measurement] = {}
        self.journal_path = Path(journal_path) if journal_path else None
        self._write_lock = threading.Lock()

    # --- construction ---

    def add_circuit(self, c: Circuit) -> None:
        if c.circuit_id in self.circuits:
            raise ValueError(f"duplicate circuit_id {c.circuit_id!r}")
        self.circuits[c.circuit_id] = c

    def add_campaign(self, c: Campaign) -> None:
        if c.campaign_id in self.campaigns:
            raise ValueError(f"duplicate campaign_id {c.campaign_id!r}")
        self.campaigns[c.campaign_id] = c

    def add_measurement(self, m: Measurement) -> None:
        if m.measurement_id in self.measurements:
            raise ValueError(f"duplicate measurement_id {m.measurement_id!r}")
        if m.circuit_id not in self.circuits:
            raise DanglingReference(m.circuit_id, f"measurement {m.measurement_id}")
        if m.campaign_id not in self.campaigns:
            raise DanglingReference(m.campaign_id, f"measurement {m.measurement_id}")
        self.measurements[m.measurement_id] = m

    def counts(self) -> tuple[int, int, int]:
        return (len(self.circuits), len(self.campaigns), len(self.measurements))

    # --- queries ---

    def query_measurements(
        self,
        circuit_type: str | None = None,
        circuit_id: str | None = None,
        test_type: TestType | str | None = None,
        campaign_id: str | None = None,
    ) -> list[Measurement]:
        """All measurements matching every supplied predicate, ordered by
        (performed_at, measurement_id)."""
        if isinstance(test_type, str):
            test_type = TestType(test_type)
        out = []
        for m in self.measurements.values():
            if circuit_id is not None and m.circuit_id != circuit_id:
                continue
            if campaign_id is not None and m.campaign_id != campaign_id:
                continue
            if test_type is not None and m.test_type != test_type:
                continue
            if circuit_type is not None:
                if self.circuits[m.circuit_id].circuit_type != circuit_type:
                    continue
            out.append(m)
        out.sort(key=lambda m: (m.performed_at, m.measurement_id))
        return out

    def distinct_values(self, fld: str) -> list[str]:
        """Sorted, de-duplicated values of a categorical field.

        circuit_type and sector are drawn from circuits, test_type from
        measurements, campaign_id from campaigns.
        """
        if fld not in _DISTINCT_FIELDS:
            raise UnknownField(f"no distinct-values support for field {fld!r}")
        if fld == "circuit_type":
            vals = {c.circuit_type for c in self.circuits.values()}
        elif fld == "sector":
            vals = {c.sector for c in self.circuits.values()}
        elif fld == "test_type":
            vals = {m.test_type.value for m in self.measurements.values()}
        else:
            vals = set(self.campaigns.keys())
        return sorted(vals)

    # --- mutation ---

    def annotate(self, measurement_id: str, annotation: Annotation) -> Measurement:
        """Attach a cleansing verdict; last write wins. Journaled if configured."""
        with self._write_lock:
            m = self._apply_annotation(measurement_id, annotation)
            if self.journal_path is not None:
                line = json.dumps(
                    {
                        "measurement_id": measurement_id,
                        "verdict": annotation.verdict.value,
                        "author": annotation.author,
                        "note": annotation.note,
                        "created_at": format_utc(annotation.created_at),
                    },
                    sort_keys=True,
                )
                with open(self.journal_path, "a", encoding="utf-8") as f:
                    f.write(line + "\n")
            return m

    def _apply_annotation(self, measurement_id: str, annotation: Annotation) -> Measurement:
        m = self.measurements.get(measurement_id)
        if m is None:
            raise UnknownMeasurement(measurement_id)
        m.annotation = annotation
        return m

    def replay_journal(self, path: str | Path) -> int:
        """Re-apply an annotations journal in order; returns entries applied."""
        path = Path(path)
        if not path.exists():
            raise MissingFile(str(path))
        n = 0
        with open(path, encoding="utf-8") as f:
            for lineno, raw in enumerate(f, start=1):
                raw = raw.strip()
                if not raw:
                    continue
                try:
                    obj = json.loads(raw)
                    ann = Annotation(
                        verdict=Verdict(obj["verdict"]),
                        author=str(obj["author"]),
                        note=str(obj["note"]),
                        created_at=parse_utc(obj["created_at"]),
                    )
                    mid = obj["measurement_id"]
                except (KeyError, ValueError, TypeError) as e:
                    raise MalformedRow(str(path), lineno, f"bad journal entry: {e}") from e
                with self._write_lock:
                    self._apply_annotation(mid, ann)
                n += 1
        return n


# --- CSV ingestion -----------------------------------------------------

_CIRCUIT_HEADER = ["circuit_id", "circuit_type", "sector", "magnet_position", "manufacturer"]
_CAMPAIGN_HEADER = ["campaign_id", "label", "machine_state", "started_at"]
_MEASUREMENT_HEADER = [
    "measurement_id",
    "circuit_id",
    "campaign_id",
    "test_type",
    "variant",
    "operator",
    "performed_at",
    "tunnel_temperature_C",
    "tunnel_humidity_pct",
]
_SAMPLE_HEADER = ["measurement_id", "t_s", "voltage_V", "current_A"]


def _read_rows(dir_path: Path, name: str, header: list[str]) -> Iterable[tuple[int, list[str]]]:
    path = dir_path / name
    if not path.exists():
        raise MissingFile(str(path))
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            got = next(reader)
        except StopIteration:
            raise MalformedRow(name, 1, "missing header row") from None
        if got != header:
            raise MalformedRow(name, 1, f"expected header {header}, got {got}")
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedRow(name, reader.line_num, f"expected {len(header)} fields, got {len(row)}")
            yield reader.line_num, row


def _float_cell(name: str, line: int, cell: str, what: str) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise MalformedRow(name, line, f"bad {what} {cell!r}") from None
    if not math.isfinite(v):
        raise MalformedRow(name, line, f"non-finite {what} {cell!r}")
    return v


def _opt_float_cell(name: str, line: int, cell: str, what: str) -> float | None:
    if cell == "":
        return None
    return _float_cell(name, line, cell, what)


def ingest_csv(dir_path: str | Path, journal_path: str | Path | None = None) -> Repository:
    """Load a directory of circuits/campaigns/measurements/samples CSV files.

    Validates enums, timestamps, sample ordering and referential integrity;
    errors name the offending file and line. Row order is preserved, so the
    same bytes always produce the same repository iteration order.
    """
    dir_path = Path(dir_path)
    repo = Repository(journal_path=journal_path)

    for line, row in _read_rows(dir_path, "circuits.csv", _CIRCUIT_HEADER):
        cid, ctype, sector, pos, manu = row
        if cid in repo.circuits:
            raise MalformedRow("circuits.csv", line, f"duplicate circuit_id {cid!r}")
        if sector not in SECTORS:
            raise MalformedRow("circuits.csv", line, f"unknown sector {sector!r}")
        repo.add_circuit(Circuit(cid, ctype, sector, pos, manu))

    for line, row in _read_rows(dir_path, "campaigns.csv", _CAMPAIGN_HEADER):
        cid, label, state, started = row
        if cid in repo.campaigns:
            raise MalformedRow("campaigns.csv", line, f"duplicate campaign_id {cid!r}")
        try:
            ms = MachineState(state)
        except ValueError:
            raise MalformedRow("campaigns.csv", line, f"unknown machine_state {state!r}") from None
        try:
            at = parse_utc(started)
        except ValueError as e:
            raise MalformedRow("campaigns.csv", line, str(e)) from None
        repo.add_campaign(Campaign(cid, label, ms, at))

    pending: dict[str, Measurement] = {}
    for line, row in _read_rows(dir_path, "measurements.csv", _MEASUREMENT_HEADER):
        mid, circ, camp, ttype, var, operator, performed, temp, hum = row
        if mid in pending:
            raise MalformedRow("measurements.csv", line, f"duplicate measurement_id {mid!r}")
        if circ not in repo.circuits:
            raise DanglingReference(circ, f"measurements.csv:{line}")
        if camp not in repo.campaigns:
            raise DanglingReference(camp, f"measurements.csv:{line}")
        try:
            tt = TestType(ttype)
        except ValueError:
            raise MalformedRow("measurements.csv", line, f"unknown test_type {ttype!r}") from None
        try:
            vv = Variant(var)
        except ValueError:
            raise MalformedRow("measurements.csv", line, f"unknown variant {var!r}") from None
        try:
            at = parse_utc(performed)
        except ValueError as e:
            raise MalformedRow("measurements.csv", line, str(e)) from None
        pending[mid] = Measurement(
            measurement_id=mid,
            circuit_id=circ,
            campaign_id=camp,
            test_type=tt,
            variant=vv,
            operator=operator,
            performed_at=at,
            tunnel_temperature_C=_opt_float_cell("measurements.csv", line, temp, "tunnel_temperature_C"),
            tunnel_humidity_pct=_opt_float_cell("measurements.csv", line, hum, "tunnel_humidity_pct"),
        )

    samples: dict[str, list[Sample]] = {mid: [] for mid in pending}
    for line, row in _read_rows(dir_path, "samples.csv", _SAMPLE_HEADER):
        mid, t_s, volt, curr = row
        if mid not in pending:
            raise DanglingReference(mid, f"samples.csv:{line}")
        t = _float_cell("samples.csv", line, t_s, "t_s")
        if t < 0:
            raise MalformedRow("samples.csv", line, f"negative sample time {t}")
        acc = samples[mid]
        if acc and not t > acc[-1].t_s:
            raise MalformedRow("samples.csv", line, f"sample times not strictly increasing for {mid!r}")
        acc.append(
            Sample(
                t_s=t,
                voltage_V=_opt_float_cell("samples.csv", line, volt, "voltage_V"),
                current_A=_opt_float_cell("samples.csv", line, curr, "current_A"),
            )
        )

    for mid, m in pending.items():
        repo.add_measurement(replace(m, samples=tuple(samples[mid])))
    return repo


@dataclass(frozen=True)
class QueryFilter:
    """Convenience bundle for the four supported measurement predicates."""

    circuit_type: str | None = None
    circuit_id: str | None = None
    test_type: str | None = None
    campaign_id: str | None = None

    def apply(self, repo: Repository) -> list[Measurement]:
        return repo.query_measurements(
            circuit_type=self.circuit_type,
            circuit_id=self.circuit_id,
            test_type=self.test_type,
            campaign_id=self.campaign_id,
        )

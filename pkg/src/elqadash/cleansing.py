"""The reference dashboard: filter circuits, inspect capacitance trends, cleanse.

Widget inventory (model ids are part of the wire contract):

- type_select      circuit-type filter select box
- circuits_source  column source backing the circuits table (CircuitRow columns)
- circuits_table   sortable table of circuits with summary statistics
- cap_source       column source with per-measurement capacitance points
- cap_plot         scatter plot of capacitance over time, one series per variant
- activity_tap     tap tool carrying the external activity URL template
- detail_panel     text panel describing the current selection
- verdict_select   cleansing verdict select box (assured / test_only / suspect)

Measurements annotated test_only are excluded from both the statistics table
and the plot; suspect measurements stay visible but flagged. Measurements
whose capacitance cannot be computed are omitted from the plot and named in
the source's warnings list instead of failing the whole dashboard.
"""

from __future__ import annotations

import urllib.parse
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Callable, NamedTuple

import numpy as np

from .dashboard import Dashboard, register_dashboard
from .document import Document
from .errors import (
    BadTemplate,
    ElqaError,
    InvalidPayload,
    UnknownCircuit,
    UnknownParameter,
)
from .features import capacitance, ols_fit
from .store import Annotation, Measurement, Repository, TestType, Verdict, format_utc

ALL_OPTION = "(all)"
DEFAULT_ACTIVITY_URL_TEMPLATE = "https://activities.example/measurements/{measurement_id}"
_INITIAL_DETAIL = "Select a circuit, then a measurement point."

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class CircuitRow:
    circuit_id: str
    circuit_type: str
    sector: str
    n_measurements: int
    mean_capacitance_F: float | None = None
    std_capacitance_F: float | None = None
    latest_capacitance_F: float | None = None
    trend_slope_F_per_day: float | None = None


class CapPoint(NamedTuple):
    performed_at: datetime
    capacitance_F: float
    measurement_id: str
    suspect: bool


def _is_test_only(m: Measurement) -> bool:
    return m.annotation is not None and m.annotation.verdict == Verdict.TEST_ONLY


def _is_suspect(m: Measurement) -> bool:
    return m.annotation is not None and m.annotation.verdict == Verdict.SUSPECT


def circuit_stats(repo: Repository, circuit_type: str | None = None) -> list[CircuitRow]:
    """One row per matching circuit, ordered by circuit_id.

    n_measurements counts the circuit's HVQ measurements not annotated
    test_only; the capacitance statistics run over the subset of those whose
    capacitance extraction succeeds (std is the sample standard deviation and
    needs >= 2 values, the per-day trend slope needs >= 3).
    """
    rows = []
    for cid in sorted(repo.circuits):
        circuit = repo.circuits[cid]
        if circuit_type is not None and circuit.circuit_type != circuit_type:
            continue
        pool = [
            m
            for m in repo.query_measurements(circuit_id=cid, test_type=TestType.HVQ)
            if not _is_test_only(m)
        ]
        caps: list[tuple[datetime, str, float]] = []
        for m in pool:
            try:
                caps.append((m.performed_at, m.measurement_id, capacitance(m)))
            except ElqaError:
                continue
        values = [c for _, _, c in caps]
        mean = float(np.mean(values)) if values else None
        std = float(np.std(values, ddof=1)) if len(values) >= 2 else None
        latest = max(caps)[2] if caps else None
        trend = None
        if len(caps) >= 3:
            t0 = caps[0][0]
            days = [(t - t0).total_seconds() / SECONDS_PER_DAY for t, _, _ in caps]
            if len(set(days)) >= 2:
                trend = ols_fit(days, values)[0]
        rows.append(
            CircuitRow(
                circuit_id=cid,
                circuit_type=circuit.circuit_type,
                sector=circuit.sector,
                n_measurements=len(pool),
                mean_capacitance_F=mean,
                std_capacitance_F=std,
                latest_capacitance_F=latest,
                trend_slope_F_per_day=trend,
            )
        )
    return rows


def capacitance_series(
    repo: Repository, circuit_id: str
) -> tuple[dict[str, list[CapPoint]], list[str]]:
    """Chronological capacitance points per variant (M1, M2) for one circuit.

    test_only measurements are excluded; suspect ones carry a flag. Returns
    the series plus warnings naming measurements whose extraction failed.
    """
    if circuit_id not in repo.circuits:
        raise UnknownCircuit(circuit_id)
    series: dict[str, list[CapPoint]] = {"M1": [], "M2": []}
    warnings: list[str] = []
    for m in repo.query_measurements(circuit_id=circuit_id, test_type=TestType.HVQ):
        if _is_test_only(m):
            continue
        try:
            c = capacitance(m)
        except ElqaError as e:
            warnings.append(f"{m.measurement_id}: {e.code}")
            continue
        series[m.variant.value].append(
            CapPoint(m.performed_at, c, m.measurement_id, _is_suspect(m))
        )
    return series, warnings


def activity_link(measurement_id: str, template: str) -> str:
    """Substitute the percent-encoded measurement id into a URL template."""
    if "{measurement_id}" not in template:
        raise BadTemplate(f"template {template!r} lacks {{measurement_id}} placeholder")
    return template.replace("{measurement_id}", urllib.parse.quote(measurement_id, safe=""))


_TABLE_COLUMNS = [
    "circuit_id",
    "circuit_type",
    "sector",
    "n_measurements",
    "mean_capacitance_F",
    "std_capacitance_F",
    "latest_capacitance_F",
    "trend_slope_F_per_day",
]

_CAP_COLUMNS = ["performed_at", "capacitance_F", "measurement_id", "variant", "suspect"]


def _circuit_columns(rows: list[CircuitRow]) -> dict[str, list]:
    return {name: [getattr(r, name) for r in rows] for name in _TABLE_COLUMNS}


def _cap_columns(series: dict[str, list[CapPoint]]) -> dict[str, list]:
    cols: dict[str, list] = {name: [] for name in _CAP_COLUMNS}
    for variant in ("M1", "M2"):
        for p in series[variant]:
            cols["performed_at"].append(p.performed_at.timestamp())
            cols["capacitance_F"].append(p.capacitance_F)
            cols["measurement_id"].append(p.measurement_id)
            cols["variant"].append(variant)
            cols["suspect"].append(p.suspect)
    return cols


def _now_utc() -> datetime:
    return datetime.now(timezone.utc)


class CleansingDashboard(Dashboard):
    name = "cleansing"

    def __init__(
        self,
        repo: Repository,
        activity_url_template: str = DEFAULT_ACTIVITY_URL_TEMPLATE,
        author: str = "ui",
        clock: Callable[[], datetime] = _now_utc,
    ):
        super().__init__(repo)
        if "{measurement_id}" not in activity_url_template:
            raise BadTemplate(f"template {activity_url_template!r} lacks placeholder")
        self.activity_url_template = activity_url_template
        self.author = author
        self.clock = clock

    # --- lifecycle ---

    def create(self) -> Document:
        doc = self.document
        doc.add_model(
            "type_select",
            "select_box",
            {"title": "Circuit type", "options": self.get_parameter("circuit_type"), "value": ALL_OPTION},
        )
        data = self.get_data({})
        doc.add_model(
            "circuits_source",
            "column_data_source",
            {"columns": data["circuits_source"]["columns"], "selected_indices": [], "warnings": []},
        )
        doc.add_model(
            "circuits_table",
            "data_table",
            {"title": "Circuits", "source": "circuits_source", "columns": list(_TABLE_COLUMNS)},
        )
        doc.add_model(
            "cap_source",
            "column_data_source",
            {"columns": {name: [] for name in _CAP_COLUMNS}, "selected_indices": [], "warnings": []},
        )
        doc.add_model(
            "cap_plot",
            "scatter_plot",
            {
                "title": "Capacitance over time",
                "source": "cap_source",
                "x_field": "performed_at",
                "y_field": "capacitance_F",
                "series_field": "variant",
                "flag_field": "suspect",
            },
        )
        doc.add_model(
            "activity_tap",
            "tap_tool",
            {"plot": "cap_plot", "url_template": self.activity_url_template},
        )
        doc.add_model("detail_panel", "detail_panel", {"title": "Measurement detail", "text": _INITIAL_DETAIL})
        doc.add_model(
            "verdict_select",
            "select_box",
            {"title": "Cleansing verdict", "options": [v.value for v in Verdict], "value": ""},
        )
        doc.set_layout(
            {
                "type": "column",
                "children": [
                    {"type": "row", "children": ["type_select", "verdict_select"]},
                    "circuits_table",
                    "cap_plot",
                    "detail_panel",
                ],
            }
        )
        self._created = True
        return doc

    def setup_events(self):
        self.on("type_select", "value_change", self._handle_type_change)
        self.on("circuits_source", "select", self._handle_table_select)
        self.on("cap_source", "select", self._handle_point_select)
        self.on("cap_plot", "tap", self._handle_tap)
        self.on("verdict_select", "value_change", self._handle_verdict)
        return self.handlers

    def get_parameter(self, name: str) -> list[str]:
        field_map = {"circuit_type": "circuit_type", "sector": "sector", "campaign": "campaign_id"}
        if name not in field_map:
            raise UnknownParameter(name)
        return [ALL_OPTION] + self.repo.distinct_values(field_map[name])

    def get_data(self, filters: dict[str, Any]) -> dict[str, dict[str, Any]]:
        """Columns (plus warnings) for circuits_source and cap_source.

        filters: circuit_type (None or a concrete type) picks the table rows;
        circuit_id (None when nothing is selected) picks the plotted circuit.
        """
        circuit_type = filters.get("circuit_type")
        circuit_id = filters.get("circuit_id")
        out = {
            "circuits_source": {
                "columns": _circuit_columns(circuit_stats(self.repo, circuit_type)),
                "warnings": [],
            }
        }
        if circuit_id is not None:
            series, warnings = capacitance_series(self.repo, circuit_id)
            out["cap_source"] = {"columns": _cap_columns(series), "warnings": warnings}
        else:
            out["cap_source"] = {"columns": {name: [] for name in _CAP_COLUMNS}, "warnings": []}
        return out

    # --- current-state helpers (document is the single source of truth) ---

    def _current_type_filter(self) -> str | None:
        value = self.document.get("type_select", "value")
        return None if value in (ALL_OPTION, "") else value

    def _selected_circuit_id(self) -> str | None:
        selected = self.document.get("circuits_source", "selected_indices")
        if not selected:
            return None
        return self.document.get("circuits_source", "columns")["circuit_id"][selected[0]]

    def _selected_measurement_id(self) -> str | None:
        selected = self.document.get("cap_source", "selected_indices")
        if not selected:
            return None
        return self.document.get("cap_source", "columns")["measurement_id"][selected[0]]

    # --- handlers ---

    def _handle_type_change(self, payload: Any) -> None:
        if not isinstance(payload, str):
            raise InvalidPayload("value_change payload must be a string")
        options = self.document.get("type_select", "options")
        if payload not in options:
            raise InvalidPayload(f"{payload!r} not in type options")
        doc = self.document
        doc.set("type_select", "value", payload)
        filt = None if payload == ALL_OPTION else payload
        data = self.get_data({"circuit_type": filt})
        doc.set("circuits_source", "columns", data["circuits_source"]["columns"])
        doc.set("circuits_source", "selected_indices", [])
        doc.set("cap_source", "columns", data["cap_source"]["columns"])
        doc.set("cap_source", "selected_indices", [])
        doc.set("cap_source", "warnings", [])
        doc.set("detail_panel", "text", _INITIAL_DETAIL)

    def _check_indices(self, payload: Any, nrows: int) -> list[int]:
        if not isinstance(payload, list) or not all(
            isinstance(i, int) and not isinstance(i, bool) for i in payload
        ):
            raise InvalidPayload("select payload must be a list of row indices")
        for i in payload:
            if not 0 <= i < nrows:
                raise InvalidPayload(f"row index {i} out of range ({nrows} rows)")
        return payload

    def _handle_table_select(self, payload: Any) -> None:
        doc = self.document
        nrows = len(doc.get("circuits_source", "columns")["circuit_id"])
        indices = self._check_indices(payload, nrows)
        doc.set("circuits_source", "selected_indices", indices)
        if indices:
            cid = doc.get("circuits_source", "columns")["circuit_id"][indices[0]]
            self._refresh_cap_source(cid)
            n = doc.get("circuits_source", "columns")["n_measurements"][indices[0]]
            doc.set("detail_panel", "text", f"Circuit {cid}: {n} HVQ measurements. Select a point.")
        else:
            doc.set("cap_source", "columns", {name: [] for name in _CAP_COLUMNS})
            doc.set("cap_source", "selected_indices", [])
            doc.set("cap_source", "warnings", [])
            doc.set("detail_panel", "text", _INITIAL_DETAIL)

    def _handle_point_select(self, payload: Any) -> None:
        doc = self.document
        nrows = len(doc.get("cap_source", "columns")["measurement_id"])
        indices = self._check_indices(payload, nrows)
        doc.set("cap_source", "selected_indices", indices)
        if indices:
            doc.set("detail_panel", "text", self._point_detail(indices[0]))
        else:
            doc.set("detail_panel", "text", _INITIAL_DETAIL)

    def _handle_tap(self, payload: Any) -> None:
        if not isinstance(payload, int) or isinstance(payload, bool):
            raise InvalidPayload("tap payload must be a point index")
        doc = self.document
        nrows = len(doc.get("cap_source", "columns")["measurement_id"])
        if not 0 <= payload < nrows:
            raise InvalidPayload(f"point index {payload} out of range ({nrows} rows)")
        doc.set("cap_source", "selected_indices", [payload])
        doc.set("detail_panel", "text", self._point_detail(payload))

    def _handle_verdict(self, payload: Any) -> None:
        """Record a cleansing verdict for the selected (or named) measurement.

        Accepts either the bare verdict string from the select box or an
        object {measurement_id?, verdict, note?, author?}.
        """
        note = ""
        author = self.author
        measurement_id = None
        if isinstance(payload, str):
            verdict = payload
        elif isinstance(payload, dict):
            verdict = payload.get("verdict")
            measurement_id = payload.get("measurement_id")
            note = str(payload.get("note", ""))
            author = str(payload.get("author", self.author))
        else:
            raise InvalidPayload("verdict payload must be a string or an object")
        if verdict not in {v.value for v in Verdict}:
            raise InvalidPayload(f"unknown verdict {verdict!r}")
        if measurement_id is None:
            measurement_id = self._selected_measurement_id()
        if measurement_id is None:
            raise InvalidPayload("no measurement selected")
        self.document.set("verdict_select", "value", verdict)
        self._apply_verdict_in_batch(measurement_id, verdict, author, note)

    # --- verdict plumbing ---

    def apply_verdict(self, measurement_id: str, verdict: str, author: str | None = None, note: str = ""):
        """Programmatic equivalent of the verdict widget; returns the patch."""
        doc = self.document
        doc.begin_changes()
        try:
            doc.set("verdict_select", "value", verdict)
            self._apply_verdict_in_batch(measurement_id, verdict, author or self.author, note)
        except Exception:
            doc.abort_changes()
            raise
        return doc.commit_changes()

    def _apply_verdict_in_batch(self, measurement_id: str, verdict: str, author: str, note: str) -> None:
        ann = Annotation(
            verdict=Verdict(verdict), author=author, note=note, created_at=self.clock()
        )
        self.repo.annotate(measurement_id, ann)
        doc = self.document
        # table statistics change (test_only exclusion), plot flags/points change
        data = self.get_data({"circuit_type": self._current_type_filter()})
        doc.set("circuits_source", "columns", data["circuits_source"]["columns"])
        cid = self._selected_circuit_id()
        if cid is not None:
            keep = self._selected_measurement_id()
            self._refresh_cap_source(cid)
            cols = doc.get("cap_source", "columns")
            if keep is not None and keep in cols["measurement_id"]:
                idx = cols["measurement_id"].index(keep)
                doc.set("cap_source", "selected_indices", [idx])
                doc.set("detail_panel", "text", self._point_detail(idx))
            else:
                doc.set("cap_source", "selected_indices", [])
                doc.set("detail_panel", "text", f"Measurement {measurement_id} marked {verdict}.")

    def _refresh_cap_source(self, circuit_id: str) -> None:
        doc = self.document
        series, warnings = capacitance_series(self.repo, circuit_id)
        doc.set("cap_source", "columns", _cap_columns(series))
        doc.set("cap_source", "selected_indices", [])
        doc.set("cap_source", "warnings", warnings)

    def _point_detail(self, index: int) -> str:
        cols = self.document.get("cap_source", "columns")
        mid = cols["measurement_id"][index]
        m = self.repo.measurements[mid]
        verdict = m.annotation.verdict.value if m.annotation else "none"
        url = activity_link(mid, self.activity_url_template)
        return (
            f"Measurement {mid} ({cols['variant'][index]}) at {format_utc(m.performed_at)}\n"
            f"capacitance: {cols['capacitance_F'][index]:.6e} F\n"
            f"verdict: {verdict}\n"
            f"activity: {url}"
        )


register_dashboard("cleansing", CleansingDashboard)

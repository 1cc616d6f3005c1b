"""Server-held widget-state tree: models, layout, revisions, patches.

A Document is a map of identified model nodes (widgets, plots, data sources)
plus a layout tree and a revision counter. All post-construction mutation
happens inside a change batch: property writes are staged, validated, and
committed atomically as one Patch with exactly one revision increment, so a
client that applies every patch to a serialized snapshot mirrors the server
bit for bit.

Model kinds and their property schemas:

- select_box           options: [str], value: str in options or "", title
- column_data_source   columns: {name: equal-length list}, selected_indices,
                       warnings: [str] (per-row failures surface here rather
                       than hiding the whole source)
- data_table           source: id of a column_data_source, columns: [str], title
- line_plot / scatter_plot
                       source: id, x_field, y_field, series_field, flag_field, title
- tap_tool             plot: id of a plot, url_template
- detail_panel         title, text
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import RevisionGap, SchemaViolation, UnknownModel

KINDS = (
    "select_box",
    "data_table",
    "line_plot",
    "scatter_plot",
    "column_data_source",
    "tap_tool",
    "detail_panel",
)

EVENTS = ("value_change", "select", "tap")

# which event types make sense on which kind of model
EVENT_KINDS = {
    "value_change": ("select_box",),
    "select": ("column_data_source", "data_table"),
    "tap": ("line_plot", "scatter_plot"),
}

_SCALAR = (str, int, float, bool, type(None))


def _is_scalar_list(v: Any) -> bool:
    return isinstance(v, list) and all(isinstance(x, _SCALAR) for x in v)


def _is_str_list(v: Any) -> bool:
    return isinstance(v, list) and all(isinstance(x, str) for x in v)


def _is_column_map(v: Any) -> bool:
    return isinstance(v, dict) and all(isinstance(k, str) and _is_scalar_list(col) for k, col in v.items())


def _is_index_list(v: Any) -> bool:
    return isinstance(v, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in v)


# per-kind property type checks; cross-property constraints live in validate_model
PROPERTY_SCHEMAS: dict[str, dict[str, Callable[[Any], bool]]] = {
    "select_box": {
        "options": _is_str_list,
        "value": lambda v: isinstance(v, str),
        "title": lambda v: isinstance(v, str),
    },
    "column_data_source": {
        "columns": _is_column_map,
        "selected_indices": _is_index_list,
        "warnings": _is_str_list,
    },
    "data_table": {
        "source": lambda v: isinstance(v, str),
        "columns": _is_str_list,
        "title": lambda v: isinstance(v, str),
    },
    "line_plot": {
        "source": lambda v: isinstance(v, str),
        "x_field": lambda v: isinstance(v, str),
        "y_field": lambda v: isinstance(v, str),
        "series_field": lambda v: isinstance(v, str),
        "flag_field": lambda v: isinstance(v, str),
        "title": lambda v: isinstance(v, str),
    },
    "tap_tool": {
        "plot": lambda v: isinstance(v, str),
        "url_template": lambda v: isinstance(v, str),
    },
    "detail_panel": {
        "title": lambda v: isinstance(v, str),
        "text": lambda v: isinstance(v, str),
    },
}
PROPERTY_SCHEMAS["scatter_plot"] = PROPERTY_SCHEMAS["line_plot"]

# property name -> kind the referenced model must have
REFERENCE_PROPS = {
    "source": ("column_data_source",),
    "plot": ("line_plot", "scatter_plot"),
}


@dataclass
class ModelNode:
    model_id: str
    kind: str
    properties: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaViolation(f"unknown model kind {self.kind!r}")


@dataclass(frozen=True)
class PatchOp:
    model_id: str
    property: str
    new_value: Any


@dataclass(frozen=True)
class Patch:
    revision: int
    ops: tuple[PatchOp, ...]

    def to_wire(self) -> dict:
        return {
            "kind": "patch",
            "revision": self.revision,
            "ops": [{"model": op.model_id, "prop": op.property, "value": op.new_value} for op in self.ops],
        }

    @staticmethod
    def from_wire(obj: dict) -> "Patch":
        return Patch(
            revision=int(obj["revision"]),
            ops=tuple(PatchOp(o["model"], o["prop"], o["value"]) for o in obj["ops"]),
        )


@dataclass(frozen=True)
class UiEvent:
    model_id: str
    event: str
    payload: Any

    def __post_init__(self):
        if self.event not in EVENTS:
            raise ValueError(f"unknown event type {self.event!r}")


def _check_property_type(kind: str, prop: str, value: Any) -> None:
    schema = PROPERTY_SCHEMAS[kind]
    check = schema.get(prop)
    if check is None:
        raise SchemaViolation(f"kind {kind!r} has no property {prop!r}")
    if not check(value):
        raise SchemaViolation(f"bad value for {kind}.{prop}")


class Document:
    """Tree of model nodes with a monotone revision counter."""

    def __init__(self):
        self.models: dict[str, ModelNode] = {}
        self.layout: Any = {"type": "column", "children": []}
        self.revision = 0
        self._staged: dict[tuple[str, str], Any] | None = None

    # --- construction (revision stays 0) ---

    def add_model(self, model_id: str, kind: str, properties: dict[str, Any]) -> ModelNode:
        if model_id in self.models:
            raise SchemaViolation(f"duplicate model id {model_id!r}")
        for prop, value in properties.items():
            _check_property_type(kind, prop, value)
        node = ModelNode(model_id, kind, dict(properties))
        self.models[model_id] = node
        return node

    def set_layout(self, layout: Any) -> None:
        self.layout = layout

    # --- reads ---

    def node(self, model_id: str) -> ModelNode:
        n = self.models.get(model_id)
        if n is None:
            raise UnknownModel(model_id)
        return n

    def get(self, model_id: str, prop: str) -> Any:
        if self._staged is not None and (model_id, prop) in self._staged:
            return self._staged[(model_id, prop)]
        node = self.node(model_id)
        if prop not in node.properties:
            raise SchemaViolation(f"{model_id} has no property {prop!r}")
        return node.properties[prop]

    # --- batched mutation ---

    def begin_changes(self) -> None:
        if self._staged is not None:
            raise SchemaViolation("change batch already open")
        self._staged = {}

    def set(self, model_id: str, prop: str, value: Any) -> None:
        """Stage a property write; becomes visible to get() immediately but is
        committed to the models only when the batch commits."""
        if self._staged is None:
            raise SchemaViolation("no change batch open")
        node = self.node(model_id)
        _check_property_type(node.kind, prop, value)
        self._staged[(model_id, prop)] = value

    def abort_changes(self) -> None:
        self._staged = None

    def commit_changes(self) -> Patch:
        """Apply staged writes, validate invariants, bump revision once."""
        if self._staged is None:
            raise SchemaViolation("no change batch open")
        staged, self._staged = self._staged, None
        saved = {key: self.models[key[0]].properties.get(key[1]) for key in staged}
        for (model_id, prop), value in staged.items():
            self.models[model_id].properties[prop] = value
        try:
            validate_document(self)
        except Exception:
            for (model_id, prop), value in saved.items():
                self.models[model_id].properties[prop] = value
            raise
        self.revision += 1
        ops = tuple(
            PatchOp(model_id, prop, staged[(model_id, prop)])
            for model_id, prop in sorted(staged)
        )
        return Patch(revision=self.revision, ops=ops)

    # --- equality / copies ---

    def structurally_equal(self, other: "Document", include_revision: bool = True) -> bool:
        if include_revision and self.revision != other.revision:
            return False
        if self.layout != other.layout:
            return False
        if set(self.models) != set(other.models):
            return False
        for mid, node in self.models.items():
            o = other.models[mid]
            if node.kind != o.kind or node.properties != o.properties:
                return False
        return True


def _layout_ids(layout: Any) -> list[str]:
    if isinstance(layout, str):
        return [layout]
    if isinstance(layout, dict) and layout.get("type") in ("row", "column"):
        out = []
        for child in layout.get("children", []):
            out.extend(_layout_ids(child))
        return out
    raise SchemaViolation(f"bad layout node {layout!r}")


def validate_model(doc: Document, node: ModelNode) -> None:
    """Kind-specific cross-property invariants for one model."""
    for prop, value in node.properties.items():
        _check_property_type(node.kind, prop, value)
        ref_kinds = REFERENCE_PROPS.get(prop)
        if ref_kinds is not None:
            target = doc.models.get(value)
            if target is None:
                raise SchemaViolation(f"{node.model_id}.{prop} references unknown model {value!r}")
            if target.kind not in ref_kinds:
                raise SchemaViolation(
                    f"{node.model_id}.{prop} must reference one of {ref_kinds}, got {target.kind}"
                )
    if node.kind == "select_box":
        value = node.properties.get("value", "")
        options = node.properties.get("options", [])
        if value != "" and value not in options:
            raise SchemaViolation(f"{node.model_id}: value {value!r} not in options")
    if node.kind == "column_data_source":
        columns = node.properties.get("columns", {})
        lengths = {len(col) for col in columns.values()}
        if len(lengths) > 1:
            raise SchemaViolation(f"{node.model_id}: columns must have equal lengths, got {lengths}")
        nrows = lengths.pop() if lengths else 0
        for i in node.properties.get("selected_indices", []):
            if not 0 <= i < nrows:
                raise SchemaViolation(f"{node.model_id}: selected index {i} out of range ({nrows} rows)")


def validate_document(doc: Document) -> None:
    for node in doc.models.values():
        validate_model(doc, node)
    for mid in _layout_ids(doc.layout):
        if mid not in doc.models:
            raise SchemaViolation(f"layout references unknown model {mid!r}")


def apply_patch(doc: Document, patch: Patch) -> Document:
    """Mirror a patch onto a document at revision patch.revision - 1."""
    if patch.revision != doc.revision + 1:
        raise RevisionGap(f"patch revision {patch.revision}, document at {doc.revision}")
    saved: list[tuple[str, str, Any, bool]] = []
    for op in patch.ops:
        node = doc.node(op.model_id)
        _check_property_type(node.kind, op.property, op.new_value)
        saved.append((op.model_id, op.property, node.properties.get(op.property), op.property in node.properties))
        node.properties[op.property] = op.new_value
    try:
        validate_document(doc)
    except Exception:
        for model_id, prop, old, existed in reversed(saved):
            if existed:
                doc.models[model_id].properties[prop] = old
            else:
                doc.models[model_id].properties.pop(prop, None)
        raise
    doc.revision = patch.revision
    return doc


# --- serialization ------------------------------------------------------


def serialize_document(doc: Document) -> dict:
    """Canonical JSON-able payload: models sorted by id, property keys sorted."""
    return {
        "revision": doc.revision,
        "layout": doc.layout,
        "models": {
            mid: {
                "kind": node.kind,
                "properties": {k: node.properties[k] for k in sorted(node.properties)},
            }
            for mid, node in sorted(doc.models.items())
        },
    }


def deserialize_document(payload: dict) -> Document:
    doc = Document()
    for mid, spec in payload["models"].items():
        doc.add_model(mid, spec["kind"], spec["properties"])
    doc.set_layout(payload["layout"])
    doc.revision = int(payload["revision"])
    validate_document(doc)
    return doc


def document_json(doc: Document) -> str:
    """Byte-stable serialized form."""
    return json.dumps(serialize_document(doc), sort_keys=True, separators=(",", ":"))

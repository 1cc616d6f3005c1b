"""Dashboard lifecycle: create, setup_events, input_change, get_data, get_parameter.

A dashboard owns one Document and a registry of event handlers. Handlers run
only when a client event is dispatched through input_change; server-side
mutations never re-enter the handler table, so there are no feedback loops.
Each handled event commits exactly one patch (one revision increment), with
all property writes coalesced.
"""

from __future__ import annotations

from typing import Any, Callable

from .document import Document, EVENT_KINDS, Patch, UiEvent
from .errors import DuplicateRegistration, InvalidPayload, NoHandler
from .store import Repository

Handler = Callable[[Any], None]


class Dashboard:
    """Base class; concrete dashboards populate the document and handlers."""

    name = "dashboard"

    def __init__(self, repo: Repository):
        self.repo = repo
        self.document = Document()
        self.handlers: dict[tuple[str, str], Handler] = {}
        self._created = False

    # --- lifecycle ---

    def create(self) -> Document:
        """Build all models and load initial data; revision stays 0."""
        raise NotImplementedError

    def setup_events(self) -> dict[tuple[str, str], Handler]:
        """Register every widget callback; returns the registry."""
        raise NotImplementedError

    def get_data(self, filters: dict[str, Any]) -> dict[str, dict[str, Any]]:
        """Column payloads per data source for the given filters."""
        raise NotImplementedError

    def get_parameter(self, name: str) -> list[str]:
        """Option strings for a named selection widget."""
        raise NotImplementedError

    # --- event plumbing ---

    def on(self, model_id: str, event: str, handler: Handler) -> None:
        key = (model_id, event)
        if key in self.handlers:
            raise DuplicateRegistration(f"handler already registered for {key}")
        node = self.document.node(model_id)
        if node.kind not in EVENT_KINDS[event]:
            raise InvalidPayload(f"event {event!r} not valid for kind {node.kind!r}")
        self.handlers[key] = handler

    def input_change(self, event: UiEvent) -> Patch:
        """Dispatch one client event; returns the single coalesced patch."""
        handler = self.handlers.get((event.model_id, event.event))
        if handler is None:
            raise NoHandler(f"no handler for ({event.model_id}, {event.event})")
        self.document.begin_changes()
        try:
            handler(event.payload)
        except Exception:
            self.document.abort_changes()
            raise
        return self.document.commit_changes()


_DASHBOARDS: dict[str, Callable[..., Dashboard]] = {}


def register_dashboard(name: str, factory: Callable[..., Dashboard]) -> None:
    _DASHBOARDS[name] = factory


def dashboard_factory(name: str) -> Callable[..., Dashboard] | None:
    return _DASHBOARDS.get(name)


def build_dashboard(factory: Callable[..., Dashboard], *args, **kwargs) -> Dashboard:
    """Run the full lifecycle: construct, create, wire events."""
    dash = factory(*args, **kwargs)
    dash.create()
    dash.setup_events()
    return dash

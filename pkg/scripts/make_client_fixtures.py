#!/usr/bin/env python3
"""Regenerate the frontend test fixtures from a real dashboard session.

Writes frontend/test/fixtures/*.json: the bootstrap document plus the patch
sequence a session emits for a canned interaction (filter RB, select row 0,
select point 0, mark test_only). Keeping these captured from the actual
server guarantees the client is tested against genuine wire payloads.
"""

import json
import tempfile
from pathlib import Path

from elqadash.cleansing import CleansingDashboard
from elqadash.dashboard import build_dashboard
from elqadash.document import UiEvent, serialize_document
from elqadash.store import ingest_csv
from elqadash.synth import GenConfig, generate

OUT = Path(__file__).resolve().parents[1] / "frontend" / "test" / "fixtures"


def dump(name: str, payload) -> None:
    OUT.joinpath(name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT / name}")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    workdir = tempfile.mkdtemp(prefix="fixtures-")
    generate(GenConfig(seed=0, n_circuits=4), workdir)
    repo = ingest_csv(workdir)
    dash = build_dashboard(CleansingDashboard, repo)

    dump("document.json", serialize_document(dash.document))
    steps = [
        ("patch_filter_rb.json", UiEvent("type_select", "value_change", "RB")),
        ("patch_select_row0.json", UiEvent("circuits_source", "select", [0])),
        ("patch_select_point0.json", UiEvent("cap_source", "select", [0])),
        ("patch_verdict_test_only.json", UiEvent("verdict_select", "value_change", "test_only")),
    ]
    for name, event in steps:
        dump(name, dash.input_change(event).to_wire())


if __name__ == "__main__":
    main()

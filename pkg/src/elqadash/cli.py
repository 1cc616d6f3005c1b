"""Command line interface: gen, features, cluster, serve.

All outputs are byte-stable for fixed seeds: floats are written in shortest
round-trip form and row order follows the repository's deterministic
ordering.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import ElqaError
from .features import extract_features
from .miners import PointMatrix, analyse, standardize
from .store import ingest_csv
from .synth import GenConfig, generate

_FEATURE_FIELDS = ["mean", "min", "max", "skewness", "kurtosis_excess", "slope", "slope_stderr"]


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _parse_campaigns(spec: str) -> tuple[tuple[str, str], ...]:
    out = []
    for part in spec.split(","):
        label, _, state = part.partition(":")
        out.append((label.strip(), state.strip()))
    return tuple(out)


def cmd_gen(args: argparse.Namespace) -> int:
    config = GenConfig(
        seed=args.seed,
        n_circuits=args.circuits,
        campaigns=_parse_campaigns(args.campaigns),
        samples_per_measurement=args.samples,
        nominal_capacitance_F=args.nominal_capacitance,
        capacitance_jitter_rel=args.jitter,
        missing_rate=args.missing_rate,
        tp4_noise_rate=args.noise_rate,
        tp4_noise_amplitude_rel=args.noise_amplitude,
    )
    report = generate(config, args.out)
    print(report.to_json())
    return 0


def cmd_features(args: argparse.Namespace) -> int:
    repo = ingest_csv(args.data)
    lines = ["measurement_id," + ",".join(_FEATURE_FIELDS) + ",capacitance_F"]
    for m in repo.query_measurements():
        try:
            fv = extract_features(m)
        except ElqaError as e:
            print(f"warning: {m.measurement_id}: {e.code}", file=sys.stderr)
            lines.append(m.measurement_id + "," * (len(_FEATURE_FIELDS) + 1))
            continue
        cells = [_fmt(getattr(fv, name)) for name in _FEATURE_FIELDS] + [_fmt(fv.capacitance_F)]
        lines.append(m.measurement_id + "," + ",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def _load_feature_matrix(path: Path) -> PointMatrix:
    """Build the clustering matrix from a features CSV.

    capacitance_F joins the feature columns only when present on every row;
    rows with any empty cell in the used columns are skipped (reported on
    stderr).
    """
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:] if line]
    cap_idx = header.index("capacitance_F")
    use_cap = all(r[cap_idx] != "" for r in rows) and bool(rows)
    fields = _FEATURE_FIELDS + (["capacitance_F"] if use_cap else [])
    idx = [header.index(f) for f in fields]
    ids, data = [], []
    for r in rows:
        cells = [r[i] for i in idx]
        if any(c == "" for c in cells):
            print(f"warning: skipping {r[0]} (missing values)", file=sys.stderr)
            continue
        ids.append(r[0])
        data.append([float(c) for c in cells])
    return PointMatrix(ids=ids, rows=data)


def cmd_cluster(args: argparse.Namespace) -> int:
    matrix = standardize(_load_feature_matrix(Path(args.features)))
    if args.method == "kmeans":
        spec = {"method": "kmeans", "params": {"k": args.k, "seed": args.seed}}
    else:
        spec = {"method": "dbscan", "params": {"eps": args.eps, "min_pts": args.min_pts}}
    assignment = analyse(matrix, spec)
    lines = ["measurement_id,label"]
    lines += [f"{mid},{label}" for mid, label in zip(matrix.ids, assignment.labels)]
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve  # aiohttp import deferred off the data-only paths

    data_dir = Path(args.data)
    journal = data_dir / "annotations.jsonl"
    repo = ingest_csv(data_dir, journal_path=journal)
    if journal.exists():
        repo.replay_journal(journal)
    template = os.environ.get("ELQA_ACTIVITY_URL") or args.activity_url_template
    client_dir = args.client_dir or _default_client_dir()
    serve(
        repo,
        port=args.port,
        activity_url_template=template,
        session_ttl_s=args.session_ttl,
        client_dir=client_dir,
    )
    return 0


def _default_client_dir() -> str | None:
    bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return str(bundled) if bundled.is_dir() else None


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="elqadash", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic CSV dataset bundle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--circuits", type=int, default=6)
    p.add_argument("--missing-rate", type=float, default=0.0)
    p.add_argument("--noise-rate", type=float, default=0.0)
    p.add_argument("--noise-amplitude", type=float, default=0.05)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--jitter", type=float, default=0.05)
    p.add_argument("--nominal-capacitance", type=float, default=1e-7)
    p.add_argument("--campaigns", default="LS1:cold,LS2:warm", help="label:state[,label:state...]")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("features", help="extract one feature row per measurement")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="features.csv", help="output path, or - for stdout")
    p.set_defaults(fn=cmd_features)

    p = sub.add_parser("cluster", help="cluster feature vectors")
    p.add_argument("--features", required=True)
    p.add_argument("--method", choices=["kmeans", "dbscan"], required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--min-pts", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="labels.csv", help="output path, or - for stdout")
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("serve", help="serve the interactive dashboard")
    p.add_argument("--data", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument(
        "--activity-url-template",
        default="https://activities.example/measurements/{measurement_id}",
        help="external page per measurement; env ELQA_ACTIVITY_URL overrides",
    )
    p.add_argument("--session-ttl", type=float, default=1800.0, help="seconds; 0 = never expire")
    p.add_argument("--client-dir", default=None, help="directory with the built web client")
    p.set_defaults(fn=cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ElqaError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

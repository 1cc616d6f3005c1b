"""Deterministic generator of synthetic circuit-test CSV bundles.

Stands in for the production database at desk scale. Every byte of output is
a pure function of the configuration (including its seed); the RNG is the
package-pinned xorshift64* stream (see :mod:`elqadash.rng`).

Signal shape: each HVQ measurement is a linear charge ramp, voltage rising
0 -> RAMP_V_MAX over RAMP_DURATION_S at constant current I = C * dV/dt, so
the capacitance extracted downstream equals the circuit's drawn capacitance
by construction. Tunnel temperature/humidity are plausible constants with
small jitter; their ranges are arbitrary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import InvalidConfig, IoError
from .rng import Xorshift64Star, round_half_up
from .store import SECTORS, MachineState

RAMP_V_MAX = 100.0
RAMP_DURATION_S = 10.0

_MANUFACTURERS = ("Ansaldo", "Noell", "Alstom")
_BASE_TIME = datetime(2015, 1, 5, tzinfo=timezone.utc)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    n_circuits: int = 6
    campaigns: tuple[tuple[str, str], ...] = (("LS1", "cold"), ("LS2", "warm"))
    samples_per_measurement: int = 200
    nominal_capacitance_F: float = 1e-7
    capacitance_jitter_rel: float = 0.05
    missing_rate: float = 0.0
    tp4_noise_rate: float = 0.0
    tp4_noise_amplitude_rel: float = 0.05

    def validate(self) -> None:
        if self.seed < 0:
            raise InvalidConfig("seed must be >= 0")
        if self.n_circuits < 1:
            raise InvalidConfig("n_circuits must be >= 1")
        if not self.campaigns:
            raise InvalidConfig("at least one campaign required")
        for label, state in self.campaigns:
            try:
                MachineState(state)
            except ValueError:
                raise InvalidConfig(f"unknown machine_state {state!r} for campaign {label!r}") from None
        if self.samples_per_measurement < 1:
            raise InvalidConfig("samples_per_measurement must be >= 1")
        if self.nominal_capacitance_F <= 0:
            raise InvalidConfig("nominal_capacitance_F must be > 0")
        for name in ("capacitance_jitter_rel", "missing_rate", "tp4_noise_rate"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise InvalidConfig(f"{name} must lie in [0, 1)")
        if self.tp4_noise_amplitude_rel < 0:
            raise InvalidConfig("tp4_noise_amplitude_rel must be >= 0")


@dataclass
class GenReport:
    counts: dict[str, int] = field(default_factory=dict)
    anomalous_measurement_ids: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"counts": self.counts, "anomalous_measurement_ids": self.anomalous_measurement_ids},
            sort_keys=True,
        )


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form; stable across runs."""
    return repr(float(x))


def _iso(dt: datetime) -> str:
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def generate(config: GenConfig, out_dir: str | Path) -> GenReport:
    """Write circuits/campaigns/measurements/samples CSV files into out_dir.

    For every circuit and campaign, two HVQ measurements (variants M1, M2)
    are emitted. missing_rate removes round(rate * n) value cells per channel
    per measurement; tp4_noise_rate picks round(rate * total) measurements to
    carry additive uniform voltage noise of amplitude
    tp4_noise_amplitude_rel * signal range.
    """
    config.validate()
    out = Path(out_dir)
    rng = Xorshift64Star(config.seed)

    circuits = []
    for i in range(config.n_circuits):
        cid = f"C{i + 1:03d}"
        ctype = "RB" if i % 2 == 0 else "RQ"
        sector = SECTORS[i % len(SECTORS)]
        pos = f"pos-{i + 1:03d}"
        manu = _MANUFACTURERS[i % len(_MANUFACTURERS)]
        # drawn capacitance: nominal * (1 + jitter * u), u uniform in [-1, 1)
        cap = config.nominal_capacitance_F * (1.0 + config.capacitance_jitter_rel * rng.uniform(-1.0, 1.0))
        circuits.append((cid, ctype, sector, pos, manu, cap))

    campaigns = []
    for k, (label, state) in enumerate(config.campaigns):
        campaigns.append((f"CAMP{k + 1:02d}", label, state, _BASE_TIME + timedelta(days=120 * k)))

    n = config.samples_per_measurement
    dt_s = RAMP_DURATION_S / n
    slope = RAMP_V_MAX / RAMP_DURATION_S

    measurement_rows: list[str] = []
    sample_rows: list[str] = []
    measurement_ids: list[str] = []
    signals: dict[str, tuple[list[float], list[float], list[float]]] = {}

    for camp_id, _, _, started_at in campaigns:
        for ci, (cid, _, _, _, _, cap) in enumerate(circuits):
            for vi, variant in enumerate(("M1", "M2")):
                mid = f"{cid}-{camp_id}-{variant}"
                performed = started_at + timedelta(days=ci, hours=9 + vi)
                temp = 18.0 + 4.0 * rng.random()
                hum = 35.0 + 20.0 * rng.random()
                operator = f"op{1 + (ci + vi) % 4:02d}"
                measurement_rows.append(
                    ",".join(
                        [mid, cid, camp_id, "HVQ", variant, operator, _iso(performed), _fmt(temp), _fmt(hum)]
                    )
                )
                measurement_ids.append(mid)
                current = cap * slope
                times = [i * dt_s for i in range(n)]
                volts = [slope * t for t in times]
                amps = [current] * n
                signals[mid] = (times, volts, amps)

    # pick the anomalous set: exactly round(rate * total) measurements
    total = len(measurement_ids)
    k_noise = round_half_up(config.tp4_noise_rate * total)
    noisy = sorted(rng.sample_indices(total, k_noise))
    anomalous_ids = [measurement_ids[i] for i in noisy]
    amplitude = config.tp4_noise_amplitude_rel * RAMP_V_MAX
    for mid in anomalous_ids:
        times, volts, amps = signals[mid]
        signals[mid] = (times, [v + rng.uniform(-amplitude, amplitude) for v in volts], amps)

    # blank exactly round(rate * n) cells per channel per measurement
    k_missing = round_half_up(config.missing_rate * n)
    for mid in measurement_ids:
        times, volts, amps = signals[mid]
        gone_v = set(rng.sample_indices(n, k_missing))
        gone_i = set(rng.sample_indices(n, k_missing))
        for i in range(n):
            v = "" if i in gone_v else _fmt(volts[i])
            a = "" if i in gone_i else _fmt(amps[i])
            sample_rows.append(f"{mid},{_fmt(times[i])},{v},{a}")

    try:
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "circuits.csv", "circuit_id,circuit_type,sector,magnet_position,manufacturer",
               [",".join(c[:5]) for c in circuits])
        _write(out / "campaigns.csv", "campaign_id,label,machine_state,started_at",
               [f"{cid},{label},{state},{_iso(at)}" for cid, label, state, at in campaigns])
        _write(out / "measurements.csv",
               "measurement_id,circuit_id,campaign_id,test_type,variant,operator,performed_at,"
               "tunnel_temperature_C,tunnel_humidity_pct",
               measurement_rows)
        _write(out / "samples.csv", "measurement_id,t_s,voltage_V,current_A", sample_rows)
    except OSError as e:
        raise IoError(str(e)) from e

    return GenReport(
        counts={
            "circuits": len(circuits),
            "campaigns": len(campaigns),
            "measurements": total,
            "samples": len(sample_rows),
        },
        anomalous_measurement_ids=anomalous_ids,
    )


def _write(path: Path, header: str, rows: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(row + "\n")

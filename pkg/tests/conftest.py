import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from elqadash.store import (
    Annotation,
    Campaign,
    Circuit,
    MachineState,
    Measurement,
    Repository,
    Sample,
    SECTORS,
    TestType,
    Variant,
    Verdict,
)
from elqadash.synth import GenConfig, generate
from elqadash.store import ingest_csv

BASE_TIME = datetime(2015, 3, 1, tzinfo=timezone.utc)


@pytest.fixture(scope="session")
def synth_dir(tmp_path_factory):
    """Seed-0 synthetic bundle shared across the suite."""
    d = tmp_path_factory.mktemp("synth0")
    generate(GenConfig(seed=0, n_circuits=4), d)
    return d


@pytest.fixture()
def synth_repo(synth_dir):
    return ingest_csv(synth_dir)


def make_measurement(mid="m-1", times=None, volts=None, amps=None, performed_at=None,
                     circuit_id="C001", campaign_id="CAMP01", variant="M1"):
    """Standalone measurement for feature-level tests."""
    times = list(times if times is not None else [])
    n = len(times)
    volts = list(volts) if volts is not None else [None] * n
    amps = list(amps) if amps is not None else [None] * n
    samples = [Sample(t_s=t, voltage_V=v, current_A=a) for t, v, a in zip(times, volts, amps)]
    return Measurement(
        measurement_id=mid,
        circuit_id=circuit_id,
        campaign_id=campaign_id,
        test_type=TestType.HVQ,
        variant=Variant(variant),
        operator="op01",
        performed_at=performed_at or BASE_TIME,
        samples=tuple(samples),
    )


def build_random_repo(rnd: random.Random, n_circuits=4, n_campaigns=2, n_measurements=20,
                      with_samples=False):
    """Random in-memory repository (no CSV round trip) for query/distinct oracles."""
    repo = Repository()
    types = ["RB", "RQ", "RQX"]
    for i in range(n_circuits):
        repo.add_circuit(
            Circuit(
                circuit_id=f"C{i:03d}",
                circuit_type=rnd.choice(types),
                sector=rnd.choice(SECTORS),
                magnet_position=f"pos-{i}",
                manufacturer=rnd.choice(["A", "B"]),
            )
        )
    for i in range(n_campaigns):
        repo.add_campaign(
            Campaign(
                campaign_id=f"CAMP{i:02d}",
                label=f"LS{i}",
                machine_state=rnd.choice(list(MachineState)),
                started_at=BASE_TIME + timedelta(days=100 * i),
            )
        )
    for i in range(n_measurements):
        samples = ()
        if with_samples:
            times = [0.1 * k for k in range(rnd.randint(4, 10))]
            samples = tuple(
                Sample(t_s=t, voltage_V=rnd.uniform(-5, 5), current_A=rnd.uniform(0, 1e-6))
                for t in times
            )
        repo.add_measurement(
            Measurement(
                measurement_id=f"M{i:04d}",
                circuit_id=f"C{rnd.randrange(n_circuits):03d}",
                campaign_id=f"CAMP{rnd.randrange(n_campaigns):02d}",
                test_type=rnd.choice(list(TestType)),
                variant=rnd.choice(list(Variant)),
                operator=f"op{rnd.randint(1, 5):02d}",
                performed_at=BASE_TIME + timedelta(hours=rnd.randrange(0, 5000)),
                samples=samples,
            )
        )
    return repo


def make_annotation(verdict="suspect", author="tester", note=""):
    return Annotation(
        verdict=Verdict(verdict), author=author, note=note, created_at=BASE_TIME
    )

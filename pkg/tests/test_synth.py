import filecmp
import math

import pytest

import oracles
from elqadash.errors import InvalidConfig
from elqadash.features import capacitance
from elqadash.rng import Xorshift64Star, round_half_up
from elqadash.store import ingest_csv
from elqadash.synth import GenConfig, generate


def test_rng_stream_is_stable():
    # frozen expectations: the generator algorithm is part of the contract
    rng = Xorshift64Star(0)
    first = [rng.next_u64() for _ in range(3)]
    rng2 = Xorshift64Star(0)
    assert [rng2.next_u64() for _ in range(3)] == first
    assert Xorshift64Star(1).next_u64() != first[0]
    vals = [Xorshift64Star(7).random() for _ in range(1)]
    assert 0.0 <= vals[0] < 1.0


def test_same_config_twice_is_byte_identical(tmp_path):
    cfg = GenConfig(seed=3, n_circuits=3, missing_rate=0.1, tp4_noise_rate=0.25)
    a, b = tmp_path / "a", tmp_path / "b"
    generate(cfg, a)
    generate(cfg, b)
    for name in ("circuits.csv", "campaigns.csv", "measurements.csv", "samples.csv"):
        assert filecmp.cmp(a / name, b / name, shallow=False), name


def test_measurement_counting(tmp_path):
    report = generate(GenConfig(seed=0, n_circuits=3), tmp_path)
    assert report.counts["measurements"] == 3 * 2 * 2
    assert report.counts["circuits"] == 3
    assert report.counts["campaigns"] == 2


def test_clean_data_recovers_nominal_capacitance(tmp_path):
    cfg = GenConfig(seed=0, n_circuits=2, capacitance_jitter_rel=0.0, missing_rate=0.0)
    generate(cfg, tmp_path)
    repo = ingest_csv(tmp_path)
    for m in repo.query_measurements():
        c = capacitance(m)
        assert math.isclose(c, cfg.nominal_capacitance_F, rel_tol=1e-9)


def test_jittered_capacitance_stays_in_band(tmp_path):
    cfg = GenConfig(seed=5, n_circuits=8, capacitance_jitter_rel=0.1)
    generate(cfg, tmp_path)
    repo = ingest_csv(tmp_path)
    values = {capacitance(m) for m in repo.query_measurements()}
    assert len(values) > 1  # jitter actually spreads circuits
    for c in values:
        assert abs(c / cfg.nominal_capacitance_F - 1.0) <= cfg.capacitance_jitter_rel + 1e-9


def test_output_passes_ingest(tmp_path):
    generate(GenConfig(seed=9, n_circuits=5, missing_rate=0.2, tp4_noise_rate=0.4), tmp_path)
    repo = ingest_csv(tmp_path)
    assert repo.counts() == (5, 2, 20)
    for m in repo.measurements.values():
        times = [s.t_s for s in m.samples]
        assert times == sorted(times)
        assert len(set(times)) == len(times)


def test_anomalous_count_matches_rate(tmp_path):
    cfg = GenConfig(seed=1, n_circuits=5, tp4_noise_rate=0.3)
    report = generate(cfg, tmp_path)
    total = report.counts["measurements"]
    assert len(report.anomalous_measurement_ids) == round_half_up(0.3 * total)
    assert report.anomalous_measurement_ids == sorted(report.anomalous_measurement_ids)


def test_noisy_measurements_deviate_from_ramp(tmp_path):
    cfg = GenConfig(seed=2, n_circuits=4, tp4_noise_rate=0.5, tp4_noise_amplitude_rel=0.05)
    report = generate(cfg, tmp_path)
    repo = ingest_csv(tmp_path)
    noisy = set(report.anomalous_measurement_ids)
    for m in repo.query_measurements():
        times = [s.t_s for s in m.samples]
        volts = [s.voltage_V for s in m.samples]
        _, _, stderr = oracles.ols(times, volts)
        if m.measurement_id in noisy:
            assert stderr > 1e-6
        else:
            assert stderr < 1e-9


def test_missing_cells_exact_count(tmp_path):
    cfg = GenConfig(seed=4, n_circuits=2, missing_rate=0.1, samples_per_measurement=50)
    generate(cfg, tmp_path)
    repo = ingest_csv(tmp_path)
    expect = round_half_up(0.1 * 50)
    for m in repo.measurements.values():
        assert sum(1 for s in m.samples if s.voltage_V is None) == expect
        assert sum(1 for s in m.samples if s.current_A is None) == expect


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_circuits": 0},
        {"samples_per_measurement": 0},
        {"nominal_capacitance_F": 0.0},
        {"missing_rate": 1.0},
        {"tp4_noise_rate": -0.1},
        {"capacitance_jitter_rel": 1.5},
        {"tp4_noise_amplitude_rel": -1.0},
        {"campaigns": (("LS1", "tepid"),)},
    ],
)
def test_invalid_config(tmp_path, kwargs):
    with pytest.raises(InvalidConfig):
        generate(GenConfig(**kwargs), tmp_path)

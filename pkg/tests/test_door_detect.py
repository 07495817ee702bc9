import statistics

import pytest

from timeloc import simulator as sim
from timeloc.door_detect import (
    DoorParams,
    ap_count_peak,
    detect_door_events,
    is_standing,
    rssi_fluctuation_score,
)
from timeloc.errors import InsufficientData
from util import SLICE, accel, bss, scan, trace


class TestRssiFluctuation:
    def test_constant_series_scores_zero(self):
        assert rssi_fluctuation_score([-60, -60, -60, -60, -60]) == 0.0

    def test_two_point_sample_variance(self):
        assert rssi_fluctuation_score([-60, -66]) == 18.0

    def test_planted_dip_window_exceeds_threshold(self):
        # four scans at the plateau then the first dipped scan (-8 dB)
        window = [-45, -45, -45, -45, -53]
        score = rssi_fluctuation_score(window)
        assert score == pytest.approx(12.8)
        assert score > DoorParams().rssi_var_threshold_db2

    def test_short_window_raises(self):
        with pytest.raises(InsufficientData):
            rssi_fluctuation_score([-60])


class TestIsStanding:
    def test_constant_magnitude_is_standing(self):
        samples = [accel(SLICE + i, 9.81) for i in range(4)]
        assert is_standing(samples) is True

    def test_alternating_walk_is_not(self):
        samples = [accel(SLICE + i, 8.0 if i % 2 else 12.0) for i in range(4)]
        assert statistics.pvariance([s.magnitude_mps2 for s in samples]) == 4.0
        assert is_standing(samples) is False

    def test_simulated_stillness_segment(self):
        route = sim.make_chain_route()
        t, truth = sim.synth_day(route, sim.WALK, sim.NoiseParams(rssi_sigma_db=4.0), seed=9)
        window = [a for a in t.accel if abs(a.ts - truth.door_ts) <= 2]
        assert len(window) == 5
        assert statistics.pvariance([a.magnitude_mps2 for a in window]) < 0.1
        assert is_standing(window) is True

    def test_too_few_samples(self):
        with pytest.raises(InsufficientData):
            is_standing([accel(SLICE, 9.81), accel(SLICE + 1, 9.81)])


class TestApCountPeak:
    def test_flat_series_has_no_peaks(self):
        counts = [(SLICE + i, 5) for i in range(12)]
        assert ap_count_peak(counts) == []

    def test_single_spike(self):
        values = [5, 5, 5, 9, 5, 5, 5]
        counts = [(SLICE + i, v) for i, v in enumerate(values)]
        assert ap_count_peak(counts, delta=2, neighborhood=3) == [SLICE + 3]

    def test_short_series_raises(self):
        counts = [(SLICE + i, 5) for i in range(8)]
        with pytest.raises(InsufficientData):
            ap_count_peak(counts, delta=2, neighborhood=4)

    def test_exactly_one_peak_per_planted_door(self):
        route = sim.make_chain_route()
        t, truth = sim.synth_day(route, sim.WALK, sim.NoiseParams(rssi_sigma_db=4.0), seed=13)
        counts = [(s.ts, len(s.aps)) for s in t.scans]
        peaks = ap_count_peak(counts)
        near_door = [p for p in peaks if abs(p - truth.door_ts) <= 10]
        assert len(near_door) == 1


def _door_day(seed=21, sigma=4.0, dropout=0.03):
    route = sim.make_chain_route()
    noise = sim.NoiseParams(rssi_sigma_db=sigma, dropout_prob=dropout)
    return route, sim.synth_day(route, sim.WALK, noise, seed=seed)


class TestDetectDoorEvents:
    def test_no_home_sighting_means_no_events(self):
        scans = [scan(SLICE + i * 5, {bss(1): -50}) for i in range(40)]
        t = trace(scans)
        assert detect_door_events(t, bss(9)) == []

    def test_constant_walking_blocks_condition_two(self):
        route, (t, truth) = _door_day()
        # replace every accelerometer sample with vigorous motion
        shaky = trace(
            t.scans,
            [accel(a.ts, 9.8 + (2.5 if i % 2 else -2.5)) for i, a in enumerate(t.accel)],
            day=t.day_id,
        )
        assert detect_door_events(shaky, route.home_bssid) == []

    def test_planted_door_found_within_ten_seconds(self):
        route, (t, truth) = _door_day()
        events = detect_door_events(t, route.home_bssid)
        assert any(abs(e.ts - truth.door_ts) <= 10 for e in events)
        assert all(e.conditions_met == (True, True, True) for e in events)

    def test_events_only_where_home_visible(self):
        route, (t, _) = _door_day()
        home_ts = {s.ts for s in t.scans if s.rssi_of(route.home_bssid) is not None}
        for e in detect_door_events(t, route.home_bssid):
            assert e.ts in home_ts

    def test_burst_merges_within_thirty_seconds(self):
        route, (t, _) = _door_day()
        events = detect_door_events(t, route.home_bssid)
        for a, b in zip(events, events[1:]):
            assert b.ts - a.ts >= 30

    @pytest.mark.parametrize(
        "stricter",
        [
            dict(rssi_var_threshold_db2=20.0),
            dict(accel_var_threshold=0.05),
            dict(count_peak_delta=4),
        ],
    )
    def test_raising_thresholds_never_adds_events(self, stricter):
        route, (t, _) = _door_day()
        base = detect_door_events(t, route.home_bssid)
        tightened = detect_door_events(t, route.home_bssid, DoorParams(**stricter))
        assert len(tightened) <= len(base)

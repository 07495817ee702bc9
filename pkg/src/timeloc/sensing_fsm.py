"""Duty-cycled sensing state machine and its scan-count battery proxy.

Cadence policy: an idle check every 60 s; 5 s WiFi scanning inside the
500 m home geofence; a 120 s accelerometer burst once the home BSSID is
scanned; a 300 s recording window once the connection is stable; then
sleep with 30-minute wakes.  Losing the home connection from any settled
state drops back to the idle check.  WiFi scan results are constant within
one second (observations are keyed per whole second), so the 1 s minimum
wake interval never yields conflicting scans.

The day runner drives the machine against a simulator oracle and returns
the sensed trace (a sub-view of what full-rate sampling would have seen)
plus counters that stand in for battery cost.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .trace_model import (
    DAY_S,
    AccelSample,
    ApObservation,
    Bssid,
    DayTrace,
    GpsFix,
    ScanRecord,
    day_id_for_ts,
    haversine_m,
)

GEOFENCE_RADIUS_M = 500.0
IDLE_PERIOD_S = 60
REGION_SCAN_PERIOD_S = 5
ACCEL_BURST_S = 120
CONNECTED_RECORD_S = 300
SLEEP_PERIOD_S = 1800
STABLE_CONNECTION_SCANS = 3


class StateTag(enum.Enum):
    IDLE_CHECK = "IdleCheck"
    GPS_REGION_SCAN = "GpsRegionScan"
    HOME_ARRIVAL = "HomeArrival"
    CONNECTED = "Connected"
    SLEEP = "Sleep"


class Action(enum.Enum):
    SCAN_WIFI = "ScanWifi"
    READ_GPS = "ReadGps"
    SAMPLE_ACCEL = "SampleAccel"


@dataclass(frozen=True, slots=True)
class FsmState:
    tag: StateTag
    entered_at: int
    conn_streak: int = 0
    miss_streak: int = 0


@dataclass(slots=True)
class SensingStats:
    """Monotone counters; the scan count is the battery proxy."""

    wifi_scans: int = 0
    gps_reads: int = 0
    accel_samples: int = 0
    wakeups: int = 0


@dataclass(frozen=True, slots=True)
class EnvSnapshot:
    """What the sensors would report right now, as queried from an oracle."""

    gps_available: bool
    fix: GpsFix | None
    visible: tuple[ApObservation, ...]
    connected: Bssid | None
    home_bssid: Bssid
    home_fix: GpsFix

    def home_visible(self) -> bool:
        return any(o.bssid == self.home_bssid for o in self.visible)


def in_gps_region(fix: GpsFix, home_fix: GpsFix, radius_m: float = GEOFENCE_RADIUS_M) -> bool:
    """True inside (or exactly on) the home-centered geofence circle."""
    return haversine_m(fix, home_fix) <= radius_m


def fsm_step(
    state: FsmState, now: int, env: EnvSnapshot
) -> tuple[FsmState, set[Action], int]:
    """One wake of the machine: actions to perform now, next state, next wake.

    next_wake always exceeds ``now`` by at least one second.
    """
    tag = state.tag
    actions: set[Action] = set()

    if tag in (StateTag.IDLE_CHECK, StateTag.GPS_REGION_SCAN):
        actions.add(Action.SCAN_WIFI)
        if env.gps_available:
            actions.add(Action.READ_GPS)
        if env.home_visible():
            return FsmState(StateTag.HOME_ARRIVAL, now), actions, now + 1
        inside = (
            env.gps_available
            and env.fix is not None
            and in_gps_region(env.fix, env.home_fix)
        )
        if tag is StateTag.IDLE_CHECK:
            if inside:
                return FsmState(StateTag.GPS_REGION_SCAN, now), actions, now + REGION_SCAN_PERIOD_S
            return state, actions, now + IDLE_PERIOD_S
        # region scan: fall back out only on a confident outside fix
        if env.gps_available and env.fix is not None and not inside:
            return FsmState(StateTag.IDLE_CHECK, now), actions, now + IDLE_PERIOD_S
        return state, actions, now + REGION_SCAN_PERIOD_S

    if tag is StateTag.HOME_ARRIVAL:
        elapsed = now - state.entered_at
        if elapsed < ACCEL_BURST_S:
            actions.add(Action.SAMPLE_ACCEL)
        streak = state.conn_streak
        misses = state.miss_streak
        if elapsed % REGION_SCAN_PERIOD_S == 0:
            actions.add(Action.SCAN_WIFI)
            connected_home = env.connected == env.home_bssid
            misses = 0 if env.home_visible() else misses + 1
            # one missed scan is dropout, not a departure
            if misses >= 2 and not connected_home:
                return FsmState(StateTag.IDLE_CHECK, now), actions, now + IDLE_PERIOD_S
            streak = streak + 1 if connected_home else 0
        if elapsed >= ACCEL_BURST_S and streak >= STABLE_CONNECTION_SCANS:
            return FsmState(StateTag.CONNECTED, now), actions, now + REGION_SCAN_PERIOD_S
        wake = now + 1 if elapsed + 1 <= ACCEL_BURST_S else now + REGION_SCAN_PERIOD_S
        return FsmState(tag, state.entered_at, streak, misses), actions, wake

    if tag is StateTag.CONNECTED:
        actions.add(Action.SCAN_WIFI)
        if env.connected != env.home_bssid:
            return FsmState(StateTag.IDLE_CHECK, now), actions, now + IDLE_PERIOD_S
        if now - state.entered_at >= CONNECTED_RECORD_S:
            return FsmState(StateTag.SLEEP, now), actions, now + SLEEP_PERIOD_S
        return state, actions, now + REGION_SCAN_PERIOD_S

    # SLEEP
    actions.add(Action.SCAN_WIFI)
    if env.connected != env.home_bssid:
        return FsmState(StateTag.IDLE_CHECK, now), actions, now + IDLE_PERIOD_S
    return state, actions, now + SLEEP_PERIOD_S


def snapshot_from_oracle(oracle, ts: int) -> EnvSnapshot:
    return EnvSnapshot(
        gps_available=oracle.gps_available(ts),
        fix=oracle.gps_at(ts),
        visible=oracle.aps_at(ts),
        connected=oracle.connected_at(ts),
        home_bssid=oracle.home_bssid,
        home_fix=oracle.home_fix,
    )


@dataclass(frozen=True, slots=True)
class FsmDayRun:
    trace: DayTrace
    stats: SensingStats
    transitions: tuple[tuple[int, StateTag], ...]


def drive_day(oracle, start_ts: int | None = None, duration_s: int = DAY_S) -> FsmDayRun:
    """Run the machine over one simulated day and collect the sensed trace."""
    start = oracle.slice_start if start_ts is None else start_ts
    end = start + duration_s
    state = FsmState(StateTag.IDLE_CHECK, start)
    stats = SensingStats()
    scans: list[ScanRecord] = []
    accel: list[AccelSample] = []
    transitions: list[tuple[int, StateTag]] = [(start, state.tag)]

    now = start
    while now < end:
        env = snapshot_from_oracle(oracle, now)
        new_state, actions, next_wake = fsm_step(state, now, env)
        if next_wake <= now:
            raise RuntimeError("state machine scheduled a non-advancing wake")
        stats.wakeups += 1
        if Action.READ_GPS in actions:
            stats.gps_reads += 1
        if Action.SCAN_WIFI in actions:
            stats.wifi_scans += 1
            visible = {o.bssid for o in env.visible}
            scans.append(
                ScanRecord(
                    ts=now,
                    gps=env.fix if Action.READ_GPS in actions else None,
                    connected=env.connected if env.connected in visible else None,
                    aps=env.visible,
                )
            )
        if Action.SAMPLE_ACCEL in actions:
            stats.accel_samples += 1
            accel.append(AccelSample(now, oracle.accel_at(now)))
        if new_state.tag != state.tag:
            transitions.append((now, new_state.tag))
        state = new_state
        now = next_wake

    trace = DayTrace(day_id_for_ts(start), tuple(scans), tuple(accel))
    return FsmDayRun(trace=trace, stats=stats, transitions=tuple(transitions))


def run_fsm_day(oracle, start_ts: int | None = None, duration_s: int = DAY_S):
    """Sensed DayTrace plus sensing counters for one simulated day."""
    run = drive_day(oracle, start_ts=start_ts, duration_s=duration_s)
    return run.trace, run.stats


def baseline_scan_count(duration_s: int = DAY_S, period_s: int = REGION_SCAN_PERIOD_S) -> int:
    """Scan count of a naive fixed-cadence sampler over the same span."""
    return duration_s // period_s

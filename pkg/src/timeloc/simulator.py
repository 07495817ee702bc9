"""Synthetic commute traces with planted ground truth.

A scenario describes a fixed route of APs (an overlapping coverage chain
ending at a persistent home AP), a per-day transport mode draw, noise, and
nightly home presence.  Each day is rendered by a DayOracle that can answer
"what would the phone see at second t" for any t, which makes the same day
reproducible at full scan rate (synth_day) or through the duty-cycling
state machine.  Everything is a pure function of (inputs, seed): per-day
seeds are the master seed XOR the day index, and observation noise is keyed
by (day seed, BSSID, timestamp), so days can be regenerated independently
and in any order.

Ground truth per day: the arrival instant (first full-rate scan containing
the home AP) and a planted door-opening event (a one-scan spike of three
transient APs, an 8 dB home-RSSI dip over 10 s, and 5 s of accelerometer
stillness centered on the door time).
"""

from __future__ import annotations

import configparser
import math
import random
import zlib
from dataclasses import dataclass, replace
from datetime import date, timedelta

from .errors import ConfigurationError
from .trace_model import (
    DAY_S,
    EARTH_RADIUS_M,
    NOON_SOD,
    AccelSample,
    ApObservation,
    Bssid,
    DayTrace,
    GpsFix,
    ScanRecord,
    day_slice_start,
)

COMMUTE_SCAN_PERIOD_S = 5
MORNING_SCAN_PERIOD_S = 60
BASE_SPEED_MPS = 1.4  # walking pace that converts route seconds to meters
RAMP_DEPTH_DB = 35.0  # trapezoid edge attenuation below the plateau
RAMP_FRAC = 0.25
M_PER_DEG_LAT = EARTH_RADIUS_M * math.pi / 180.0

NIGHT_START_OFFSET_S = 75_600 - NOON_SOD            # 21:00, relative to slice start
NIGHT_END_OFFSET_S = (21_600 - NOON_SOD) % DAY_S    # 06:00 next morning

_NEIGHBOR_BSSID_BASE = 0x2000_00
_SPIKE_BSSID_BASE = 0x3000_00
_NEW_HOME_BSSID = 0x1F_FF01
_M64 = (1 << 64) - 1


def bssid_from_int(n: int) -> Bssid:
    octets = [0x02] + [(n >> shift) & 0xFF for shift in (32, 24, 16, 8, 0)]
    return Bssid(":".join(f"{o:02x}" for o in octets))


def _mix(*parts) -> int:
    """Stable 32-bit hash for keyed sub-streams (process-independent)."""
    return zlib.crc32("|".join(map(str, parts)).encode("utf-8"))


_GOLD = 0x9E3779B97F4A7C15
_STEP = 0xD1342543DE82EF95


def _sm64(z: int) -> int:
    """splitmix64 finalizer: cheap, well-mixed 64-bit hash of an int key."""
    z &= _M64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _M64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def _unit(base: int, i: int) -> float:
    """i-th uniform draw in (0, 1] for a keyed stream."""
    return ((_sm64(base + i * _GOLD) >> 11) + 1) / (2**53 + 1)


def _gauss(base: int, i: int, sigma: float) -> float:
    """Box-Muller normal deviate consuming draws i and i+1."""
    u1 = _unit(base, i)
    u2 = _unit(base, i + 1)
    return sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


# ---------------------------------------------------------------------------
# scenario description

@dataclass(frozen=True, slots=True)
class ApPlacement:
    """An AP's coverage interval along the route, in base-speed seconds."""

    bssid: Bssid
    enter_offset_s: int
    exit_offset_s: int
    peak_rssi_dbm: int

    def __post_init__(self) -> None:
        if self.enter_offset_s >= self.exit_offset_s:
            raise ConfigurationError(f"{self.bssid}: enter must precede exit")
        if not -90 <= self.peak_rssi_dbm <= -30:
            raise ConfigurationError(f"{self.bssid}: peak RSSI outside [-90, -30]")


@dataclass(frozen=True, slots=True)
class TransportMode:
    name: str
    speed_factor: float

    def __post_init__(self) -> None:
        if self.speed_factor <= 0:
            raise ConfigurationError("speed_factor must be > 0")


@dataclass(frozen=True, slots=True)
class ModeMix:
    """Mixture distribution over transport modes with per-day speed jitter."""

    modes: tuple[tuple[TransportMode, float], ...]
    speed_jitter_frac: float = 0.0


@dataclass(frozen=True, slots=True)
class RouteSpec:
    aps: tuple[ApPlacement, ...]
    home_bssid: Bssid
    home_fix: GpsFix
    route_duration_s: int

    def __post_init__(self) -> None:
        for p in self.aps:
            if p.bssid == self.home_bssid:
                if p.enter_offset_s >= self.route_duration_s:
                    raise ConfigurationError("home coverage must begin before route end")
            elif p.exit_offset_s > self.route_duration_s:
                raise ConfigurationError(
                    f"{p.bssid}: coverage extends past the route end"
                )

    def home_placement(self) -> ApPlacement | None:
        for p in self.aps:
            if p.bssid == self.home_bssid:
                return p
        return None


@dataclass(frozen=True, slots=True)
class NightDwellSpec:
    """Nightly home presence: scan cadence, morning departure, neighbor APs."""

    scan_period_s: int = 600
    morning_depart_sod: int = 8 * 3600
    neighbor_count: int = 3
    neighbor_dwell_s: int = 5400


@dataclass(frozen=True, slots=True)
class NoiseParams:
    rssi_sigma_db: float = 0.0
    dropout_prob: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.dropout_prob <= 1.0:
            raise ConfigurationError("dropout_prob outside [0, 1]")
        if self.rssi_sigma_db < 0:
            raise ConfigurationError("rssi_sigma_db must be >= 0")


@dataclass(frozen=True, slots=True)
class Relocation:
    """Home moves to a new BSSID from ``move_day`` (0-based index) onward."""

    move_day: int
    new_home_bssid: Bssid


@dataclass(frozen=True, slots=True)
class ScenarioSpec:
    route: RouteSpec
    n_days: int
    mode_schedule: ModeMix | tuple[TransportMode, ...]
    detour_prob: float = 0.0
    detour_duration_s: int = 90
    rssi_sigma_db: float = 0.0
    dropout_prob: float = 0.0
    depart_time_jitter_s: int = 0
    night_dwell: NightDwellSpec = NightDwellSpec()
    depart_sod: int = 18 * 3600
    start_day: date = date(2024, 1, 1)
    relocation: Relocation | None = None

    def __post_init__(self) -> None:
        if self.n_days < 1:
            raise ConfigurationError("n_days must be >= 1")
        if not 0.0 <= self.detour_prob <= 1.0:
            raise ConfigurationError("detour_prob outside [0, 1]")
        if not 0.0 <= self.dropout_prob <= 1.0:
            raise ConfigurationError("dropout_prob outside [0, 1]")
        if isinstance(self.mode_schedule, tuple) and len(self.mode_schedule) != self.n_days:
            raise ConfigurationError("per-day mode schedule must cover every day")


@dataclass(frozen=True, slots=True)
class GroundTruth:
    day_id: date
    arrival_ts: int
    door_ts: int
    mode: TransportMode

    def __post_init__(self) -> None:
        if not self.arrival_ts - 60 <= self.door_ts <= self.arrival_ts + 120:
            raise ConfigurationError("door_ts outside [arrival-60, arrival+120]")


@dataclass(frozen=True, slots=True)
class DayPlan:
    """Fully resolved schedule for one day; everything downstream is pure."""

    day_id: date
    slice_start: int
    route: RouteSpec
    mode: TransportMode
    depart_ts: int
    detour_s: int
    door_delay_s: int
    noise: NoiseParams
    night: NightDwellSpec
    seed: int
    gps_enabled: bool = True
    stay_home: bool = False


def _swap_home(route: RouteSpec, new_home: Bssid) -> RouteSpec:
    aps = tuple(
        replace(p, bssid=new_home) if p.bssid == route.home_bssid else p
        for p in route.aps
    )
    return RouteSpec(aps, new_home, route.home_fix, route.route_duration_s)


def make_day_plan(scenario: ScenarioSpec, day_index: int, master_seed: int) -> DayPlan:
    """Resolve scenario randomness for one day (per-day seed = master XOR index)."""
    day_seed = master_seed ^ day_index
    rng = random.Random(_mix(day_seed, "plan"))

    if isinstance(scenario.mode_schedule, ModeMix):
        mix = scenario.mode_schedule
        modes = [m for m, _ in mix.modes]
        weights = [w for _, w in mix.modes]
        base = rng.choices(modes, weights=weights)[0]
        jitter = mix.speed_jitter_frac
        factor = base.speed_factor * (1.0 + rng.uniform(-jitter, jitter)) if jitter else base.speed_factor
        mode = TransportMode(base.name, factor)
    else:
        mode = scenario.mode_schedule[day_index]

    depart_jitter = (
        rng.randint(-scenario.depart_time_jitter_s, scenario.depart_time_jitter_s)
        if scenario.depart_time_jitter_s
        else 0
    )
    detour_draw = rng.random()
    detour_s = scenario.detour_duration_s if detour_draw < scenario.detour_prob else 0
    door_delay_s = 25 + 5 * rng.randint(0, 7)

    route = scenario.route
    if scenario.relocation is not None and day_index >= scenario.relocation.move_day:
        route = _swap_home(route, scenario.relocation.new_home_bssid)

    day_id = scenario.start_day + timedelta(days=day_index)
    slice_start = day_slice_start(day_id)
    depart_ts = slice_start + (scenario.depart_sod - NOON_SOD) % DAY_S + depart_jitter
    return DayPlan(
        day_id=day_id,
        slice_start=slice_start,
        route=route,
        mode=mode,
        depart_ts=depart_ts,
        detour_s=detour_s,
        door_delay_s=door_delay_s,
        noise=NoiseParams(scenario.rssi_sigma_db, scenario.dropout_prob),
        night=scenario.night_dwell,
        seed=day_seed,
    )


# ---------------------------------------------------------------------------
# the day oracle

class DayOracle:
    """Deterministic per-second view of one synthetic day.

    Exposes what the phone would observe at any epoch second of the slice:
    visible APs with noisy RSSI, GPS fix while outdoors, connection state,
    and accelerometer magnitude.  The full-rate trace and the duty-cycled
    sensed trace both sample this object, so one is a sub-view of the other.
    """

    def __init__(self, plan: DayPlan):
        route = plan.route
        home_pl = route.home_placement()
        if home_pl is None:
            raise ConfigurationError("route has no home AP placement")
        self.plan = plan
        self.home_bssid = route.home_bssid
        self.home_fix = route.home_fix
        self._noise = plan.noise
        self._seed_key = _mix(plan.seed, "obs")

        f = plan.mode.speed_factor
        start = plan.slice_start
        self.slice_start = start
        self.slice_end = start + DAY_S
        night = plan.night
        self.morning_depart_ts = start + (night.morning_depart_sod - NOON_SOD) % DAY_S
        self._night_start_ts = start + NIGHT_START_OFFSET_S
        self._night_end_ts = start + NIGHT_END_OFFSET_S

        duration = route.route_duration_s
        if plan.stay_home:
            self.depart_ts = None
            self.arrival_ts = start
            self.door_ts = start
            self._home_window = (start, self.slice_end)
            self._route_windows: list[tuple[Bssid, int, int, int]] = []
            self._gps_windows: list[tuple[int, int]] = []
            self._connected_window = (start, self.slice_end)
            self._walk_window = None
        else:
            depart = plan.depart_ts
            self.depart_ts = depart
            home_enter = depart + round(home_pl.enter_offset_s / f) + plan.detour_s
            k = -((home_enter - depart) // -COMMUTE_SCAN_PERIOD_S)  # ceil division
            self.arrival_ts = depart + k * COMMUTE_SCAN_PERIOD_S
            self.door_ts = self.arrival_ts + plan.door_delay_s
            home_fade = self.morning_depart_ts + round(
                (duration - home_pl.enter_offset_s) / f
            )
            self._home_window = (home_enter, home_fade)

            windows = []
            md = self.morning_depart_ts
            for p in route.aps:
                if p.bssid == route.home_bssid:
                    continue
                ev = (depart + round(p.enter_offset_s / f), depart + round(p.exit_offset_s / f))
                mo = (
                    md + round((duration - min(p.exit_offset_s, duration)) / f),
                    md + round((duration - p.enter_offset_s) / f),
                )
                windows.append((p.bssid, ev[0], ev[1], p.peak_rssi_dbm))
                windows.append((p.bssid, mo[0], mo[1], p.peak_rssi_dbm))
            self._route_windows = windows
            self._gps_windows = [
                (depart, self.arrival_ts),
                (md, md + round(duration / f)),
            ]
            self._connected_window = (self.door_ts + 20, md)
            self._walk_window = (self.arrival_ts - 60, self.door_ts + 30)

        self._home_peak = home_pl.peak_rssi_dbm
        self._speed_mps = BASE_SPEED_MPS * f

        nrng = random.Random(_mix(plan.seed, "night"))
        span = self._night_end_ts - self._night_start_ts
        self._neighbors = []
        for i in range(night.neighbor_count):
            dwell = min(night.neighbor_dwell_s, span)
            begin = self._night_start_ts + nrng.randint(0, span - dwell)
            self._neighbors.append((bssid_from_int(_NEIGHBOR_BSSID_BASE + i), begin, begin + dwell))
        self._spikes = [bssid_from_int(_SPIKE_BSSID_BASE + i) for i in range(3)]

    # -- observation helpers --------------------------------------------
    #
    # One keyed draw stream per whole second, shared by every AP observed at
    # that instant.  The draw order inside a scan is a pure function of ts,
    # so any consumer sampling the same second sees the identical set.

    def _stream_base(self, stream: int, ts: int) -> int:
        return _sm64(self._seed_key * _GOLD + ts * _STEP + stream)

    def _protected(self, bssid: Bssid, ts: int) -> bool:
        # The plant must survive its own noise: arrival stays detectable and
        # the door signature keeps its home observations.
        return bssid == self.home_bssid and (
            ts == self.arrival_ts or self.door_ts - 1 <= ts <= self.door_ts + 11
        )

    @staticmethod
    def _trapezoid(peak: int, start: int, end: int, ts: int) -> float:
        u = (ts - start) / (end - start)
        if u < RAMP_FRAC:
            edge = (RAMP_FRAC - u) / RAMP_FRAC
        elif u > 1.0 - RAMP_FRAC:
            edge = (u - (1.0 - RAMP_FRAC)) / RAMP_FRAC
        else:
            edge = 0.0
        return peak - RAMP_DEPTH_DB * edge

    def aps_at(self, ts: int) -> tuple[ApObservation, ...]:
        base_key = self._stream_base(1, ts)
        sigma = self._noise.rssi_sigma_db
        p_drop = self._noise.dropout_prob
        draw = 0
        obs: dict[Bssid, int] = {}

        def observe(bssid: Bssid, level: float, can_drop: bool) -> None:
            nonlocal draw
            value = level
            if sigma:
                value += _gauss(base_key, draw, sigma)
                draw += 2
            if can_drop and p_drop:
                u = _unit(base_key, draw)
                draw += 1
                if u < p_drop:
                    return
            obs[bssid] = max(-120, min(0, round(value)))

        for bssid, start, end, peak in self._route_windows:
            if start <= ts < end:
                observe(bssid, self._trapezoid(peak, start, end, ts), True)

        h_start, h_end = self._home_window
        if h_start <= ts < h_end:
            level = float(self._home_peak)
            if self.door_ts <= ts < self.door_ts + 10:
                level -= 8.0  # door-crossing RSSI dip
            observe(self.home_bssid, level, not self._protected(self.home_bssid, ts))

        for bssid, begin, end in self._neighbors:
            if begin <= ts < end:
                observe(bssid, -65.0, True)

        if not self.plan.stay_home and self.door_ts <= ts < self.door_ts + COMMUTE_SCAN_PERIOD_S:
            for bssid in self._spikes:
                observe(bssid, -67.0, False)  # the planted spike never drops out

        return tuple(ApObservation(b, r) for b, r in sorted(obs.items()))

    def gps_available(self, ts: int) -> bool:
        if not self.plan.gps_enabled:
            return False
        return any(start <= ts <= end for start, end in self._gps_windows)

    def gps_at(self, ts: int) -> GpsFix | None:
        if not self.gps_available(ts):
            return None
        depart_window, morning_window = self._gps_windows
        if depart_window[0] <= ts <= depart_window[1]:
            home_enter = self._home_window[0]
            dist_m = self._speed_mps * max(0, home_enter - ts)
        else:
            dist_m = self._speed_mps * max(0, ts - morning_window[0])
        return GpsFix(
            self.home_fix.lat_deg + dist_m / M_PER_DEG_LAT,
            self.home_fix.lon_deg,
        )

    def connected_at(self, ts: int) -> Bssid | None:
        start, end = self._connected_window
        return self.home_bssid if start <= ts < end else None

    def accel_at(self, ts: int) -> float:
        base_key = self._stream_base(2, ts)
        if not self.plan.stay_home and abs(ts - self.door_ts) <= 2:
            wobble = 0.04 * _unit(base_key, 0) - 0.02
            return round(9.81 + wobble, 3)  # planted stillness
        if self._walk_window and self._walk_window[0] <= ts <= self._walk_window[1]:
            swing = 1.8 if ts % 2 == 0 else -1.8
            return round(max(0.0, 9.8 + swing + _gauss(base_key, 0, 0.3)), 3)
        return round(9.81 + _gauss(base_key, 0, 0.01), 3)

    # -- sampling schedules ----------------------------------------------

    def scan_instants(self) -> list[int]:
        if self.plan.stay_home:
            return list(range(self.slice_start, self.slice_end, self.plan.night.scan_period_s))
        instants = list(range(self.depart_ts, self.door_ts + 31, COMMUTE_SCAN_PERIOD_S))
        period = self.plan.night.scan_period_s
        t = instants[-1] + period
        while t < self.morning_depart_ts:
            instants.append(t)
            t += period
        duration = self.plan.route.route_duration_s
        f = self.plan.mode.speed_factor
        morning_end = self.morning_depart_ts + round(duration / f) + MORNING_SCAN_PERIOD_S
        instants.extend(range(self.morning_depart_ts, min(morning_end, self.slice_end - 1), MORNING_SCAN_PERIOD_S))
        return instants

    def accel_instants(self) -> list[int]:
        if self._walk_window is None:
            return []
        return list(range(self._walk_window[0], self._walk_window[1] + 1))

    def ground_truth(self) -> GroundTruth:
        return GroundTruth(
            day_id=self.plan.day_id,
            arrival_ts=self.arrival_ts,
            door_ts=self.door_ts,
            mode=self.plan.mode,
        )


# ---------------------------------------------------------------------------
# trace synthesis

def synth_plan_day(plan: DayPlan) -> tuple[DayTrace, GroundTruth]:
    """Render one planned day as a full-rate DayTrace plus its ground truth."""
    oracle = DayOracle(plan)
    scans = []
    for ts in oracle.scan_instants():
        aps = oracle.aps_at(ts)
        visible = {o.bssid for o in aps}
        conn = oracle.connected_at(ts)
        scans.append(
            ScanRecord(
                ts=ts,
                gps=oracle.gps_at(ts),
                connected=conn if conn in visible else None,
                aps=aps,
            )
        )
    accel = tuple(AccelSample(ts, oracle.accel_at(ts)) for ts in oracle.accel_instants())
    trace = DayTrace(day_id=plan.day_id, scans=tuple(scans), accel=accel)
    return trace, oracle.ground_truth()


def synth_day(
    route: RouteSpec,
    mode: TransportMode,
    noise: NoiseParams,
    seed: int,
    *,
    day_id: date = date(2024, 1, 1),
    depart_sod: int = 18 * 3600,
    detour_s: int = 0,
    door_delay_s: int = 30,
    night: NightDwellSpec = NightDwellSpec(),
    gps_enabled: bool = True,
) -> tuple[DayTrace, GroundTruth]:
    """One synthetic day outside any scenario; deterministic in (inputs, seed)."""
    slice_start = day_slice_start(day_id)
    plan = DayPlan(
        day_id=day_id,
        slice_start=slice_start,
        route=route,
        mode=mode,
        depart_ts=slice_start + (depart_sod - NOON_SOD) % DAY_S,
        detour_s=detour_s,
        door_delay_s=door_delay_s,
        noise=noise,
        night=night,
        seed=seed,
        gps_enabled=gps_enabled,
    )
    return synth_plan_day(plan)


def synth_dataset(
    scenario: ScenarioSpec, seed: int
) -> tuple[list[DayTrace], list[GroundTruth]]:
    """All days of a scenario, each generated from its own derived seed."""
    traces = []
    truths = []
    for i in range(scenario.n_days):
        trace, truth = synth_plan_day(make_day_plan(scenario, i, seed))
        traces.append(trace)
        truths.append(truth)
    return traces, truths


# ---------------------------------------------------------------------------
# route and scenario factories

DEFAULT_HOME_FIX = GpsFix(39.98, 116.31)


def make_chain_route(
    ap_count: int = 14,
    duration_s: int = 600,
    coverage_s: int = 110,
    peak_rssi_dbm: int = -50,
    *,
    weak_bridge: bool = True,
    home_bssid: Bssid | None = None,
    home_fix: GpsFix = DEFAULT_HOME_FIX,
    bssid_base: int = 0x1000_00,
) -> RouteSpec:
    """Overlapping AP chain ending in a persistent home AP.

    With ``weak_bridge`` the middle AP is demoted to a -78 dBm bridge and
    its neighbors pulled back, leaving a stretch where only a weak AP is
    audible; useful for exercising RSSI-filter behavior.
    """
    if ap_count < 2:
        raise ConfigurationError("need at least 2 route APs")
    home_bssid = home_bssid or bssid_from_int(0x1F_FF00)
    step = (duration_s - coverage_s) / (ap_count - 1)
    placements = []
    for i in range(ap_count):
        enter = round(i * step / 5) * 5
        exit_ = min(enter + coverage_s, duration_s)
        placements.append(ApPlacement(bssid_from_int(bssid_base + i), enter, exit_, peak_rssi_dbm))
    if weak_bridge and ap_count >= 8:
        mid = ap_count // 2
        bridge = placements[mid]
        placements[mid] = replace(bridge, peak_rssi_dbm=-78)
        before = placements[mid - 1]
        after = placements[mid + 1]
        gap_lo = bridge.enter_offset_s + 35
        gap_hi = bridge.exit_offset_s - 35
        placements[mid - 1] = replace(before, exit_offset_s=max(before.enter_offset_s + 5, gap_lo))
        placements[mid + 1] = replace(after, enter_offset_s=min(after.exit_offset_s - 5, gap_hi))
    home = ApPlacement(
        bssid=home_bssid,
        enter_offset_s=duration_s - 40,
        exit_offset_s=duration_s + DAY_S,
        peak_rssi_dbm=-45,
    )
    return RouteSpec(tuple(placements) + (home,), home_bssid, home_fix, duration_s)


WALK = TransportMode("walk", 1.0)
CYCLE = TransportMode("cycle", 2.0)


def simple_walk_scenario(n_days: int = 24) -> ScenarioSpec:
    """Walk-only commute with moderate noise; the plain evaluation setting."""
    return ScenarioSpec(
        route=make_chain_route(),
        n_days=n_days,
        mode_schedule=ModeMix(modes=((WALK, 1.0),), speed_jitter_frac=0.05),
        detour_prob=0.0,
        detour_duration_s=90,
        rssi_sigma_db=4.0,
        dropout_prob=0.03,
        depart_time_jitter_s=300,
    )


def mixture_scenario(n_days: int = 35) -> ScenarioSpec:
    """Walk/cycle mix with occasional pre-arrival detours."""
    return ScenarioSpec(
        route=make_chain_route(),
        n_days=n_days,
        mode_schedule=ModeMix(modes=((WALK, 0.5), (CYCLE, 0.5)), speed_jitter_frac=0.05),
        detour_prob=0.2,
        detour_duration_s=90,
        rssi_sigma_db=4.0,
        dropout_prob=0.03,
        depart_time_jitter_s=300,
    )


def mining_scenario(n_days: int = 14) -> ScenarioSpec:
    """Small, fast scenario for home-AP mining runs."""
    return ScenarioSpec(
        route=make_chain_route(ap_count=4, duration_s=240, coverage_s=80, weak_bridge=False),
        n_days=n_days,
        mode_schedule=ModeMix(modes=((WALK, 1.0),), speed_jitter_frac=0.03),
        rssi_sigma_db=2.0,
        dropout_prob=0.02,
        depart_time_jitter_s=120,
    )


def relocation_scenario(move_day: int = 10, n_days: int = 16) -> ScenarioSpec:
    """The user moves house on ``move_day``; the home AP changes BSSID."""
    base = simple_walk_scenario(n_days=n_days)
    return replace(
        base,
        relocation=Relocation(move_day=move_day, new_home_bssid=bssid_from_int(_NEW_HOME_BSSID)),
    )


def door_scenario(n_days: int = 30) -> ScenarioSpec:
    return simple_walk_scenario(n_days=n_days)


SCENARIO_PRESETS = {
    "simple": simple_walk_scenario,
    "mixture": mixture_scenario,
    "mining": mining_scenario,
    "relocation": relocation_scenario,
    "door": door_scenario,
}


# ---------------------------------------------------------------------------
# scenario files (INI-style key/value sections)

def _parse_sod(text: str) -> int:
    text = text.strip()
    if ":" in text:
        hh, mm = text.split(":", 1)
        return int(hh) * 3600 + int(mm) * 60
    return int(text)


def load_scenario(path) -> ScenarioSpec:
    """Read a scenario description file.

    Sections: [route] chain geometry, [modes] one ``name = factor weight``
    entry per mode plus ``speed_jitter``, [days] calendar and detours,
    [noise], [night], and an optional [relocation].
    """
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigurationError(f"cannot read scenario file {path!r}")

    route_sec = cp["route"] if cp.has_section("route") else {}
    route = make_chain_route(
        ap_count=int(route_sec.get("ap_count", 14)),
        duration_s=int(route_sec.get("duration_s", 600)),
        coverage_s=int(route_sec.get("coverage_s", 110)),
        peak_rssi_dbm=int(route_sec.get("peak_rssi_dbm", -50)),
        weak_bridge=str(route_sec.get("weak_bridge", "true")).lower() in ("1", "true", "yes"),
        home_fix=GpsFix(
            float(route_sec.get("home_lat", DEFAULT_HOME_FIX.lat_deg)),
            float(route_sec.get("home_lon", DEFAULT_HOME_FIX.lon_deg)),
        ),
    )

    modes = []
    jitter = 0.0
    if cp.has_section("modes"):
        for key, value in cp["modes"].items():
            if key == "speed_jitter":
                jitter = float(value)
                continue
            parts = value.split()
            modes.append((TransportMode(key, float(parts[0])), float(parts[1])))
    if not modes:
        modes = [(WALK, 1.0)]
    mode_schedule = ModeMix(modes=tuple(modes), speed_jitter_frac=jitter)

    days_sec = cp["days"] if cp.has_section("days") else {}
    noise_sec = cp["noise"] if cp.has_section("noise") else {}
    night_sec = cp["night"] if cp.has_section("night") else {}

    night = NightDwellSpec(
        scan_period_s=int(night_sec.get("scan_period_s", 600)),
        morning_depart_sod=_parse_sod(str(night_sec.get("morning_depart", "08:00"))),
        neighbor_count=int(night_sec.get("neighbor_count", 3)),
        neighbor_dwell_s=int(night_sec.get("neighbor_dwell_s", 5400)),
    )

    relocation = None
    if cp.has_section("relocation"):
        relocation = Relocation(
            move_day=int(cp["relocation"]["move_day"]),
            new_home_bssid=bssid_from_int(_NEW_HOME_BSSID),
        )

    return ScenarioSpec(
        route=route,
        n_days=int(days_sec.get("n_days", 14)),
        mode_schedule=mode_schedule,
        detour_prob=float(days_sec.get("detour_prob", 0.0)),
        detour_duration_s=int(days_sec.get("detour_duration_s", 90)),
        rssi_sigma_db=float(noise_sec.get("rssi_sigma_db", 4.0)),
        dropout_prob=float(noise_sec.get("dropout_prob", 0.03)),
        depart_time_jitter_s=int(days_sec.get("depart_jitter_s", 300)),
        night_dwell=night,
        depart_sod=_parse_sod(str(days_sec.get("depart", "18:00"))),
        start_day=date.fromisoformat(str(days_sec.get("start_day", "2024-01-01"))),
        relocation=relocation,
    )


def resolve_scenario(name_or_path, n_days: int | None = None) -> ScenarioSpec:
    """Scenario from a file path or a preset name; optional day-count override."""
    import os

    if isinstance(name_or_path, str) and not os.path.exists(name_or_path):
        preset = SCENARIO_PRESETS.get(name_or_path)
        if preset is None:
            raise ConfigurationError(
                f"{name_or_path!r} is neither a file nor a preset "
                f"({', '.join(sorted(SCENARIO_PRESETS))})"
            )
        scenario = preset()
    else:
        scenario = load_scenario(name_or_path)
    if n_days is not None:
        scenario = replace(scenario, n_days=n_days)
    return scenario

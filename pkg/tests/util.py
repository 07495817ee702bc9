"""Small builders shared by the test modules."""

from __future__ import annotations

from datetime import date

from timeloc.trace_model import (
    AccelSample,
    ApObservation,
    Bssid,
    DayTrace,
    GpsFix,
    ScanRecord,
    day_slice_start,
)

DAY = date(2024, 1, 1)
SLICE = day_slice_start(DAY)
NIGHT_START = SLICE + 32_400   # 21:00
NIGHT_END = SLICE + 64_800     # 06:00 next morning


def B(text: str) -> Bssid:
    return Bssid(text)


def bss(i: int) -> Bssid:
    return Bssid(f"02:00:00:00:00:{i:02x}")


def scan(ts, rssi_by_bssid, gps=None, conn=None) -> ScanRecord:
    aps = tuple(ApObservation(b, r) for b, r in sorted(rssi_by_bssid.items()))
    return ScanRecord(ts=ts, gps=gps, connected=conn, aps=aps)


def trace(scans, accel=(), day=DAY) -> DayTrace:
    return DayTrace(day_id=day, scans=tuple(scans), accel=tuple(accel))


def accel(ts, mag) -> AccelSample:
    return AccelSample(ts, mag)


def fix(lat, lon) -> GpsFix:
    return GpsFix(lat, lon)

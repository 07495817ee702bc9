"""Command-line interface tying the pipeline together.

Subcommands: simulate, mine-home, build-profile, predict, detect-door,
fsm-run, evaluate, sweep.  All outputs are deterministic for a fixed
--seed; nothing is written outside --out / the profile store.  Exit codes:
0 on success, 1 on validation errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from datetime import date

from . import door_detect, eval_harness, home_mining, sensing_fsm, simulator, time_map
from .errors import TimelocError
from .simulator import GroundTruth, TransportMode
from .trace_model import (
    Bssid,
    DayTrace,
    load_accel_file,
    load_trace_file,
    serialize_accel_samples,
    serialize_scan_records,
    slice_into_days,
)

PROFILE_STORE_ENV = "TLS_PROFILE_STORE"


@dataclass(frozen=True)
class RunConfig:
    """Resolved common settings for one CLI invocation."""

    scenario_path: str | None = None
    seed: int = 0
    profile_store: str = "."
    output_dir: str = "."
    rssi_threshold_dbm: int = -70
    window_days: int = 7


def _default_store() -> str:
    return os.environ.get(PROFILE_STORE_ENV, ".")


def _write(path: str, data: bytes | str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode) as fh:
        fh.write(data)


def _emit(args, name: str, data: bytes | str) -> str:
    path = os.path.join(args.out, name)
    _write(path, data)
    return path


def _ground_truth_csv(truths) -> str:
    lines = ["day_id,arrival_ts,door_ts,mode"]
    for g in truths:
        lines.append(
            f"{g.day_id.isoformat()},{g.arrival_ts},{g.door_ts},"
            f"{g.mode.name}:{g.mode.speed_factor:.4f}"
        )
    return "\n".join(lines) + "\n"


def _parse_ground_truth_csv(text: str) -> list[GroundTruth]:
    truths = []
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        day_id, arrival, door, mode = line.split(",")
        name, factor = mode.split(":")
        truths.append(
            GroundTruth(
                day_id=date.fromisoformat(day_id),
                arrival_ts=int(arrival),
                door_ts=int(door),
                mode=TransportMode(name, float(factor)),
            )
        )
    return truths


def _load_days(traces_dir: str) -> list[DayTrace]:
    records = load_trace_file(os.path.join(traces_dir, "trace.jsonl"))
    accel_path = os.path.join(traces_dir, "accel.jsonl")
    accel = load_accel_file(accel_path) if os.path.exists(accel_path) else []
    return slice_into_days(records, accel)


def _load_truths(traces_dir: str) -> list[GroundTruth]:
    path = os.path.join(traces_dir, "ground_truth.csv")
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_ground_truth_csv(fh.read())


def _parse_threshold(text: str) -> int | None:
    return None if text == "all" else int(text)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_simulate(args) -> int:
    scenario = simulator.resolve_scenario(args.scenario, n_days=args.days)
    traces, truths = simulator.synth_dataset(scenario, args.seed)
    records = [r for t in traces for r in t.scans]
    accel = [a for t in traces for a in t.accel]
    _emit(args, "trace.jsonl", serialize_scan_records(records))
    _emit(args, "accel.jsonl", serialize_accel_samples(accel))
    _emit(args, "ground_truth.csv", _ground_truth_csv(truths))
    print(f"wrote {len(traces)} day(s) to {args.out}")
    return 0


def _tally_csv(vote) -> str:
    lines = ["bssid,votes"]
    for bssid, votes in sorted(vote.tally.items()):
        lines.append(f"{bssid},{votes}")
    lines.append(f"winner,{vote.winner},confidence,{vote.confidence:.4f}")
    return "\n".join(lines) + "\n"


def _cmd_mine_home(args) -> int:
    days = _load_days(args.traces)
    vote = home_mining.vote_home_ap(days)
    text = _tally_csv(vote)
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return 0


def _cmd_build_profile(args) -> int:
    days = _load_days(args.traces)
    if not days:
        raise TimelocError("no days found in the trace directory")
    seed_days = days[: args.window_days] or days
    home = home_mining.vote_home_ap(seed_days).winner
    profile = time_map.empty_profile(home, days[0].day_id)
    for i, day in enumerate(days):
        window_traces = days[max(0, i - args.window_days + 1) : i + 1]
        try:
            new_map = time_map.build_day_map(day, profile.home_bssid)
        except TimelocError:
            new_map = None
        profile = time_map.update_profile(
            profile, new_map, window_traces, window_days=args.window_days
        )
    path = time_map.save_profile(profile, args.store, args.device)
    print(
        f"profile for {args.device}: home {profile.home_bssid}, "
        f"{len(profile.window)} window day(s), {len(profile.fallback)} fallback "
        f"entries -> {path}"
    )
    return 0


def _cmd_predict(args) -> int:
    if args.method == "tls":
        if not args.bssid or args.tdr is None:
            raise TimelocError("tls prediction needs --bssid and --tdr")
        profile = time_map.load_profile(args.store, args.device)
        p = time_map.predict_tl(profile, Bssid(args.bssid), args.tdr)
        print(f"tl_s={p.tl_seconds},source={p.source},bssid={p.matched_bssid},lookups={p.lookups}")
        return 0
    # nearest-neighbor: locate the query scan, build history from the window
    if args.ts is None:
        raise TimelocError("nn prediction needs --ts")
    days = _load_days(args.traces)
    day = next((d for d in days if d.scans and d.scans[0].ts <= args.ts <= d.scans[-1].ts), None)
    if day is None:
        raise TimelocError(f"no day contains ts {args.ts}")
    scan = next((s for s in day.scans if s.ts == args.ts), None)
    if scan is None:
        raise TimelocError(f"no scan at ts {args.ts}")
    window = [d for d in days if 0 < (day.day_id - d.day_id).days <= args.window_days]
    if not window:
        raise TimelocError("no history days before the query day")
    home = home_mining.vote_home_ap(window).winner
    from .nn_baseline import build_history, filter_env, nn_predict

    history = build_history(window, home, args.threshold)
    fingerprint = filter_env(scan, args.threshold)
    p, comparisons = nn_predict(history, fingerprint, seed=args.seed)
    print(f"tl_s={p.tl_seconds},source=nn,comparisons={comparisons}")
    return 0


def _cmd_detect_door(args) -> int:
    days = _load_days(args.traces)
    if args.day:
        wanted = date.fromisoformat(args.day)
        days = [d for d in days if d.day_id == wanted]
        if not days:
            raise TimelocError(f"no trace for day {args.day}")
    home = Bssid(args.home) if args.home else home_mining.vote_home_ap(days).winner
    lines = ["ts,cond1,cond2,cond3"]
    for day in days:
        for event in door_detect.detect_door_events(day, home):
            c1, c2, c3 = event.conditions_met
            lines.append(f"{event.ts},{int(c1)},{int(c2)},{int(c3)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return 0


def _cmd_fsm_run(args) -> int:
    scenario = simulator.resolve_scenario(args.scenario)
    plan = simulator.make_day_plan(scenario, args.day, args.seed)
    oracle = simulator.DayOracle(plan)
    trace, stats = sensing_fsm.run_fsm_day(oracle)
    _emit(args, "sensed.jsonl", serialize_scan_records(trace.scans))
    _emit(args, "sensed_accel.jsonl", serialize_accel_samples(trace.accel))
    stats_csv = (
        "wifi_scans,gps_reads,accel_samples,wakeups\n"
        f"{stats.wifi_scans},{stats.gps_reads},{stats.accel_samples},{stats.wakeups}\n"
    )
    _emit(args, "stats.csv", stats_csv)
    print(
        f"sensed {stats.wifi_scans} scans, {stats.gps_reads} GPS reads, "
        f"{stats.accel_samples} accel samples over {stats.wakeups} wakeups"
    )
    return 0


def _cmd_evaluate(args) -> int:
    dataset = eval_harness.EvalDataset.from_lists(_load_days(args.traces), _load_truths(args.traces))
    methods = ("tls", "nn") if args.method == "both" else (args.method,)
    level = _parse_threshold(args.threshold)
    label = "all" if level is None else str(level)
    rows = []
    for method in methods:
        report = eval_harness.evaluate(
            method, dataset, rssi_threshold_dbm=level, seed=args.seed
        )
        rows.append((label, report))
        _emit(args, f"cdf_{method}.csv", eval_harness.cdf_csv(report))
    _emit(args, "report.csv", eval_harness.report_csv(rows))
    for _, r in rows:
        print(
            f"{r.method}: n={r.n} median_abs={r.median_abs_s:.1f}s "
            f"within100={r.pct_within_100s:.2f} early={r.early_fraction:.2f} "
            f"probe_cost={r.probe_cost:.1f}"
        )
    return 0


def _cmd_sweep(args) -> int:
    dataset = eval_harness.EvalDataset.from_lists(_load_days(args.traces), _load_truths(args.traces))
    levels = [_parse_threshold(x.strip()) for x in args.levels.split(",") if x.strip()]
    if len(levels) < 2:
        raise TimelocError("sweep needs at least two levels, e.g. --levels all,-70")
    rows = eval_harness.sweep_rssi_filter(dataset, levels, seed=args.seed)
    _emit(args, "sweep.csv", eval_harness.report_csv(rows))
    for label, r in rows:
        print(f"level={label} {r.method}: median_abs={r.median_abs_s:.1f}s probe_cost={r.probe_cost:.1f}")
    return 0


# ---------------------------------------------------------------------------
# argument wiring

def build_parser() -> argparse.ArgumentParser:
    cfg = RunConfig()
    parser = argparse.ArgumentParser(
        prog="timeloc",
        description="Arrival-time localization from WiFi scan traces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(
            name, help=help_text, formatter_class=argparse.ArgumentDefaultsHelpFormatter
        )
        p.set_defaults(func=func)
        return p

    p = add("simulate", _cmd_simulate, "generate a synthetic dataset")
    p.add_argument("--scenario", required=True, help="scenario file or preset name")
    p.add_argument("--seed", type=int, default=cfg.seed, help="master seed")
    p.add_argument("--days", type=int, default=None, help="override the scenario day count")
    p.add_argument("--out", required=True, help="output directory")

    p = add("mine-home", _cmd_mine_home, "vote for the home AP from nightly dwell")
    p.add_argument("--traces", required=True, help="directory with trace.jsonl")
    p.add_argument("--out", default=None, help="also write the tally CSV here")

    p = add("build-profile", _cmd_build_profile, "build and store a user profile")
    p.add_argument("--traces", required=True, help="directory with trace.jsonl")
    p.add_argument("--device", required=True, help="device id naming the profile file")
    p.add_argument("--store", default=_default_store(), help=f"profile store (or ${PROFILE_STORE_ENV})")
    p.add_argument("--window-days", type=int, default=cfg.window_days, help="sliding window length")

    p = add("predict", _cmd_predict, "predict seconds-to-home")
    p.add_argument("--method", choices=("tls", "nn"), default="tls", help="prediction method")
    p.add_argument("--store", default=_default_store(), help=f"profile store (or ${PROFILE_STORE_ENV})")
    p.add_argument("--device", default="device", help="profile device id")
    p.add_argument("--bssid", default=None, help="just-lost AP (tls)")
    p.add_argument("--tdr", type=int, default=None, help="observed reachable seconds (tls)")
    p.add_argument("--traces", default=None, help="trace directory (nn)")
    p.add_argument("--ts", type=int, default=None, help="query scan timestamp (nn)")
    p.add_argument("--threshold", type=_parse_threshold, default=cfg.rssi_threshold_dbm, help="RSSI filter level")
    p.add_argument("--window-days", type=int, default=cfg.window_days, help="sliding window length")
    p.add_argument("--seed", type=int, default=cfg.seed, help="tie-break seed (nn)")

    p = add("detect-door", _cmd_detect_door, "detect door-opening events")
    p.add_argument("--traces", required=True, help="directory with trace.jsonl")
    p.add_argument("--day", default=None, help="restrict to one day (YYYY-MM-DD)")
    p.add_argument("--home", default=None, help="home BSSID override")
    p.add_argument("--out", default=None, help="also write the events CSV here")

    p = add("fsm-run", _cmd_fsm_run, "run the duty-cycled sensing day")
    p.add_argument("--scenario", required=True, help="scenario file or preset name")
    p.add_argument("--seed", type=int, default=cfg.seed, help="master seed")
    p.add_argument("--day", type=int, default=0, help="scenario day index")
    p.add_argument("--out", required=True, help="output directory")

    p = add("evaluate", _cmd_evaluate, "error report for tls/nn predictions")
    p.add_argument("--method", choices=("tls", "nn", "both"), default="both", help="method(s) to run")
    p.add_argument("--traces", required=True, help="directory with trace.jsonl + ground_truth.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threshold", default=str(cfg.rssi_threshold_dbm), help='RSSI filter level or "all"')
    p.add_argument("--seed", type=int, default=cfg.seed, help="nn tie-break seed")

    p = add("sweep", _cmd_sweep, "evaluate across RSSI filter levels")
    p.add_argument("--traces", required=True, help="directory with trace.jsonl + ground_truth.csv")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--levels", default="all,-70", help="comma-separated levels")
    p.add_argument("--seed", type=int, default=cfg.seed, help="nn tie-break seed")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TimelocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

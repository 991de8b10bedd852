#!/usr/bin/env python3
"""End-to-end demo: synthesize a triangle dataset, then run every command.

Writes all outputs under the chosen directory (default ./pipeline_out) and
prints a short summary of what each stage produced.
"""

import argparse
import json
import sys
from pathlib import Path

from triarb.cli import main as triarb_main

MONDAY = 4 * 86400  # 1970-01-05, keeps the weekday grid simple


def synth_payload(seed: int) -> dict:
    injections = []
    t = MONDAY + 300
    for k in range(60):
        dur = 1 + (k * 7) % 6
        injections.append(
            {
                "start": t,
                "duration_seconds": dur,
                "magnitude_bp": round(0.5 + (k % 12) * 0.5, 2),
                "direction": 1 + k % 2,
            }
        )
        t += dur + 180 + (k * 13) % 120
    return {
        "seed": seed,
        "window": {"start": MONDAY, "end": MONDAY + 6 * 3600, "weekdays": "mon-fri"},
        "pairs": {
            "EUR/USD": {"mid": 1.2065, "vol": 2e-6, "point": "0.00001", "spread_points": 2},
            "USD/CHF": {"mid": 1.3030, "vol": 2e-6, "point": "0.00001", "spread_points": 2},
            "EUR/CHF": {"point": "0.00001", "spread_points": 2},
        },
        "gap_rate": 0.0005,
        "injections": injections,
    }


def run(argv) -> int:
    rc = triarb_main(argv)
    if rc != 0:
        print(f"command failed ({rc}): {' '.join(argv)}", file=sys.stderr)
        sys.exit(rc)
    return rc


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="pipeline_out", help="output root directory")
    parser.add_argument("--seed", type=int, default=20250810)
    args = parser.parse_args()

    root = Path(args.out)
    root.mkdir(parents=True, exist_ok=True)
    synth_cfg = root / "synth_config.json"
    synth_cfg.write_text(json.dumps(synth_payload(args.seed), indent=2))

    data = root / "data"
    window = f"{MONDAY}..{MONDAY + 6 * 3600}"
    run(["synth", "--synth-config", str(synth_cfg), "--out-dir", str(data)])
    n_files = len(list(data.glob("*.csv")))
    print(f"synth: wrote {n_files} tick files to {data}")

    detect = root / "detect"
    run(["detect", "--data-dir", str(data), "--window", window, "--out-dir", str(detect)])
    stats = json.loads((detect / "duration_stats.json").read_text())
    print(
        f"detect: {stats['count']} opportunities, mean duration {stats['mean']:.2f}s,"
        f" max {stats['max']}s"
    )

    seasonal = root / "seasonal"
    run(["seasonal", "--data-dir", str(data), "--window", window, "--out-dir", str(seasonal)])
    print(f"seasonal: hourly/daily profiles in {seasonal}")

    sim = root / "sim"
    run(
        ["simulate", "--data-dir", str(data), "--window", window, "--out-dir", str(sim),
         "--runs", "100", "--seed", str(args.seed)]
    )
    summary = json.loads((sim / "summary.json").read_text())
    for entry in summary["per_config"]:
        if entry["gamma_t"] != 1.0:
            continue
        print(
            f"simulate[{entry['scenario']}]: {entry['trades']} trades,"
            f" analytic total at p={summary['p']}: {entry['analytic_total_profit']:.0f},"
            f" break-even p: {entry.get('analytic_break_even_p')}"
        )

    cmp_dir = root / "compare"
    run(
        ["compare", "--dataset", f"a={data}", "--dataset", f"b={data}",
         "--window", window, "--out-dir", str(cmp_dir)]
    )
    print(f"compare: {cmp_dir / 'comparison.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""How much does a 600 ms satellite backhaul cost a registration?

The "ntn" preset models a base station whose only route to the core is a
high-latency link. Sensors with pre-cached decisions register locally in
express mode; ordinary users pay the full round trips. The gap between the
two medians is almost exactly the frozen message-count constants times the
one-way latency.
"""

import statistics

from randelsim import load_preset, run_scenario


def main():
    config = load_preset("ntn")
    report = run_scenario(config)

    by_path = {}
    for row in report.rows:
        if row.outcome == "success" and row.request_type == "registration":
            by_path.setdefault(row.path, []).append(row.latency_ms)

    print(f"one-way backhaul latency: {config.backhaul.base_latency_ms} ms")
    for path, values in sorted(by_path.items()):
        print(f"  {path:<10} n={len(values):<4} "
              f"median={statistics.median(values):.0f} ms  "
              f"max={max(values)} ms")

    express = statistics.median(by_path["express"])
    standard = statistics.median(by_path["standard"])
    express_bytes = sum(r.backhaul_bytes for r in report.rows
                        if r.path == "express")
    print(f"\nexpress mode saves {standard - express:.0f} ms per registration"
          f" and puts {express_bytes} bytes on the backhaul.")


if __name__ == "__main__":
    main()

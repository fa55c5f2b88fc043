"""Who stays connected when the backhaul dies?

The bundled "disaster" preset cuts the link to the core for the entire run
and throws four kinds of devices at the base station: pre-approved sensors,
devices with cached state, complete strangers, and roamers from another
network. Running the same workload under each delegation design shows the
availability/security trade-off directly: more capability at the edge keeps
more cohorts online, at the price of holding more key material there.
"""

from randelsim import compare_designs, load_preset


def main():
    config = load_preset("disaster")
    comparison = compare_designs(config)

    cohorts = sorted({r.cohort for r in comparison.reports["baseline"].rows})
    header = f"{'design':<20}" + "".join(f"{c:>10}" for c in cohorts)
    print(header)
    print("-" * len(header))
    for design, report in comparison.reports.items():
        rates = report.aggregates["success_rate_by_cohort"]
        cells = "".join(f"{rates.get(c, 0.0):>10.0%}" for c in cohorts)
        print(f"{design:<20}{cells}")

    print()
    print("key material resident at the edge, per design:")
    for design, report in comparison.reports.items():
        flags = "; ".join(report.audit_flags) or "none"
        print(f"  {design:<20}{flags}")


if __name__ == "__main__":
    main()

"""Run the structural checks behind the estimator's consistency.

The estimator's normalization argument leans on deterministic properties
of the edge-length functional: exact translation invariance and power
scaling, a boundary variant that never exceeds the plain sum and is
superadditive over subcube partitions, bounded in-degree, bounded growth,
and smooth response to edits and small perturbations. Each check measures
one property on concrete instances; the exact ones must hold to the last
bit of slack, the approximate ones against constants frozen from a
one-time survey.

The same grid is available from the CLI as a JSON report:

    nnentropy diagnostics --quick --out report.json
"""

from nnentropy import run_diagnostics


def main() -> None:
    summary = run_diagnostics(seed=0, quick=True)
    width = max(len(name) for name, _, _ in summary.entries)
    for name, config, report in summary.entries:
        flag = "ok  " if report.passed else "FAIL"
        keys = ", ".join(f"{k}={v}" for k, v in config.items())
        print(f"[{flag}] {name:<{width}} {keys}")
    print(f"\nall checks passed: {summary.passed}")


if __name__ == "__main__":
    main()

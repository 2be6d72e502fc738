"""Acceptance criteria, each at its stated budget and tolerance.

Under pytest every criterion prints one PASS/FAIL line (capture is bypassed
for that line).  Run the module directly to get the same report without pytest::

    python3 tests/test_acceptance.py [--seed N]
"""

import argparse
import sys

import pytest

from brownian_rays.cli import DEFAULT_SEED
from brownian_rays.verification import DEFAULT_PATHS, run_check

# (criterion, check name, runtime limit in seconds)
CRITERIA = [
    (1, "round_trip", 1.0),
    (2, "covariance", 30.0),
    (3, "queue_transient", 3 * 120.0),
    (4, "reductions", 1.0),
    (5, "boundaries", 5.0),
    (6, "pinned", 120.0),
    (7, "bayes", 30.0),
    (8, "endpoint_mean", 60.0),
    (9, "option_price", 30.0),
    (10, "hedging", 120.0),
    (11, "embedded", 30.0),
    (12, "determinism", 10.0),
]


def _report(number, result, limit):
    timing = "ok" if result.seconds < limit else f"over {limit:g}s"
    return f"[criterion {number:>2}] {result.line()} runtime {timing}"


@pytest.mark.slow
@pytest.mark.parametrize("number,name,limit", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, name, limit, capsys):
    result = run_check(name, DEFAULT_SEED, DEFAULT_PATHS)
    with capsys.disabled():
        print("\n" + _report(number, result, limit))
    assert result.passed, result.line()
    assert result.seconds < limit, f"{name} took {result.seconds:.1f}s, limit {limit:g}s"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args(argv)
    failed = 0
    for number, name, limit in CRITERIA:
        result = run_check(name, args.seed, DEFAULT_PATHS)
        print(_report(number, result, limit), flush=True)
        failed += not (result.passed and result.seconds < limit)
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance criteria 1-11, one pass/fail line each.

The tolerances live in :mod:`carleson_lab.verify` and are shared with the
``carleson-lab verify`` command. ``verify all`` runs once with one worker thread
and once with four at the same seed; criteria 1-10 read the first run and
criterion 11 compares the two summaries byte for byte.
"""

import time

import pytest

import conftest
from carleson_lab import parallel
from carleson_lab.verify import run_suite, summary_json

SEED = 0

# criterion -> (suite, wall-clock budget of that criterion in seconds)
CRITERIA = {
    1: ("geometry", 5, "Mobius identity and involution to 1e-10 on 10^4 pairs"),
    2: ("quadrature", 10, "weighted volumes and monomial norms to 1e-8"),
    3: ("quadrature", 60, "kernel integral bracket ratio < 50 up to |z| = 0.999"),
    4: ("lattice", 60, "covering, r/2-separation and bounded overlap"),
    5: ("theoremA", 180, "ball and Berezin routes agree; flip at threshold +-0.1"),
    6: ("theoremB", 180, "lattice and Berezin routes agree for lambda < 1; flip +-0.1"),
    7: ("theorem11", 180, "product constant within [1e-2, 1e2] of the norm; zero iff mu = 0"),
    8: ("toeplitz", 240, "Toeplitz equivalence, reproducing property, homogeneity"),
    9: ("vanishing", 120, "compactness matches vanishing; dv at threshold not vanishing"),
    10: ("section5", 240, "radial-derivative identities, F(p,q,s) brackets, J/I/M verdicts"),
}
TOTAL_BUDGET = 900


def _record(k: int, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'} criterion {k}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)


def _verify_all(threads: int):
    prev = parallel._override
    parallel.set_threads(threads)
    try:
        t0 = time.perf_counter()
        results = run_suite("all", seed=SEED)
        return results, summary_json(results, SEED), time.perf_counter() - t0
    finally:
        parallel.set_threads(prev)


@pytest.fixture(scope="module")
def runs():
    first = _verify_all(1)
    second = _verify_all(4)
    return first, second


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(runs, k):
    suite, budget, what = CRITERIA[k]
    results = {r.name: r for r in runs[0][0]}
    res = results[suite]
    checks = [c for c in res.checks if c.criterion == k]
    failed = [c.name for c in checks if not c.passed]
    in_budget = res.seconds < budget
    passed = bool(checks) and not failed and in_budget
    detail = f"{what} ({len(checks) - len(failed)}/{len(checks)} checks, suite {suite} {res.seconds:.1f} s"
    detail += f", budget {budget} s)" + (f"; failing: {failed}" if failed else "")
    _record(k, passed, detail)
    assert checks, f"no checks tagged with criterion {k}"
    assert not failed, failed
    assert in_budget, f"suite {suite} took {res.seconds:.1f} s (budget {budget} s)"


@pytest.mark.slow
def test_criterion_11_determinism(runs):
    (_, a, ta), (_, b, tb) = runs
    same = a == b
    in_budget = ta + tb < TOTAL_BUDGET
    _record(11, same and in_budget,
            f"summary JSON identical across repeated runs with 1 and 4 threads ({len(a)} bytes, "
            f"{ta + tb:.0f} s for both runs, budget {TOTAL_BUDGET} s)")
    assert same
    assert in_budget


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))

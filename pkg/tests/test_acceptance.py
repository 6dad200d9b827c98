"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` (the lines are also repeated in
the terminal summary), or ``python3 tests/test_acceptance.py``.
"""
import math
import sys
import time
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from worldfrac.hilbert import OrthogonalPartition, StateVector, random_partition, random_state
from worldfrac.inference import (A_UP, UP, alice_bob_hypotheses, misled_fraction,
                                 model_compare, update_credence)
from worldfrac.measure import (agree, independence_check, projection_factor_analytic,
                               projection_factor_mc, pythagorean_check)
from worldfrac.worlds import (build_branch_tree, count_label, gleason_dependence_demo,
                              repeat_distribution, tail_fraction, world_fractions)

RESULTS: list[str] = []


def report(tag: str, ok: bool, detail: str) -> None:
    line = f"{tag} {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_ac1_born_values():
    t0 = time.perf_counter()
    v = StateVector.from_complex([math.sqrt(3) / 2, 0.5], ["↑", "↓"])
    part = OrthogonalPartition.by_label(v.basis)
    f = world_fractions(v, part)
    checks = []
    for k, (o, want) in enumerate([("↑", 0.75), ("↓", 0.25)]):
        pi = projection_factor_analytic(v, part, o)
        est = projection_factor_mc(v, part, o, n=1_000_000, seed=k + 1, stream=k)
        checks += [abs(f[o] - want) < 1e-12, abs(pi - want) < 1e-12,
                   abs(est.value - pi) < 4 * est.std_error]
    dt = time.perf_counter() - t0
    report("AC1", all(checks) and dt < 5.0,
           f"fractions {f['↑']:.15f}/{f['↓']:.15f}, MC at 1e6 within 4 se, {dt:.2f}s")


def test_ac2_pythagoras():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst, good = 0.0, 0
    trials = 1000
    for t in range(trials):
        v = random_state("complex", int(rng.integers(2, 9)), rng)
        part = random_partition(v.basis, rng)
        rep = pythagorean_check(v, part, n=20_000, seed=t)
        worst = max(worst, abs(rep.deviation))
        good += abs(rep.mc_sum - 1.0) < 4 * rep.mc_std_error
    dt = time.perf_counter() - t0
    frac = good / trials
    report("AC2", worst < 1e-12 and frac >= 0.99 and dt < 120,
           f"max analytic deviation {worst:.2e}, MC within 4 se in {frac:.1%}, {dt:.1f}s")


def test_ac3_region_independence():
    rng = np.random.default_rng(3)
    fields = ["real", "complex", "quaternion"]
    good = 0
    trials = 100
    for t in range(trials):
        v = random_state(fields[t % 3], int(rng.integers(2, 7)), rng)
        part = random_partition(v.basis, rng)
        o = part.outcomes[int(rng.integers(len(part.outcomes)))]
        good += independence_check(v, part, o, n=50_000, seed=t)["consistent"]
    frac = good / trials
    report("AC3", frac >= 0.99, f"ball/annulus/box agree pairwise within 4 sigma in {frac:.0%} of pairs")


def test_ac4_statistics():
    t0 = time.perf_counter()
    d = repeat_distribution(0.75, 10_000)
    inside = 1.0 - tail_fraction(d, 3.0)
    dt = time.perf_counter() - t0
    # exact big-integer window mass over counts 7500 +- 129.9
    lo, hi = math.ceil(7500 - 3 * 43.30127018922193), math.floor(7500 + 3 * 43.30127018922193)
    exact = Fraction(sum(math.comb(10_000, n) * 3 ** n for n in range(lo, hi + 1)), 4 ** 10_000)
    ok = (abs(d.sigma - 0.004330) < 1e-6 and abs(0.9973 - inside) < 0.0005
          and abs(inside - float(exact)) < 1e-12 and dt < 1.0)
    report("AC4", ok, f"sigma {d.sigma:.6f}, 3 sigma = {3 * d.sigma:.4f}, window mass {inside:.6f} "
                      f"(exact {float(exact):.6f}), {dt:.3f}s")


def test_ac5_alice_bob():
    hyps = alice_bob_hypotheses()
    got = {n: update_credence(hyps, [UP] * n)[A_UP] for n in (1, 2, 10)}
    want = {1: 2 / 3, 2: 4 / 5, 10: 1024 / 1025}
    misled = misled_fraction(hyps, [UP] * 10, A_UP)
    ok = all(abs(got[n] - want[n]) < 1e-12 for n in want) and abs(misled - 1 / 2048) < 1e-12
    report("AC5", ok, f"credences {got[1]:.6f}, {got[2]:.6f}, {got[10]:.6f}; misled {misled:.3e}")


def test_ac6_tree_oracle():
    worst = 0.0
    for N in range(1, 13):
        tree = build_branch_tree([{"↑": 0.75, "↓": 0.25}] * N, count_label("↑"))
        # brute force: enumerate every outcome sequence with exact rational weights
        brute = [Fraction(0)] * (N + 1)
        for seq in product((0, 1), repeat=N):
            k = sum(seq)
            brute[k] += Fraction(3, 4) ** k * Fraction(1, 4) ** (N - k)
        for k in range(N + 1):
            assert brute[k] == math.comb(N, k) * Fraction(3, 4) ** k * Fraction(1, 4) ** (N - k)
            worst = max(worst, abs(tree.coarse.get(k, 0.0) - float(brute[k])))
    report("AC6", worst < 1e-10, f"max |tree - exact| over N <= 12: {worst:.2e}")


def test_ac7_field_contrast():
    s3 = math.sqrt(3)
    real = world_fractions(StateVector.from_real([s3 / 2, 0.5], ["↑", "↓"]))
    quat = world_fractions(StateVector("quaternion", ("↑", "↓"),
                                       [[0.5, 0.5, 0.5, 0.0], [0.0, 0.3, 0.0, 0.4]]))
    shifts = {f: gleason_dependence_demo(f).shift for f in ("real", "quaternion", "complex")}
    ok = (abs(real["↑"] - s3 / (s3 + 1)) < 1e-12 and abs(real["↓"] - 1 / (s3 + 1)) < 1e-12
          and abs(quat["↑"] - 0.9) < 1e-12 and abs(quat["↓"] - 0.1) < 1e-12
          and shifts["real"] > 1e-6 and shifts["quaternion"] > 1e-6 and shifts["complex"] < 1e-12)
    report("AC7", ok, f"real {real['↑']:.6f}, quaternion {quat['↑']:.6f}, refinement shifts "
                      + ", ".join(f"{k} {v:.3g}" for k, v in shifts.items()))


def test_ac8_model_comparison():
    t0 = time.perf_counter()
    rep = model_compare([0.75, 0.5, 0.0], 100, window=0.05)
    dt = time.perf_counter() - t0
    s = rep.support
    zero = [s(0.0, m) for m in ("EQM", "CQM", "NBC")]
    ok = (s(0.75, "EQM") > 10 * s(0.75, "NBC") and s(0.5, "NBC") > 10 * s(0.5, "EQM")
          and max(zero) < 1e-10 and dt < 1.0)
    report("AC8", ok, f"0.75: EQM {s(0.75, 'EQM'):.3g} vs NBC {s(0.75, 'NBC'):.3g}; "
                      f"0.50: NBC {s(0.5, 'NBC'):.3g} vs EQM {s(0.5, 'EQM'):.3g}; "
                      f"0.0: max {max(zero):.2g}; {dt:.3f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))

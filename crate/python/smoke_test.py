#!/usr/bin/env python3
"""Smoke test for the longhop_py extension module.

Builds nothing itself: run `cargo build -p longhop-py --release` first
(or pass --profile debug after a plain `cargo build -p longhop-py`).
The script stages the cdylib under an importable name, imports it, and
cross-checks a handful of values against arithmetic done here in Python.
"""

import argparse
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def stage_module(profile: str) -> Path:
    lib = REPO_ROOT / "target" / profile / "liblonghop_py.so"
    if not lib.exists():
        sys.exit(
            f"{lib} not found — run `cargo build -p longhop-py --{profile}` first"
            if profile == "release"
            else f"{lib} not found — run `cargo build -p longhop-py` first"
        )
    stage = Path(tempfile.mkdtemp(prefix="longhop_py_"))
    shutil.copy2(lib, stage / "longhop_py.so")
    return stage


def approx(a: float, b: float, tol: float = 1e-9) -> None:
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--profile", default="release", choices=["release", "debug"])
    args = parser.parse_args()

    sys.path.insert(0, str(stage_module(args.profile)))
    import longhop_py as lh

    print(f"imported longhop_py {lh.__version__}")

    # Decision functions.
    g = lh.DecisionFunction.power_law(3.0)
    approx(g.eval(0, 0.5), 0.125)
    hybrid = lh.DecisionFunction.hybrid(
        lh.DecisionFunction.power_law(9.0), lh.DecisionFunction.constant(0.1)
    )
    approx(hybrid.eval(0, 1.0), 1.0)
    approx(hybrid.eval(3, 1.0), 0.1)
    assert not hybrid.is_round_independent()
    print("decision functions: PASS")

    # Scenario placements.
    assert lh.scenario_positions("uniform", 3) == [0.25, 0.5, 0.75]
    assert lh.scenario_positions("unfavourable", 3) == [0.25, 0.25, 0.75]
    print("scenario placements: PASS")

    # One-pass analytics against Python-side arithmetic.
    probs, none_mass = lh.win_prob_one_pass_fixed(
        lh.DecisionFunction.constant(0.5), [0.25, 0.75]
    )
    approx(probs[0], 0.25)
    approx(probs[1], 0.25)
    approx(none_mass, 0.5)
    for n in (2, 10, 50):
        closed = 0.5 * (1.0 - 1.0 / n) ** (n - 1)
        approx(lh.closed_form_one_pass("uniform", n), closed, 1e-12)
        g = lh.DecisionFunction.constant(1.0 / n)
        approx(lh.expected_hop_one_pass_random_uniform(g, n), closed, 1e-8)
        closed_pow = n / (n + 1) * (1.0 - 1.0 / n) ** (n - 1)
        approx(lh.closed_form_one_pass("power", n), closed_pow, 1e-12)
    print("one-pass analytics: PASS")

    # Multi-pass analytics: uniform leader, hybrid closed form, appendix
    # term identity.
    stationary = lh.win_prob_multipass_stationary(
        lh.DecisionFunction.constant(0.3), [0.2, 0.5, 0.9]
    )
    for p in stationary:
        approx(p, 1.0 / 3.0, 1e-12)
    for n in (2, 10, 100):
        closed = 0.5 * (1.0 + n / (n + 1) * (1.0 - 1.0 / n) ** n)
        approx(lh.closed_form_multipass("hybrid", n), closed, 1e-12)
        if n >= 2:
            t1, t2, t3 = lh.appendix_term_integrals(n)
            approx(t1 + t2 - t3, closed, 1e-12)
    value, std_error = lh.expected_hop_multipass_random_uniform(
        lh.DecisionFunction.hybrid(
            lh.DecisionFunction.power_law(9.0), lh.DecisionFunction.constant(0.1)
        ),
        10,
    )
    assert std_error is None, "hybrid case reduces exactly"
    approx(value, 0.5 * (1.0 + 10 / 11 * 0.9**10), 1e-8)
    print("multi-pass analytics: PASS")

    # Radio: inverse-power law and the indoor loss/range inversion.
    cfg = lh.RadioConfig.indoor(-5.0, 130.0)
    approx(cfg.nominal_range_m(), 130.0, 1e-9)
    d = 77.7
    approx(cfg.estimate_distance_from_dbm(cfg.received_power_dbm(d)), d, 1e-9)
    approx(lh.indoor_path_loss_db(10.0), 52.9, 1e-12)
    approx(lh.max_range(15.3 + 37.6 * math.log10(130.0)), 130.0, 1e-9)
    print("radio model: PASS")

    # Monte Carlo: deterministic under a fixed seed and statistically
    # consistent with the closed form.
    n, trials, seed = 10, 200_000, 7
    g = lh.DecisionFunction.power_law(n - 1)
    mean, se, rounds, truncated = lh.estimate_expected_hop("one-pass", g, n, trials, seed)
    mean2, se2, _, _ = lh.estimate_expected_hop("one-pass", g, n, trials, seed)
    assert (mean, se) == (mean2, se2), "same seed must reproduce bit-identically"
    target = n / (n + 1) * (1.0 - 1.0 / n) ** (n - 1)
    assert abs(mean - target) <= 4 * se, f"{mean} vs {target} (se {se})"
    assert rounds == 1.0 and truncated == 0
    print(f"monte carlo: PASS (mean {mean:.5f} vs closed form {target:.5f})")

    # Line-network relay experiment.
    density = lh.expected_density(200, 2000.0, 130.0)
    approx(density, 13.0, 1e-12)
    g = lh.DecisionFunction.power_law(density - 1.0)
    mean_norm, std_dev, hops, max_norm = lh.run_line_experiment(
        200, 2000.0, 130.0, g, trials=300, seed=11
    )
    assert hops > 0 and std_dev is not None
    assert 0.8 < mean_norm <= 1.1, f"mean normalized hop {mean_norm}"
    assert max_norm > 1.0, "10% power jitter should push some hop past nominal range"
    print(f"line experiment: PASS (mean {mean_norm:.4f}, max {max_norm:.4f}, {hops} hops)")

    print("smoke test: ALL PASS")


if __name__ == "__main__":
    main()

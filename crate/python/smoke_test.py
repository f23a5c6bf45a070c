#!/usr/bin/env python3
"""Smoke test for the `lanerl` Python extension module.

Builds nothing itself: it locates the compiled extension produced by

    cargo build -p lanerl-py --features extension-module

(under target/release or target/debug), imports it, and exercises every
exposed class and function end to end. Exits non-zero on the first failure.

Override the library location with the LANERL_LIB environment variable if
the module lives somewhere else.
"""

import math
import os
import shutil
import sys
import tempfile

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def import_lanerl():
    override = os.environ.get("LANERL_LIB")
    if override:
        candidates = [override]
    else:
        candidates = [
            os.path.join(REPO_ROOT, "target", profile, "liblanerl.so")
            for profile in ("release", "debug")
        ]
    existing = [p for p in candidates if os.path.exists(p)]
    if not existing:
        sys.exit(
            "could not find liblanerl.so — build it first:\n"
            "    cargo build -p lanerl-py --features extension-module"
        )
    newest = max(existing, key=os.path.getmtime)
    stage = tempfile.mkdtemp(prefix="lanerl-smoke-")
    shutil.copy(newest, os.path.join(stage, "lanerl.so"))
    sys.path.insert(0, stage)
    import lanerl

    print(f"imported lanerl from {newest}")
    return lanerl


def check(label, condition):
    status = "ok" if condition else "FAIL"
    print(f"  [{status}] {label}")
    if not condition:
        raise AssertionError(label)


def test_formulas(lanerl):
    print("temporal logic:")
    f = lanerl.Formula("G(no_collision)")
    clean = [{"no_collision": True}] * 4
    crash = [{"no_collision": True}] * 3 + [{"no_collision": False}]
    check("G holds on a clean trace", f.evaluate(clean) is True)
    check("G fails once violated", f.evaluate(crash) is False)
    check("penalty is -1 on violation", f.penalty(crash) == -1.0)
    check("penalty is 0 when satisfied", f.penalty(clean) == 0.0)

    # G/F duality: G(a) == !F(!a) on a batch of traces.
    g, nf = lanerl.Formula("G(a)"), lanerl.Formula("!F(!a)")
    for bits in range(16):
        trace = [{"a": bool(bits >> i & 1)} for i in range(4)]
        check_ok = g.evaluate(trace) == nf.evaluate(trace)
        if not check_ok:
            check(f"G/F duality on trace {bits:04b}", False)
    check("G/F duality over all 4-step single-atom traces", True)

    until = lanerl.Formula("a U b")
    check(
        "until requires the handoff",
        until.evaluate([{"a": True, "b": False}, {"a": False, "b": True}]) is True,
    )
    check("str() round-trips through the parser", "no_collision" in str(f))
    try:
        lanerl.Formula("G(")
        check("parse error raises ValueError", False)
    except ValueError:
        check("parse error raises ValueError", True)


def test_rulebook(lanerl):
    print("rulebook:")
    rb = lanerl.Rulebook.standard()
    rules = rb.rules()
    check("standard book has three rules", len(rules) == 3)
    check("highest priority first", rules[0]["id"] == "no_collision" and rules[0]["level"] == 1)
    check("book starts situation-aware", rb.situation_aware is True)
    check("book starts strict (inactive)", rb.active is False)

    lane_violation = [
        {"no_collision": True, "in_lane": False, "no_out_road": True}
    ] * 5
    strict = rb.reward(lane_violation)
    check("strict lane violation costs its full scale", strict["total"] == -1.0)
    rb.active = True
    damped = rb.reward(lane_violation)
    check(
        "exception damping is exactly one tenth",
        damped["total"] == 0.1 * strict["total"],
    )
    check(
        "per-rule coefficient reports the damping",
        damped["per_rule"]["in_lane"]["coefficient"] == 0.1,
    )

    rb.situation_aware = False
    check("strict ablation never activates", rb.active is False)

    weighted = lanerl.Rulebook.standard().reward(lane_violation, {"in_lane": 2.5})
    check("weights scale contributions", weighted["total"] == -2.5)


def test_scenarios_and_paths(lanerl):
    print("scenarios and geometry:")
    s = lanerl.Scenario.benchmark(0, "anomaly")
    check("benchmark scenario carries its index", s.id == 0)
    check("anomaly scenarios have an obstacle", s.obstacle is not None)
    check("obstacle edges are ordered", s.obstacle["s_front"] < s.obstacle["s_rear"])
    check("goal sits near the route end", 70.0 < s.goal[0] <= s.path.total_length)

    normal = lanerl.Scenario.benchmark(0, "normal")
    check("normal scenarios are free", normal.obstacle is None)

    round_trip = lanerl.Scenario.from_json(s.to_json())
    check("JSON round trip is byte-stable", round_trip.to_json() == s.to_json())
    check("regeneration is deterministic", lanerl.Scenario.benchmark(0, "anomaly").to_json() == s.to_json())

    path = s.path
    for frac in (0.1, 0.5, 0.9):
        s0, d0 = frac * path.total_length, 1.2
        x, y = path.to_cartesian(s0, d0)
        s1, d1 = path.to_frenet(x, y)
        if abs(s1 - s0) > 1e-6 or abs(d1 - d0) > 1e-6:
            check(f"frenet round trip at {frac:.0%}", False)
    check("frenet round trip along the route", True)

    straight = lanerl.ReferencePath([(0.0, 0.0), (100.0, 0.0)])
    check("waypoint constructor works", straight.total_length == 100.0)
    check("straight heading is zero", abs(straight.heading_at(50.0)) < 1e-12)


def test_trajectories(lanerl):
    print("trajectory planning:")
    coeffs = lanerl.lateral_quintic(0.0, 0.0, 0.0, 3.5, 3.0)
    check("quintic returns six coefficients", len(coeffs) == 6)
    value_at_end = sum(c * 3.0**i for i, c in enumerate(coeffs))
    check("quintic hits the lateral target", abs(value_at_end - 3.5) < 1e-9)

    quartic = lanerl.longitudinal_quartic(0.0, 8.0, 0.0, 8.0, 3.0)
    check("quartic returns five coefficients", len(quartic) == 5)

    path = lanerl.ReferencePath([(0.0, 0.0), (200.0, 0.0)])
    samples = lanerl.plan_trajectory(path, s=10.0, d=0.0, v=8.0, d_target=3.5)
    check("plan starts at the current pose", samples[0]["s"] == 10.0 and samples[0]["d"] == 0.0)
    last = samples[-1]
    check("plan ends on the manifold", abs(last["d"] - 3.5) < 1e-9 and abs(last["time"] - 3.0) < 1e-12)
    check("plan carries cartesian samples", abs(last["y"] - 3.5) < 1e-9)


def test_lane_world(lanerl):
    print("environment:")
    scenario = lanerl.Scenario.benchmark(0, "normal")
    world = lanerl.LaneWorld(scenario)
    check("trajectory mode has three actions", world.action_count == 3)
    check("observation shape is advertised", lanerl.LaneWorld.observation_shape == (3, 64, 64))

    obs = world.observe()
    check("observation is flat and binary", len(obs) == 3 * 64 * 64 and set(obs) <= {0.0, 1.0})
    check("packed observation is 1536 bytes", len(bytes(world.observe_packed())) == 1536)

    total = 0.0
    result = None
    for _ in range(12):
        result = world.step(0)  # keep lane
        total += result["reward"]
        if result["done"]:
            break
    check("lane keeping finishes the free route", result is not None and result["reached_goal"])
    check("the finish pays its bonus", total > 50.0)
    check("episode reports done", world.is_done)
    try:
        world.step(0)
        check("stepping a finished episode raises", False)
    except RuntimeError:
        check("stepping a finished episode raises", True)

    world.reset()
    check("reset rewinds the clock", world.steps_taken == 0 and not world.is_done)
    candidates = world.candidates()
    check(
        "candidate manifolds are keep/straddle/cross",
        [c["d"] for c in candidates] == [0.0, 1.75, 3.5],
    )
    try:
        world.step(7)
        check("out-of-range action raises ValueError", False)
    except ValueError:
        check("out-of-range action raises ValueError", True)

    control = lanerl.LaneWorld(scenario, mode="control")
    check("control mode has nine actions", control.action_count == 9)
    moved = control.step(8)
    check("control steps advance one tick", abs(control.elapsed - 0.1) < 1e-12)
    check("step reports the post-step state", "s" in moved["state"])


def test_policy(lanerl):
    print("policy:")
    policy = lanerl.Policy.init(3, seed=1)
    check("fresh policies are untrained", policy.trained_steps == 0)
    scenario = lanerl.Scenario.benchmark(3, "normal")
    world = lanerl.LaneWorld(scenario)
    obs = world.observe()
    action = policy.act(obs)
    check("greedy action is in range", 0 <= action < 3)
    q = policy.q_values(obs)
    check("q_values exposes one value per action", len(q) == 3)
    check("act is the argmax of q_values", q[action] == max(q))
    check("repeat calls are deterministic", policy.act(obs) == action)
    try:
        policy.act(obs[:-1])
        check("bad observation size raises ValueError", False)
    except ValueError:
        check("bad observation size raises ValueError", True)

    summary = policy.evaluate([lanerl.Scenario.benchmark(i, "normal") for i in range(2)])
    check("evaluate summarizes per scenario", len(summary["results"]) == 2)
    check(
        "evaluate means are finite",
        math.isfinite(summary["mean_return"]) and math.isfinite(summary["mean_arrived_distance"]),
    )


def main():
    lanerl = import_lanerl()
    test_formulas(lanerl)
    test_rulebook(lanerl)
    test_scenarios_and_paths(lanerl)
    test_trajectories(lanerl)
    test_lane_world(lanerl)
    test_policy(lanerl)
    print("all smoke tests passed")


if __name__ == "__main__":
    main()

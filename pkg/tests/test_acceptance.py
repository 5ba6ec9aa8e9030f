"""Acceptance suite: one test per release criterion, each printing a
single PASS/FAIL line (run with -s to see them all)."""

import asyncio
import json
import pathlib
import time

import numpy as np
import pytest

from skilladapt.bridge import BridgeEnvelope, BridgeRouter, SERVICES, TOPICS
from skilladapt.bridge.server import QUEUE_DEPTH, _Client
from skilladapt.engine import Engine
from skilladapt.ergodic import (ErgodicSetpoints, TargetDistribution,
                                advance, make_state, set_exec_state,
                                set_stiffness)
from skilladapt.gateway import ToolCall, register_builtin_tools, validate_call
from skilladapt.intention import EnergyTankBank, tank_step
from skilladapt.kmp import (Demonstration, KmpModel, ReferencePoint,
                            TimeProfile, repulsion_via_points, time_scale)
from skilladapt.sim import (TrajectoryExecutor, WrenchInjector, dtw_align,
                            record_demonstration)
from skilladapt.demo_data import arc_demo

from conftest import toy_model
from test_model import _oracle_for

FIXTURES = pathlib.Path(__file__).parent / "fixtures" / "envelopes"


def report(name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_via_point_passage(engine):
    """50 randomized via-point insertions on the 500-point default model,
    each checked for sub-millimeter passage, then removed (independent
    trials; stacking 50 mutually conflicting targets inside one kernel
    length scale is not a well-posed request)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    model = engine.model
    worst = 0.0
    for _ in range(50):
        s_bar = float(rng.uniform(0.02, 0.98))
        mu = model.predict_mean(s_bar).copy()
        mu[:3] += rng.uniform(-0.05, 0.05, 3)
        vid = model.add_via_point(s_bar, mu)
        err = float(np.linalg.norm(model.predict_mean(s_bar)[:3] - mu[:3]))
        worst = max(worst, err)
        model.remove_via_point(vid)
    elapsed = time.perf_counter() - t0
    report("via-point passage",
           worst < 1e-3 and elapsed < 10.0,
           f"worst error {worst:.2e} m, {elapsed:.2f} s for 50 insertions")


def test_criterion_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for trial in range(20):
        n = int(rng.integers(5, 51))
        model = toy_model(n, seed=100 + trial)
        for _ in range(int(rng.integers(0, 3))):
            s_bar = float(rng.uniform(0, 1))
            mu = model.predict_mean(s_bar).copy()
            mu[:3] += rng.uniform(-0.05, 0.05, 3)
            model.add_via_point(s_bar, mu)
        for s_star in rng.uniform(0, 1, 3):
            mean_o, cov_o = _oracle_for(model, float(s_star))
            mean_o[3:] /= np.linalg.norm(mean_o[3:])
            worst = max(worst,
                        float(np.max(np.abs(model.predict_mean(
                            float(s_star)) - mean_o))),
                        float(np.max(np.abs(model.predict_covariance(
                            float(s_star)) - cov_o))))
    elapsed = time.perf_counter() - t0
    report("dense-solve oracle equivalence",
           worst < 1e-10 and elapsed < 5.0,
           f"worst deviation {worst:.2e}, {elapsed:.2f} s for 20 models")


def test_criterion_tool_bound_fidelity(engine):
    registry = register_builtin_tools()
    eps = 1e-9
    bounded = {
        "AddViaPoints": ("time", (0.0, 1.0),
                         {"time": 0.5, "pos": [0.4, 0.1, 0.2]}),
        "AddRepulsion": ("radius", (1e-6, 1.0),
                         {"pos": [10.0, 10, 10], "radius": 0.1}),
        "SlowDown": ("percentage", (1.0, 100.0),
                     {"percentage": 20, "t_start": 0.1, "t_end": 0.4}),
        "SpeedUp": ("percentage", (1.0, 100.0),
                    {"percentage": 20, "t_start": 0.1, "t_end": 0.4}),
        "SetVelocity": ("velocity", (3.0, 16.0), {"velocity": 6.0}),
        "SetForce": ("force", (5.0, 30.0), {"force": 15.0}),
        "SetStiffness": ("stiffness", (500.0, 2000.0),
                         {"stiffness": 1000.0}),
    }
    checks = 0
    ok = True
    for tool, (param, (lo, hi), base_args) in bounded.items():
        for value, expect in [(lo - max(eps, abs(lo) * 1e-6), False),
                              (lo, True), (hi, True), (hi + eps, False)]:
            args = dict(base_args)
            args[param] = value
            result = validate_call(registry, ToolCall(tool, args))
            ok = ok and (result.ok == expect)
            checks += 1
    for state, expect in [("pause", True), ("resume", True),
                          ("later", False)]:
        result = validate_call(registry,
                               ToolCall("SetExecState", {"state": state}))
        ok = ok and (result.ok == expect)
        checks += 1

    # rejected dispatches leave the engine untouched
    from skilladapt.gateway import dispatch
    snapshot = (len(engine.model.via_points),
                tuple(engine.profile.knots),
                engine.ergodic_setpoints.to_dict().copy())
    for tool, (param, (lo, hi), base_args) in bounded.items():
        args = dict(base_args)
        args[param] = hi + 1.0
        rec = dispatch(registry, ToolCall(tool, args), engine)
        ok = ok and rec.outcome == "rejected"
    after = (len(engine.model.via_points),
             tuple(engine.profile.knots),
             engine.ergodic_setpoints.to_dict().copy())
    ok = ok and snapshot == after
    report("tool-bound fidelity", ok,
           f"{checks} boundary checks, zero mutations on rejection")


def test_criterion_add_remove_round_trip(engine):
    model = engine.model
    grid = np.linspace(0, 1, 500)
    before = model.predict_mean_many(grid).copy()
    mu = model.predict_mean(0.37).copy()
    mu[:3] += 0.04
    vid = model.add_via_point(0.37, mu)
    model.remove_via_point(vid)
    dev = float(np.max(np.abs(model.predict_mean_many(grid) - before)))
    report("add/remove round-trip", dev < 1e-10,
           f"max deviation over 500 samples {dev:.2e}")


def test_criterion_retiming_semantics(engine):
    profile = engine.apply_time_scale(50, 0.2, 0.6, "slow")
    base = TimeProfile(base_duration=engine.config.execution_seconds)
    # integration oracle: Riemann sum of dt = ds / speed(s)
    s = np.linspace(0.2, 0.6, 100_001)
    mid = 0.5 * (s[:-1] + s[1:])
    ds = np.diff(s)
    speed = np.empty_like(mid)
    for i, m in enumerate(mid):
        k = np.searchsorted(profile.knots, m, side="right") - 1
        k = min(k, len(profile.factors) - 1)
        speed[i] = profile.factors[k] / profile.base_duration
    oracle = float(np.sum(ds / speed))
    got = profile.segment_duration(0.2, 0.6)
    duration_ok = (abs(got - oracle) < 1e-9
                   and abs(got - 2 * base.segment_duration(0.2, 0.6)) < 1e-9)
    # geometry untouched at matched s
    traj = engine.model.sample_trajectory(200, profile)
    s_vals = np.array([p.s for p in traj.points])
    geo_dev = float(np.max(np.abs(
        np.stack([p.pose for p in traj.points])
        - engine.model.predict_mean_many(s_vals))))
    report("retiming semantics", duration_ok and geo_dev < 1e-12,
           f"window {got:.6f} s vs oracle {oracle:.6f} s, "
           f"geometry deviation {geo_dev:.1e}")


def test_criterion_repulsion_clearance():
    refs = []
    for si in np.linspace(0.0, 1.0, 500):
        mu = np.array([si, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
        refs.append(ReferencePoint(float(si), mu, 1e-4 * np.eye(7)))
    model = KmpModel(refs)
    center = np.array([0.5, 0.0, 0.0])
    repulsion_via_points(model, center, 0.1)
    pts = model.predict_mean_many(np.linspace(0, 1, 2000))[:, :3]
    dmin = float(np.min(np.linalg.norm(pts - center, axis=1)))
    report("repulsion clearance", dmin >= 0.1 - 5e-3,
           f"min distance to obstacle center {dmin:.4f} m")


def test_criterion_hid_end_to_end(engine):
    model = engine.model
    bank = EnergyTankBank(enabled=True)
    injector = WrenchInjector()
    injector.inject([0.0, 15.0, 0, 0, 0, 0], 2.0, now=1.5)
    TrajectoryExecutor(model, TimeProfile(base_duration=5.0), bank=bank,
                       injector=injector).run()
    physical = [v for v in model.via_points.values()
                if v.source == "physical"]
    one_via = len(physical) == 1
    reset_ok = bool(np.allclose(bank.energies(), 0.0))

    # dead zone: a 7 N pulse must trigger nothing
    engine2 = Engine()
    for i, d in enumerate([arc_demo(n=100, noise=0.002, seed=i,
                                    phase=0.02 * i) for i in range(3)]):
        engine2.add_demonstration(f"d{i}", d)
    engine2.fit()
    bank2 = EnergyTankBank(enabled=True)
    inj2 = WrenchInjector()
    inj2.inject([0.0, 7.0, 0, 0, 0, 0], 2.0, now=1.5)
    TrajectoryExecutor(engine2.model, TimeProfile(base_duration=5.0),
                       bank=bank2, injector=inj2).run()
    dead_zone_ok = len(engine2.model.via_points) == 0
    report("HID end-to-end", one_via and reset_ok and dead_zone_ok,
           f"15 N pulse -> {len(physical)} via-point(s), "
           f"7 N pulse -> {len(engine2.model.via_points)}, tanks reset")


def test_criterion_hid_properties():
    rng = np.random.default_rng(0)
    bank = EnergyTankBank(enabled=True)
    dt = 1.0 / 400.0
    e_max = np.array([0.4] * 3 + [1.0] * 3)
    bounds_ok = True
    for _ in range(100_000):
        state = tank_step(bank, rng.uniform(-30, 30, 6),
                          rng.uniform(-0.3, 0.3, 6),
                          rng.uniform(0, 1e-3, 6), dt)
        if not (np.all(state.h >= 0) and np.all(state.h <= 1)
                and np.all(bank.energies() >= 0)
                and np.all(bank.energies() <= e_max + 1e-12)):
            bounds_ok = False
            break
    bank2 = EnergyTankBank(enabled=True)
    bank2.tanks[0].E = 0.4
    steps = 0
    while bank2.tanks[0].E > 0 and steps <= 4002:
        tank_step(bank2, np.zeros(6), np.zeros(6), np.zeros(6), dt)
        steps += 1
    decay_ok = abs(steps - 4000) <= 1
    report("HID properties", bounds_ok and decay_ok,
           f"1e5-step fuzz in bounds, zero-input decay {steps} steps "
           f"(expect 4000 +- 1)")


def test_criterion_ergodic_decay():
    t0 = time.perf_counter()
    state = make_state(TargetDistribution.uniform(32))
    state.start()
    sp = ErgodicSetpoints()
    early, late = [], []
    while state.t < 200.0:
        advance(state, sp, 0.1)
        if 18.0 <= state.t <= 20.0:
            early.append(state.metric())
        elif 180.0 <= state.t <= 200.0:
            late.append(state.metric())
    ratio = float(np.median(late) / np.median(early))

    dist = TargetDistribution.gaussian_bumps(
        [(0.25, 0.25), (0.75, 0.7)], [0.08, 0.08], g=64)
    st2 = make_state(dist)
    st2.start()
    for _ in range(3000):
        advance(st2, sp, 0.1)
    visits = st2.visit_counts.reshape(16, 4, 16, 4).sum(axis=(1, 3))
    target = dist.grid.reshape(16, 4, 16, 4).sum(axis=(1, 3))
    r = float(np.corrcoef(visits.ravel() / visits.sum(),
                          target.ravel() / target.sum())[0, 1])
    elapsed = time.perf_counter() - t0
    report("ergodic decay", ratio < 0.2 and r > 0.8 and elapsed < 60.0,
           f"late/early metric ratio {ratio:.3f}, two-bump histogram "
           f"correlation {r:.3f}, {elapsed:.1f} s")


def test_criterion_ergodic_setpoints():
    state = make_state(TargetDistribution.uniform(32))
    state.start()
    sp = ErgodicSetpoints()
    for _ in range(100):
        advance(state, sp, 0.1)
    c, t = state.c.copy(), state.t
    set_exec_state(state, "pause")
    set_exec_state(state, "resume")
    preserved = bool(np.array_equal(state.c, c) and state.t == t)
    set_stiffness(sp, 1800.0)
    normal_fixed = sp.stiffness_normal == 800.0
    report("ergodic setpoints", preserved and normal_fixed,
           f"pause/resume exact, normal stiffness {sp.stiffness_normal}")


def test_criterion_mock_llm_end_to_end(engine):
    engine.start_coverage()
    notes = []
    engine.subscribe(lambda topic, payload:
                     notes.append(topic) if topic == "llm_notification"
                     else None)
    utterances = [
        ("slow down by 20% between 10% and 40%", "SlowDown"),
        ("speed up by 30% at the end", "SpeedUp"),
        ("add a via point at time 0.5 position 0.45, 0.1, 0.2",
         "AddViaPoints"),
        ("avoid the area at 0.5 0.0 0.1 with radius 0.08",
         "AddRepulsion"),
        ("pause", "SetExecState"),
    ]
    ok = True
    for text, expected_tool in utterances:
        n_before = len(engine.session.records)
        engine.set_llm_input_query(text)
        answer = engine.get_llm_answer()["answer"]
        new = engine.session.records[n_before:]
        ok = ok and len(new) == 1 and new[0].outcome == "applied"
        ok = ok and new[0].call.tool == expected_tool
        ok = ok and f"[applied] {expected_tool}" in answer
    ok = ok and len(notes) == len(utterances)
    report("mock-LLM end-to-end", ok,
           f"{len(utterances)} utterances dispatched and applied, "
           f"{len(notes)} notifications")


def test_criterion_bridge_conformance(engine):
    inventory_ok = len(SERVICES) == 16 and len(TOPICS) == 2
    router = BridgeRouter(engine)
    ids_ok = True
    for i in range(100):
        resp = router.handle_request(
            {"type": "service_request", "id": i, "name": "get_hid_state",
             "payload": {}, "v": 1})
        ids_ok = ids_ok and resp["id"] == i

    async def backpressure():
        client = _Client(asyncio.get_running_loop())
        for i in range(QUEUE_DEPTH + 50):
            client._offer({"seq": i})
        got = []
        while not client.queue.empty():
            got.append(client.queue.get_nowait()["seq"])
        return got == list(range(50, QUEUE_DEPTH + 50))

    drop_ok = asyncio.run(backpressure())

    golden_ok = True
    for path in sorted(FIXTURES.glob("*.json")):
        raw = path.read_text()
        env = BridgeEnvelope.model_validate_json(raw)
        again = json.dumps(json.loads(env.model_dump_json()),
                           sort_keys=True, separators=(",", ":")) + "\n"
        golden_ok = golden_ok and again == raw
    report("bridge conformance",
           inventory_ok and ids_ok and drop_ok and golden_ok,
           "16 services, 100 pipelined ids, drop-oldest, golden fixtures")


def test_criterion_demonstration_pipeline():
    t = np.linspace(0.0, 1.0, 10_000)
    ang = 6 * np.pi * t
    pos = np.stack([0.1 * t * np.cos(ang), 0.1 * t * np.sin(ang),
                    0.2 * t], axis=1)
    quat = np.tile([1.0, 0, 0, 0], (len(t), 1))
    demo = record_demonstration(zip(t, pos, quat))
    gaps = np.linalg.norm(np.diff(demo.poses()[:, :3], axis=0), axis=1)
    spacing_ok = bool(np.all(gaps >= 0.001 - 1e-12))

    ref = arc_demo(n=120)
    u = np.linspace(0.0, 1.0, 500)
    warped = np.where(u < 0.5, 0.5 * u, 1.5 * u - 0.5)
    p = np.stack([np.interp(warped, ref.times(), ref.poses()[:, k])
                  for k in range(3)], axis=1)
    q = np.stack([np.interp(warped, ref.times(), ref.poses()[:, 3 + k])
                  for k in range(4)], axis=1)
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    dilated = Demonstration.from_arrays(u, p, q)
    aligned = dtw_align([ref, dilated])
    err = float(np.max(np.linalg.norm(
        aligned[1].poses()[:, :3] - ref.poses()[:, :3], axis=1)))
    report("demonstration pipeline", spacing_ok and err < 2e-3,
           f"resample spacing >= 1 mm, DTW recovery error {err:.2e} m")

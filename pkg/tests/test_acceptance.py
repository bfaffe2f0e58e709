"""End-to-end acceptance checks.

Each test records a PASS/FAIL line that the conftest prints in the terminal
summary. Run just this module with ``pytest -m acceptance`` or
``python3 tests/test_acceptance.py``.
"""
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqgo.calibration import calibrate, objective_curve
from dqgo.evolution import ode_evolve, trotter_evolve
from dqgo.experiments import ExperimentConfig, run_delta_c_comparison, run_sp_experiment, run_time_sweep
from dqgo.ising import brute_force_ground_state, sk_instance_from_seed
from dqgo.qgo import QgoConfig, estimate_energies, gradient_component, qgo_run
from dqgo.schedule import AnnealSchedule
from dqgo.statevector import Gate, apply_gates, fidelity, init_plus_state

pytestmark = pytest.mark.acceptance

# fixed before any run; no other seed was tried
MASTER_SEED = 0
V_QGO_ODE_DT = 0.01

RESULTS = {}


def record(key, ok, detail):
    RESULTS[key] = (bool(ok), detail)
    assert ok, detail


@pytest.fixture(scope="module")
def cals(cache_dir):
    return {n: calibrate(n, cache_dir=cache_dir) for n in (2, 4, 8, 12)}


def _cfg(cache_dir, **kw):
    base = dict(master_seed=MASTER_SEED, cache_dir=str(cache_dir), ode_dt=V_QGO_ODE_DT)
    base.update(kw)
    return ExperimentConfig(**base)


def test_1_simulator_row_n2(cals, cache_dir):
    start = time.perf_counter()
    high = run_sp_experiment(_cfg(cache_dir, algorithm="d-qgo", sizes=(2,), instances=50, shots=10_000), cals)
    elapsed = time.perf_counter() - start
    low = run_sp_experiment(_cfg(cache_dir, algorithm="d-qgo", sizes=(2,), instances=50, shots=2_000), cals)
    sp10k, sp2k = high.sp(2), low.sp(2)
    record("1 d-QGO n=2 shots", sp10k >= 0.94 and elapsed < 120 and abs(sp10k - sp2k) <= 0.02,
           f"SP(10000 shots)={sp10k:.3f} (>= 0.94), SP(2000 shots)={sp2k:.3f} (within 0.02), "
           f"wall={elapsed:.1f}s (< 120s)")


def test_2_size_trend(cals, cache_dir):
    sizes = (4, 8, 12)
    dqgo = run_sp_experiment(_cfg(cache_dir, algorithm="d-qgo", sizes=sizes), cals)
    daqc = run_sp_experiment(_cfg(cache_dir, algorithm="d-aqc", sizes=sizes, T=10.0), cals)
    vqgo = run_sp_experiment(_cfg(cache_dir, algorithm="v-qgo", sizes=sizes), cals)
    parts, ok = [], True
    for n in sizes:
        d, a, v = dqgo.sp(n), daqc.sp(n), vqgo.sp(n)
        ok &= d > a and abs(d - v) <= 0.07
        parts.append(f"n={n}: d-QGO={d:.2f} d-AQC(T=10)={a:.2f} v-QGO={v:.2f}")
    record("2 SP vs size ordering", ok, "; ".join(parts))


def test_3_delta_c_insensitivity(cals, cache_dir):
    cmp = run_delta_c_comparison(_cfg(cache_dir, algorithm="d-qgo", sizes=(4, 8)), (0.1, "c_opt"), cals)
    rows = cmp.rows()
    ok = all(abs(r["difference"]) <= 0.05 for r in rows)
    record("3 delta_c insensitivity", ok, "; ".join(
        f"n={r['n']}: SP(0.1)={r['sp_low']:.2f} SP(c_opt)={r['sp_high']:.2f}" for r in rows))


def test_4_time_trends(cals, cache_dir):
    daqc = run_time_sweep(_cfg(cache_dir, algorithm="d-aqc", sizes=(2,), instances=50), [1.0, 10.0], cals)
    dqgo = run_time_sweep(_cfg(cache_dir, algorithm="d-qgo", sizes=(2,), instances=50), [1.0, 10.0], cals)
    a1, a10 = daqc.sp(2, 1.0), daqc.sp(2, 10.0)
    q1, q10 = dqgo.sp(2, 1.0), dqgo.sp(2, 10.0)
    record("4 annealing time trends", a10 > a1 and q1 >= q10 - 0.02,
           f"d-AQC T=1 {a1:.2f} -> T=10 {a10:.2f}; d-QGO T=1 {q1:.2f} vs T=10 {q10:.2f}")


def test_5_shot_economy(cals, cache_dir):
    cmp = run_delta_c_comparison(_cfg(cache_dir, algorithm="d-qgo", sizes=(2,), instances=50, shots=2_000),
                                 (0.1, "c_opt"), cals)
    row = cmp.rows()[0]
    record("5 shot economy n=2", row["sp_high"] >= row["sp_low"],
           f"SP(c_opt)={row['sp_high']:.2f} >= SP(0.1)={row['sp_low']:.2f}")


def test_6_calibration_targets(cals):
    c2, c4 = cals[2].c_opt, cals[4].c_opt
    ok = abs(c2 - 1.523) <= 0.1 and abs(c4 - 1.56) <= 0.1
    detail = f"c_opt(2)={c2} (1.523 +- 0.1), c_opt(4)={c4} (1.56 +- 0.1)"
    if not ok:
        curve = objective_curve(4, cals[4].b_opt, np.arange(0.1, 3.01, 0.05))
        detail += "; objective curve n=4: " + ", ".join(f"{c:.2f}:{v:.3f}" for c, v in curve)
    record("6 calibration soft targets", ok, detail)


def test_7_cross_engine(cals):
    worst_fine, worst_coarse = 1.0, 1.0
    for n in (2, 3, 4):
        cal = cals[2] if n == 2 else calibrate(n, cache_dir=False) if n == 3 else cals[4]
        for k in range(10):
            inst = sk_instance_from_seed(n, 7000 + 10 * n + k)
            c = tuple(cal.c_opt * np.random.default_rng(k).choice([-1.0, 1.0], n))
            ode = ode_evolve(inst, AnnealSchedule(cal.b_opt, c, 1.0, 0.01), dt_int=1e-3)
            worst_fine = min(worst_fine, fidelity(trotter_evolve(inst, AnnealSchedule(cal.b_opt, c, 1.0, 0.01)), ode))
            worst_coarse = min(worst_coarse, fidelity(trotter_evolve(inst, AnnealSchedule(cal.b_opt, c, 1.0, 0.1)), ode))
    record("7 Trotter vs ODE fidelity", worst_fine >= 0.999 and worst_coarse >= 0.99,
           f"min fidelity dt=0.01: {worst_fine:.6f} (>= 0.999), dt=0.1: {worst_coarse:.6f} (>= 0.99)")


def test_8_gradient_oracle(cals):
    cal = cals[4]
    pairs, sign_ok, worst = 0, 0, 0.0
    for k in range(25):
        inst = sk_instance_from_seed(4, 8000 + k)
        base = np.zeros(4)
        cfg = QgoConfig(delta_c=1e-4, c_opt=cal.c_opt, b_opt=cal.b_opt)
        for j in range(4):
            forward = gradient_component(inst, base, j, cfg).g
            rows = np.repeat(base[None, :], 2, axis=0)
            rows[0, j], rows[1, j] = 1e-5, -1e-5
            e, _ = estimate_energies(inst, rows, cfg)
            central = (e[0] - e[1]) / 2e-5
            pairs += 1
            sign_ok += np.sign(forward) == np.sign(central)
            worst = max(worst, abs(forward - central) / abs(central))
    record("8 gradient oracle", pairs == 100 and sign_ok == 100 and worst <= 0.01,
           f"{sign_ok}/{pairs} signs agree, worst relative magnitude gap {worst:.2e} (<= 1e-2)")


_GATES = st.lists(st.tuples(st.sampled_from(["H", "RX", "RY", "RZ", "CX"]), st.integers(0, 3),
                            st.floats(-10, 10, allow_nan=False)), max_size=200)


def _invariant_suite(cals):
    @settings(max_examples=200, deadline=None)
    @given(_GATES)
    def norm(ops):
        gates = [Gate("CX", t, control=(t + 1) % 4) if k == "CX" else
                 Gate("H", t) if k == "H" else Gate(k, t, angle=a) for k, t, a in ops]
        assert abs(apply_gates(init_plus_state(4), gates).norm_squared() - 1) <= 1e-9

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**31 - 1))
    def evaluations_and_accounting(n, seed):
        cal = cals[2] if n <= 2 else cals[4]
        inst = sk_instance_from_seed(n, seed)
        res = qgo_run(inst, QgoConfig(delta_c=cal.c_opt, c_opt=cal.c_opt, b_opt=cal.b_opt))
        assert res.total_energy_evaluations == n + n * (n + 1) // 2
        ground = brute_force_ground_state(inst)
        configs = {tuple(1 - 2 * ((b >> i) & 1) for i in range(n)) for b in range(1 << n)}
        best = min(configs, key=lambda s: sum(-J * s[i] * s[j] for (i, j), J in inst.couplings.items())
                   - sum(h * x for h, x in zip(inst.fields, s)))
        assert ground.contains(best)
        assert ground.contains(res.signs) == (tuple(res.signs) in set(ground.ground_set))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.sampled_from(["d-qgo", "v-qgo", "d-aqc"]), st.sampled_from([0, 100]))
    def determinism(seed, algorithm, shots):
        cfg = ExperimentConfig(algorithm=algorithm, sizes=(3,), instances=5, master_seed=seed, shots=shots,
                               ode_dt=V_QGO_ODE_DT)
        a, b = run_sp_experiment(cfg, cals | {3: cals[4]}), run_sp_experiment(cfg, cals | {3: cals[4]})
        assert a.cells[0].records == b.cells[0].records
        for rec in a.cells[0].records:
            ground = brute_force_ground_state(sk_instance_from_seed(3, rec.instance_seed))
            spins = tuple(1 if ch == "+" else -1 for ch in rec.returned_config)
            assert rec.success == ground.contains(spins)

    return norm, evaluations_and_accounting, determinism


def test_9_invariant_suites(cals):
    start = time.perf_counter()
    for prop in _invariant_suite(cals):
        prop()
    elapsed = time.perf_counter() - start
    record("9 invariant property suites", elapsed < 300, f"all properties held in {elapsed:.1f}s (< 300s)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))

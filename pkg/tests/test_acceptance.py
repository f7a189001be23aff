"""Acceptance gate: the eleven commitments this library is checked against.

Every tolerance is stated inline and none is tuned to the implementation.
One test is expected to fail and is left failing on purpose: the short-time
growth exponent (criterion 7) is committed as 2.0 +- 0.1, but for a flat unit
initial width the quadratic coefficient of the bound vanishes identically and
the measured exponent sits near 4. Weakening the check to match would hide
that, so it stays red with the measured value in the failure message.
"""

import math
import time

import numpy as np
import pytest

from quench_entropy import (EvolutionSetup, ScenarioConfig, TrigPolynomial,
                            densify, det_bound, evolve, exact_entropy,
                            gap_family, light_cone_profile, parseval_check,
                            partition, purity, reduce, riccati_oracle,
                            run_figure1, run_series)
from quench_entropy.szego import bk_bound, szego_sum_for

LAM15 = gap_family(1.5)
FLAT = TrigPolynomial([1.0])


def _draw_gapped_instance(rng):
    """Random degree <= 3 symbols: gapped coupling, strictly positive width."""
    theta = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
    while True:
        deg = int(rng.integers(0, 4))
        coeffs = np.zeros(deg + 1)
        coeffs[0] = rng.uniform(0.5, 3.0)
        if deg:
            coeffs[1:] = rng.uniform(-0.4, 0.4, deg) * coeffs[0] / deg
        lam = TrigPolynomial(coeffs)
        if lam(theta).min() > 0.05:
            break
    while True:
        degb = int(rng.integers(0, 4))
        bco = np.zeros(degb + 1)
        bco[0] = rng.uniform(0.5, 2.0)
        if degb:
            bco[1:] = rng.uniform(-0.3, 0.3, degb) * bco[0] / degb
        beta = TrigPolynomial(bco)
        if beta(theta).min() > 0.05:
            break
    N = int(rng.choice((32, 64)))
    t = float(rng.uniform(0.0, 10.0))
    return lam, beta, N, t


def _purity_two_ways(dense, n):
    """Both purity routes recomputed here from raw blocks, independent of the library."""
    T = dense[:n, :n]
    C = dense[:n, n:]
    R = dense[n:, n:]
    Tt, Ct, Rt = T.real, C.real, R.real
    full = np.block([[Tt, Ct], [Ct.T, Rt]])
    Pt = np.linalg.inv(full)[n:, n:]
    Tt_inv = np.linalg.inv(Tt)
    gamma = R / 2.0 - C.T @ Tt_inv @ C / 4.0
    delta = C.T @ Tt_inv @ C.conj() / 4.0
    _, ld_p = np.linalg.slogdet(Pt)
    _, ld_minus = np.linalg.slogdet(2.0 * (gamma.real - delta.real))
    _, ld_plus = np.linalg.slogdet(2.0 * (gamma.real + delta.real))
    p_moment = math.exp(-ld_p - 0.5 * (ld_minus + ld_plus))
    Z = C.imag
    _, ld_z = np.linalg.slogdet(Rt + Z.T @ Tt_inv @ Z)
    p_phase = math.exp(-0.5 * (ld_p + ld_z))
    schur_residual = float(np.linalg.norm(np.linalg.inv(Pt) - (Rt - Ct.T @ Tt_inv @ Ct)))
    return p_moment, p_phase, schur_residual


@pytest.fixture(scope="module")
def random_instances():
    rng = np.random.default_rng(8281)
    start = time.monotonic()
    out = []
    for _ in range(100):
        lam, beta, N, t = _draw_gapped_instance(rng)
        n = N // 2
        dense = densify(evolve(EvolutionSetup(lam, beta, N), t))
        blocks = partition(dense, n)
        out.append({
            "dense": dense, "n": n, "N": N, "t": t,
            "lam": lam, "beta": beta,
            "exact": exact_entropy(dense, n),
            "purity": purity(blocks),
            "det": det_bound(blocks),
            "residual": reduce(blocks).identity_residual,
        })
    return out, time.monotonic() - start


@pytest.fixture(scope="module")
def figure1_runs(tmp_path_factory):
    dir_a = tmp_path_factory.mktemp("curves_a")
    dir_b = tmp_path_factory.mktemp("curves_b")
    start = time.monotonic()
    summary = run_figure1(str(dir_a))
    elapsed = time.monotonic() - start
    run_figure1(str(dir_b))
    return summary, dir_a, dir_b, elapsed


def test_criterion_01_closed_form_vs_ode_oracle():
    setup = EvolutionSetup(LAM15, FLAT, 32)
    start = time.monotonic()
    worst = 0.0
    for t_end in range(1, 11):
        ode = riccati_oracle(setup, float(t_end))
        closed = evolve(setup, float(t_end))
        worst = max(worst, float(np.abs(ode.mode_symbols - closed.mode_symbols).max()))
    elapsed = time.monotonic() - start
    assert worst < 1e-6, f"worst per-mode deviation {worst:.3g}"
    assert elapsed < 10.0, f"runtime {elapsed:.2f} s"


def test_criterion_02_inequality_chain(random_instances):
    instances, elapsed = random_instances
    assert len(instances) == 100
    for inst in instances:
        nlp = -math.log(inst["purity"])
        ctx = (inst["lam"].coeffs, inst["beta"].coeffs, inst["N"], inst["t"])
        assert inst["exact"] - nlp >= -1e-8, (inst["exact"], nlp, ctx)
        assert nlp - inst["det"] >= -1e-8, (nlp, inst["det"], ctx)
    assert elapsed < 120.0, f"runtime {elapsed:.2f} s"


def test_criterion_03_purity_duality_and_block_identity(random_instances):
    instances, _ = random_instances
    for inst in instances:
        p_moment, p_phase, schur_residual = _purity_two_ways(inst["dense"], inst["n"])
        assert abs(p_moment - p_phase) < 1e-9, (p_moment, p_phase, inst["t"])
        assert abs(p_moment - inst["purity"]) < 1e-9
        assert schur_residual < 1e-9
        assert inst["residual"] < 1e-9


def test_criterion_04_parseval_consistency():
    for t in (1.0, 3.0, 5.0):
        s = szego_sum_for(LAM15, FLAT, t)
        p = parseval_check(LAM15, FLAT, t)
        assert abs(p - s) / s < 1e-4, (t, s, p)


def test_criterion_05_finite_size_convergence():
    target = szego_sum_for(LAM15, FLAT, 3.0)
    gaps = []
    for N in (64, 128, 256):
        dense = densify(evolve(EvolutionSetup(LAM15, FLAT, N), 3.0))
        gaps.append(abs(det_bound(partition(dense, N // 2)) - target))
    assert gaps[0] > gaps[1] > gaps[2], gaps


def test_criterion_06_growth_curve_shape(figure1_runs):
    summary, _, _, elapsed = figure1_runs
    assert set(summary["curves"]) == {"c=0.5", "c=1.0", "c=1.5"}
    for name, curve in summary["curves"].items():
        assert curve["window"] == [5.0, 50.0]
        assert curve["r_squared"] >= 0.99, (name, curve["r_squared"])
        assert curve["slope"] > 0.0, (name, curve["slope"])
    finals = {name: summary["curves"][name]["final_value"]
              for name in summary["curves"]}
    assert finals["c=0.5"] > finals["c=1.0"] > finals["c=1.5"], finals
    assert summary["ordering_ok"] is True
    assert elapsed < 120.0, f"runtime {elapsed:.2f} s"


def test_criterion_07_short_time_exponent():
    t = np.linspace(0.0, 0.1, 11)
    values = np.array([szego_sum_for(LAM15, FLAT, float(x)) for x in t])
    growth = values[1:] - values[0]
    assert np.all(growth > 0.0)
    exponent = float(np.polyfit(np.log(t[1:]), np.log(growth), 1)[0])
    assert abs(exponent - 2.0) <= 0.1, (
        f"measured short-time exponent {exponent:.4f}; the committed value is "
        f"2.0 +- 0.1, but for a flat unit initial width the quadratic "
        f"coefficient vanishes and the bound grows as t^4")


def test_criterion_08_stationarity_null_tests():
    stationary = run_series(ScenarioConfig(
        lambda_spec="gap:c=1.5", beta_spec="poly:1.5,-1",
        N=32, steps=5, t0=0.0, t1=8.0))
    for field in ("exact_entropy", "neg_log_purity", "det_bound",
                  "szego_sum", "bk_bound"):
        col = stationary.column(field)
        assert np.ptp(col) < 1e-8, (field, col)

    uncoupled = run_series(ScenarioConfig(
        lambda_spec="poly:2.25", beta_spec="poly:1",
        N=32, steps=5, t0=0.0, t1=10.0))
    for field in ("exact_entropy", "neg_log_purity", "det_bound",
                  "szego_sum", "bk_bound"):
        col = uncoupled.column(field)
        assert np.array_equal(col, np.zeros(5)), (field, col)


def test_criterion_09_light_cone():
    profile = light_cone_profile(LAM15, FLAT, (1.0, 2.0, 4.0))
    v_g = profile.velocity_bound
    assert abs(v_g - 25.0) < 1e-9
    k = np.arange(profile.mu_table.shape[1])
    for row, t, edge in zip(profile.mu_table, profile.t_list, profile.edges):
        assert edge <= v_g * t, (t, edge)
        outside = row[k > 1.5 * v_g * t]
        assert outside.size > 0
        assert outside.max() < 1e-6 * row.max(), (t, outside.max(), row.max())


def test_criterion_10_bound_ordering():
    for t in np.linspace(0.0, 50.0, 15):
        s = szego_sum_for(LAM15, FLAT, float(t))
        b = bk_bound(LAM15, FLAT, float(t))
        assert s - b >= -1e-9, (t, s, b)


def test_criterion_11_deterministic_output(figure1_runs):
    _, dir_a, dir_b, _ = figure1_runs
    names = sorted(p.name for p in dir_a.iterdir() if p.suffix == ".csv")
    assert names == ["figure1_c0.5.csv", "figure1_c1.0.csv", "figure1_c1.5.csv"]
    for name in names:
        assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()

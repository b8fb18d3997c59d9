"""End-to-end acceptance gates: published-table reproduction, oracle
equivalence, inequality suites, density normalization, Monte Carlo
agreement, the decay trend, and the two-stage construction. Each test
prints one PASS/FAIL line on the terminal."""

import math
import time
from fractions import Fraction

import numpy as np

from harmsum.analytic import (
    density,
    expectation_identity,
    exponential_bound_suite,
    interval_probability,
)
from harmsum.cli import main
from harmsum.exact import decay_profile, min_gap, min_signed_sum, two_stage_for_n
from harmsum.montecarlo import SimulationConfig, simulate
from harmsum.sequences import SequenceSpec, generate, terms_array

# scaled minima over prime prefixes, rows 1..40
TABLE1 = [
    1, 1, 1, 23, 43, 251, 263, 21013, 1407079, 4919311,
    818778281, 2402234557, 379757743297, 3325743954311, 54237719914087,
    903944329576111, 46919460458733911, 367421942920402841,
    17148430651130576323, 1236225057834436760243, 4190310920096832376289,
    535482916756698482410061, 29119155169912957197310753,
    443284248908491516288671253, 28438781483496930396689638231,
    10196503226925713726754541885481, 137512198125317766267968137765087,
    5572821202475305606211985553786081, 77833992457426020006787481021085581,
    24244850423688161715955346535954790877,
    2030349334778419995324119439659994086131,
    76860130392109667765387079377871685276909,
    5191970624445760882844533168270184721318637,
    329643209271348431895096550792159132283920307,
    19171590315567357340242017182966253037383120953,
    58192378490977430486851365332352874578233287403,
    837477642920747839191618216897250374978659503996169,
    130665466261033919414441892800025408642432364448372023,
    7541550169407232608689149525984967898398947805296216009,
    23868339955752715692132986729285170427530832996153507207,
]

# scaled minimal gaps over prime prefixes, rows 1..22
TABLE3 = [
    1, 1, 1, 2, 22, 35, 263, 4675, 24871, 104006,
    2356081, 6221080, 141769355, 6096082265, 6928889495,
    367231143235, 1283811918935, 78312527055035, 5246939312687345,
    372532691200801495, 8815359347599933286, 223849990729887044174,
]


def report(capsys, num: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)


def test_acceptance_1_minima_table(capsys):
    t0 = time.monotonic()
    code = main(["table1", "--upto", "40", "--emit", "bfile"])
    out = capsys.readouterr().out
    dt = time.monotonic() - t0
    got = [int(line.split()[1]) for line in out.splitlines()]
    ok = code == 0 and got == TABLE1 and dt < 60.0
    report(capsys, 1, ok, f"40 scaled minima exact, {dt:.1f}s < 60s")
    assert code == 0
    assert got == TABLE1
    assert dt < 60.0


def test_acceptance_2_gap_table(capsys):
    t0 = time.monotonic()
    code = main(["table3", "--upto", "22", "--emit", "bfile"])
    out = capsys.readouterr().out
    dt = time.monotonic() - t0
    got = [int(line.split()[1]) for line in out.splitlines()]
    ok = code == 0 and got == TABLE3 and dt < 600.0
    report(capsys, 2, ok, f"22 scaled gaps exact, {dt:.1f}s < 600s")
    assert code == 0
    assert got == TABLE3
    assert dt < 600.0


def _random_spec(rng) -> SequenceSpec:
    kind = rng.integers(0, 6)
    if kind == 0:
        return SequenceSpec.primes()
    if kind == 1:
        return SequenceSpec.k_squarefree(1)
    if kind == 2:
        return SequenceSpec.k_squarefree(2)
    if kind == 3:
        return SequenceSpec.k_squarefree(3)
    if kind == 4:
        return SequenceSpec.nonprimes()
    return SequenceSpec.arithmetic(int(rng.integers(1, 21)), int(rng.integers(1, 11)))


def test_acceptance_3_oracle_equivalence(capsys):
    rng = np.random.default_rng(20260819)
    checked_prefixes = 0
    checked_gaps = 0
    checked_trits = 0
    for _ in range(50):
        n = int(rng.integers(1, 17))
        spec = _random_spec(rng)
        terms = generate(spec, n).terms
        den = math.lcm(*terms)
        weights = [den // b for b in terms]
        sums = [0]
        for i, w in enumerate(weights, start=1):
            sums = [s - w for s in sums] + [s + w for s in sums]
            # exhaustive minimum for every prefix length
            brute = min(abs(s) for s in sums)
            res = min_signed_sum(terms[:i])
            assert res.value == Fraction(brute, den)
            checked_prefixes += 1
        ordered = sorted(sums)
        diffs = [b - a for a, b in zip(ordered, ordered[1:])]
        half_min_adjacent = Fraction(min(diffs), 2 * den) if diffs else None
        if diffs:
            gap = min_gap(terms)
            assert gap.gap == half_min_adjacent
            checked_gaps += 1
        if 2 <= n <= 12:
            tri = [0]
            for w in weights:
                tri = [s - w for s in tri] + tri + [s + w for s in tri]
            tri.remove(0)  # drop the all-zero assignment
            brute_trit = min(abs(s) for s in tri)
            assert min_gap(terms).gap == Fraction(brute_trit, den)
            checked_trits += 1
    ok = checked_prefixes >= 50 and checked_gaps >= 40 and checked_trits >= 10
    report(
        capsys, 3, ok,
        f"{checked_prefixes} prefix minima, {checked_gaps} sorted-sum gaps, "
        f"{checked_trits} three-valued brute gaps, zero tolerance",
    )
    assert ok


def test_acceptance_4_exponential_bound_suite(capsys):
    total = 0
    worst = 0
    for n in (10, 50, 200):
        rep = exponential_bound_suite(terms_array(SequenceSpec.primes(), n), pairs=1000, seed=0)
        assert rep.samples == 1000
        total += rep.samples
        worst = max(worst, len(rep.violations))
        assert rep.passed
        assert rep.violations == ()
    report(capsys, 4, worst == 0, f"{total} (x, delta) pairs across N in {{10, 50, 200}}, 0 violations")


def test_acceptance_5_expectation_identity(capsys):
    worst = 0.0
    for n in (4, 8, 12):
        exact, quad = expectation_identity(terms_array(SequenceSpec.primes(), n))
        worst = max(worst, abs(exact - quad))
    ok = worst <= 1e-6
    report(capsys, 5, ok, f"N in {{4, 8, 12}}, worst |exact - quadrature| = {worst:.2e} <= 1e-6")
    assert ok


def test_acceptance_6_density_normalization_and_symmetry(capsys):
    devs = []
    for spec in (SequenceSpec.primes(), SequenceSpec.arithmetic(1, 1)):
        total = interval_probability(spec, -8.0, 8.0, 1e-6)
        devs.append(abs(total - 1.0))
        assert 1.0 - 1e-3 <= total <= 1.0 + 1e-3
        for x in (0.4, 1.3):
            assert density(spec, x, 1e-6).g == density(spec, -x, 1e-6).g
    ok = max(devs) <= 1e-3
    report(
        capsys, 6, ok,
        f"mass over [-8, 8]: deviations {devs[0]:.1e} (primes), {devs[1]:.1e} (b_n = n); "
        "evenness exact",
    )
    assert ok


def test_acceptance_7_monte_carlo_vs_density(capsys):
    t0 = time.monotonic()
    config = SimulationConfig(
        spec=SequenceSpec.primes(), n=10**4, samples=10**6, seed=20260819,
        interval=(-0.1, 0.1),
    )
    rep = simulate(config, eps=1e-8)
    dt = time.monotonic() - t0
    diff = abs(rep.empirical_prob - rep.predicted)
    ok = diff <= 5.0 * rep.standard_error and dt < 300.0
    report(
        capsys, 7, ok,
        f"N=10^4, 10^6 samples: |{rep.empirical_prob:.6f} - {rep.predicted:.6f}| "
        f"= {diff:.1e} <= 5se = {5 * rep.standard_error:.1e}, {dt:.0f}s < 300s",
    )
    assert diff <= 5.0 * rep.standard_error
    assert dt < 300.0


def test_acceptance_8_decay_trend(capsys):
    profile = decay_profile(generate(SequenceSpec.primes(), 40), range(8, 41))
    ok = profile.slope < 0.0 and profile.r_squared >= 0.9
    report(
        capsys, 8, ok,
        f"log minima vs -log^2 N over N=8..40: slope={profile.slope:.4f} (reported, "
        f"not asserted against any constant), r^2={profile.r_squared:.3f} >= 0.9",
    )
    assert profile.slope < 0.0
    assert profile.r_squared >= 0.9


def test_acceptance_9_two_stage(capsys):
    combined = generate(SequenceSpec.arithmetic(1, 1), 30)
    details = []
    ok = True
    for tau in (Fraction(0), Fraction(1, 3), Fraction(7, 5)):
        res = two_stage_for_n(30, tau)
        assert abs(res.refined_target) <= 1
        stage2 = min_signed_sum(generate(SequenceSpec.primes(), res.second.n), res.refined_target)
        assert res.residual == stage2.value
        direct = min_signed_sum(combined, tau)
        assert direct.value <= res.residual
        details.append(f"tau={tau}: residual={float(res.residual):.3e}, direct={float(direct.value):.3e}")
        ok = ok and direct.value <= res.residual and abs(res.refined_target) <= 1
    report(capsys, 9, ok, "; ".join(details))
    assert ok

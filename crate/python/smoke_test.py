"""Smoke test for the tdqec Python extension.

Build and install first:
    pip install --no-build-isolation -e crates/python
then run:
    python python/smoke_test.py
"""

import math

import tdqec_py as tq


def close(a, b, rel=1e-9):
    return abs(a - b) <= rel * max(abs(a), abs(b))


def main():
    code = tq.RepetitionCode(5)
    assert (code.n, code.ell) == (5, 2)
    try:
        tq.RepetitionCode(4)
    except ValueError:
        pass
    else:
        raise AssertionError("even sizes must be rejected")

    lookup = tq.JumpSet.lookup(5, 1.0, 0.1)
    trickle = tq.JumpSet.trickle(5, 1.0, 0.1)
    assert lookup.num_corrections == 15 and trickle.num_corrections == 5
    assert tq.JumpSet.from_json(lookup.to_json()).to_json() == lookup.to_json()

    # uncorrected three-qubit code has a closed form
    ge, t = 0.3, 2.0
    bare = tq.JumpSet.uncorrected(3, ge)
    p = 0.5 * (1 - math.exp(-2 * ge * t))
    exact = 3 * p * p * (1 - p) + p ** 3
    chain = tq.simulate(bare, [t], engine="chain")["values"][0]
    assert close(chain, exact, 1e-10), (chain, exact)

    # dense and stochastic engines agree with the chain at n = 3
    small = tq.JumpSet.trickle(3, 1.0, 0.2)
    times = [1.0, 5.0]
    ref = tq.simulate(small, times)["values"]
    dense = tq.simulate(small, times, engine="dense")["values"]
    assert all(abs(a - b) < 1e-6 for a, b in zip(ref, dense))
    for engine in ("mcwf", "gillespie"):
        run = tq.simulate(small, times, engine=engine, n_traj=2000, seed=3)
        for v, e, se in zip(run["values"], ref, run["stderr"]):
            assert abs(v - e) < 5 * max(se, 1e-3), (engine, v, e, se)
        assert run == tq.simulate(small, times, engine=engine, n_traj=2000, seed=3)

    fit = tq.fit_cell("lookup", 5, 1.0, 0.05)
    assert fit.converged and close(fit.p_l, fit.epsilon * fit.tau)

    sizes = [3, 5, 7, 9]
    gammas = [0.01 * 10 ** (k / 5) for k in range(11)]
    table = [[tq.fit_cell("trickle", n, 1.0, g).p_l for g in gammas] for n in sizes]
    th = tq.threshold(sizes, gammas, table)
    lam = tq.lambda_estimate(sizes, gammas, table)
    assert 0.1 < th["median"] < 1.0 and lam["gamma_e_star"] > 0
    exponent, n_real, n = tq.extrapolate_qubits(0.2, 0.7, 0.01, 1e-15)
    assert n == 23 and n % 2 == 1 and n >= n_real

    params = tq.IonParams(1.0, 4.0, 3.46, 1.66, 1.0)
    assert abs(params.center() - 5.0) < 0.1
    rows = tq.ion_rates(11, params, [(5, 1.66)])
    assert len(rows) == 6 and rows[0][1] == 0.0
    assert max(rows, key=lambda r: r[3])[0] == 5
    ion = tq.JumpSet.ion(5, params, 0.01)
    assert len(ion) == ion.num_corrections + ion.num_errors

    assert tq.n_proj_count(11, 5) == 386
    print(f"tdqec {tq.__version__}: smoke test passed "
          f"(threshold {th['median']:.3f}, gamma_e* {lam['gamma_e_star']:.3f})")


if __name__ == "__main__":
    main()

"""Smoke test for the esskit extension module.

Build and install first, e.g.

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/esskit-*.whl
"""

import math

import numpy as np

import esskit


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    # hand-derived values
    assert np.allclose(esskit.autocov([1, -1, 1, -1], direct=True), [1, -0.75, 0.5, -0.25])
    assert np.allclose(esskit.autocov([1, -1, 1, -1]), [1, -0.75, 0.5, -0.25])
    assert close(esskit.iact_batch([1, 2, 3, 4, 5, 6], batch_size=2).iact, (16 / 3) / (17.5 / 6), 1e-12)
    assert close(esskit.iact_batch([1, 2, 3, 4], overlapping=True, batch_size=2).iact, (8 / 3) / 1.25, 1e-12)
    p = esskit.psrf([[0, 2], [1, 3]])
    assert close(p["rhat"], math.sqrt(0.75), 1e-12)

    # the autocovariance agrees with numpy
    rng = np.random.default_rng(1)
    x = rng.standard_normal(500).cumsum()
    xc = x - x.mean()
    ref = np.correlate(xc, xc, "full")[len(x) - 1:] / len(x)
    assert np.allclose(esskit.autocov(list(x)), ref, atol=1e-10 * ref[0])

    # AR(1) with IACT 19: every estimator lands near the truth
    a = 0.9
    exact = esskit.ar1_iact(a)
    chain = esskit.ar1(a, 200_000, seed=7)
    ests = {
        "bartlett": esskit.iact_window(chain, "bartlett", scale=2.5),
        "tukey": esskit.iact_window(chain, "tukey", scale=2.5),
        "geyer": esskit.iact_geyer(chain),
        "ar": esskit.iact_ar(chain),
        "bm": esskit.iact_batch(chain),
        "obm": esskit.iact_batch(chain, overlapping=True),
    }
    for name, e in ests.items():
        assert abs(e.iact / exact - 1) < 0.2, (name, e)
    assert ests["ar"].ar_order >= 1
    assert close(ests["geyer"].ess(len(chain)), len(chain) / ests["geyer"].iact, 1e-12)

    mcse, lo, hi = esskit.mcse_ci(-0.695, 24422.48, 0.152, 19_200_000)
    assert close(mcse, 1.392e-2, 5e-3)
    assert close(lo, -0.723, 2e-3) and close(hi, -0.668, 2e-3)

    chains = [esskit.ar1(0.5, 5000, seed=s) for s in range(4)]
    b = esskit.ess_bulk(chains, variant=3, burn_in=500)
    assert b.n_chains == 8 and b.chain_len == 2250
    assert abs(b.rhat - 1) < 0.05
    diverged = [[v + 100 * j for v in c] for j, c in enumerate(chains)]
    assert esskit.ess_bulk(diverged, variant=1).ess < 10

    try:
        esskit.mcse_ci(0.0, -1.0, 1.0, 10)
    except esskit.EssError:
        pass
    else:
        raise AssertionError("negative IACT accepted")
    assert issubclass(esskit.EssError, ValueError)

    print("esskit smoke test passed:", {k: round(v.iact, 2) for k, v in ests.items()}, "exact", exact)


if __name__ == "__main__":
    main()

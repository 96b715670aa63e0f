"""Quick check that the extension module imports and agrees with known values."""

import math

import rdlab


def main():
    qc = rdlab.Measure.law("quarter_circle")
    ub = rdlab.chi_rdiag(qc)
    assert math.isfinite(ub["value"]), ub
    assert rdlab.identity_defect(qc) < 1e-4

    semi = rdlab.Measure.law("semicircle", variance=1.0)
    m = semi.moments(4)
    assert abs(m[2] - 1.0) < 1e-5 and abs(m[4] - 2.0) < 1e-5, m

    sq = rdlab.pushforward(qc, {"kind": "power", "p": 2.0})
    assert abs(sq.moments(1)[1] - qc.moments(2)[2]) < 1e-4

    u = rdlab.haar_unitary(8, seed=7)
    assert u.is_unitary(1e-10)
    v, p = rdlab.polar_decompose(rdlab.ginibre(4, 1.0, seed=3))
    assert v.is_unitary(1e-9) and p.is_positive_semidefinite(1e-9)

    assert abs(rdlab.limck_residual(100)) < 0.01

    c = rdlab.MomentTable.circular(4)
    assert abs(c["zZ"] - 1.0) < 1e-12
    assert c.is_r_diagonal()["consistent"]

    amp = rdlab.amplification_constant(2)
    assert abs(abs(amp["constant"]) - 4.0 * math.log(2.0)) < 1e-9, amp

    est = rdlab.log_volume_estimate(
        {"r": 1.0, "m": 1, "epsilon": 0.5, "targets": [{"law": "circular", "variance": 1.0}]},
        k=1, n_samples=10000, seed=1,
    )
    assert math.isfinite(est["log_volume"])

    report = rdlab.run_suite("cumulants", quick=True)
    assert report["pass"], report
    print("smoke test passed")


if __name__ == "__main__":
    main()

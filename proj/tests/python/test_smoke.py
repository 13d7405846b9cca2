"""Smoke tests for the _spnf python module and the spnf CLI."""

import json
import os
import subprocess
import sys
import tempfile

import numpy as np

import _spnf as spnf


def check(cond, what):
    if not cond:
        print(f"FAIL: {what}")
        sys.exit(1)


def main():
    # identity: one +1 class, two (r=1, s=0) blocks
    result = spnf.analyze(np.eye(4))
    check(len(result.blocks) == 2, "identity should split into two blocks")
    check(all(b.case_tag == spnf.CaseTag.PlusOne for b in result.blocks), "identity case tag")
    check(all(b.sign == 0 for b in result.blocks), "identity signs")
    check(np.allclose(result.N, np.eye(4)), "identity normal form")

    # shear vs negative shear: opposite signs, not conjugate
    shear = np.array([[1.0, 1.0], [0.0, 1.0]])
    neg = np.array([[1.0, -1.0], [0.0, 1.0]])
    check(spnf.analyze(shear).blocks[0].sign == 1, "shear sign")
    check(spnf.analyze(neg).blocks[0].sign == -1, "negative shear sign")
    report = spnf.conjugacy_equal(shear, neg)
    check(not report.equal, "shear and negative shear must not be conjugate")
    check("signature" in report.reason, "conjugacy reason mentions the signature")

    # synthesize, recover, compare fingerprints
    blocks = [
        spnf.NormalFormBlock(spnf.CaseTag.PlusOne, 1.0, 2, 1, 4),
        spnf.NormalFormBlock(spnf.CaseTag.RealOffCircle, 2.0, 1, 0, 2),
    ]
    A, expected = spnf.build_from_params(blocks, seed=3)
    check(spnf.symplecticity_residual(A) < 1e-9, "synthesized matrix is symplectic")
    equal, reason = spnf.fingerprints_equal(spnf.fingerprint_of(A), expected)
    check(equal, f"fingerprint round trip: {reason}")

    # conjugation invariance through the bindings
    P = spnf.random_symplectic(3, 11)
    W = spnf.omega0(6)
    B = P @ A @ (W.T @ P.T @ W)
    check(spnf.conjugacy_equal(A, B).equal, "conjugated matrix compares equal")

    # error taxonomy surfaces as python exceptions
    try:
        spnf.analyze(2.0 * np.eye(2))
        check(False, "non-symplectic input must raise")
    except ValueError:
        pass

    # CLI round trip, if the binary location was provided
    cli = os.environ.get("SPNF_CLI")
    if cli:
        with tempfile.TemporaryDirectory() as tmp:
            doc = os.path.join(tmp, "m.json")
            with open(doc, "w") as f:
                json.dump({"n": 1, "matrix": shear.tolist()}, f)
            out1 = subprocess.run([cli, "analyze", doc], capture_output=True, check=True)
            out2 = subprocess.run([cli, "analyze", doc], capture_output=True, check=True)
            check(out1.stdout == out2.stdout, "CLI output is byte-deterministic")
            parsed = json.loads(out1.stdout)
            check(parsed["blocks"][0]["sign"] == 1, "CLI agrees with the bindings")

    print("OK: python smoke tests passed")


if __name__ == "__main__":
    main()

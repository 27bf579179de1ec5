"""Smoke test for the catalyx_py extension.

Build and run from the repository root:

    cargo build --release -p catalyx-python --features extension-module
    cp target/release/libcatalyx_py.so python/catalyx_py.so
    python3 python/smoke_test.py
"""

import json
import os
import sys
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import catalyx_py as cx


def main():
    x = cx.SchmidtVector(["0.4", "0.4", "0.1", "0.1"])
    y = cx.SchmidtVector([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4), 0])
    assert len(x) == 4 and x.sum() == "1"
    assert not cx.supermajorizes(x, y)

    c = cx.Catalyst(["0.6", "0.4"])
    assert cx.verify_catalyst(x, y, c)
    assert not cx.verify_catalyst(x, y, [1])

    p, m = cx.vidal_probability([0.8, 0.2], [0.5, 0.5])
    assert p == "2/5" and m >= 1, (p, m)

    report = cx.catalytic_probability(["0.5", "0.25", "0.25"], ["0.4", "0.4", "0.2"])
    assert report["attainability"] == "NOT_ATTAINABLE"
    assert 0.99 < report["p_cat"] < 1.0

    assert abs(cx.power_mean([1, 4], 1.0) - 2.5) < 1e-12

    cert = cx.synthesize_catalyst([4, 4, 4, 16, 16], [2, 8, 8, 8, 8], 1)
    assert cert.verified and cert.reverify()
    again = cx.Certificate.from_json(cert.to_json())
    assert again.verified and json.loads(again.to_json())["route"] == cert.route

    try:
        cx.vidal_probability([1, 1], [0, 0])
    except cx.CatalyxError:
        pass
    else:
        raise AssertionError("all-zero target accepted")

    print("smoke test ok:", cert)


if __name__ == "__main__":
    main()

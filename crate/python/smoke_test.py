"""Smoke test for the hyplab Python module.

Build and install first:  pip install ./crates/python  (or maturin develop in crates/python).
"""

import json
import math

import hyplab


def main() -> None:
    terms = dict(hyplab.convolve("conj:s3", "T", "T"))
    assert terms == {"e": "1/3", "R": "2/3"}, terms

    assert hyplab.haar("su2hat", "7") == "64"
    assert hyplab.check_axioms("conj:s4", 10)

    assert math.isclose(hyplab.omega("chebyshev", "poly:beta=2", "1", "1"), 5 / 16, rel_tol=1e-15)

    s = json.loads(hyplab.summability("chebyshev", "poly:beta=1", 2000))
    assert s["total_lower"] <= math.pi ** 2 / 6 <= s["total"]

    report = json.loads(hyplab.classify("chebyshev", "poly:beta=2", 200))
    assert report["schema"] == hyplab.REPORT_SCHEMA
    assert report["verdicts"]["arens_regular"]["tier"] == "CERTIFIED-YES"
    assert report["verdicts"]["injective"]["tier"] == "CERTIFIED-YES"

    try:
        hyplab.convolve("nope", "a", "b")
    except ValueError as e:
        assert "ConfigError" in str(e)
    else:
        raise AssertionError("bad spec accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()

"""Smoke test for the pycommutant extension module.

Build and install the module first, e.g.

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/pycommutant-*.whl

then run ``python python/smoke_test.py``.
"""

import math
import tempfile
from pathlib import Path

import pycommutant as pc


def close(a, b, tol):
    return abs(a - b) <= tol * (1.0 + abs(b))


def check_catalog():
    entries = pc.catalog_entries()
    assert len(entries) == 30, len(entries)
    classes = [e["expected_class"] for e in entries]
    assert (classes.count("Never"), classes.count("Conditional"), classes.count("Always")) == (11, 17, 2)

    cheb = pc.System.from_catalog("chebyshev")
    report = cheb.check()
    assert report.verdict == "Always" and close(report.value, 9.0, 1e-9), report

    bessel = pc.System.from_catalog("bessel")
    report = bessel.check()
    assert report.verdict == "NotConstant", report
    for t in (0.5, 2.0, 10.0):
        assert close(bessel.a0(t), t * t - 4.0, 1e-9)

    anger = pc.System.from_catalog("anger", condition="v = 0.5")
    assert anger.check().is_constant

    baer = pc.classify("baer")
    assert baer["expected"] == "Never" and baer["computed"] == "Conditional"


def check_pair_synthesis():
    a = pc.System.reference_a()
    assert close(a.check().value, 3.5, 1e-9)
    b = a.pair(0.5, -0.25, pc.K0_DERIVED)
    printed = pc.System.reference_b(k0="derived")
    for k in range(101):
        t = 0.2 * k
        got, want = b.coefficients(t), printed.coefficients(t)
        assert all(close(x, y, 1e-12) for x, y in zip(got, want)), (t, got, want)
        assert close(got[1], 0.75 + math.sin(t), 1e-12)

    eig = a.averaged_eigenvalues(0.0, 2.0 * math.pi)
    assert any(abs(z - complex(-1.0, 2.0)) < 1e-9 for z in eig), eig

    with tempfile.TemporaryDirectory() as d:
        path = Path(d) / "b.sys"
        b.save(str(path))
        again = pc.System.load(str(path))
        assert again.coefficients(3.0) == b.coefficients(3.0)

    try:
        pc.System.from_catalog("bessel").pair(1.0, 1.0, 0.0)
    except pc.CommutantError:
        pass
    else:
        raise AssertionError("bessel has no partner with c1 != 0")


def check_simulation():
    osc = pc.System("1", "0", "1", (0.0, 4.0), name="oscillator")
    traj = pc.simulate([osc], input="expr:cos(t)", t0=0.0, t1=3.0, dt=1e-3)
    assert set(traj) == {"t", "input", "y1", "dy1"}
    t, y = traj["t"][-1], traj["y1"][-1]
    assert abs(y - 0.5 * t * math.sin(t)) < 1e-9, (t, y)


def check_demo():
    a, b = pc.System.reference_a(), pc.System.reference_b()
    assert pc.structures(2, 2) == ["A->ABB", "AA->BB", "AAB->B", "AB->AB"]
    for inp in ("sine-saw", "pulse"):
        for stages in (2, 4):
            report = pc.run_demo(a, b, input=inp, stages=stages)
            assert report.passed, report.render()
            assert report.output_agreement <= 1e-3
            assert report.transmitted_divergence >= 0.1

    c = pc.System.reference_b(k0="stated")
    report = pc.run_demo(a, c)
    assert report.passed


def check_tables():
    result = pc.verify_tables()
    assert result["clean"], result["unexpected"]
    assert not result["unexpected"]
    assert any("baer" in line for line in result["documented"])


def main():
    for step in (check_catalog, check_pair_synthesis, check_simulation, check_demo, check_tables):
        step()
        print(f"ok  {step.__name__}")
    print("pycommutant smoke test passed")


if __name__ == "__main__":
    main()

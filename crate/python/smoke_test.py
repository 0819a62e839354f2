"""Smoke test for the fksl3 Python extension. Run with pytest or directly."""

import json

import fksl3


def test_trefoil_leading_coefficients():
    s = fksl3.reduced_trace(fksl3.Braid("1 1 1"), 3, 3)
    assert s.leading_offset == (-2, -2)
    assert s.coeff(0, 0) == {0: 1}
    # (1 - q) / (qy)^2
    assert s.coeff(0, 2) == {-2: 1, -1: -1}
    assert len(json.loads(s.to_json())["coefficients"]) == 16


def test_symmetric_series():
    assert fksl3.symmetric_series(fksl3.Braid("1^3"), 2) == ["1", "1 + q", "1 + q - q^3"]


def test_oracles():
    assert fksl3.alexander(fksl3.Braid("1 1 1")) == {-1: 1, 0: -1, 1: 1}
    assert json.loads(fksl3.alexander_check(fksl3.Braid("1^5"), 2, 2))["status"] == "pass"
    assert fksl3.yang_baxter(1, 0)
    assert fksl3.rt_invariant(fksl3.Braid("1"), 1, 0) != ""


def test_r_matrix_and_errors():
    out = fksl3.apply_r([0, 0, 0, 0], [0, 0, 0, 0])
    assert out == [([0, 0, 0, 0], [0, 0, 0, 0], "1")]
    for bad in ("1 1", "1 -1"):
        try:
            fksl3.Braid(bad)
        except ValueError:
            pass
        else:
            raise AssertionError(f"{bad!r} accepted")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
    print("ok")

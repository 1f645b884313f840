import pytest

from tetroncodes.codes import (
    brute_force_distance,
    build_bosonic,
    css_distance,
    in_stabilizer_span,
    paulis_commute,
    pauli_string,
    steane_code,
)


@pytest.mark.parametrize("family,d,n", [("color", 3, 7), ("color", 5, 19), ("color", 7, 37),
                                        ("surface", 3, 9), ("surface", 5, 25), ("steane", 3, 7)])
def test_parameters(family, d, n):
    code = build_bosonic(family, d)
    code.validate()
    assert code.n == n
    assert code.k == 1
    assert code.d_b == d
    assert len(code.generators) == n - 1


@pytest.mark.parametrize("family,d", [("color", 3), ("surface", 3)])
def test_distance_by_brute_force(family, d):
    assert brute_force_distance(build_bosonic(family, d), d) == d


@pytest.mark.parametrize("family,d", [("color", 5), ("surface", 5)])
def test_css_distance(family, d):
    assert css_distance(build_bosonic(family, d), d) == d


def test_steane_incidence():
    code = steane_code()
    supports = sorted({code.support(i) for i in range(len(code.generators))}, key=sorted)
    assert len(supports) == 3
    assert all(len(s) == 4 for s in supports)
    # every pair of plaquettes meets in two qubits, all three in one
    a, b, c = supports
    assert len(a & b) == len(b & c) == len(a & c) == 2
    assert len(a & b & c) == 1


def test_logicals():
    code = build_bosonic("color", 3)
    assert not paulis_commute(code.logicals["X"], code.logicals["Z"])
    assert not in_stabilizer_span(code, code.logicals["X"])
    assert in_stabilizer_span(code, code.generators[0])
    assert pauli_string({2: "X", 1: "Z"})[0].qubit == 1


def test_unknown_family():
    with pytest.raises(ValueError):
        build_bosonic("toric", 3)

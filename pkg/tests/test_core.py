import math

import numpy as np
import pytest

from centralspin.core import (
    HalfInt,
    InhomModelParams,
    ModelParams,
    SectorKey,
    bath_spin_multiplicity,
    bath_spin_values,
    halfint,
    halfint_range,
    sector_dimension,
    sector_keys,
)


def test_halfint_arithmetic():
    a, b = halfint("3/2"), halfint(1)
    assert (a + b).twice == 5
    assert (a - b) == HalfInt(1)
    assert (-a).twice == -3
    assert a + 2 == halfint("7/2")
    assert 2 - b == halfint(1)
    assert a * 3 == halfint("9/2")
    assert float(a) == 1.5
    assert str(a) == "3/2" and str(b) == "1" and str(-a) == "-3/2"


def test_halfint_ordering_and_parse():
    assert halfint("1/2") < halfint(1) < halfint("3/2")
    assert HalfInt.from_string("-5/2").twice == -5
    with pytest.raises(ValueError):
        HalfInt.from_string("3/4")
    with pytest.raises(TypeError):
        halfint(1.5)


def test_halfint_range():
    vals = halfint_range(halfint("-3/2"), halfint("3/2"))
    assert [v.twice for v in vals] == [-3, -1, 1, 3]


def test_model_params_validation():
    p = ModelParams(s="3/2", N=4, A=0.1, B=-0.2)
    assert p.s.twice == 3
    with pytest.raises(ValueError):
        ModelParams(s=0, N=2, A=1.0, B=1.0)
    with pytest.raises(ValueError):
        ModelParams(s=1, N=0, A=1.0, B=1.0)
    # A = B = 0 allowed as trivial limits
    ModelParams(s=1, N=1, A=0.0, B=0.0)


def test_inhom_params_validation():
    p = InhomModelParams(s="1/2", N=2, B=1.0, eps0=0.0, eps=(1.0, 2.0))
    assert p.epsilons_distinct
    assert p.couplings == (1.0 / (0.0 - 1.0), 1.0 / (0.0 - 2.0))
    degenerate = InhomModelParams(s="1/2", N=2, B=1.0, eps0=0.0, eps=(1.0, 1.0))
    assert not degenerate.epsilons_distinct
    with pytest.raises(ValueError):
        InhomModelParams(s="1/2", N=2, B=1.0, eps0=1.0, eps=(1.0, 2.0))
    with pytest.raises(ValueError):
        InhomModelParams(s="1/2", N=3, B=1.0, eps0=0.0, eps=(1.0, 2.0))


def test_bath_spin_values_parity():
    assert [j.twice for j in bath_spin_values(4)] == [4, 2, 0]
    assert [j.twice for j in bath_spin_values(3)] == [3, 1]


def test_sector_dimension_examples():
    assert sector_dimension(halfint(1), SectorKey(halfint(1), halfint(0))) == 3
    assert sector_dimension(halfint(1), SectorKey(halfint(1), halfint(2))) == 1
    # enumerate (m_s, m_j) pairs by hand for s=3/2, j=5/2, m=1
    s, j, m = halfint("3/2"), halfint("5/2"), halfint(1)
    pairs = [
        (ms, m - ms)
        for ms in halfint_range(-s, s)
        if abs((m - ms).twice) <= j.twice
    ]
    assert len(pairs) == 4
    assert sector_dimension(s, SectorKey(j, m)) == 4


def test_sector_dimension_errors_and_symmetry():
    with pytest.raises(ValueError):
        sector_dimension(halfint(1), SectorKey(halfint(1), halfint(3)))
    with pytest.raises(ValueError):
        sector_dimension(halfint(1), SectorKey(halfint(1), halfint("1/2")))
    for s_txt in ("1/2", "1", "3/2"):
        s = halfint(s_txt)
        for jt in range(0, 7):
            j = HalfInt(jt)
            top = (j + s).twice
            for mt in range(-top, top + 1, 2):
                d1 = sector_dimension(s, SectorKey(j, HalfInt(mt)))
                d2 = sector_dimension(s, SectorKey(j, HalfInt(-mt)))
                assert d1 == d2


def test_bath_spin_multiplicity_small():
    assert bath_spin_multiplicity(2, halfint(1)) == 1
    assert bath_spin_multiplicity(2, halfint(0)) == 1
    with pytest.raises(ValueError):
        bath_spin_multiplicity(2, halfint("1/2"))
    with pytest.raises(ValueError):
        bath_spin_multiplicity(2, halfint(2))


def test_bath_spin_multiplicity_vs_j2_oracle():
    # brute-force block-diagonalization of J^2 on the 2^4 bath space
    from centralspin.oracle import bath_j2_operator

    N = 4
    evals = np.linalg.eigvalsh(bath_j2_operator(N).toarray())
    for j in bath_spin_values(N):
        jj = float(j) * (float(j) + 1.0)
        hits = int(np.sum(np.abs(evals - jj) < 1e-9))
        assert hits == bath_spin_multiplicity(N, j) * (j.twice + 1)
    assert bath_spin_multiplicity(4, halfint(1)) == 3


def test_multiplicity_sum_identity():
    for N in range(1, 11):
        total = sum(bath_spin_multiplicity(N, j) * (j.twice + 1) for j in bath_spin_values(N))
        assert total == 2**N


def test_level_completeness_over_sectors():
    for s_txt in ("1/2", "1", "3/2", "2"):
        s = halfint(s_txt)
        for N in range(1, 7):
            total = sum(
                bath_spin_multiplicity(N, key.j) * sector_dimension(s, key)
                for key in sector_keys(s, N)
            )
            assert total == (s.twice + 1) * 2**N


def test_sector_keys_order():
    keys = sector_keys(halfint(1), 2)
    assert keys[0] == SectorKey(halfint(1), halfint(2))
    js = [k.j.twice for k in keys]
    assert js == sorted(js, reverse=True)

import numpy as np
import pytest

import golden
from centralspin.core import ModelParams, SectorKey, halfint
from centralspin.sector_spectrum import (
    build_sector,
    diag_term,
    expanded_levels,
    full_spectrum,
    offdiag_term,
)


def test_diag_term_examples():
    p = golden.PARAMS
    assert diag_term(halfint(1), halfint(1), p) == 1.5
    assert diag_term(halfint(0), halfint(5), p) == 0.0
    assert diag_term(halfint(-1), halfint(1), p) == -1.5
    with pytest.raises(ValueError):
        diag_term(halfint(2), halfint(0), p)


def test_offdiag_term_examples():
    s, j = halfint(1), halfint(1)
    # edge transition closed form A*sqrt(2s*2j)
    assert offdiag_term(s, -j, s, j, 0.5) == pytest.approx(0.5 * np.sqrt(4.0), abs=1e-15)
    # four factors are (s-m_s+1)(s+m_s)(j+m_j+1)(j-m_j) = 1*2*2*1
    assert offdiag_term(halfint(1), halfint(0), s, j, 0.5) == pytest.approx(1.0, abs=1e-15)
    # (s+m_s) = 0 kills the transition
    assert offdiag_term(-s, halfint(0), s, j, 0.5) == 0.0


def test_build_sector_table1_blocks():
    p = golden.PARAMS
    block = build_sector(p, SectorKey(halfint(1), halfint(1)))
    assert np.allclose(np.sort(block.energies), [-0.780776, 1.28078], atol=1e-5)
    block = build_sector(p, SectorKey(halfint(1), halfint(0)))
    assert np.allclose(np.sort(block.energies), [-2.14854, -0.893401, 1.04194], atol=1e-5)
    for m in (1, 0, -1):
        block = build_sector(p, SectorKey(halfint(0), halfint(m)))
        assert block.energies.shape == (1,)
        assert block.energies[0] == pytest.approx(p.B * m, abs=1e-15)


def test_block_structure_and_trace():
    rng = np.random.default_rng(5)
    for s_txt in ("1/2", "1", "3/2", "2"):
        p = ModelParams(s=s_txt, N=5, A=rng.uniform(-2, 2), B=rng.uniform(-2, 2))
        for key in [SectorKey(halfint("5/2"), halfint("1/2")), SectorKey(halfint("3/2"), halfint("-1/2"))]:
            block = build_sector(p, key)
            m = block.matrix
            assert np.array_equal(m, m.T)
            # tridiagonal: everything beyond the first off-diagonal vanishes
            assert np.abs(np.triu(m, 2)).max() == 0.0
            assert abs(np.trace(m) - block.energies.sum()) < 1e-10 * max(1.0, np.abs(m).max())
            # basis ordering is descending m_s with m_s + m_j = m
            for (ms, mj) in block.basis:
                assert (ms + mj) == key.m
            ms_vals = [b[0].twice for b in block.basis]
            assert ms_vals == sorted(ms_vals, reverse=True)


def test_full_spectrum_table1():
    levels = full_spectrum(golden.PARAMS)
    assert len(levels) == 12
    got = [(lv.j.twice, lv.m.twice, lv.energy) for lv in levels]
    for jt, mt, energy in golden.LEVELS:
        match = min(
            (abs(e - energy) for j2, m2, e in got if (j2, m2) == (jt, mt)),
            default=np.inf,
        )
        assert match < 1e-5, (jt, mt, energy)
    assert all(lv.multiplicity == 1 for lv in levels)


def test_full_spectrum_a_zero():
    p = ModelParams(s="3/2", N=3, A=0.0, B=0.7)
    levels = full_spectrum(p)
    allowed = {0.7 * (m / 2.0) for m in (-3, -1, 1, 3)}
    for lv in levels:
        assert min(abs(lv.energy - a) for a in allowed) < 1e-12


def test_full_spectrum_vs_dense_oracle():
    from centralspin.oracle import build_dense, exact_spectrum

    p = ModelParams(s="3/2", N=3, A=0.7, B=0.3)
    mine = expanded_levels(full_spectrum(p))
    ref = np.sort(exact_spectrum(build_dense(p)))
    assert mine.shape == ref.shape == ((p.s.twice + 1) * 2**p.N,)
    assert np.abs(mine - ref).max() < 1e-9


def test_b_zero_sector_symmetry():
    # at B=0 the blocks (j, m) and (j, -m) share the same energy multiset
    from centralspin.core import HalfInt

    p = ModelParams(s="1", N=4, A=0.9, B=0.0)
    for jt in (4, 2):
        for mt in range(0, jt + 2 + 1, 2):
            key = SectorKey(HalfInt(jt), HalfInt(mt))
            up = build_sector(p, key)
            dn = build_sector(p, SectorKey(key.j, -key.m))
            assert np.allclose(np.sort(up.energies), np.sort(dn.energies), atol=1e-10)

# -*- coding: utf-8 -*-
from functools import reduce
from math import comb

import numpy as np
import pytest
from scipy.linalg import expm

from errors import BudgetExceededError
from heat_kernel import laplacian_spectrum
from lattice import LatticeSpec, edges, laplacian_matrix
from spin_sector import (build_sector_basis, build_sector_hamiltonian, correlation, correlation_matrix,
                         cumulative_F, field_response, magnetization_ratio, sector_trace, susceptibility,
                         trace_table)

SZ = np.diag([-1.0, 1.0])  # bit 0 = para baixo, bit 1 = para cima


def _site_op(op, i, N):
    # bit i do estado = fator i do produto de Kronecker lido da direita
    return reduce(np.kron, [op if s == i else np.eye(2) for s in reversed(range(N))])


def _full_hamiltonian(spec: LatticeSpec) -> np.ndarray:
    """Oráculo 2^N: H = Σ (1 - P_ij) com P_ij a troca dos dois spins."""
    N = spec.N
    dim = 2 ** N
    H = np.zeros((dim, dim))
    for i, j in edges(spec):
        P = np.zeros((dim, dim))
        for s in range(dim):
            bi, bj = (s >> i) & 1, (s >> j) & 1
            t = s ^ ((bi ^ bj) << i) ^ ((bi ^ bj) << j)
            P[t, s] = 1.0
        H += np.eye(dim) - P
    return H


def test_sector_basis():
    b = build_sector_basis(4, 2)
    assert b.dim == 6 == comb(4, 2)
    assert list(b.states) == [3, 5, 6, 9, 10, 12]
    np.testing.assert_array_equal(b.occupancy[0], [True, True, False, False])
    assert b.index[10] == 4
    with pytest.raises(ValueError):
        build_sector_basis(4, 5)


def test_trivial_and_triangle_hamiltonians(triangle):
    np.testing.assert_array_equal(build_sector_hamiltonian(triangle, 0), [[0.0]])
    expected = np.array([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], dtype=float)
    np.testing.assert_array_equal(build_sector_hamiltonian(triangle, 1), expected)


@pytest.mark.parametrize("d,L", [(1, 5), (2, 4), (3, 3), (3, 4), (2, 8), (3, 5)])
def test_single_magnon_is_laplacian(d, L):
    spec = LatticeSpec(d, L)
    np.testing.assert_array_equal(build_sector_hamiltonian(spec, 1), laplacian_matrix(spec))
    beta = 0.8
    spectral = float(np.sum(np.exp(-beta * laplacian_spectrum(spec))))
    assert sector_trace(spec, beta, 1) == pytest.approx(spectral, rel=1e-12)


def test_ground_energy_zero_in_every_sector(ring6):
    for k in range(ring6.N + 1):
        lam = np.linalg.eigvalsh(build_sector_hamiltonian(ring6, k))
        assert lam[0] >= -1e-12
        assert abs(lam[0]) <= 1e-12


def test_matches_full_space_oracle():
    spec = LatticeSpec(1, 5)
    beta = 0.9
    H = _full_hamiltonian(spec)
    assert float(np.trace(expm(-beta * H))) == pytest.approx(trace_table(spec, beta).total, rel=1e-12)


def test_sector_trace_examples(triangle, ring6):
    assert sector_trace(triangle, 1.0, 1) == pytest.approx(1 + 2 * np.exp(-3.0), rel=1e-12)
    assert sector_trace(triangle, 1.0, 1) == pytest.approx(1.099574, abs=1e-6)
    for k in range(7):
        assert sector_trace(ring6, 0.0, k) == pytest.approx(comb(6, k))
    assert sector_trace(ring6, 3.0, 0) == pytest.approx(1.0)
    assert sector_trace(ring6, 3.0, 6) == pytest.approx(1.0)


def test_trace_table_symmetry(ring6):
    t = trace_table(ring6, 2.0)
    assert len(t.traces) == 7
    np.testing.assert_allclose(t.traces, t.traces[::-1], rtol=1e-12)
    assert t.traces[0] == pytest.approx(1.0)


def test_budget_and_range_guards(ring6):
    with pytest.raises(BudgetExceededError):
        build_sector_hamiltonian(ring6, 3, budget=10)
    with pytest.raises(ValueError):
        build_sector_hamiltonian(ring6, 7)
    with pytest.raises(BudgetExceededError):
        correlation_matrix(LatticeSpec(1, 17), 1.0)


def test_cumulative_F(ring6):
    assert cumulative_F(ring6, 1.5, 0) == pytest.approx(1.0)
    assert cumulative_F(ring6, 0.0, 2) == pytest.approx(1 + 6 + 15)
    assert cumulative_F(ring6, 1.5, 6) == pytest.approx(trace_table(ring6, 1.5).total)
    with pytest.raises(ValueError):
        cumulative_F(ring6, 1.0, 7)


def test_magnetization_ratio(ring6):
    assert magnetization_ratio(ring6, 0.0, 0.49) == pytest.approx(22 / 64)
    table = trace_table(ring6, 4.0)
    ratios = [magnetization_ratio(ring6, 4.0, r, table) for r in (0.1, 0.2, 0.3, 0.4, 0.49)]
    assert all(0 < x <= 1 for x in ratios)
    assert ratios == sorted(ratios)
    with pytest.raises(ValueError):
        magnetization_ratio(ring6, 1.0, 0.5)


def test_correlations():
    spec = LatticeSpec(1, 4)
    assert correlation(spec, 2.0, 1, 1) == 1.0
    rho0 = correlation_matrix(spec, 0.0)
    np.testing.assert_allclose(rho0, np.eye(4), atol=1e-12)

    rho = correlation_matrix(spec, 2.0)
    np.testing.assert_allclose(rho, rho.T, atol=1e-12)
    nearest = [rho[i, j] for i, j in edges(spec)]
    assert all(0 < x < 1 for x in nearest)
    np.testing.assert_allclose(nearest, nearest[0], atol=1e-12)


def test_correlation_against_full_space():
    spec = LatticeSpec(1, 4)
    beta = 2.0
    W = expm(-beta * _full_hamiltonian(spec))
    expected = float(np.trace(W @ _site_op(SZ, 0, 4) @ _site_op(SZ, 2, 4)) / np.trace(W))
    assert correlation(spec, beta, 0, 2) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("L", [4, 6])
@pytest.mark.parametrize("beta", [1.0, 4.0])
def test_field_response(L, beta):
    spec = LatticeSpec(1, L)
    table = trace_table(spec, beta)
    assert field_response(spec, beta, 0.0, table) == pytest.approx(1.0, rel=1e-14)
    for delta in np.linspace(-1, 1, 9):
        a = field_response(spec, beta, delta, table)
        assert a == pytest.approx(field_response(spec, beta, -delta, table), rel=1e-12)
        assert a >= 1.0 - 1e-14


def test_susceptibility():
    spec = LatticeSpec(1, 4)
    table = trace_table(spec, 1.0)
    h = 1e-3
    second = (field_response(spec, 1.0, h, table) + field_response(spec, 1.0, -h, table) - 2) / h ** 2
    chi = susceptibility(spec, 1.0, table)
    assert second > 0
    assert chi == pytest.approx(second, rel=1e-5)
    assert chi == pytest.approx(float(correlation_matrix(spec, 1.0).sum()), rel=1e-12)


def test_sectors_beyond_sixty_four_sites():
    spec = LatticeSpec(3, 5)
    b = build_sector_basis(spec.N, spec.N - 1)
    assert b.dim == spec.N
    assert b.states[0] == (1 << spec.N) - 1 - (1 << (spec.N - 1))
    # k e N-k são o mesmo setor trocando todos os spins
    beta = 0.8
    assert sector_trace(spec, beta, spec.N - 1) == pytest.approx(sector_trace(spec, beta, 1), rel=1e-12)


def test_field_response_log_convex():
    spec = LatticeSpec(1, 6)
    table = trace_table(spec, 2.0)
    deltas = np.linspace(-2, 2, 41)
    logA = np.log([field_response(spec, 2.0, x, table) for x in deltas])
    assert np.min(logA[:-2] - 2 * logA[1:-1] + logA[2:]) >= -1e-10


def test_spectrum_cache_is_bounded():
    import config
    from spin_sector import _sector_spectrum
    info = _sector_spectrum.cache_info()
    assert info.maxsize == config.SPECTRUM_CACHE_SIZE
    assert info.currsize <= info.maxsize

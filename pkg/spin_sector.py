# -*- coding: utf-8 -*-
"""
spin_sector.py - Diagonalização exata por setor de magnetização

H = Σ_{<ij>} (1 - I_ij) na base de k spins para cima (bitmasks ordenados).
Cada setor é pequeno o bastante (DENSE_BUDGET) para eigh denso; daí saem os
traços Tr(e^{-βH})_{L,k}, F_β(L, n), correlações e a resposta ao campo.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb, floor
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from scipy.special import logsumexp

import config
from errors import BudgetExceededError
from lattice import LatticeSpec, edges

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SectorBasis:
    """Estados do setor como bitmasks (int do Python, sem limite de N)."""
    N: int
    k: int
    dim: int
    states: np.ndarray = field(repr=False)        # dtype=object, ordenado
    occupancy: np.ndarray = field(repr=False)     # (dim, N) bool
    index: dict = field(repr=False, compare=False)


def build_sector_basis(N: int, k: int) -> SectorBasis:
    if not 0 <= k <= N:
        raise ValueError(f"setor inválido: k={k} (N={N})")
    masks = sorted(sum(1 << b for b in c) for c in combinations(range(N), k))
    states = np.empty(len(masks), dtype=object)
    states[:] = masks
    occupancy = np.array([[(m >> b) & 1 for b in range(N)] for m in masks], dtype=bool).reshape(len(masks), N)
    states.setflags(write=False)
    occupancy.setflags(write=False)
    return SectorBasis(N=N, k=k, dim=len(masks), states=states, occupancy=occupancy,
                       index={m: n for n, m in enumerate(masks)})


def _check_dim(N: int, k: int, budget: int) -> None:
    if not 0 <= k <= N:
        raise ValueError(f"setor inválido: k={k} (N={N})")
    dim = comb(N, k)
    if dim > budget:
        raise BudgetExceededError(f"setor k={k} tem dimensão {dim} > orçamento {budget}")


def build_sector_hamiltonian(spec: LatticeSpec, k: int, budget: Optional[int] = None) -> np.ndarray:
    budget = config.DENSE_BUDGET if budget is None else int(budget)
    _check_dim(spec.N, k, budget)
    basis = build_sector_basis(spec.N, k)
    E = np.array(edges(spec), dtype=np.int64).reshape(-1, 2)
    occ = basis.occupancy
    anti = occ[:, E[:, 0]] != occ[:, E[:, 1]]  # (dim, arestas)

    H = np.diag(anti.sum(axis=1).astype(float))
    rows, cols = np.nonzero(anti)
    flips = np.empty(len(E), dtype=object)
    flips[:] = [(1 << int(i)) | (1 << int(j)) for i, j in E]
    swapped = basis.states[rows] ^ flips[cols]
    targets = np.fromiter((basis.index[s] for s in swapped), dtype=np.int64, count=len(swapped))
    H[rows, targets] = -1.0
    return H


@lru_cache(maxsize=config.SPECTRUM_CACHE_SIZE)
def _sector_spectrum(spec: LatticeSpec, k: int, budget: int) -> np.ndarray:
    lam = np.linalg.eigvalsh(build_sector_hamiltonian(spec, k, budget))
    lam.setflags(write=False)
    return lam


def sector_trace(spec: LatticeSpec, beta: float, k: int, budget: Optional[int] = None) -> float:
    budget = config.DENSE_BUDGET if budget is None else int(budget)
    lam = _sector_spectrum(spec, k, budget)
    if lam[0] < -1e-10:
        log.warning(f"⚠️ autovalor negativo {lam[0]:.3e} no setor k={k}")
    return float(np.sum(np.exp(-beta * lam)))


@dataclass(frozen=True)
class SectorTraceTable:
    spec: LatticeSpec
    beta: float
    traces: np.ndarray = field(repr=False)

    @property
    def total(self) -> float:
        return float(np.sum(self.traces))


def trace_table(spec: LatticeSpec, beta: float, budget: Optional[int] = None) -> SectorTraceTable:
    budget = config.DENSE_BUDGET if budget is None else int(budget)
    for k in range(spec.N + 1):
        _check_dim(spec.N, k, budget)
    traces = Parallel(n_jobs=config.N_JOBS)(
        delayed(sector_trace)(spec, beta, k, budget) for k in range(spec.N + 1))
    arr = np.array(traces, dtype=float)
    arr.setflags(write=False)
    return SectorTraceTable(spec=spec, beta=float(beta), traces=arr)


def cumulative_F(spec: LatticeSpec, beta: float, n: int, table: Optional[SectorTraceTable] = None) -> float:
    """F_β(L, n) = Σ_{i<=n} Tr(e^{-βH})_{L,i}."""
    if not 0 <= n <= spec.N:
        raise ValueError(f"n={n} fora de [0, {spec.N}]")
    table = trace_table(spec, beta) if table is None else table
    return float(np.sum(table.traces[: n + 1]))


def magnetization_ratio(spec: LatticeSpec, beta: float, r: float,
                        table: Optional[SectorTraceTable] = None) -> float:
    if not 0 < r < 0.5:
        raise ValueError(f"r deve estar em (0, 1/2): {r}")
    table = trace_table(spec, beta) if table is None else table
    return cumulative_F(spec, beta, floor(r * spec.N), table) / table.total


def _check_full_space(spec: LatticeSpec) -> None:
    if spec.N > config.FULL_SPACE_MAX_SITES:
        raise BudgetExceededError(
            f"espaço completo 2^{spec.N} acima do limite 2^{config.FULL_SPACE_MAX_SITES}")


def correlation_matrix(spec: LatticeSpec, beta: float, budget: Optional[int] = None) -> np.ndarray:
    """ρ(i,j) = Tr(e^{-βH} σ_iz σ_jz)/Tr(e^{-βH}) para todos os pares, setor a setor."""
    budget = config.DENSE_BUDGET if budget is None else int(budget)
    _check_full_space(spec)
    N = spec.N
    acc = np.zeros((N, N))
    Z = 0.0
    for k in range(N + 1):
        _check_dim(N, k, budget)
        basis = build_sector_basis(N, k)
        lam, V = np.linalg.eigh(build_sector_hamiltonian(spec, k, budget))
        w = (V ** 2) @ np.exp(-beta * lam)  # diagonal de e^{-βH_k}
        sz = 2.0 * basis.occupancy - 1.0
        acc += sz.T @ (w[:, None] * sz)
        Z += float(np.sum(w))
    rho = acc / Z
    np.fill_diagonal(rho, 1.0)
    return rho


def correlation(spec: LatticeSpec, beta: float, i: int, j: int, budget: Optional[int] = None) -> float:
    for x in (i, j):
        if not 0 <= x < spec.N:
            raise ValueError(f"sítio fora da rede: {x}")
    if i == j:
        return 1.0
    return float(correlation_matrix(spec, beta, budget)[i, j])


def _magnetizations(N: int) -> np.ndarray:
    return N - 2.0 * np.arange(N + 1)


def field_response(spec: LatticeSpec, beta: float, delta: float,
                   table: Optional[SectorTraceTable] = None) -> float:
    """A_L(δ): H' vale N - 2k no setor k, então e^{-βH-δH'} fatora."""
    table = trace_table(spec, beta) if table is None else table
    m = _magnetizations(spec.N)
    return float(np.exp(logsumexp(-delta * m, b=table.traces) - np.log(table.total)))


def susceptibility(spec: LatticeSpec, beta: float, table: Optional[SectorTraceTable] = None) -> float:
    """A_L''(0) = ⟨(Σ_i σ_iz)²⟩ = Σ_{i,j} ρ(i,j)."""
    table = trace_table(spec, beta) if table is None else table
    m = _magnetizations(spec.N)
    return float(np.sum(m ** 2 * table.traces) / table.total)

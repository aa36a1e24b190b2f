# -*- coding: utf-8 -*-
"""
lattice.py - Rede cúbica periódica Λ de lado L em d dimensões

Índice dos sítios em ordem "row-major": index = Σ_k coords[k]·L^k.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class LatticeSpec:
    d: int
    L: int

    def __post_init__(self):
        if not 1 <= int(self.d) <= 3:
            raise ValueError(f"dimensão inválida: d={self.d} (esperado 1..3)")
        # L=2 duplicaria arestas na rede periódica
        if int(self.L) < 3:
            raise ValueError(f"lado inválido: L={self.L} (esperado L >= 3)")

    @property
    def N(self) -> int:
        return self.L ** self.d

    @property
    def edge_count(self) -> int:
        return self.d * self.N


def _check_site(spec: LatticeSpec, i: int) -> int:
    i = int(i)
    if not 0 <= i < spec.N:
        raise ValueError(f"sítio fora da rede: {i} (N={spec.N})")
    return i


def site_index(spec: LatticeSpec, coords: Sequence[int]) -> int:
    if len(coords) != spec.d:
        raise ValueError(f"coords com {len(coords)} componentes, rede tem d={spec.d}")
    idx = 0
    for k, c in enumerate(coords):
        idx += (int(c) % spec.L) * spec.L ** k
    return idx


def site_coords(spec: LatticeSpec, i: int) -> Tuple[int, ...]:
    i = _check_site(spec, i)
    out = []
    for _ in range(spec.d):
        out.append(i % spec.L)
        i //= spec.L
    return tuple(out)


def all_coords(spec: LatticeSpec) -> np.ndarray:
    """Tabela (N, d) com as coordenadas de todos os sítios."""
    ids = np.arange(spec.N)
    return np.stack([(ids // spec.L ** k) % spec.L for k in range(spec.d)], axis=1)


def neighbors(spec: LatticeSpec, i: int) -> List[int]:
    c = list(site_coords(spec, i))
    out = set()
    for k in range(spec.d):
        for step in (1, -1):
            shifted = list(c)
            shifted[k] += step
            out.add(site_index(spec, shifted))
    return sorted(out)


def edges(spec: LatticeSpec) -> List[Tuple[int, int]]:
    """Pares vizinhos, cada um uma única vez (d·N arestas)."""
    out = []
    for i in range(spec.N):
        c = site_coords(spec, i)
        for k in range(spec.d):
            shifted = list(c)
            shifted[k] += 1
            j = site_index(spec, shifted)
            out.append((min(i, j), max(i, j)))
    return sorted(out)


def displacement(spec: LatticeSpec, i: int, j: int) -> Tuple[int, ...]:
    """Representante de coords(j) - coords(i) mod L na janela [-L/2, L/2)."""
    ci = site_coords(spec, i)
    cj = site_coords(spec, j)
    half = spec.L // 2
    return tuple(((b - a + half) % spec.L) - half for a, b in zip(ci, cj))


def adjacency_matrix(spec: LatticeSpec) -> np.ndarray:
    A = np.zeros((spec.N, spec.N))
    for i, j in edges(spec):
        A[i, j] = A[j, i] = 1.0
    return A


def laplacian_matrix(spec: LatticeSpec) -> np.ndarray:
    """-Δ como matriz densa: 2d·I - A (semidefinida positiva)."""
    return 2 * spec.d * np.eye(spec.N) - adjacency_matrix(spec)

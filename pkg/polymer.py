# -*- coding: utf-8 -*-
"""
polymer.py - Polímeros (ciclos), atividades e somas de caminhos

Atividade de um k-ciclo (α_1, ..., α_k):
    e_S = (Π_{i<k} g_β(α_i, α_{i+1})) · g_β(α_1, α_k)
Para k=1 vale g_β(α_1, α_1); para k=2, g_β(α_1, α_2)².
"""
import logging
from dataclasses import dataclass
from math import pi, prod
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

import config
from errors import BudgetExceededError
from heat_kernel import HeatKernel, build_kernel, evaluate, kernel_matrix
from perm_algebra import Permutation, cycle_decompose

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Polymer:
    vertices: Tuple[int, ...]

    def __post_init__(self):
        v = tuple(int(x) for x in self.vertices)
        if not v:
            raise ValueError("polímero vazio")
        if len(set(v)) != len(v):
            raise ValueError(f"vértices repetidos no polímero: {v}")
        object.__setattr__(self, "vertices", v)

    @property
    def k(self) -> int:
        return len(self.vertices)

    def canonical(self) -> "Polymer":
        """Rotaciona para que α_1 seja o menor id (a ordem cíclica é mantida)."""
        s = self.vertices.index(min(self.vertices))
        return Polymer(self.vertices[s:] + self.vertices[:s])


def activity(kernel: HeatKernel, p: Polymer) -> float:
    v = p.vertices
    for x in v:
        if not 0 <= x < kernel.spec.N:
            raise ValueError(f"vértice {x} fora da rede (N={kernel.spec.N})")
    hops = prod(evaluate(kernel, a, b) for a, b in zip(v[:-1], v[1:]))
    return hops * evaluate(kernel, v[0], v[-1])


def permutation_polymers(p: Permutation) -> List[Polymer]:
    return [Polymer(c) for c in cycle_decompose(p).cycles]


def polymer_weight(kernel: HeatKernel, p: Permutation) -> float:
    """Produto das atividades dos ciclos de p (= Π_i g_β(i, p(i)))."""
    return prod(activity(kernel, poly) for poly in permutation_polymers(p))


def _tuple_count(N: int, k: int) -> int:
    return prod(N - m for m in range(1, k))


def _walk_branch(G: np.ndarray, i: int, first: int, k: int) -> float:
    """Soma parcial com γ_2 = first fixo (busca em profundidade)."""
    N = len(G)
    used = np.zeros(N, dtype=bool)
    used[i] = used[first] = True

    def dfs(prev: int, depth: int) -> float:
        # depth = número de vértices já escolhidos (incluindo i)
        if depth == k - 1:
            free = ~used
            return float(np.dot(G[prev, free], G[i, free]))
        acc = 0.0
        for nxt in np.flatnonzero(~used):
            used[nxt] = True
            acc += G[prev, nxt] * dfs(nxt, depth + 1)
            used[nxt] = False
        return acc

    if k == 2:
        return G[i, first] ** 2
    return G[i, first] * dfs(first, 2)


def walk_sum_distinct(kernel: HeatKernel, i: int, k: int,
                      budget: Optional[int] = None) -> float:
    """Σ g(i,γ_2)g(γ_2,γ_3)···g(γ_{k-1},γ_k)g(i,γ_k), vértices distintos."""
    budget = config.ENUM_BUDGET if budget is None else int(budget)
    N = kernel.spec.N
    if k < 1:
        raise ValueError(f"comprimento de ciclo inválido: k={k}")
    if not 0 <= i < N:
        raise ValueError(f"sítio fora da rede: {i}")
    if k > N:
        return 0.0
    count = _tuple_count(N, k)
    if count > budget:
        raise BudgetExceededError(f"{count} tuplas ordenadas > orçamento {budget}")

    G = kernel_matrix(kernel)
    if k == 1:
        return float(G[i, i])
    firsts = [g for g in range(N) if g != i]
    log.info(f"🔁 Enumerando {count} caminhos (k={k}, N={N})")
    parts = Parallel(n_jobs=config.N_JOBS)(delayed(_walk_branch)(G, i, f, k) for f in firsts)
    return float(sum(parts))


def walk_sum_unrestricted(kernel: HeatKernel, i: int, k: int) -> float:
    """(g_β^k)(i,i) = g_{kβ}(i,i) pelo semigrupo."""
    if k < 1:
        raise ValueError(f"comprimento de ciclo inválido: k={k}")
    return evaluate(build_kernel(kernel.spec, k * kernel.beta), i, i)


def return_estimate(d: int, beta: float, k: int) -> float:
    """(4πβk)^{-d/2}: probabilidade gaussiana de retorno após k passos."""
    if beta <= 0 or k < 1:
        raise ValueError(f"entradas devem ser positivas: beta={beta}, k={k}")
    return float((4 * pi * beta * k) ** (-d / 2))

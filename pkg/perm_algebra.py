# -*- coding: utf-8 -*-
"""
perm_algebra.py - e^{-βH} como elemento da álgebra do grupo simétrico S_N

H = E·1 - Σ_{arestas} I_ij, com E = d·N. Escrevemos
    e^{-βH} = e^{-βE} · exp(β Σ I_ij)
e somamos a série de Taylor de exp(β Σ I_ij) aplicando repetidamente a
soma de transposições. Todos os termos são positivos (sem cancelamento).

As permutações (N <= 9) são indexadas pelo posto de Lehmer, que coincide
com a ordem lexicográfica de itertools.permutations; o vetor de
coeficientes é um array denso de tamanho N!.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import poisson
from tqdm import tqdm

import config
from errors import BudgetExceededError, EmptySelectionError
from heat_kernel import build_kernel, kernel_matrix
from lattice import LatticeSpec, edges

log = logging.getLogger(__name__)

# reescala da série para não estourar float64 quando βE é grande
_RESCALE_AT = 1e200


# ----------------- Permutações -----------------
def lehmer_rank(mapping: Sequence[int]) -> int:
    n = len(mapping)
    rank = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if mapping[j] < mapping[i])
        rank += smaller * factorial(n - 1 - i)
    return rank


def lehmer_unrank(n: int, rank: int) -> Tuple[int, ...]:
    if not 0 <= rank < factorial(n):
        raise ValueError(f"posto {rank} fora de [0, {n}!)")
    pool = list(range(n))
    out = []
    for i in range(n):
        f = factorial(n - 1 - i)
        q, rank = divmod(rank, f)
        out.append(pool.pop(q))
    return tuple(out)


@dataclass(frozen=True)
class Permutation:
    mapping: Tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.mapping)
        if sorted(m) != list(range(len(m))):
            raise ValueError(f"não é uma bijeção de [0, {len(m)}): {m}")
        object.__setattr__(self, "mapping", m)

    @property
    def n(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> "Permutation":
        m = list(range(n))
        m[a], m[b] = m[b], m[a]
        return cls(tuple(m))

    @classmethod
    def unrank(cls, n: int, rank: int) -> "Permutation":
        return cls(lehmer_unrank(n, rank))

    def rank(self) -> int:
        return lehmer_rank(self.mapping)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """(self ∘ other)(i) = self(other(i))."""
        return Permutation(tuple(self.mapping[j] for j in other.mapping))

    def __call__(self, i: int) -> int:
        return self.mapping[i]


@lru_cache(maxsize=4)
def all_permutations(n: int) -> np.ndarray:
    """Todas as n! permutações, linha r = permutação de posto r."""
    table = np.array(list(itertools.permutations(range(n))), dtype=np.int8)
    table.setflags(write=False)
    return table


def rank_rows(table: np.ndarray) -> np.ndarray:
    """Postos de Lehmer de cada linha (vetorizado, n <= 20)."""
    rows, n = table.shape
    ranks = np.zeros(rows, dtype=np.int64)
    for i in range(n):
        smaller = (table[:, i + 1:] < table[:, i:i + 1]).sum(axis=1)
        ranks += smaller * factorial(n - 1 - i)
    return ranks


# ----------------- Decomposição em ciclos -----------------
@dataclass(frozen=True)
class CycleDecomposition:
    cycles: Tuple[Tuple[int, ...], ...]
    histogram: Dict[int, int]

    @property
    def m(self) -> int:
        return len(self.cycles)


def cycle_decompose(p: Permutation) -> CycleDecomposition:
    seen = [False] * p.n
    cycles = []
    for start in range(p.n):  # start é sempre o menor id do ciclo
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = p(i)
        cycles.append(tuple(cyc))
    hist: Dict[int, int] = {}
    for c in cycles:
        hist[len(c)] = hist.get(len(c), 0) + 1
    return CycleDecomposition(cycles=tuple(cycles), histogram=dict(sorted(hist.items())))


def cycle_histograms(table: np.ndarray) -> np.ndarray:
    """hist[r, l] = número de l-ciclos da permutação da linha r."""
    rows, n = table.shape
    table = table.astype(np.int64)
    start = np.broadcast_to(np.arange(n), (rows, n))
    cur = start.copy()
    length = np.zeros((rows, n), dtype=np.int64)
    rr = np.arange(rows)[:, None]
    for t in range(1, n + 1):
        cur = table[rr, cur]
        length[(cur == start) & (length == 0)] = t
    hist = np.zeros((rows, n + 1), dtype=np.int64)
    for ell in range(1, n + 1):
        hist[:, ell] = (length == ell).sum(axis=1) // ell
    return hist


# ----------------- Elementos da álgebra -----------------
@dataclass(frozen=True)
class GroupAlgebraElement:
    """Combinação Σ c_r G_r, esparsa nos postos de Lehmer r."""
    n: int
    ranks: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @classmethod
    def from_terms(cls, n: int, terms: Dict[Permutation, float]) -> "GroupAlgebraElement":
        acc: Dict[int, float] = {}
        for p, c in terms.items():
            acc[p.rank()] = acc.get(p.rank(), 0.0) + float(c)
        acc = {r: c for r, c in sorted(acc.items()) if c != 0.0}
        dtype = np.int64 if n <= 20 else object
        return cls(n, np.array(list(acc), dtype=dtype), np.array(list(acc.values()), dtype=float))

    @classmethod
    def from_dense(cls, n: int, vector: np.ndarray, prune: float = 0.0) -> "GroupAlgebraElement":
        keep = np.flatnonzero(np.abs(vector) > prune) if prune > 0 else np.flatnonzero(vector)
        return cls(n, keep.astype(np.int64), np.asarray(vector[keep], dtype=float))

    def to_dense(self) -> np.ndarray:
        if self.n > config.MAX_PERM_SITES:
            raise BudgetExceededError(f"vetor denso de {self.n}! coeficientes não cabe")
        out = np.zeros(factorial(self.n))
        out[self.ranks.astype(np.int64)] = self.values
        return out

    @property
    def support(self) -> int:
        return int(len(self.values))

    def total(self) -> float:
        return float(np.sum(self.values))

    def coefficient(self, p: Permutation) -> float:
        hit = np.flatnonzero(self.ranks == p.rank())
        return float(self.values[hit[0]]) if len(hit) else 0.0

    def permutation_table(self) -> np.ndarray:
        if self.n <= config.MAX_PERM_SITES:
            return all_permutations(self.n)[self.ranks.astype(np.int64)]
        return np.array([lehmer_unrank(self.n, int(r)) for r in self.ranks], dtype=np.int64)


def hamiltonian_element(spec: LatticeSpec) -> GroupAlgebraElement:
    n = spec.N
    terms = {Permutation.identity(n): float(spec.edge_count)}
    for a, b in edges(spec):
        terms[Permutation.transposition(n, a, b)] = -1.0
    return GroupAlgebraElement.from_terms(n, terms)


@lru_cache(maxsize=4)
def _transposition_maps(spec: LatticeSpec) -> np.ndarray:
    """maps[e, q] = posto de q ∘ t_e, para cada aresta e."""
    table = all_permutations(spec.N)
    maps = np.empty((spec.edge_count, len(table)), dtype=np.int64)
    for e, (a, b) in enumerate(edges(spec)):
        swapped = table.copy()
        swapped[:, [a, b]] = swapped[:, [b, a]]
        maps[e] = rank_rows(swapped)
    return maps


def _taylor_order(lam: float, tol: float) -> int:
    """Menor K com e^{-λ} Σ_{j>K} λ^j/j! < tol (cauda de Poisson)."""
    K = int(lam)
    while poisson.sf(K, lam) >= tol:
        K += 1
    return K


def exp_neg_beta_H(spec: LatticeSpec, beta: float,
                   tol: Optional[float] = None) -> GroupAlgebraElement:
    n = spec.N
    tol = config.EXPAND_TOL if tol is None else float(tol)
    if n > config.MAX_PERM_SITES:
        raise BudgetExceededError(f"N={n} > {config.MAX_PERM_SITES}: {n}! coeficientes não cabem")
    if tol <= 0:
        raise ValueError(f"tol deve ser positivo: {tol}")
    if beta < 0:
        raise ValueError(f"beta negativo: {beta}")

    size = factorial(n)
    lam = beta * spec.edge_count
    term = np.zeros(size)
    term[0] = 1.0  # identidade tem posto 0
    total = term.copy()
    log_scale = 0.0

    K = _taylor_order(lam, tol) if beta > 0 else 0
    if K:
        maps = _transposition_maps(spec)
        log.info(f"🔁 Expandindo e^(-βH): N={n}, β={beta}, {K} termos de Taylor")
        for step in tqdm(range(1, K + 1), disable=not config.PROGRESS, desc="taylor"):
            nxt = np.zeros(size)
            for m in maps:
                nxt += term[m]
            term = nxt * (beta / step)
            total += term
            s = total.sum()
            if s > _RESCALE_AT:
                total /= s
                term /= s
                log_scale += float(np.log(s))

    coeffs = total * np.exp(log_scale - lam)
    log.info(f"✅ Expansão pronta: soma={coeffs.sum():.15f}")
    return GroupAlgebraElement.from_dense(n, coeffs, prune=config.COEFF_PRUNE)


# ----------------- Traços via ciclos -----------------
def trace_from_coeffs(coeffs: GroupAlgebraElement) -> float:
    """Tr(e^{-βH}) = Σ_α 2^{m(G_α)} C̃_α."""
    hist = cycle_histograms(coeffs.permutation_table())
    m = hist.sum(axis=1)
    return float(np.sum(np.ldexp(coeffs.values, m)))


def _subset_count_polynomial(hist_row: np.ndarray) -> np.ndarray:
    """Coeficiente k = nº de subconjuntos de ciclos com comprimentos somando k."""
    poly = np.array([1], dtype=np.int64)
    for ell, count in enumerate(hist_row):
        factor_ = np.zeros(ell + 1, dtype=np.int64)
        factor_[0] = factor_[ell] = 1
        for _ in range(int(count)):
            poly = np.convolve(poly, factor_)
    return poly


def sector_traces_from_coeffs(coeffs: GroupAlgebraElement) -> np.ndarray:
    """Tabela de todos os setores k = 0..N via soma de subconjuntos de ciclos."""
    hist = cycle_histograms(coeffs.permutation_table())
    types, inverse = np.unique(hist, axis=0, return_inverse=True)
    weights = np.bincount(inverse.ravel(), weights=coeffs.values, minlength=len(types))
    out = np.zeros(coeffs.n + 1)
    for w, row in zip(weights, types):
        poly = _subset_count_polynomial(row)
        out[:len(poly)] += w * poly
    return out


def sector_trace_from_coeffs(coeffs: GroupAlgebraElement, k: int) -> float:
    if not 0 <= k <= coeffs.n:
        raise ValueError(f"setor k={k} fora de [0, {coeffs.n}]")
    return float(sector_traces_from_coeffs(coeffs)[k])


def cycle_length_profile(coeffs: GroupAlgebraElement) -> np.ndarray:
    """⟨s(n)⟩ exato, pesado por 2^m: índice n = 1..N (posição 0 sem uso)."""
    hist = cycle_histograms(coeffs.permutation_table())
    w = np.ldexp(coeffs.values, hist.sum(axis=1))
    return (w[:, None] * hist).sum(axis=0) / w.sum()


# ----------------- Conjectura central -----------------
def conjecture_rhs(spec: LatticeSpec, beta: float, p: Permutation) -> float:
    """Π_i g_β(i, p(i)) (lado direito sem a constante C̃)."""
    if beta <= 0:
        raise ValueError(f"beta deve ser positivo: {beta}")
    G = kernel_matrix(build_kernel(spec, beta))
    return float(np.prod(G[np.arange(spec.N), list(p.mapping)]))


@dataclass(frozen=True)
class ConjectureFit:
    spec: LatticeSpec
    beta: float
    floor: float
    n_selected: int
    anchored_constant: float
    lsq_constant: float
    anchored_errors: np.ndarray = field(repr=False)
    lsq_errors: np.ndarray = field(repr=False)

    def summary(self) -> dict:
        return {
            "d": self.spec.d,
            "L": self.spec.L,
            "beta": self.beta,
            "floor": self.floor,
            "n_selected": self.n_selected,
            "anchored_constant": self.anchored_constant,
            "lsq_constant": self.lsq_constant,
            "anchored_median": float(np.median(self.anchored_errors)),
            "anchored_q90": float(np.quantile(self.anchored_errors, 0.9)),
            "anchored_max": float(self.anchored_errors.max()),
            "lsq_median": float(np.median(self.lsq_errors)),
            "lsq_q90": float(np.quantile(self.lsq_errors, 0.9)),
            "lsq_max": float(self.lsq_errors.max()),
        }


def log_rhs_table(spec: LatticeSpec, beta: float, table: np.ndarray) -> np.ndarray:
    """log Π_i g_β(i, p(i)) para cada linha p da tabela."""
    G = kernel_matrix(build_kernel(spec, beta))
    with np.errstate(divide="ignore"):
        logG = np.log(G)
    return logG[np.arange(spec.N), table.astype(np.int64)].sum(axis=1)


def conjecture_fit(spec: LatticeSpec, beta: float, floor: Optional[float] = None,
                   coeffs: Optional[GroupAlgebraElement] = None) -> ConjectureFit:
    """Compara C̃_α com C̃·Π g_β(i, i_α) sobre as permutações acima do piso."""
    floor = config.COEFF_FLOOR if floor is None else float(floor)
    if beta <= 0:
        raise ValueError("a conjectura é enunciada para β → ∞; beta deve ser > 0")
    if floor <= 0:
        raise ValueError(f"piso deve ser positivo: {floor}")
    coeffs = exp_neg_beta_H(spec, beta) if coeffs is None else coeffs

    C = coeffs.values
    keep = C >= floor * C.max()
    if not keep.any():
        raise EmptySelectionError(f"nenhuma permutação acima do piso {floor}")
    ranks = coeffs.ranks.astype(np.int64)
    if ranks[0] != 0:
        raise EmptySelectionError("coeficiente da identidade ausente")

    log_c = np.log(C[keep])
    rows = np.concatenate([[0], ranks[keep]])  # identidade na frente
    log_r_all = log_rhs_table(spec, beta, all_permutations(spec.N)[rows])
    log_r = log_r_all[1:]
    log_anchor = np.log(C[0]) - log_r_all[0]
    log_lsq = float(np.mean(log_c - log_r))

    anchored = np.abs(np.expm1(log_anchor + log_r - log_c))
    lsq = np.abs(np.expm1(log_lsq + log_r - log_c))
    log.info(f"✅ Ajuste β={beta}: {int(keep.sum())} permutações, mediana={np.median(anchored):.3e}")
    return ConjectureFit(spec=spec, beta=float(beta), floor=floor, n_selected=int(keep.sum()),
                         anchored_constant=float(np.exp(log_anchor)), lsq_constant=float(np.exp(log_lsq)),
                         anchored_errors=anchored, lsq_errors=lsq)

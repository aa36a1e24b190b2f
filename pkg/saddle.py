# -*- coding: utf-8 -*-
"""
saddle.py - Gás de ciclos no ponto de sela (maior termo)

Densidades s(n) = 2 (L/√β)^d n^{-(1+d/2)} e^{αn}; o multiplicador α fecha
o vínculo Σ n s(n) = L^d, isto é Σ n^{-d/2} e^{αn} = ½ β^{d/2}.
Em d = 3 e β acima de β_c = (2ζ(3/2))^{2/3} a soma satura em α = 0 e a
massa que falta vai para um único ciclo macroscópico (condensado).

No setor com k spins para cima: r(n) = s(n) · e^{τn}/(1 + e^{τn}).
"""
import logging
from dataclasses import dataclass, field
from math import inf
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.optimize import brentq
from scipy.special import bernoulli, exp1, expit, gamma, gammaincc, gammaln, poch, xlogy
from tqdm import tqdm

import config
from errors import BudgetExceededError

log = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
_FIRST_CHUNK = 1024
_CHUNK = 1 << 20


# ----------------- Somas do tipo polilogaritmo -----------------
def zeta_em(p: float, M: int = 20, terms: int = 7) -> float:
    """ζ(p) por Euler–Maclaurin: soma direta até M-1 mais correções de Bernoulli."""
    if p <= 1:
        raise ValueError(f"ζ(p) diverge para p={p} <= 1")
    n = np.arange(1, M, dtype=float)
    s = float(np.sum(n ** -p)) + M ** (1 - p) / (p - 1) + 0.5 * M ** -p
    B = bernoulli(2 * terms)
    fact = 1.0
    for j in range(1, terms + 1):
        fact *= (2 * j - 1) * (2 * j)
        s += B[2 * j] / fact * poch(p, 2 * j - 1) * M ** (-p - 2 * j + 1)
    return float(s)


def _upper_gamma(s: float, x: float) -> float:
    """Γ(s, x) para s real qualquer (recorrência para s < 0)."""
    if s > 0:
        return float(gammaincc(s, x) * gamma(s))
    if s == 0:
        return float(exp1(x))
    return (_upper_gamma(s + 1, x) - x ** s * np.exp(-x)) / s


def _tail_integral(alpha: float, p: float, M: float) -> float:
    """∫_M^∞ x^{-p} e^{αx} dx (α <= 0), cota da cauda Σ_{n>M}."""
    a = -alpha
    if a == 0:
        return M ** (1 - p) / (p - 1) if p > 1 else inf
    with np.errstate(over="raise"):
        try:
            val = a ** (p - 1) * _upper_gamma(1 - p, a * M)
        except (FloatingPointError, OverflowError):
            # aM desprezível: limite α -> 0
            return M ** (1 - p) / (p - 1) if p > 1 else inf
    return max(val, 0.0)


def _em_tail(alpha: float, p: float, M: float):
    """Σ_{n>M} x^{-p} e^{αx} por Euler–Maclaurin; devolve (cauda, erro estimado)."""
    f = M ** -p * np.exp(alpha * M)
    g = alpha - p / M
    d1 = f * g
    d3 = f * (g ** 3 + 3 * g * p / M ** 2 - 2 * p / M ** 3)
    tail = _tail_integral(alpha, p, M) - 0.5 * f - d1 / 12 + d3 / 720
    err = abs(d3) * (abs(alpha) + p / M) ** 2 / 30240
    return tail, err


def _direct(alpha: float, p: float, start: int, stop: int) -> float:
    n = np.arange(start, stop + 1, dtype=float)
    return float(np.sum(n ** -p * np.exp(alpha * n)))


def polylog_sum(alpha: float, p: float, tol: Optional[float] = None) -> float:
    """Σ_{n>=1} n^{-p} e^{αn} com erro absoluto abaixo de tol."""
    tol = config.SADDLE_TOL if tol is None else float(tol)
    if alpha > 0:
        raise ValueError(f"soma diverge para α={alpha} > 0 (caso condensado)")
    if alpha == 0:
        if p <= 1:
            raise ValueError(f"soma diverge em α=0 com p={p} <= 1")
        return zeta_em(p)
    if p == 1:
        return float(-np.log(-np.expm1(alpha)))  # Σ x^n/n = -ln(1-x)

    M = _FIRST_CHUNK
    total = _direct(alpha, p, 1, M)
    while True:
        if _tail_integral(alpha, p, M) < tol:
            return total
        tail, err = _em_tail(alpha, p, M)
        if err < tol or M >= config.SADDLE_N_CAP:
            return total + tail
        total += _direct(alpha, p, M + 1, 2 * M)
        M *= 2


def critical_beta(d: int) -> float:
    """β_c: raiz de ½β^{d/2} = ζ(d/2); infinito para d <= 2."""
    if d <= 2:
        return inf
    zc = zeta_em(d / 2)
    return float(brentq(lambda b: 0.5 * b ** (d / 2) - zc, 1e-6, 1e6, xtol=1e-15, rtol=4 * _EPS))


def magnetization_threshold(beta: float) -> float:
    """r* = β^{-3/2} ζ(3/2): acima disso o critério da razão pode valer (d=3)."""
    if beta <= 0:
        raise ValueError(f"beta deve ser positivo: {beta}")
    return float(beta ** -1.5 * zeta_em(1.5))


# ----------------- Solução do gás de ciclos -----------------
@dataclass(frozen=True)
class CycleGasSolution:
    d: int
    beta: float
    L: int
    alpha: float
    condensate_fraction: float
    mu: float
    n_max: int
    phase: str = field(default="subcritical")

    @property
    def N(self) -> int:
        return self.L ** self.d

    @property
    def prefactor(self) -> float:
        """2 (L/√β)^d."""
        return 2.0 * (self.L / np.sqrt(self.beta)) ** self.d


def occupied_mass(sol: CycleGasSolution, tol: Optional[float] = None) -> float:
    """Σ_n n s(n) / N, pelas somas analíticas (sem truncar)."""
    return float(2.0 * sol.beta ** (-sol.d / 2) * polylog_sum(sol.alpha, sol.d / 2, tol))


def _mu_at(d: int, beta: float, L: int, alpha: float, tol: Optional[float]) -> float:
    # na sela cada termo de μ vale s(n)(1 - αn)
    c = 2.0 * (L / np.sqrt(beta)) ** d
    count = polylog_sum(alpha, 1 + d / 2, tol)
    mass = polylog_sum(alpha, d / 2, tol) if alpha != 0 else 0.0
    return float(c * (count - alpha * mass))


def solve_alpha(d: int, beta: float, tol: Optional[float] = None, L: int = 10,
                n_max: Optional[int] = None) -> CycleGasSolution:
    tol = config.SADDLE_TOL if tol is None else float(tol)
    n_max = config.SADDLE_N_MAX if n_max is None else int(n_max)
    if beta <= 0:
        raise ValueError(f"beta deve ser positivo: {beta}")
    if d not in (1, 2, 3):
        raise ValueError(f"dimensão inválida: d={d}")
    target = 0.5 * beta ** (d / 2)

    if d == 3:
        zc = zeta_em(1.5)
        if target >= zc:
            cond = 1.0 - zc / target
            return CycleGasSolution(d=d, beta=float(beta), L=L, alpha=0.0, condensate_fraction=cond,
                                    mu=_mu_at(d, beta, L, 0.0, tol), n_max=n_max, phase="condensed")

    stol = tol * target

    # α = -e^u; f decresce com u
    def f(u: float) -> float:
        return float(np.log(polylog_sum(-np.exp(u), d / 2, stol)) - np.log(target))

    u_lo = u_hi = 0.0
    if f(0.0) < 0:
        while f(u_lo) < 0:
            u_lo -= 4.0
            if u_lo < -740:
                raise RuntimeError(f"não achei α para d={d}, β={beta}")
    else:
        while f(u_hi) > 0:
            u_hi += 1.0
    u = brentq(f, u_lo, u_hi, xtol=1e-15, rtol=4 * _EPS)
    alpha = -float(np.exp(u))
    log.debug(f"α(d={d}, β={beta}) = {alpha:.6e}")
    return CycleGasSolution(d=d, beta=float(beta), L=L, alpha=alpha, condensate_fraction=0.0,
                            mu=_mu_at(d, beta, L, alpha, tol), n_max=n_max)


def densities(sol: CycleGasSolution, n):
    """s(n) = 2 (L/√β)^d n^{-(1+d/2)} e^{αn} (α = 0 no condensado)."""
    arr = np.asarray(n, dtype=float)
    if np.any(arr < 1):
        raise ValueError(f"comprimento de ciclo deve ser >= 1: {n}")
    out = sol.prefactor * arr ** (-(1 + sol.d / 2)) * np.exp(sol.alpha * arr)
    return float(out) if np.ndim(out) == 0 else out


def density_table(sol: CycleGasSolution) -> np.ndarray:
    return densities(sol, np.arange(1, sol.n_max + 1))


def entropy_mu(d: int, beta: float, L: float, densities_: Sequence[float]) -> float:
    """μ = Σ_n [s d ln L - (s ln s - s) - (s d/2) ln(βn) - s ln n + s ln 2]."""
    s = np.asarray(densities_, dtype=float)
    if np.any(s < 0):
        raise ValueError("densidades negativas")
    n = np.arange(1, len(s) + 1, dtype=float)
    terms = (s * d * np.log(L) - (xlogy(s, s) - s) - s * (d / 2) * np.log(beta * n)
             - s * np.log(n) + s * np.log(2.0))
    return float(np.sum(terms))


def boltzmann_log_weight(d: int, beta: float, L: float, counts: Sequence[float]) -> float:
    """log exato de Π_n 2^s (L^d)^s/s! · (βn)^{-sd/2} · n^{-s} (μ é a forma de Stirling)."""
    s = np.asarray(counts, dtype=float)
    n = np.arange(1, len(s) + 1, dtype=float)
    terms = (s * d * np.log(L) - gammaln(s + 1) - s * (d / 2) * np.log(beta * n)
             - s * np.log(n) + s * np.log(2.0))
    return float(np.sum(terms))


def sector_log_weight(d: int, beta: float, L: float, s: Sequence[float], r: Sequence[float]) -> float:
    """log do maior termo no setor: Σ ln C(s(n), r(n)) + μ (binomiais contínuos)."""
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > s):
        raise ValueError("é preciso 0 <= r(n) <= s(n)")
    binom = gammaln(s + 1) - gammaln(r + 1) - gammaln(s - r + 1)
    return float(np.sum(binom) + entropy_mu(d, beta, L, s))


# ----------------- Setor com k spins para cima -----------------
@dataclass(frozen=True)
class SectorOccupation:
    tau: float
    k_target: float
    r: np.ndarray = field(repr=False)
    condensate_up: float = 0.0
    residual: float = 0.0

    @property
    def n_max(self) -> int:
        return len(self.r)


def _finite_up(sol: CycleGasSolution, tau: float, tol: float) -> float:
    """Σ_n n s(n) σ(τn), só ciclos finitos."""
    mass = sol.N * occupied_mass(sol)
    if tau == 0:
        return 0.5 * mass
    if tau > 0:
        return mass - _finite_up(sol, -tau, tol)
    p = sol.d / 2
    c = sol.prefactor
    rate = sol.alpha + tau
    total, start, stop = 0.0, 1, _FIRST_CHUNK
    while True:
        n = np.arange(start, stop + 1, dtype=float)
        total += float(np.sum(c * n ** -p * np.exp(sol.alpha * n) * expit(tau * n)))
        if c * _tail_integral(rate, p, stop) < tol:
            return total
        if stop >= config.SADDLE_N_CAP:
            raise BudgetExceededError(f"soma logística não convergiu até n={stop} (τ={tau:.3e})")
        start, stop = stop + 1, min(stop + max(stop, 1), stop + _CHUNK)


def solve_tau(d: int, beta: float, L: int, k_target: float, tol: Optional[float] = None,
              sol: Optional[CycleGasSolution] = None) -> SectorOccupation:
    tol = config.SADDLE_TOL if tol is None else float(tol)
    sol = solve_alpha(d, beta, tol, L=L) if sol is None else sol
    N = L ** d
    if not 0 < k_target < N:
        raise ValueError(f"k_target={k_target} fora do alcance (0, {N})")
    n_c = sol.condensate_fraction * N
    stol = tol * N

    def excess(tau: float) -> float:
        return _finite_up(sol, tau, stol) + n_c * float(expit(tau * n_c)) - k_target

    e0 = excess(0.0)
    if abs(e0) <= stol:
        tau = 0.0
    else:
        lo, hi = (-1.0, 0.0) if e0 > 0 else (0.0, 1.0)
        while excess(lo) > 0:
            lo *= 2
        while excess(hi) < 0:
            hi *= 2
        tau = float(brentq(excess, lo, hi, xtol=1e-300, rtol=4 * _EPS))
    residual = abs(excess(tau)) / k_target
    n = np.arange(1, sol.n_max + 1, dtype=float)
    r = density_table(sol) * expit(tau * n)
    log.info(f"✅ τ={tau:.6e} para k={k_target} (resíduo relativo {residual:.1e})")
    return SectorOccupation(tau=tau, k_target=float(k_target), r=r,
                            condensate_up=float(expit(tau * n_c)) if n_c else 0.0, residual=residual)


# ----------------- Varredura de fases -----------------
def _phase_row(d: int, beta: float, L: int, tol: Optional[float], n_max: Optional[int]) -> dict:
    sol = solve_alpha(d, beta, tol, L=L, n_max=n_max)
    return {"beta": float(beta), "alpha": sol.alpha, "condensate_fraction": sol.condensate_fraction,
            "s1": densities(sol, 1), "mu": sol.mu}


def phase_scan(d: int, beta_grid: Iterable[float], L: int = 10, tol: Optional[float] = None,
               n_max: Optional[int] = None) -> pd.DataFrame:
    grid = [float(b) for b in beta_grid]
    log.info(f"🔁 Varredura de fases d={d}: {len(grid)} valores de β")
    rows = Parallel(n_jobs=config.N_JOBS)(
        delayed(_phase_row)(d, b, L, tol, n_max) for b in tqdm(grid, disable=not config.PROGRESS, desc="fases"))
    return pd.DataFrame(rows, columns=["beta", "alpha", "condensate_fraction", "s1", "mu"])

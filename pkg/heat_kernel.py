# -*- coding: utf-8 -*-
"""
heat_kernel.py - Núcleo do calor periódico g_β(i,j) = (e^{βΔ})_{ij}

Convenção: (Δf)(i) = Σ_{j~i} (f(j) - f(i)), logo e^{βΔ} é estocástica.
O toro é produto de anéis, então g_β fatora em núcleos 1-d; guardamos só
a tabela 1-d de L valores.
"""
from dataclasses import dataclass, field
from functools import reduce
from math import pi

import numpy as np
from scipy.special import ive

from lattice import LatticeSpec, all_coords, displacement


@dataclass(frozen=True)
class HeatKernel:
    spec: LatticeSpec
    beta: float
    factor: np.ndarray = field(repr=False)


def _ring_eigenvalues(L: int) -> np.ndarray:
    """Autovalores de Δ no anel de L sítios: 2(cos(2πk/L) - 1)."""
    k = np.arange(L)
    return 2.0 * (np.cos(2 * pi * k / L) - 1.0)


def _image_cutoff(L: int, beta: float) -> int:
    """Maior |n| somado nas imagens: e^{-2β} I_n(2β) tem variância 2β em n."""
    return max(L, int(np.ceil(2 * beta + 40 * np.sqrt(2 * beta) + 40)))


def build_kernel(spec: LatticeSpec, beta: float) -> HeatKernel:
    beta = float(beta)
    if beta < 0:
        raise ValueError(f"beta negativo: {beta}")
    L = spec.L
    if beta == 0:
        factor = np.zeros(L)
        factor[0] = 1.0
    else:
        # método das imagens: g(r) = Σ_m e^{-2β} I_{r+mL}(2β), termos todos positivos
        n = np.arange(-_image_cutoff(L, beta), _image_cutoff(L, beta) + 1)
        factor = np.bincount(n % L, weights=ive(np.abs(n), 2 * beta), minlength=L)
    factor.setflags(write=False)
    return HeatKernel(spec=spec, beta=beta, factor=factor)


def evaluate(kernel: HeatKernel, i: int, j: int) -> float:
    disp = displacement(kernel.spec, i, j)
    L = kernel.spec.L
    return float(np.prod([kernel.factor[abs(r) % L] for r in disp]))


def kernel_matrix(kernel: HeatKernel) -> np.ndarray:
    """Tabela densa N×N de g_β (apenas para N moderado)."""
    coords = all_coords(kernel.spec)
    diff = (coords[None, :, :] - coords[:, None, :]) % kernel.spec.L
    return kernel.factor[diff].prod(axis=2)


def laplacian_spectrum(spec: LatticeSpec) -> np.ndarray:
    """Todos os N autovalores de -Δ (somas dos espectros 1-d)."""
    ring = -_ring_eigenvalues(spec.L)
    return reduce(np.add.outer, [ring] * spec.d).ravel()


def continuum_estimate(d: int, beta: float) -> float:
    """Densidade gaussiana de retorno (4πβ)^{-d/2}."""
    if beta <= 0:
        raise ValueError(f"beta deve ser positivo: {beta}")
    return float((4 * pi * beta) ** (-d / 2))

# -*- coding: utf-8 -*-
"""
config.py - Parâmetros do laboratório (orçamentos, tolerâncias, saída)

Tudo pode ser sobrescrito por variável de ambiente (ou .env).
"""
import os

from dotenv import load_dotenv

load_dotenv()

_TRUE = {"1", "true", "yes", "on"}


def parse_count(value) -> int:
    """Contagens aceitam notação científica: "1e8" -> 100000000."""
    return int(float(value))


# ----------------- Orçamentos (guardas de recurso) -----------------
# enumeração de caminhos distintos (tuplas ordenadas)
ENUM_BUDGET = parse_count(os.environ.get("ENUM_BUDGET", 1e8))
# dimensão máxima de um setor para diagonalização densa
DENSE_BUDGET = parse_count(os.environ.get("DENSE_BUDGET", 4096))
# correlações usam todos os setores: 2^N <= 2^16
FULL_SPACE_MAX_SITES = int(os.environ.get("FULL_SPACE_MAX_SITES", 16))
# espectros de setor guardados em memória (LRU)
SPECTRUM_CACHE_SIZE = int(os.environ.get("SPECTRUM_CACHE_SIZE", 64))
# vetor denso de N! coeficientes
MAX_PERM_SITES = min(int(os.environ.get("MAX_PERM_SITES", 9)), 9)

# ----------------- Álgebra do grupo -----------------
EXPAND_TOL = float(os.environ.get("EXPAND_TOL", 1e-12))
COEFF_FLOOR = float(os.environ.get("COEFF_FLOOR", 1e-8))
COEFF_PRUNE = float(os.environ.get("COEFF_PRUNE", 0.0))

# ----------------- Ponto de sela -----------------
SADDLE_TOL = float(os.environ.get("SADDLE_TOL", 1e-12))
SADDLE_N_MAX = int(os.environ.get("SADDLE_N_MAX", 4000))   # tabela s(n) exportada
SADDLE_N_CAP = parse_count(os.environ.get("SADDLE_N_CAP", 2e7))  # soma direta

# ----------------- Execução -----------------
N_JOBS = int(os.environ.get("N_JOBS", 1))
PROGRESS = os.environ.get("PROGRESS", "0").lower() in _TRUE
LOG_LEVEL = os.environ.get("LOG_LEVEL", "WARNING").upper()

SCHEMA_VERSION = 1

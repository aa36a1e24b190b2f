# -*- coding: utf-8 -*-
"""
results_store.py - Gravação dos resultados (CSV, JSON e coeficientes binários)

Caminho "-" ou None escreve em stdout. Arquivo binário de coeficientes:
cabeçalho little-endian (N:int64, beta:float64, tol:float64, count:int64)
seguido de count pares (rank:int64, coeff:float64).
"""
import json
import logging
import sys
from typing import Optional, Tuple

import numpy as np
import pandas as pd

import config
from perm_algebra import GroupAlgebraElement

log = logging.getLogger(__name__)

HEADER_DTYPE = np.dtype([("N", "<i8"), ("beta", "<f8"), ("tol", "<f8"), ("count", "<i8")])
PAIR_DTYPE = np.dtype([("rank", "<i8"), ("coeff", "<f8")])


def _is_stdout(path: Optional[str]) -> bool:
    return path in (None, "-")


def write_csv(df: pd.DataFrame, path: Optional[str] = None) -> None:
    """CSV com cabeçalho e precisão dupla completa."""
    if _is_stdout(path):
        df.to_csv(sys.stdout, index=False, float_format="%.17g")
        return
    df.to_csv(path, index=False, float_format="%.17g")
    log.info(f"💾 Tabela salva em {path} ({len(df)} linhas).")


def write_json(report: dict, path: Optional[str] = None) -> None:
    data = {"schema_version": config.SCHEMA_VERSION, **report}
    if _is_stdout(path):
        json.dump(data, sys.stdout, ensure_ascii=False, indent=2)
        sys.stdout.write("\n")
        return
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)
    log.info(f"💾 Relatório salvo em {path}.")


def write_coefficients(coeffs: GroupAlgebraElement, beta: float, tol: float, path: str) -> None:
    header = np.array([(coeffs.n, beta, tol, coeffs.support)], dtype=HEADER_DTYPE)
    pairs = np.empty(coeffs.support, dtype=PAIR_DTYPE)
    pairs["rank"] = coeffs.ranks.astype(np.int64)
    pairs["coeff"] = coeffs.values
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(pairs.tobytes())
    log.info(f"💾 {coeffs.support} coeficientes salvos em {path}.")


def read_coefficients(path: str) -> Tuple[GroupAlgebraElement, dict]:
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < HEADER_DTYPE.itemsize:
        raise ValueError(f"arquivo de coeficientes truncado: {path}")
    header = np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]
    count = int(header["count"])
    body = raw[HEADER_DTYPE.itemsize:]
    if len(body) != count * PAIR_DTYPE.itemsize:
        raise ValueError(f"esperava {count} pares em {path}, tamanho não confere")
    pairs = np.frombuffer(body, dtype=PAIR_DTYPE, count=count)
    meta = {"N": int(header["N"]), "beta": float(header["beta"]), "tol": float(header["tol"]), "count": count}
    element = GroupAlgebraElement(meta["N"], pairs["rank"].copy(), pairs["coeff"].copy())
    return element, meta

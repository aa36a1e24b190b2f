# -*- coding: utf-8 -*-
"""
errors.py - Exceções compartilhadas pelos módulos do laboratório.
"""


class BudgetExceededError(RuntimeError):
    """Guarda de recurso disparou (N!, setor denso, enumeração, soma)."""


class EmptySelectionError(ValueError):
    """Nenhum elemento sobrou após o filtro (ex.: piso do ajuste)."""

# -*- coding: utf-8 -*-
"""
Laboratório Heisenberg - CLI (click)

Subcomandos:
- heat-kernel : tabela 1-d de g_β e avaliações g_β(i,j)
- expand      : coeficientes C̃_α de e^{-βH} (arquivo binário + resumo)
- conjecture  : ajuste C̃_α ≈ C̃ Π g_β(i, i_α) por β
- walks       : somas de caminhos (distintos x livres x gaussiana)
- saddle      : gás de ciclos (fase, condensado, setor com k spins)
- sectors     : traços por setor, F_β, correlações, resposta ao campo

Dados vão para stdout (ou --output); logs e diagnósticos para stderr.
Saídas: 0 ok, 2 argumento inválido, 3 guarda de recurso, 4 seleção vazia.
"""
import logging
import os
import sys
from math import comb
from typing import List, Optional, Sequence

import click
import numpy as np
import pandas as pd

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config
from errors import BudgetExceededError, EmptySelectionError
from heat_kernel import build_kernel, evaluate
from lattice import LatticeSpec
from perm_algebra import (Permutation, conjecture_fit, conjecture_rhs, cycle_length_profile,
                          exp_neg_beta_H, trace_from_coeffs)
from polymer import return_estimate, walk_sum_distinct, walk_sum_unrestricted
from results_store import write_coefficients, write_csv, write_json
from saddle import critical_beta, density_table, phase_scan, solve_alpha, solve_tau
from spin_sector import (correlation_matrix, field_response, magnetization_ratio, susceptibility,
                         trace_table)

log = logging.getLogger(__name__)


# ----------------- Grupo com mapeamento de erros -----------------
class LabGroup(click.Group):
    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except EmptySelectionError as e:
            _fail(ctx, e, 4)
        except BudgetExceededError as e:
            _fail(ctx, e, 3)
        except ValueError as e:
            _fail(ctx, e, 2)


def _fail(ctx: click.Context, err: Exception, code: int) -> None:
    click.echo(f"❌ {err}", err=True)
    ctx.exit(code)


# ----------------- Parsing -----------------
class CountType(click.ParamType):
    """Contagem inteira positiva; aceita notação científica (1e8) como o config."""
    name = "count"

    def convert(self, value, param, ctx):
        try:
            n = config.parse_count(value)
        except (TypeError, ValueError, OverflowError):
            self.fail(f"'{value}' não é uma contagem válida", param, ctx)
        if n < 1:
            self.fail(f"contagem deve ser positiva: {value}", param, ctx)
        return n


COUNT = CountType()


def _parse_grid(value: str, log_scale: bool) -> np.ndarray:
    try:
        start, stop, count = value.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise click.BadParameter(f"grade inválida '{value}', use start:stop:count")
    if count < 1 or start <= 0 or stop < start:
        raise click.BadParameter(f"grade inválida '{value}' (0 < start <= stop, count >= 1)")
    return np.geomspace(start, stop, count) if log_scale else np.linspace(start, stop, count)


def _betas(beta: Sequence[float], grid: Optional[str], log_scale: bool) -> List[float]:
    if grid and beta:
        raise click.UsageError("use --beta ou --beta-grid, não ambos")
    if grid:
        return [float(b) for b in _parse_grid(grid, log_scale)]
    if not beta:
        raise click.UsageError("informe --beta ou --beta-grid")
    return [float(b) for b in beta]


def _parse_ints(value: str, name: str) -> List[int]:
    try:
        return [int(x) for x in value.split(",")]
    except ValueError:
        raise click.BadParameter(f"{name} inválido '{value}', use inteiros separados por vírgula")


def _pairs(ctx, param, values):
    out = []
    for v in values:
        ij = _parse_ints(v, "--at")
        if len(ij) != 2:
            raise click.BadParameter(f"--at espera i,j: '{v}'")
        out.append(tuple(ij))
    return out


def _emit(fmt: str, output: Optional[str], df: pd.DataFrame, report: Optional[dict] = None) -> None:
    if fmt == "json":
        write_json(report if report is not None else {"rows": df.to_dict(orient="records")}, output)
    else:
        write_csv(df, output)


def lattice_options(f):
    f = click.option("--L", "L", type=int, default=4, show_default=True, help="Lado da rede.")(f)
    f = click.option("--d", "d", type=click.IntRange(1, 3), default=1, show_default=True, help="Dimensão.")(f)
    return f


def output_options(default_fmt: str = "csv"):
    def wrap(f):
        f = click.option("--output", default="-", show_default=True, help="Arquivo de saída ('-' = stdout).")(f)
        f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=default_fmt,
                         show_default=True)(f)
        return f
    return wrap


@click.group(cls=LabGroup)
@click.option("--log-level", default=config.LOG_LEVEL, show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
def cli(log_level: str):
    """Laboratório numérico do ferromagneto de Heisenberg (representação por ciclos)."""
    logging.basicConfig(stream=sys.stderr, level=log_level.upper(), format="%(message)s", force=True)


# ----------------- heat-kernel -----------------
@cli.command("heat-kernel")
@lattice_options
@click.option("--beta", type=float, required=True)
@click.option("--at", "at", multiple=True, callback=_pairs, help="Par i,j (repetível).")
@output_options()
def cmd_heat_kernel(d, L, beta, at, fmt, output):
    """Tabela 1-d de g_β e valores g_β(i,j) (com --at, cada linha i,j,g carrega a tabela r_*)."""
    spec = LatticeSpec(d, L)
    kernel = build_kernel(spec, beta)
    factor = pd.DataFrame([kernel.factor], columns=[f"r_{r}" for r in range(L)])
    values = pd.DataFrame([{"i": i, "j": j, "g": evaluate(kernel, i, j)} for i, j in at],
                          columns=["i", "j", "g"])
    report = {"d": d, "L": L, "beta": beta, "factor": kernel.factor.tolist(),
              "values": values.to_dict(orient="records")}
    table = values.join(pd.concat([factor] * len(values), ignore_index=True)) if at else factor
    _emit(fmt, output, table, report)


# ----------------- expand -----------------
@cli.command("expand")
@lattice_options
@click.option("--beta", type=float, required=True)
@click.option("--tol", type=float, default=config.EXPAND_TOL, show_default=True)
@click.option("--floor", type=float, default=config.COEFF_FLOOR, show_default=True)
@click.option("--coeff-file", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Grava os coeficientes no formato binário.")
@click.option("--profile", is_flag=True, help="Inclui o perfil exato ⟨s(n)⟩.")
@output_options("json")
def cmd_expand(d, L, beta, tol, floor, coeff_file, profile, fmt, output):
    """Expansão e^{-βH} = Σ C̃_α G_α no grupo simétrico."""
    spec = LatticeSpec(d, L)
    coeffs = exp_neg_beta_H(spec, beta, tol)
    if coeff_file:
        write_coefficients(coeffs, beta, tol, coeff_file)
    C = coeffs.values
    summary = {"d": d, "L": L, "N": spec.N, "beta": beta, "tol": tol,
               "sum": coeffs.total(), "support": coeffs.support,
               "above_floor": int(np.sum(C >= floor * C.max())),
               "min_coeff": float(C.min()), "trace": trace_from_coeffs(coeffs)}
    if profile:
        summary["profile"] = cycle_length_profile(coeffs)[1:].tolist()
    flat = {k: v for k, v in summary.items() if k != "profile"}
    if profile:
        flat.update({f"s_{n}": v for n, v in enumerate(summary["profile"], start=1)})
    _emit(fmt, output, pd.DataFrame([flat]), summary)


# ----------------- conjecture -----------------
@cli.command("conjecture")
@lattice_options
@click.option("--beta", type=float, multiple=True)
@click.option("--beta-grid", default=None, help="start:stop:count")
@click.option("--log", "log_scale", is_flag=True, help="Grade geométrica.")
@click.option("--floor", type=float, default=config.COEFF_FLOOR, show_default=True)
@click.option("--perm", default=None, help="Permutação i_α como lista (ex.: 1,0,2,3).")
@output_options("json")
def cmd_conjecture(d, L, beta, beta_grid, log_scale, floor, perm, fmt, output):
    """Ajuste de C̃_α contra C̃ Π_i g_β(i, i_α)."""
    spec = LatticeSpec(d, L)
    betas = _betas(beta, beta_grid, log_scale)
    p = None
    if perm is not None:
        mapping = _parse_ints(perm, "--perm")
        if len(mapping) != spec.N:
            raise click.BadParameter(f"--perm precisa de {spec.N} entradas")
        p = Permutation(tuple(mapping))

    rows = []
    for b in betas:
        coeffs = exp_neg_beta_H(spec, b)
        fit = conjecture_fit(spec, b, floor, coeffs)
        row = fit.summary()
        if p is not None:
            rhs = conjecture_rhs(spec, b, p)
            row.update({"perm": list(p.mapping), "coefficient": coeffs.coefficient(p), "rhs": rhs,
                        "anchored_prediction": fit.anchored_constant * rhs,
                        "lsq_prediction": fit.lsq_constant * rhs})
        rows.append(row)
    df = pd.DataFrame(rows)
    if "perm" in df:
        df["perm"] = df["perm"].map(lambda m: " ".join(map(str, m)))
    _emit(fmt, output, df, {"d": d, "L": L, "fits": rows})


# ----------------- walks -----------------
@cli.command("walks")
@lattice_options
@click.option("--beta", type=float, required=True)
@click.option("--site", type=int, default=0, show_default=True)
@click.option("--k", "ks", type=int, multiple=True, required=True, help="Comprimento (repetível).")
@click.option("--budget", type=COUNT, envvar="ENUM_BUDGET", default=config.ENUM_BUDGET, show_default=True,
              help="Máximo de tuplas ordenadas enumeradas.")
@click.option("--skip-distinct", is_flag=True, help="Só a soma livre (sem enumeração).")
@output_options()
def cmd_walks(d, L, beta, site, ks, budget, skip_distinct, fmt, output):
    """Somas de caminhos fechados: distintos, livres e estimativa gaussiana."""
    kernel = build_kernel(LatticeSpec(d, L), beta)
    rows = []
    for k in ks:
        rows.append({
            "k": k,
            "distinct": None if skip_distinct else walk_sum_distinct(kernel, site, k, budget),
            "unrestricted": walk_sum_unrestricted(kernel, site, k),
            "gaussian": return_estimate(d, beta, k),
        })
    df = pd.DataFrame(rows, columns=["k", "distinct", "unrestricted", "gaussian"])
    _emit(fmt, output, df, {"d": d, "L": L, "beta": beta, "site": site, "rows": rows})


# ----------------- saddle -----------------
@cli.command("saddle")
@click.option("--d", "d", type=click.IntRange(1, 3), default=3, show_default=True)
@click.option("--L", "L", type=int, default=10, show_default=True)
@click.option("--beta", type=float, multiple=True)
@click.option("--beta-grid", default=None, help="start:stop:count")
@click.option("--log", "log_scale", is_flag=True, help="Grade geométrica.")
@click.option("--sector-k", type=float, default=None, help="Fração k/N de spins para cima.")
@click.option("--n-max", type=click.IntRange(1), default=config.SADDLE_N_MAX, show_default=True)
@click.option("--tol", type=float, default=config.SADDLE_TOL, show_default=True)
@output_options()
def cmd_saddle(d, L, beta, beta_grid, log_scale, sector_k, n_max, tol, fmt, output):
    """Gás de ciclos no maior termo: α, condensado, μ e setor τ."""
    betas = _betas(beta, beta_grid, log_scale)
    bc = critical_beta(d)
    if sector_k is not None:
        if len(betas) != 1:
            raise click.UsageError("--sector-k exige um único --beta")
        if not 0 < sector_k < 1:
            raise click.BadParameter("--sector-k deve estar em (0, 1)")
        sol = solve_alpha(d, betas[0], tol, L=L, n_max=n_max)
        occ = solve_tau(d, betas[0], L, sector_k * sol.N, tol, sol=sol)
        s = density_table(sol)
        df = pd.DataFrame({"tau": occ.tau, "n": np.arange(1, n_max + 1), "s": s, "r": occ.r})
        report = {"d": d, "L": L, "beta": betas[0], "alpha": sol.alpha,
                  "condensate_fraction": sol.condensate_fraction, "k_target": occ.k_target,
                  "tau": occ.tau, "condensate_up": occ.condensate_up, "residual": occ.residual,
                  "r": occ.r.tolist()}
        _emit(fmt, output, df, report)
        return

    df = phase_scan(d, betas, L, tol=tol, n_max=n_max)
    report = {"d": d, "L": L, "critical_beta": None if np.isinf(bc) else bc,
              "phases": df.to_dict(orient="records")}
    if fmt == "json":
        report["densities"] = [density_table(solve_alpha(d, b, tol, L=L, n_max=n_max)).tolist()
                               for b in betas]
    _emit(fmt, output, df, report)


# ----------------- sectors -----------------
@cli.command("sectors")
@click.option("--d", "d", type=click.IntRange(1, 3), default=1, show_default=True)
@click.option("--L", "Ls", type=int, multiple=True, default=(4,), show_default=True)
@click.option("--beta", type=float, required=True)
@click.option("--table", "want_table", is_flag=True, help="Traços por setor (padrão).")
@click.option("--ratio", type=float, default=None, help="F_β(L,[rN]) / F_β(L,N).")
@click.option("--correlations", is_flag=True, help="ρ(i,j) para todos os pares.")
@click.option("--field", "deltas", type=float, multiple=True, help="A_L(δ) (repetível).")
@click.option("--susceptibility", "want_chi", is_flag=True)
@click.option("--budget", type=COUNT, envvar="DENSE_BUDGET", default=config.DENSE_BUDGET, show_default=True,
              help="Dimensão máxima de setor.")
@output_options()
def cmd_sectors(d, Ls, beta, want_table, ratio, correlations, deltas, want_chi, budget, fmt, output):
    """Diagonalização exata por setor de magnetização."""
    chosen = sum([want_table, ratio is not None, correlations, bool(deltas), want_chi])
    if chosen > 1:
        raise click.UsageError("escolha uma consulta: --table, --ratio, --correlations, --field ou --susceptibility")
    frames = []
    for L in Ls:
        spec = LatticeSpec(d, L)
        log.info(f"🔁 Setores d={d} L={L} (N={spec.N}), β={beta}")
        if correlations:
            rho = correlation_matrix(spec, beta, budget)
            i, j = np.triu_indices(spec.N)
            df = pd.DataFrame({"i": i, "j": j, "rho": rho[i, j]})
        else:
            table = trace_table(spec, beta, budget)
            if ratio is not None:
                df = pd.DataFrame([{"d": d, "L": L, "N": spec.N, "r": ratio,
                                    "ratio": magnetization_ratio(spec, beta, ratio, table)}])
            elif deltas:
                df = pd.DataFrame({"delta": list(deltas),
                                   "A": [field_response(spec, beta, x, table) for x in deltas]})
            elif want_chi:
                df = pd.DataFrame([{"d": d, "L": L, "N": spec.N, "beta": beta,
                                    "chi": susceptibility(spec, beta, table)}])
            else:
                ks = np.arange(spec.N + 1)
                dims = [comb(spec.N, int(k)) for k in ks]
                df = pd.DataFrame({"k": ks, "dim": dims, "trace": table.traces})
        if len(Ls) > 1 and "L" not in df:
            df.insert(0, "L", L)
        frames.append(df)
    out = pd.concat(frames, ignore_index=True)
    _emit(fmt, output, out, {"d": d, "beta": beta, "rows": out.to_dict(orient="records")})


if __name__ == "__main__":
    cli()

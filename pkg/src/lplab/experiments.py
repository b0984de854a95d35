"""Experiment runners behind the CLI: seeded, reproducible, self-checking.

Each runner returns (ExperimentReport, ok); ``ok`` reflects the
experiment's own assertion (partition residual under tolerance, ratio
growth under 2x across grid doublings, decay under the annulus bound,
and so on), which the CLI maps to the process exit code.
"""
from __future__ import annotations

import math

import numpy as np

from . import inflation
from .dyadic import bank_for_grid, build_psi, dyadic_block
from .ensembles import ensemble, pair_ensemble
from .grid import divergence_ratio, load_field, lp_norm, make_grid, save_field
from .nsops import (chi_partition, mu_symbols, nu_symbols, picard_iterate,
                    t2_apply)
from .reports import make_report
from .spaces import (BesovParams, besov_norm, chemin_decay_check,
                     embedding_chain_constants, norm_selector)

CHEMIN_C = 0.5625  # (3/4)^2: sharp annulus-edge decay constant


def run_partition_check(samples: int = 10000, seed: int = 0,
                        psi_scale: float = 1.0, tol: float = 1e-10):
    """Residual of sum_j psi(r / 2^j) - 1 over log-uniform samples.

    ``psi_scale`` perturbs the profile (fault injection for the exit-code
    contract); the check must fail for any scale off unity by >= tol.
    """
    bank = build_psi()
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(np.log(2.0 ** bank.j_min), np.log(2.0 ** (bank.j_max + 1)),
                           samples))
    total = np.zeros_like(r)
    for j in range(bank.j_min - 2, bank.j_max + 3):
        total += psi_scale * bank.psi(r / 2.0 ** j)
    residual = np.abs(total - 1.0)
    order = np.argsort(r)
    rows = [{"r": float(r[i]), "residual": float(residual[i])} for i in order]
    summary = {"max_residual": float(residual.max()), "samples": samples,
               "tolerance": tol, "psi_scale": psi_scale}
    config = {"samples": samples, "seed": seed, "psi_scale": psi_scale}
    return make_report("partition-check", config, rows, summary), bool(residual.max() < tol)


_BESOV_DEFAULT_NORMS = ("besov:-1,inf,2", "besov:-1,inf,inf", "besov:0,inf,inf",
                        "b-1inf2heat", "b-1infinfheat")


def run_besov(dim: int = 2, n: int = 256, period: float = 2 * math.pi,
              size: int = 8, seed: int = 0, profile: str = "flat_binf",
              band: int | None = None, norms=_BESOV_DEFAULT_NORMS):
    """Norm table over a seeded ensemble; checks l^q monotonicity per field."""
    grid = make_grid(dim, n, period)
    opts = {"band": band} if band else {}
    fields = ensemble(seed, size, profile, grid, **opts)
    rows = []
    ok = True
    for i, f in enumerate(fields):
        for name in norms:
            rows.append({"field_id": i, "norm_name": name,
                         "value": norm_selector(name)(f)})
        mono = [besov_norm(f, BesovParams(-1.0, np.inf, q)).value for q in (1, 2, np.inf)]
        ok &= mono[0] >= mono[1] * (1 - 1e-12) and mono[1] >= mono[2] * (1 - 1e-12)
    summary = {"fields": size, "profile": profile, "q_monotone": bool(ok)}
    config = {"dim": dim, "n": n, "period": period, "size": size, "seed": seed,
              "profile": profile, "band": band, "norms": ",".join(norms)}
    return make_report("besov", config, rows, summary), bool(ok)


def run_embeddings(dim: int = 2, n: int = 256, period: float = 2 * math.pi,
                   size: int = 20, seed: int = 0, band: int | None = None):
    """Measured constants of the embedding chain on a mixed ensemble."""
    grid = make_grid(dim, n, period)
    opts = {"band": band} if band else {}
    fields = (ensemble(seed, size - size // 2, "flat_binf", grid, **opts)
              + ensemble(seed + 1, size // 2, "white_l2", grid, **opts))
    chain = embedding_chain_constants(fields)
    ok = np.isfinite(chain["C"]) and np.isfinite(chain["C_prime"])
    summary = {"C": chain["C"], "C_prime": chain["C_prime"], "fields": len(fields)}
    config = {"dim": dim, "n": n, "period": period, "size": size,
              "seed": seed, "band": band}
    return make_report("embeddings", config, chain["rows"], summary), bool(ok)


# symbol -> (factory, input norms/profiles, output norm)
_BOUNDEDNESS_TABLE = {
    # reduced scalar symbols: B0_{inf,inf} x L2 -> L2
    **{name: ("mu_family", "besov:0,inf,inf", "l2", "l2", "flat_binf", "white_l2")
       for name in ("mu", "mu1", "mu2", "mu3", "mu3p", "mu3pp")},
    # T1-side symbols: BMO x BMO -> Linf
    **{name: ("nu_family", "bmo", "bmo", "linf", "flat_binf", "flat_binf")
       for name in ("nu", "nu1", "nu2", "nu3", "nu3p", "nu3pp", "N")},
    # full vector operator: B^{-1}_{inf,inf} x L2 -> L2
    "t2": ("t2", "besov:-1,inf,inf", "l2", "l2", "divfree_dyadic", "divfree_white"),
}

_PROFILE_SPLIT = {
    "flat_binf": ("flat_binf", {}),
    "white_l2": ("white_l2", {}),
    "divfree_dyadic": ("divfree_vector", {"spectrum": "dyadic"}),
    "divfree_white": ("divfree_vector", {"spectrum": "white"}),
}


def _default_grids(dim):
    return (64, 128, 256) if dim == 2 else (32, 64)


def _default_band(dim, n):
    return (3 * n) // 16 if dim == 2 else n // 8


def run_boundedness(symbol: str = "mu", dim: int = 2, grids=None, bands=None,
                    pairs: int = 20, seed: int = 42, period: float = 2 * math.pi,
                    growth_cap: float = 2.0):
    """Operator-norm ratio stability under grid (and dyadic-range) doubling."""
    if symbol not in _BOUNDEDNESS_TABLE:
        raise ValueError(f"unknown boundedness symbol {symbol!r}")
    kind, n1, n2, n_out, prof_f, prof_g = _BOUNDEDNESS_TABLE[symbol]
    if kind == "t2" and dim != 3:
        raise ValueError("the t2 experiment is the d = 3 vector variant")
    grids = tuple(grids) if grids else _default_grids(dim)
    bands = tuple(bands) if bands else tuple(_default_band(dim, n) for n in grids)
    if len(bands) != len(grids):
        raise ValueError("bands must align with grids")
    sel1, sel2, sel_out = (norm_selector(x) for x in (n1, n2, n_out))
    rows = []
    max_per_grid = {}
    for n, band in zip(grids, bands):
        grid = make_grid(dim, n, period)
        pf, of = _PROFILE_SPLIT[prof_f]
        pg, og = _PROFILE_SPLIT[prof_g]
        ens = pair_ensemble(seed, pairs, pf, pg, grid,
                            {**of, "band": band}, {**og, "band": band})
        if kind == "mu_family":
            op = mu_symbols(symbol, dim=dim).apply
        elif kind == "nu_family":
            op = nu_symbols(symbol, dim=dim).apply
        else:
            op = t2_apply
        ratios = []
        for i, (f, g) in enumerate(ens):
            a, b = sel1(f), sel2(g)
            if a == 0 or b == 0:
                continue
            r = sel_out(op(f, g)) / (a * b)
            ratios.append(r)
            rows.append({"grid": n, "band": band, "pair": i, "ratio": r})
        if not ratios:
            raise ValueError(f"no usable pairs at grid {n} (band {band} too small?)")
        if max(ratios) == 0.0:
            raise ValueError(
                f"{symbol} vanished on the whole ensemble at grid {n}; "
                "compactly supported symbols need a denser frequency lattice "
                "(raise the period)")
        max_per_grid[n] = max(ratios)
    growth = [max_per_grid[b] / max_per_grid[a] for a, b in zip(grids, grids[1:])]
    ok = all(g < growth_cap for g in growth)
    summary = {"symbol": symbol, "norms": f"({n1}, {n2}) -> {n_out}",
               "max_per_grid": {str(k): v for k, v in max_per_grid.items()},
               "growth_factors": growth, "growth_cap": growth_cap, "stable": bool(ok)}
    config = {"symbol": symbol, "dim": dim, "grids": ",".join(map(str, grids)),
              "bands": ",".join(map(str, bands)), "pairs": pairs, "seed": seed}
    return make_report("boundedness", config, rows, summary), bool(ok)


def run_symbol_check(samples: int = 10000, seed: int = 3, scale: float = 5.0):
    """Pointwise decomposition identities of the symbol catalog."""
    rng = np.random.default_rng(seed)
    xi = rng.normal(scale=scale, size=(samples, 2))
    eta = rng.normal(scale=scale, size=(samples, 2))
    mu = {name: mu_symbols(name) for name in ("mu", "mu1", "mu2", "mu3", "mu3p", "mu3pp")}
    nu = {name: nu_symbols(name) for name in ("nu", "nu1", "nu2", "nu3", "nu3p", "nu3pp", "N")}
    chi3 = chi_partition(xi, eta)[2]
    on3 = chi3 > 0
    checks = []

    def residual(a, b, mask=None):
        d = np.abs(a - b)
        return float(d[mask].max()) if mask is not None and mask.any() else float(d.max())

    checks.append(("mu1+mu2+mu3=mu",
                   residual(mu["mu1"].eval(xi, eta) + mu["mu2"].eval(xi, eta)
                            + mu["mu3"].eval(xi, eta), mu["mu"].eval(xi, eta)), 1e-12))
    checks.append(("nu1+nu2+nu3=nu",
                   residual(nu["nu1"].eval(xi, eta) + nu["nu2"].eval(xi, eta)
                            + nu["nu3"].eval(xi, eta), nu["nu"].eval(xi, eta)), 1e-12))
    checks.append(("mu3p-mu3pp=mu3 (supp chi3)",
                   residual(mu["mu3p"].eval(xi, eta) - mu["mu3pp"].eval(xi, eta),
                            mu["mu3"].eval(xi, eta), on3), 1e-10))
    checks.append(("nu3p-nu3pp=nu3 (supp chi3)",
                   residual(nu["nu3p"].eval(xi, eta) - nu["nu3pp"].eval(xi, eta),
                            nu["nu3"].eval(xi, eta), on3), 1e-10))
    # dyadic split of N where the covered band is complete
    en = np.linalg.norm(eta, axis=-1)
    cover = on3 & (en >= 2.0 ** -1) & (en <= 2.0 ** 4)
    nsum = sum(nu_symbols("Nj", j=j).eval(xi, eta) for j in range(-3, 7))
    checks.append(("sum_j Nj=N (covered band)",
                   residual(nsum, nu["N"].eval(xi, eta), cover), 1e-10))
    c1, c2, c3 = chi_partition(xi, eta)
    checks.append(("chi1+chi2+chi3=1", float(np.abs(c1 + c2 + c3 - 1).max()), 1e-12))
    rows = [{"identity": name, "residual": res, "tolerance": tol, "ok": res < tol}
            for name, res, tol in checks]
    ok = all(r["ok"] for r in rows)
    summary = {"identities": len(rows), "all_ok": bool(ok),
               "worst": max(r["residual"] / r["tolerance"] for r in rows)}
    config = {"samples": samples, "seed": seed, "scale": scale}
    return make_report("symbol-check", config, rows, summary), bool(ok)


def run_iterate(n_iter: int = 2, t: float = 1.0, steps: int = 64,
                input_path: str | None = None, output_path: str | None = None,
                dim: int = 2, n: int = 128, period: float = 2 * math.pi,
                seed: int = 0, band: int | None = None):
    """Heat-Duhamel iterate of a stored or seeded divergence-free field."""
    if input_path:
        u0 = load_field(input_path)
    else:
        grid = make_grid(dim, n, period)
        opts = {"spectrum": "smooth"}
        if band:
            opts["band"] = band
        u0 = ensemble(seed, 1, "divfree_vector", grid, **opts)[0]
    out = picard_iterate(u0, n_iter, t, steps)
    if output_path:
        save_field(out, output_path)
    bank = bank_for_grid(out.grid)
    rows = [{"j": j, "block_linf": lp_norm(dyadic_block(out, j), np.inf)}
            for j in bank.js()]
    div = divergence_ratio(out)
    summary = {"n_iter": n_iter, "t": t, "steps": steps,
               "l2": lp_norm(out, 2), "linf": lp_norm(out, np.inf),
               "divergence_ratio": div, "output": output_path or ""}
    config = {"n_iter": n_iter, "t": t, "steps": steps, "dim": dim, "n": n,
              "seed": seed, "input": input_path or "", "output": output_path or ""}
    return make_report("iterate", config, rows, summary), bool(div < 1e-10)


def run_inflation(alpha: str = "sqrt", Ns=(15, 20, 30, 40), zeta_eps: float = 0.05,
                  zeta_count: int = 5, nodes: int = 48):
    """Growth of the second-iterate output near xi0 against sum alpha_k^2."""
    kind = {"sqrt": "lq_not_l2", "inv": "l2_control"}.get(alpha, alpha)
    res = inflation.inflation_experiment(Ns, kind, zeta_eps=zeta_eps,
                                         zeta_count=zeta_count, nodes=nodes)
    summary = res["summary"]
    ok = summary["max_refinement_change"] < 0.01
    if kind == "lq_not_l2":
        ok = ok and summary["monotone_in_N"]
    config = {"alpha": alpha, "Ns": ",".join(str(n) for n in Ns),
              "zeta_eps": zeta_eps, "zeta_count": zeta_count, "nodes": nodes}
    return make_report("inflation", config, res["rows"], summary), bool(ok)


def run_chemin(j_lo: int = 0, j_hi: int = 5, t: float = 1.0, dim: int = 2,
               n: int = 256, period: float = 2 * math.pi, seed: int = 1,
               band: int | None = None):
    """Heat decay of unit random blocks against the annulus-edge bound."""
    grid = make_grid(dim, n, period)
    f = ensemble(seed, 1, "flat_binf", grid,
                 band=band or (grid.n // 2 - 2))[0]
    rows = []
    for j in range(j_lo, j_hi + 1):
        ratio = chemin_decay_check(f, j, t)
        bound = math.exp(-CHEMIN_C * 4.0 ** j * t)
        rows.append({"j": j, "t": t, "ratio": ratio, "bound": bound,
                     "ok": ratio <= bound * (1 + 1e-9)})
    ok = all(r["ok"] for r in rows)
    summary = {"t": t, "c": CHEMIN_C, "all_ok": bool(ok)}
    config = {"j_lo": j_lo, "j_hi": j_hi, "t": t, "dim": dim, "n": n, "seed": seed}
    return make_report("chemin", config, rows, summary), bool(ok)


RUNNERS = {
    "partition-check": run_partition_check,
    "besov": run_besov,
    "embeddings": run_embeddings,
    "boundedness": run_boundedness,
    "symbol-check": run_symbol_check,
    "iterate": run_iterate,
    "inflation": run_inflation,
    "chemin": run_chemin,
}

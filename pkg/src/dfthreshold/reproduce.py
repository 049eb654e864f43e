"""End-to-end regeneration of the published tables and figure data.

Every function returns a list of flat dict rows (plot/CSV ready) with the
published value, where one exists, next to the computed one.
"""

from __future__ import annotations

import numpy as np

from . import reference as ref
from .ann import evaluate_metrics, mlp_forward, rbf_forward, train_mlp
from .ber_model import DEFAULT_VARIANT, FormulaVariant, closed_form_ber
from .dataset import DEFAULT_TEST_SPEC, DEFAULT_TRAIN_SPEC, Dataset, generate_grid
from .link_model import Scenario
from .optimizer import DEFAULT_SEARCH, SearchConfig, optimal_threshold

TABLE1_HIDDEN = tuple(ref.TABLE1_TRAIN_MSE)
POWER_SAVING_DB = 2.0


def default_datasets(variant: FormulaVariant = DEFAULT_VARIANT, cfg: SearchConfig = DEFAULT_SEARCH, workers: int = 1):
    return (
        generate_grid(DEFAULT_TRAIN_SPEC, variant, cfg, workers),
        generate_grid(DEFAULT_TEST_SPEC, variant, cfg, workers),
    )


def table1(train: Dataset, seed: int = 0, hidden=TABLE1_HIDDEN) -> list[dict]:
    rows = []
    for h in hidden:
        _, trace = train_mlp(train, h, seed=seed)
        rows.append(
            {
                "n_hidden": h,
                "train_mse": min(trace.mse),
                "reference_mse": ref.TABLE1_TRAIN_MSE.get(h, float("nan")),
                "iterations": trace.iterations[-1],
                "stop_reason": trace.stop_reason,
            }
        )
    return rows


def table2(mlp, rbf, variant: FormulaVariant = DEFAULT_VARIANT, cfg: SearchConfig = DEFAULT_SEARCH) -> tuple[list[dict], dict]:
    """Ten published rows plus metrics of both predictors against the computed optima."""
    rows = []
    for k, (feat, num_ref, mlp_ref, rbf_ref) in enumerate(ref.TABLE2_ROWS, start=1):
        opt = optimal_threshold(Scenario(*feat), variant, cfg).gamma_th_opt
        rows.append(
            {
                "row": k,
                "sigma_sr_sq": feat[0],
                "sigma_rd_sq": feat[1],
                "sigma_sd_sq": feat[2],
                "m": feat[3],
                "ebn0_db": feat[4],
                "gamma_th_opt": opt,
                "mlp": mlp_forward(mlp, np.array(feat, dtype=float)),
                "rbf": rbf_forward(rbf, np.array(feat, dtype=float)),
                "reference_gamma_th_opt": num_ref,
                "reference_mlp": mlp_ref,
                "reference_rbf": rbf_ref,
            }
        )
    targets = [r["gamma_th_opt"] for r in rows]
    summary = {
        "mlp": evaluate_metrics([r["mlp"] for r in rows], targets).to_dict(),
        "rbf": evaluate_metrics([r["rbf"] for r in rows], targets).to_dict(),
        "reference_mlp": evaluate_metrics([r["reference_mlp"] for r in rows], [r["reference_gamma_th_opt"] for r in rows]).to_dict(),
    }
    return rows, summary


def table3(mlp=None, rbf=None, variant: FormulaVariant = DEFAULT_VARIANT, cfg: SearchConfig = DEFAULT_SEARCH) -> list[dict]:
    """BER on the symmetric M=4 network for constant, optimal and predicted thresholds."""
    rows = []
    for db_idx, ebn0 in enumerate(ref.TABLE3_EBN0_DB):
        s = Scenario(*ref.SYMMETRIC_NETWORK, 4, ebn0)
        feat = np.array(s.as_features())
        for c, published in ref.TABLE3_CONSTANT.items():
            rows.append(_t3_row(s, f"constant_{c:g}", c, variant, published[db_idx]))
        rows.append(_t3_row(s, "optimal", optimal_threshold(s, variant, cfg).gamma_th_opt, variant, float("nan")))
        if mlp is not None:
            rows.append(_t3_row(s, "mlp", max(mlp_forward(mlp, feat), 0.0), variant, ref.TABLE3_MLP[db_idx]))
        if rbf is not None:
            rows.append(_t3_row(s, "rbf", max(rbf_forward(rbf, feat), 0.0), variant, ref.TABLE3_RBF[db_idx]))
    return rows


def _t3_row(s: Scenario, policy: str, g: float, variant: FormulaVariant, published: float) -> dict:
    return {"ebn0_db": s.ebn0_db, "policy": policy, "gamma_th": g, "ber": closed_form_ber(s, g, variant), "reference_ber": published}


def threshold_curve(network, relays, ebn0_db, variant: FormulaVariant = DEFAULT_VARIANT, cfg: SearchConfig = DEFAULT_SEARCH, mlp=None, rbf=None) -> list[dict]:
    """Optimal (and optionally predicted) threshold against Eb/N0 for each relay count."""
    rows = []
    for m in relays:
        for db in ebn0_db:
            s = Scenario(*network, m, float(db))
            row = {"m": m, "ebn0_db": float(db), "gamma_th_opt": optimal_threshold(s, variant, cfg).gamma_th_opt}
            feat = np.array(s.as_features())
            if mlp is not None:
                row["mlp"] = mlp_forward(mlp, feat)
            if rbf is not None:
                row["rbf"] = rbf_forward(rbf, feat)
            rows.append(row)
    return rows


def fig2(**kw) -> list[dict]:
    return threshold_curve(ref.SYMMETRIC_NETWORK, (2, 4, 6, 8), range(0, 21), **kw)


def fig3(**kw) -> list[dict]:
    return threshold_curve(ref.RELAY_IN_MIDDLE_NETWORK, (2, 4, 6, 8), range(0, 21), **kw)


def fig5(mlp, rbf, **kw) -> list[dict]:
    return threshold_curve(ref.SYMMETRIC_NETWORK, (4,), range(0, 21), mlp=mlp, rbf=rbf, **kw)


def fig6(mlp, rbf, **kw) -> list[dict]:
    return threshold_curve(ref.RELAY_IN_MIDDLE_NETWORK, (6,), range(0, 21), mlp=mlp, rbf=rbf, **kw)


def power_saving(
    constants=(1.0, 3.0, 5.0, 10.0),
    saving_db: float = POWER_SAVING_DB,
    ebn0_db=range(2, 21),
    m: int = 4,
    variant: FormulaVariant = DEFAULT_VARIANT,
    cfg: SearchConfig = DEFAULT_SEARCH,
) -> list[dict]:
    """For each constant threshold, the Eb/N0 points where the optimal threshold
    reaches the same or lower BER with ``saving_db`` less power."""
    opt_ber = {}
    rows = []
    for c in constants:
        witnesses = []
        for db in ebn0_db:
            low = float(db) - saving_db
            if low not in opt_ber:
                opt_ber[low] = optimal_threshold(Scenario(*ref.SYMMETRIC_NETWORK, m, low), variant, cfg).ber_min
            const_ber = closed_form_ber(Scenario(*ref.SYMMETRIC_NETWORK, m, float(db)), c, variant)
            if opt_ber[low] <= const_ber:
                witnesses.append(float(db))
        rows.append({"constant_threshold": c, "witness_ebn0_db": witnesses, "holds": bool(witnesses)})
    return rows

"""Experiment orchestration for the CLI commands.

Each command is a per-sample row builder plus a summary computed from the
rows alone, so a summary can always be recomputed from a saved CSV. Sample
``i`` draws from the substream ``RngSeed(seed).generator(i)``; rows come
back in index order whether they are built serially or by worker processes.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import families
from ..assistance import OptimizerConfig, assisted_measure, ca_two_qubit_closed
from ..measures import CONCURRENCE, MeasureSpec, measure_eval
from ..polygamy import (KKind, def1_check, def2_check, is_finite_power,
                        k_solution, one_to_group_values, polygamy_power_state,
                        theorem5_power)
from ..qcore import (Bipartition, RngSeed, random_density_matrix,
                     random_pure_state, read_state, reduced_state)
from .report import ReportFile, make_header

COMMANDS = ("kset", "power", "w-saturation", "gsd-bound", "polygon", "assist",
            "verify")
OUT_DIR_ENV = "ENTASSIST_OUT_DIR"
SQRT2_PLUS_1 = math.sqrt(2) + 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DISCREPANCY = 2
EXIT_CHECK_FAILED = 3

CLOSED_FORM_SAMPLES = 10_000
OPTIMIZER_SAMPLES = 100


@dataclass(frozen=True)
class RunConfig:
    command: str
    measure: MeasureSpec = CONCURRENCE
    mu: float = 1.0
    family: str = "haar"
    qubits: int = 3
    constraints: tuple[str, ...] = ()
    samples: int | None = None
    seed: int = 2024
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    tolerance: float = 1e-9
    output_path: str | None = None
    workers: int = 1
    figures: bool = True
    division: str = "one-to-one"
    n_range: tuple[int, int] = (3, 8)
    state_path: str | None = None
    keep: tuple[int, ...] = ()
    rank: int | None = None
    suite: str = "all"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.constraints and self.family != "gsd" and self.command != "gsd-bound":
            raise ValueError("constraints only apply to the gsd family")
        if self.division not in ("one-to-one", "one-to-group"):
            raise ValueError("division is one-to-one or one-to-group")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @property
    def sample_count(self) -> int:
        if self.samples is not None:
            return self.samples
        closed = self.measure.kind == "concurrence" or self.command in (
            "w-saturation", "polygon")
        if self.command == "assist":
            closed = False
        return CLOSED_FORM_SAMPLES if closed else OPTIMIZER_SAMPLES

    @property
    def out_dir(self) -> Path:
        return Path(self.output_path or os.environ.get(OUT_DIR_ENV, "."))

    def echo(self) -> dict:
        d = asdict(self)
        d["measure"] = self.measure.label
        d["optimizer"] = {**asdict(self.optimizer),
                          "rng": asdict(self.optimizer.rng)}
        d["samples"] = self.sample_count
        return d


def _fmt_power(power):
    return float(power) if is_finite_power(power) else str(power)


def _k_fields(k) -> dict:
    return {"k_kind": k.kind.value,
            "k_value": None if math.isnan(k.value) else k.value}


def _tuple_row(i: int, desc: dict, cfg: RunConfig, joint: float, parts) -> dict:
    """Shared columns of a per-state polygamy record."""
    k = k_solution(joint, list(parts), cfg.mu, cfg.tolerance)
    verdict = def1_check(joint, list(parts), cfg.tolerance)
    row = {"index": i, "descriptor": desc, "measure": cfg.measure.label,
           "mu": cfg.mu, "joint": joint}
    row.update({f"part_{j + 1}": float(p) for j, p in enumerate(parts)})
    row.update(_k_fields(k))
    row["power"] = _fmt_power(polygamy_power_state(joint, list(parts),
                                                   cfg.tolerance))
    row["premise"] = verdict.premise
    row["consequence"] = verdict.consequence
    return row


def _family(cfg: RunConfig) -> families.FamilySpec:
    if cfg.family == "gsd":
        return families.FamilySpec("gsd", constraints=tuple(cfg.constraints))
    return families.FamilySpec(cfg.family, cfg.qubits)


# -- row builders -------------------------------------------------------------

def _row_kset(cfg: RunConfig, i: int) -> dict:
    gen = RngSeed(cfg.seed).generator(i)
    fam = _family(cfg)
    desc, joint, parts = families.sample_values(fam, cfg.measure, gen,
                                                cfg.optimizer)
    row = _tuple_row(i, desc, cfg, joint, parts)
    if fam.name == "gsd":
        row.update(_shortcut_fields(families.GSDParams(tuple(desc["lambda"]),
                                                  desc["phi"]), row, cfg))
    return row


def _shortcut_fields(p: families.GSDParams, row: dict, cfg: RunConfig) -> dict:
    l0, _, l2, l3, _ = p.lambdas
    applicable = (cfg.measure.kind == "concurrence" and cfg.mu == 1
                  and l0 > 0 and l2 > 0 and l2 < l3)
    case = families.gsd_k_case_formula(p) if applicable else None
    mismatch = bool(applicable and row["k_value"] is not None
                    and abs(row["k_value"] - case) > 1e-6 * max(1.0, case))
    return {"case_formula_k": case, "case_formula_mismatch": mismatch}


def _row_power(cfg: RunConfig, i: int) -> dict:
    if cfg.division == "one-to-one":
        return _row_kset(cfg, i)
    gen = RngSeed(cfg.seed).generator(i)
    fam = _family(cfg)
    if fam.name == "gsd":
        p = families.sample_gsd(gen, fam.constraints)
        psi, desc = families.gsd_state(p), p.describe()
    elif fam.name == "w":
        p = families.sample_w(gen, 3)
        psi, desc = families.w_state(p), p.describe()
    else:
        psi = random_pure_state(3, gen)
        desc = {"family": "haar", "num_qubits": 3}
    values = one_to_group_values(psi, cfg.measure)
    verdict = def2_check(values, cfg.tolerance)
    return {"index": i, "descriptor": desc, "measure": cfg.measure.label,
            "q_A": values[0], "q_B": values[1], "q_C": values[2],
            "power": _fmt_power(theorem5_power(values, cfg.tolerance)),
            "premise": verdict.premise, "consequence": verdict.consequence}


def _w_row(cfg: RunConfig, n: int, j: int, index: int) -> dict:
    gen = RngSeed(cfg.seed, n).generator(j)
    p = families.sample_w(gen, n)
    joint, pairs = families.w_ca_values(p)
    psi = families.w_state(p)
    cut = Bipartition.split([0], n)
    oracle_joint = measure_eval(CONCURRENCE, psi, cut)
    oracle_pairs = [ca_two_qubit_closed(reduced_state(psi, [0, i]))
                    for i in range(1, n)]
    gap = max([abs(joint - oracle_joint)]
              + [abs(a - b) for a, b in zip(pairs, oracle_pairs)])
    verdict = def1_check(joint, pairs, cfg.tolerance)
    geo = families.geometry_record([joint] + pairs) if n in (3, 4) else None
    row = {"index": index, "n": n, "descriptor": p.describe(), "joint": joint}
    row.update({f"pair_{i}": (pairs[i - 1] if i <= len(pairs) else None)
                for i in range(1, cfg.n_range[1])})
    row["defect"] = joint ** 2 - sum(x * x for x in pairs)
    row["geometry"] = geo.kind if geo else None
    row["oracle_gap"] = gap
    row["power"] = _fmt_power(polygamy_power_state(joint, pairs, cfg.tolerance))
    row["premise"] = verdict.premise
    row["consequence"] = verdict.consequence
    return row


def _row_polygon(cfg: RunConfig, i: int) -> dict:
    gen = RngSeed(cfg.seed).generator(i)
    fam = _family(cfg)
    if fam.name == "w":
        psi = families.w_state(families.sample_w(gen, 3))
    elif fam.name == "gsd":
        psi = families.gsd_state(families.sample_gsd(gen, fam.constraints))
    else:
        psi = random_pure_state(3, gen)
    q = one_to_group_values(psi, cfg.measure)
    res = (q[1] + q[2] - q[0], q[0] + q[2] - q[1], q[0] + q[1] - q[2])
    # the ">=" orientation E_i >= E_j + E_k read for every i
    printed_fail = any(r > cfg.tolerance for r in res)
    return {"index": i, "measure": cfg.measure.label,
            "q_A": q[0], "q_B": q[1], "q_C": q[2],
            "residual_A": res[0], "residual_B": res[1], "residual_C": res[2],
            "min_residual": min(res), "ge_orientation_fails": printed_fail}


def _assist_source(cfg: RunConfig, i: int):
    if cfg.state_path:
        psi = read_state(cfg.state_path)
        keep = cfg.keep or tuple(range(psi.num_qubits))
        rho = reduced_state(psi, keep)
        return rho, {"state_file": str(cfg.state_path), "keep": list(keep)}
    gen = RngSeed(cfg.seed).generator(i)
    dim = 2 ** cfg.qubits
    rank = cfg.rank or int(gen.integers(1, dim + 1))
    rho = random_density_matrix(cfg.qubits, rank, gen)
    return rho, {"random_mixed": cfg.qubits, "rank": rank}


def _row_assist(cfg: RunConfig, i: int) -> dict:
    rho, desc = _assist_source(cfg, i)
    cut = Bipartition.split([0], rho.num_parties)
    opt = replace(cfg.optimizer, rng=RngSeed(cfg.seed, 1 + i))
    value = assisted_measure(rho, cut, cfg.measure, opt)
    oracle = None
    if cfg.measure.kind == "concurrence" and rho.subsystem_dims == (2, 2):
        oracle = ca_two_qubit_closed(rho)
    return {"index": i, "descriptor": desc, "measure": cfg.measure.label,
            "rank": int(np.sum(np.linalg.eigvalsh(rho.matrix) > 1e-13)),
            "assisted": value, "oracle": oracle,
            "gap": None if oracle is None else oracle - value}


def _gsd_sweep_rows(cfg: RunConfig, start: int) -> list[dict]:
    """``l4 = 0, l1 = 0, l2 = l3 - 1e-4`` with ``l3`` over [0.3, 0.7]."""
    rows = []
    for j, l3 in enumerate(np.linspace(0.3, 0.7, 41)):
        l2 = l3 - 1e-4
        l0 = math.sqrt(1 - l2 ** 2 - l3 ** 2)
        p = families.GSDParams((l0, 0.0, l2, l3, 0.0))
        joint, ab, ac = families.gsd_ca_values(p)
        row = _tuple_row(start + j, p.describe(), cfg, joint, (ab, ac))
        row["source"] = "sweep"
        row.update(_shortcut_fields(p, row, cfg))
        rows.append(row)
    return rows


def _row_gsd_bound(cfg: RunConfig, i: int) -> dict:
    row = _row_kset(cfg, i)
    row["source"] = "sample"
    return row


# -- summaries ------------------------------------------------------------------

def _finite(values):
    return [v for v in values if isinstance(v, (int, float))
            and not isinstance(v, bool) and math.isfinite(v)]


def _argmin(rows, key):
    best = None
    for r in rows:
        v = r.get(key)
        if v is None or isinstance(v, (str, bool)):
            continue
        if best is None or v < best[key]:
            best = r
    return best


def _kinds(rows):
    counts = {k.value: 0 for k in KKind}
    for r in rows:
        counts[r["k_kind"]] += 1
    return counts


def summarize(command: str, rows: list[dict], cfg: RunConfig) -> dict:
    tol = cfg.tolerance
    if command in ("kset", "gsd-bound") or (command == "power"
                                            and "k_kind" in rows[0]):
        samples = [r for r in rows if r.get("source", "sample") == "sample"]
        finite = [r for r in samples if r["k_kind"] == KKind.FINITE.value]
        best = _argmin(finite, "k_value")
        powers = _finite([r["power"] for r in samples])
        pbest = _argmin([r for r in samples if _finite([r["power"]])], "power")
        s = {"count": len(samples), "k_kinds": _kinds(samples),
             "inf_k": best["k_value"] if best else None,
             "argmin_k_index": best["index"] if best else None,
             "min_power_sampled_estimate": min(powers) if powers else None,
             "argmin_power_index": pbest["index"] if pbest else None,
             "def1_violations": sum(r["premise"] and not r["consequence"]
                                    for r in samples)}
        if "case_formula_mismatch" in rows[0]:
            s["case_formula_mismatches"] = sum(bool(r["case_formula_mismatch"])
                                               for r in rows)
        if command == "gsd-bound":
            sweep = [r for r in rows if r.get("source") == "sweep"]
            s["bound"] = SQRT2_PLUS_1
            s["bound_violations"] = sum(
                r["k_value"] < SQRT2_PLUS_1 - 1e-6 for r in finite)
            s["sweep_max_gap"] = max(abs(r["k_value"] - SQRT2_PLUS_1)
                                     for r in sweep)
        return s
    if command == "power":
        powers = _finite([r["power"] for r in rows])
        pbest = _argmin([r for r in rows if _finite([r["power"]])], "power")
        return {"count": len(rows),
                "min_power_sampled_estimate": min(powers) if powers else None,
                "argmin_power_index": pbest["index"] if pbest else None,
                "unbounded": sum(r["power"] == "Unbounded" for r in rows),
                "def2_violations": sum(r["premise"] and not r["consequence"]
                                       for r in rows)}
    if command == "w-saturation":
        premise = [r for r in rows if r["premise"]]
        dev = [abs(r["power"] - 2) for r in premise if _finite([r["power"]])]
        non_finite = sum(not _finite([r["power"]]) for r in premise)
        return {"count": len(rows),
                "max_defect": max(abs(r["defect"]) for r in rows),
                "max_oracle_gap": max(r["oracle_gap"] for r in rows),
                "premise_count": len(premise),
                "max_power_deviation": max(dev) if dev else 0.0,
                "premise_without_finite_power": non_finite}
    if command == "polygon":
        low = _argmin(rows, "min_residual")
        return {"count": len(rows), "min_residual": low["min_residual"],
                "argmin_index": low["index"],
                "violations": sum(r["min_residual"] < -tol for r in rows),
                "ge_orientation_failures": sum(bool(r["ge_orientation_fails"])
                                               for r in rows)}
    if command == "assist":
        gaps = _finite([r["gap"] for r in rows])
        return {"count": len(rows),
                "max_value": max(r["assisted"] for r in rows),
                "max_oracle_gap": max(gaps) if gaps else None,
                "min_oracle_gap": min(gaps) if gaps else None,
                "oracle_violations": sum(g > 1e-3 or g < -1e-9 for g in gaps)}
    raise ValueError(command)


def exit_status(command: str, summary: dict) -> tuple[int, list[str]]:
    """Exit code plus human-readable notes for the checks behind it."""
    failed, flags = [], []
    if summary.get("def1_violations"):
        failed.append(f"{summary['def1_violations']} pair-polygamy violations")
    if summary.get("def2_violations"):
        failed.append(f"{summary['def2_violations']} one-to-group violations")
    if command == "gsd-bound":
        if summary["bound_violations"]:
            failed.append(f"{summary['bound_violations']} k values below sqrt2+1")
        if summary["sweep_max_gap"] > 1e-3:
            failed.append("directed sweep misses sqrt2+1 by more than 1e-3")
    if command == "w-saturation":
        if summary["max_defect"] > 1e-12:
            failed.append("W-class defect above 1e-12")
        if summary["max_power_deviation"] > 1e-9 or summary["premise_without_finite_power"]:
            failed.append("W-class power differs from 2")
        if summary["max_oracle_gap"] > 1e-9:
            failed.append("W-class closed forms disagree with the numeric oracle")
    if command == "polygon":
        if summary["violations"]:
            failed.append(f"{summary['violations']} polygon residuals below -tol")
        if summary["ge_orientation_failures"]:
            flags.append("the '>=' orientation of the one-to-group relation "
                         f"fails on {summary['ge_orientation_failures']} states")
    if command == "assist" and summary.get("oracle_violations"):
        failed.append(f"{summary['oracle_violations']} optimizer/oracle mismatches")
    if summary.get("case_formula_mismatches"):
        flags.append("piecewise k shortcut disagrees with the solved k on "
                     f"{summary['case_formula_mismatches']} rows")
    if failed:
        return EXIT_CHECK_FAILED, failed + flags
    return (EXIT_DISCREPANCY if flags else EXIT_OK), flags


def full_summary(command: str, rows: list[dict], cfg: RunConfig):
    """Summary with check notes, and the exit code, from the rows alone."""
    summary = summarize(command, rows, cfg)
    code, notes = exit_status(command, summary)
    summary["notes"] = notes
    return summary, code


# -- orchestration --------------------------------------------------------------

_BUILDERS = {"kset": _row_kset, "power": _row_power, "polygon": _row_polygon,
             "assist": _row_assist, "gsd-bound": _row_gsd_bound}


def _build(args):
    cfg, i = args
    return _BUILDERS[cfg.command](cfg, i)


def _build_w(args):
    cfg, n, j, index = args
    return _w_row(cfg, n, j, index)


def _map(fn, tasks, workers):
    if workers == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def collect_rows(cfg: RunConfig) -> list[dict]:
    if cfg.command == "w-saturation":
        lo, hi = cfg.n_range
        tasks, idx = [], 0
        for n in range(lo, hi + 1):
            for j in range(cfg.sample_count):
                tasks.append((cfg, n, j, idx))
                idx += 1
        return _map(_build_w, tasks, cfg.workers)
    count = 1 if (cfg.command == "assist" and cfg.state_path) else cfg.sample_count
    rows = _map(_build, [(cfg, i) for i in range(count)], cfg.workers)
    if cfg.command == "gsd-bound":
        rows += _gsd_sweep_rows(cfg, len(rows))
    return rows


def prepare(cfg: RunConfig) -> RunConfig:
    if cfg.command == "gsd-bound":
        cfg = replace(cfg, family="gsd",
                      constraints=cfg.constraints or families.GSD_CONSTRAINTS)
    return cfg


def run_experiment(cfg: RunConfig, write: bool = True) -> ReportFile:
    """Run ``cfg.command``, write ``<out>/<command>.{json,csv,png}``."""
    if cfg.command == "verify":
        from .verify import run_verify_report
        report = run_verify_report(cfg)
    else:
        cfg = prepare(cfg)
        if cfg.command != "assist":
            _family(cfg)  # rejects bad family/constraint combinations up front
        rows = collect_rows(cfg)
        summary, code = full_summary(cfg.command, rows, cfg)
        report = ReportFile(cfg.command, make_header(cfg.echo()), rows,
                            summary, code)
    if write:
        from .report import write_report
        out = cfg.out_dir
        if cfg.figures and report.rows:
            from .figures import render
            report.figures = render(report, out)
        write_report(report, out)
    return report

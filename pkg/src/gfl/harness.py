"""Sweeps over (d, s) cells and report rendering.

Exit codes: 0 when nothing was falsified, 1 when some cell contradicts the
expected monomorphism, 2 for usage errors.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from . import checks
from .chmorph import (CriterionReport, SeqS, cell_sizes, eta_diagram, evaluate_cell,
                      ring_of_lines_dim, strict_sequences, weak_sequences)
from .fields import FieldSpec, default_field

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2
MODES = ("theorem", "tightness", "stabilize", "lemmas", "ring-of-lines")
FORMATS = ("json", "csv", "table")
DEFAULT_CAP = 100_000
# bound on flags x dim, i.e. bytes of the dense phi matrix for q <= 256
DEFAULT_ENTRY_CAP = 200_000_000
# shifted cells in stabilization runs have few flags, so larger dimensions are affordable
DEFAULT_SHIFT_CAP = 3_000_000
DEFAULT_SHIFT_ENTRY_CAP = 500_000_000


@dataclass
class SweepConfig:
    field: FieldSpec = field(default_factory=lambda: default_field(2))
    d_max: int = 4
    r_max: int = 3
    s_max: int = 6
    mode: str = "theorem"
    fmt: str = "json"
    cap: int = DEFAULT_CAP
    entry_cap: Optional[int] = DEFAULT_ENTRY_CAP
    weak: bool = False
    n_max: int = 20
    threads: Optional[int] = None
    shift_cap: int = DEFAULT_SHIFT_CAP
    shift_entry_cap: Optional[int] = DEFAULT_SHIFT_ENTRY_CAP

    def __post_init__(self):
        if min(self.d_max, self.r_max, self.s_max) < 1:
            raise ValueError("d_max, r_max and s_max must be positive")
        if self.cap < 1 or self.shift_cap < 1:
            raise ValueError("caps must be positive")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.fmt not in FORMATS:
            raise ValueError(f"unknown format {self.fmt!r}; expected one of {FORMATS}")

    def workers(self) -> int:
        if self.threads:
            return max(1, int(self.threads))
        env = os.environ.get("GFL_THREADS")
        return max(1, int(env)) if env else 1


def _map_ordered(cfg: SweepConfig, fn: Callable, items: list) -> list:
    """Apply fn to items, possibly in parallel; results keep the input order."""
    n = cfg.workers()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def sweep_cells(cfg: SweepConfig) -> list[tuple[int, SeqS]]:
    """(d, s) in key order: d, then length, then lexicographic s."""
    gen = weak_sequences if cfg.weak else strict_sequences
    cells = []
    for d in range(1, cfg.d_max + 1):
        for r in range(1, min(cfg.r_max, d) + 1):
            cells.extend((d, s) for s in gen(r, cfg.s_max))
    return cells


def _evaluate(cfg: SweepConfig, cells: Iterable[tuple[int, SeqS]],
              caps: Optional[tuple] = None) -> list[CriterionReport]:
    cap, entry_cap = caps or (cfg.cap, cfg.entry_cap)
    return _map_ordered(cfg, lambda c: evaluate_cell(cfg.field, c[1], c[0], cap, entry_cap),
                        list(cells))


def falsified(rep: CriterionReport) -> bool:
    return rep.strict and rep.criterion_holds and rep.status == "ok" and not rep.injective


def run_theorem_sweep(cfg: SweepConfig) -> list[CriterionReport]:
    return _evaluate(cfg, sweep_cells(cfg))


def run_tightness(cfg: SweepConfig) -> list[CriterionReport]:
    """Cells where the criterion fails, with the observed injectivity."""
    cells = [(d, s) for d, s in sweep_cells(cfg)
             if not evaluate_cell(cfg.field, s, d, cap=0).criterion_holds]
    return _evaluate(cfg, cells)


@dataclass
class StabilizationRow:
    d: int
    seq: tuple
    shifted: tuple
    base_rank: int
    flag_dim: int
    shifted_rank: Optional[int]
    status: str

    def to_json(self) -> dict:
        return {"d": self.d, "seq": list(self.seq), "shifted": list(self.shifted),
                "base_rank": self.base_rank, "flag_dim": self.flag_dim,
                "shifted_rank": self.shifted_rank, "status": self.status}


def run_stabilization(cfg: SweepConfig, reports: Optional[list[CriterionReport]] = None,
                      diagram_cap: int = 5000) -> dict:
    """Shift every injective cell and recheck; evaluate the eta square where cheap."""
    if reports is None:
        reports = run_theorem_sweep(cfg)
    base = [r for r in reports if r.status == "ok" and r.injective and r.flag_dim > 0]
    shifted = _evaluate(cfg, [(r.d, SeqS(r.seq).plus()) for r in base],
                        (max(cfg.cap, cfg.shift_cap), cfg.shift_entry_cap))
    rows = []
    for b, s in zip(base, shifted):
        if s.status != "ok":
            status = "skipped"
        else:
            status = "ok" if s.injective else "falsified"
        rows.append(StabilizationRow(b.d, b.seq, s.seq, b.rank, b.flag_dim, s.rank, status))
    diagrams = []
    for b in base:
        s = SeqS(b.seq)
        if cell_sizes(cfg.field.q, s.plus(), b.d)[1] > diagram_cap:
            continue
        lhs, rhs = eta_diagram(cfg.field, s, b.d)
        diagrams.append({"d": b.d, "seq": list(s), "commutes": lhs == rhs})
    return {"rows": rows, "diagrams": diagrams}


def run_lemma_battery(cfg: SweepConfig) -> list[checks.CheckResult]:
    d = min(cfg.d_max, 3)
    return [chk(cfg.field, d_max=d) for chk in checks.BATTERY]


def run_ring_of_lines(cfg: SweepConfig) -> list[dict]:
    cells = [(d, n) for d in range(1, cfg.d_max + 1) for n in range(0, cfg.n_max + 1)]
    dims = _map_ordered(cfg, lambda c: ring_of_lines_dim(cfg.field, c[1], c[0]), cells)
    return [{"d": d, "n": n, "dim": k} for (d, n), k in zip(cells, dims)]


# -- rendering ----------------------------------------------------------------------------

REPORT_COLUMNS = ("q", "d", "seq", "degree", "flag_dim", "gamma_dim", "rank", "injective",
                  "criterion_holds", "strict", "status")


def _cell(v) -> str:
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(map(str, v)) + ")"
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def _table(header: list[str], rows: list[list]) -> str:
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in cells)
    return "\n".join(lines) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[_cell(v) for v in row] for row in rows])
    return buf.getvalue()


def _flat(header, records):
    return [[rec.get(h) for h in header] for rec in records]


def render(cfg: SweepConfig, payload: dict, records: list[dict], header: list[str]) -> str:
    """Serialize a run; JSON carries ``payload``, CSV and tables carry ``records``."""
    if cfg.fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    rows = _flat(header, records)
    return _csv(header, rows) if cfg.fmt == "csv" else _table(header, rows)


def _meta(cfg: SweepConfig) -> dict:
    meta = {"mode": cfg.mode, "field": cfg.field.to_json(), "d_max": cfg.d_max,
            "r_max": cfg.r_max, "s_max": cfg.s_max, "cap": cfg.cap, "entry_cap": cfg.entry_cap,
            "weak": cfg.weak}
    if cfg.mode == "stabilize":
        meta.update(shift_cap=cfg.shift_cap, shift_entry_cap=cfg.shift_entry_cap)
    return meta


def execute(cfg: SweepConfig) -> tuple[str, int]:
    """Run the configured mode; returns (rendered report, exit code)."""
    meta = _meta(cfg)
    if cfg.mode in ("theorem", "tightness"):
        reports = run_theorem_sweep(cfg) if cfg.mode == "theorem" else run_tightness(cfg)
        recs = [r.to_json() for r in reports]
        bad = [r for r in reports if falsified(r)]
        summary = {"cells": len(reports), "skipped": sum(r.status == "skipped" for r in reports),
                   "criterion_cells": sum(r.criterion_holds for r in reports),
                   "falsified": len(bad)}
        if cfg.mode == "tightness":
            summary["injective_below_threshold"] = sum(bool(r.injective) for r in reports)
        payload = {"meta": meta, "summary": summary, "reports": recs}
        return render(cfg, payload, recs, list(REPORT_COLUMNS)), EXIT_FALSIFIED if bad else EXIT_OK
    if cfg.mode == "stabilize":
        out = run_stabilization(cfg)
        rows = [r.to_json() for r in out["rows"]]
        bad = [r for r in rows if r["status"] == "falsified"]
        bad += [g for g in out["diagrams"] if not g["commutes"]]
        payload = {"meta": meta, "rows": rows, "diagrams": out["diagrams"],
                   "summary": {"cells": len(rows), "diagrams": len(out["diagrams"]),
                               "falsified": len(bad)}}
        header = ["d", "seq", "shifted", "base_rank", "flag_dim", "shifted_rank", "status"]
        return render(cfg, payload, rows, header), EXIT_FALSIFIED if bad else EXIT_OK
    if cfg.mode == "lemmas":
        results = [r.to_json() for r in run_lemma_battery(cfg)]
        payload = {"meta": meta, "checks": results}
        header = ["name", "passed", "cells"]
        code = EXIT_OK if all(r["passed"] for r in results) else EXIT_FALSIFIED
        return render(cfg, payload, results, header), code
    rows = run_ring_of_lines(cfg)
    payload = {"meta": meta, "rows": rows}
    return render(cfg, payload, rows, ["d", "n", "dim"]), EXIT_OK

"""Time-series container for flow runs, persisted as CSV."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

COLUMNS = ["t", "h", "E", "area_inner", "area_outer", "area_annulus",
           "len_inner", "len_outer", "min_sep", "dlogh_dt", "K0"]


@dataclass
class TraceRecord:
    t: float
    h: float = math.nan
    E: float = math.nan
    area_inner: float = math.nan
    area_outer: float = math.nan
    area_annulus: float = math.nan
    len_inner: float = math.nan
    len_outer: float = math.nan
    min_sep: float = math.nan
    dlogh_dt: float = math.nan
    K0: float = 0.0


@dataclass
class FlowTrace:
    """Recorded time series of a flow run plus run metadata.

    Record times are strictly increasing, except for the degenerate
    zero-duration run where the initial record is duplicated as the final one.
    dlogh_dt is filled by finalize() from centered differences of log h over
    adjacent records with a computed modulus (one-sided at the ends).
    """

    records: list[TraceRecord] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        if name not in COLUMNS:
            raise KeyError(name)
        return np.array([getattr(r, name) for r in self.records])

    def finalize(self) -> "FlowTrace":
        t = self.column("t")
        h = self.column("h")
        idx = np.flatnonzero(np.isfinite(h) & (h > 0))
        for r in self.records:
            r.dlogh_dt = math.nan
        if len(idx) >= 2:
            logh = np.log(h[idx])
            ts = t[idx]
            for k, rec_i in enumerate(idx):
                lo = max(k - 1, 0)
                hi = min(k + 1, len(idx) - 1)
                if ts[hi] > ts[lo]:
                    self.records[rec_i].dlogh_dt = (logh[hi] - logh[lo]) / (ts[hi] - ts[lo])
        return self

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(COLUMNS) + "\n")
            for r in self.records:
                fh.write(",".join(f"{getattr(r, c):.17g}" for c in COLUMNS) + "\n")

    @staticmethod
    def read_csv(path) -> "FlowTrace":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if header != COLUMNS:
                raise ValueError(f"{path}: unexpected trace header {header}")
            records = []
            for line in fh:
                if not line.strip():
                    continue
                values = [float(v) for v in line.strip().split(",")]
                records.append(TraceRecord(**dict(zip(COLUMNS, values))))
        return FlowTrace(records=records)

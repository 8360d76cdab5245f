"""Per-tick trace rows and CSV serialization.

One TraceSample is logged per force-loop boundary. Values are quantized to
9 significant digits at construction so that metrics recomputed from a
written CSV match the in-memory summary exactly, and repeated runs with the
same config and seed serialize byte-identically.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, fields

import numpy as np

COLUMNS = (
    "t", "phase", "theta1", "d2", "x", "y",
    "f_n", "f_t", "v_n_cmd", "v_t_cmd", "k_eq", "k_f", "b",
)

PHASE_TOKENS = ("approach", "stabilize", "sweep")


def q9(value: float) -> float:
    """Round-trip a float through the 9-significant-digit CSV format."""
    return float(f"{value:.9g}")


@dataclass(frozen=True)
class TraceSample:
    t: float
    phase: str
    theta1: float
    d2: float
    x: float
    y: float
    f_n: float
    f_t: float
    v_n_cmd: float
    v_t_cmd: float
    k_eq: float
    k_f: float
    b: float

    @classmethod
    def quantized(cls, **kw) -> "TraceSample":
        vals = {k: (v if k == "phase" else q9(v)) for k, v in kw.items()}
        return cls(**vals)


class Trace:
    """Ordered list of TraceSamples with CSV round-trip helpers."""

    def __init__(self, samples: list[TraceSample] | None = None):
        self.samples: list[TraceSample] = list(samples) if samples else []

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    def append(self, sample: TraceSample):
        self.samples.append(sample)

    def column(self, name: str) -> np.ndarray:
        if name == "phase":
            return np.array([s.phase for s in self.samples])
        return np.array([getattr(s, name) for s in self.samples], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(COLUMNS) + "\n")
        for s in self.samples:
            row = []
            for name in COLUMNS:
                v = getattr(s, name)
                row.append(v if name == "phase" else f"{v:.9g}")
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv())

    @classmethod
    def read_csv(cls, path) -> "Trace":
        with open(path) as fh:
            header = fh.readline().strip()
            if tuple(header.split(",")) != COLUMNS:
                raise ValueError(f"unexpected trace header: {header!r}")
            samples = []
            for line in fh:
                parts = line.strip().split(",")
                kw = {}
                for name, raw in zip(COLUMNS, parts):
                    kw[name] = raw if name == "phase" else float(raw)
                samples.append(TraceSample(**kw))
        return cls(samples)


# consistency guard: the dataclass and the wire format must agree
assert tuple(f.name for f in fields(TraceSample)) == COLUMNS

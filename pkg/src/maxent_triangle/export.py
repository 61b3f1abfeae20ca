"""JSON / CSV exports of a symmetric distribution on the triangle.

Values travel as decimal strings with enough digits to recover the exact
fixed-point value on re-import.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

from . import fixedpoint as fx
from .triangle import SymmetricTriangleVector, iter_orbits, marginal_raw, num_orbits

SCHEMA_VERSION = "1"
CSV_HEADER = ("a", "b", "c", "orbit_size", "value")
NORMALIZATIONS = ("scaled", "probability")


@dataclass
class DistributionExport:
    n: int
    rho: str
    precision_bits: int
    normalization: str
    entries: list = field(default_factory=list)
    marginal: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    @classmethod
    def from_vector(cls, vec: SymmetricTriangleVector, rho: str, normalization: str = "scaled"):
        if normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        f = vec.frac_bits
        entries = [
            {"a": o.canonical[0], "b": o.canonical[1], "c": o.canonical[2],
             "orbit_size": o.orbit_size, "value": fx.to_decimal(x, f)}
            for o, x in zip(iter_orbits(vec.n), vec.raw())
        ]
        marginal = [fx.to_decimal(m, f) for m in marginal_raw(vec.n, vec.limbs)]
        return cls(vec.n, rho, f, normalization, entries, marginal)

    def validate(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"bad normalization {self.normalization!r}")
        expected = [(o.canonical, o.orbit_size) for o in iter_orbits(self.n)]
        got = [((e["a"], e["b"], e["c"]), e["orbit_size"]) for e in self.entries]
        if got != expected:
            raise ValueError("entries must list every canonical orbit once, in lexicographic order")
        if len(self.marginal) not in (0, self.n + 1):
            raise ValueError("marginal must have n + 1 entries")

    def to_vector(self) -> SymmetricTriangleVector:
        self.validate()
        raw = [fx.from_decimal(e["value"], self.precision_bits) for e in self.entries]
        return SymmetricTriangleVector.from_raw(self.n, raw, self.precision_bits)

    # JSON
    def to_json(self, indent: int | None = 1) -> str:
        d = asdict(self)
        order = ("schema_version", "n", "rho", "precision_bits", "normalization", "entries", "marginal")
        return json.dumps({k: d[k] for k in order}, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "DistributionExport":
        d = json.loads(text)
        out = cls(int(d["n"]), str(d["rho"]), int(d["precision_bits"]), d["normalization"],
                  list(d["entries"]), list(d.get("marginal", [])), str(d["schema_version"]))
        out.validate()
        return out

    # CSV: entries only
    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for e in self.entries:
            w.writerow([e[k] for k in CSV_HEADER])
        return buf.getvalue()


def vector_from_csv(text: str, precision_bits: int) -> SymmetricTriangleVector:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"CSV header must be {','.join(CSV_HEADER)}")
    body = rows[1:]
    if not body:
        raise ValueError("CSV has no entries")
    n = sum(int(x) for x in body[0][:3])
    if len(body) != num_orbits(n):
        raise ValueError(f"expected {num_orbits(n)} rows for n={n}, got {len(body)}")
    raw = []
    for o, row in zip(iter_orbits(n), body):
        if (tuple(int(x) for x in row[:3]), int(row[3])) != (o.canonical, o.orbit_size):
            raise ValueError(f"row {row} out of order; expected orbit {o.canonical}")
        raw.append(fx.from_decimal(row[4], precision_bits))
    return SymmetricTriangleVector.from_raw(n, raw, precision_bits)

"""Loading, validating and splitting the AI4I 2020 predictive-maintenance table."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateClass, EmptyFile, HeaderMismatch, MissingColumn, TypeParseError

HEADER = (
    "UDI",
    "Product ID",
    "Type",
    "Air temperature [K]",
    "Process temperature [K]",
    "Rotational speed [rpm]",
    "Torque [Nm]",
    "Tool wear [min]",
    "Machine failure",
    "TWF",
    "HDF",
    "PWF",
    "OSF",
    "RNF",
)
TYPE_CODES = ("L", "M", "H")
FLAG_COLUMNS = ("TWF", "HDF", "PWF", "OSF", "RNF")
# raw physical columns in F2..F6 order
PHYSICAL_COLUMNS = HEADER[3:8]
DEFAULT_SEED = 42


@dataclass(frozen=True, slots=True)
class RawRecord:
    udi: int
    product_id: str
    type_code: str
    air_temp: float
    process_temp: float
    rot_speed: float
    torque: float
    tool_wear: float
    machine_failure: int
    twf: int = 0
    hdf: int = 0
    pwf: int = 0
    osf: int = 0
    rnf: int = 0

    def physical(self):
        return (self.air_temp, self.process_temp, self.rot_speed, self.torque, self.tool_wear)

    def as_row(self):
        """Cells in file order, formatted the way the public CSV writes them."""
        return [
            str(self.udi),
            self.product_id,
            self.type_code,
            _fmt(self.air_temp),
            _fmt(self.process_temp),
            _fmt(self.rot_speed),
            _fmt(self.torque),
            _fmt(self.tool_wear),
            str(self.machine_failure),
            str(self.twf),
            str(self.hdf),
            str(self.pwf),
            str(self.osf),
            str(self.rnf),
        ]


def _fmt(v):
    return str(int(v)) if float(v).is_integer() else repr(float(v))


@dataclass(frozen=True)
class CanonicalDataset:
    records: tuple[RawRecord, ...]
    source_digest: str = ""

    def __len__(self):
        return len(self.records)

    def labels(self):
        return np.fromiter((r.machine_failure for r in self.records), dtype=np.int64, count=len(self.records))

    def type_codes(self):
        return [r.type_code for r in self.records]

    def physical_matrix(self):
        """Raw F2..F6 columns as an ``(n, 5)`` float array."""
        if not self.records:
            return np.empty((0, 5))
        return np.array([r.physical() for r in self.records], dtype=np.float64)

    def subset(self, indices):
        return CanonicalDataset(tuple(self.records[i] for i in indices), self.source_digest)


@dataclass(frozen=True)
class Violation:
    row: int
    column: str
    reason: str


@dataclass
class ValidationReport:
    n_rows: int
    class_counts: dict[int, int]
    ranges: dict[str, tuple[float, float]] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.7
    seed: int = DEFAULT_SEED
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


@dataclass(frozen=True)
class DataSplit:
    train_indices: np.ndarray
    test_indices: np.ndarray


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _parse_int(text, row, column, line, allowed=None):
    try:
        value = int(text)
    except ValueError:
        raise TypeParseError(row, column, text, line) from None
    if allowed is not None and value not in allowed:
        raise TypeParseError(row, column, text, line)
    return value


def _parse_float(text, row, column, line):
    try:
        return float(text)
    except ValueError:
        raise TypeParseError(row, column, text, line) from None


def load_csv(path) -> CanonicalDataset:
    """Parse an AI4I CSV file into a :class:`CanonicalDataset`.

    Row order is preserved. Physical values are parsed but not range-checked
    here; :func:`validate` reports NaN and negative values.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyFile(f"{path}: file is empty")
        header = [h.strip() for h in header]
        for col in HEADER:
            if col not in header:
                raise MissingColumn(col)
        if tuple(header) != HEADER:
            raise HeaderMismatch(f"{path}: header does not match the AI4I schema: {header}")

        records = []
        for line_no, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            row = len(records)
            if len(cells) != len(HEADER):
                raise TypeParseError(row, "<row>", ",".join(cells), line_no)
            c = [x.strip() for x in cells]
            type_code = c[2]
            if type_code not in TYPE_CODES:
                raise TypeParseError(row, "Type", type_code, line_no)
            flags = [_parse_int(v, row, name, line_no, (0, 1)) for v, name in zip(c[9:], FLAG_COLUMNS)]
            records.append(
                RawRecord(
                    udi=_parse_int(c[0], row, "UDI", line_no),
                    product_id=c[1],
                    type_code=type_code,
                    air_temp=_parse_float(c[3], row, HEADER[3], line_no),
                    process_temp=_parse_float(c[4], row, HEADER[4], line_no),
                    rot_speed=_parse_float(c[5], row, HEADER[5], line_no),
                    torque=_parse_float(c[6], row, HEADER[6], line_no),
                    tool_wear=_parse_float(c[7], row, HEADER[7], line_no),
                    machine_failure=_parse_int(c[8], row, "Machine failure", line_no, (0, 1)),
                    twf=flags[0],
                    hdf=flags[1],
                    pwf=flags[2],
                    osf=flags[3],
                    rnf=flags[4],
                )
            )
    if not records:
        raise EmptyFile(f"{path}: no data rows after the header")
    return CanonicalDataset(tuple(records), file_digest(path))


def write_csv(ds: CanonicalDataset, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for rec in ds.records:
            writer.writerow(rec.as_row())


def validate(ds: CanonicalDataset) -> ValidationReport:
    report = ValidationReport(n_rows=len(ds), class_counts={0: 0, 1: 0})
    if not ds.records:
        return report
    labels = ds.labels()
    report.class_counts = {0: int(np.sum(labels == 0)), 1: int(np.sum(labels == 1))}
    phys = ds.physical_matrix()
    for j, name in enumerate(PHYSICAL_COLUMNS):
        col = phys[:, j]
        finite = col[np.isfinite(col)]
        if finite.size:
            report.ranges[name] = (float(finite.min()), float(finite.max()))
        for i in np.flatnonzero(~np.isfinite(col)):
            report.violations.append(Violation(int(i), name, "not finite"))
        for i in np.flatnonzero(col < 0):
            report.violations.append(Violation(int(i), name, "negative"))
        if name == "Rotational speed [rpm]":
            for i in np.flatnonzero(col == 0):
                report.violations.append(Violation(int(i), name, "must be positive"))
    report.violations.sort(key=lambda v: (v.row, PHYSICAL_COLUMNS.index(v.column)))
    return report


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def train_test_split(ds_or_labels, cfg: SplitConfig = SplitConfig()) -> DataSplit:
    """Seeded 70:30-style split; stratified by label unless ``cfg.stratified`` is off.

    Accepts a :class:`CanonicalDataset` or a bare label vector. Per-class train
    counts are allocated by largest remainder so their sum equals
    ``round(train_fraction * n)``. Both index arrays come back sorted.
    """
    labels = ds_or_labels.labels() if isinstance(ds_or_labels, CanonicalDataset) else np.asarray(ds_or_labels)
    n = labels.shape[0]
    if n == 0:
        raise DegenerateClass("cannot split an empty dataset")
    n_train = _round_half_up(cfg.train_fraction * n)
    rng = np.random.default_rng(cfg.seed)

    if not cfg.stratified:
        perm = rng.permutation(n)
        return DataSplit(np.sort(perm[:n_train]), np.sort(perm[n_train:]))

    classes = (0, 1)
    members = [np.flatnonzero(labels == c) for c in classes]
    for c, m in zip(classes, members):
        if m.size == 0:
            raise DegenerateClass(f"class {c} has no rows; stratified split impossible")
    quotas = [cfg.train_fraction * m.size for m in members]
    take = [int(math.floor(q)) for q in quotas]
    leftover = n_train - sum(take)
    # largest remainder first, lower label on ties
    order = sorted(range(len(classes)), key=lambda i: (-(quotas[i] - take[i]), i))
    for i in order[:leftover]:
        take[i] += 1

    train, test = [], []
    for m, t in zip(members, take):
        perm = rng.permutation(m)
        train.append(perm[:t])
        test.append(perm[t:])
    return DataSplit(np.sort(np.concatenate(train)), np.sort(np.concatenate(test)))

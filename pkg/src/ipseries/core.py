"""Monthly series data model and CSV ingestion."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from importlib import resources
from typing import Literal, NamedTuple

import numpy as np

from .errors import BoundsError, FormatError, ParseError, SequencingError

HEADER = (
    "Date",
    "Number.of.Trademark.Applications",
    "Number.of.Patent.Applications",
)
COLUMNS = ("trademarks", "patents")
DEFAULT_KEEP = 472

_MONTH_ABBR = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")


@dataclass(frozen=True, order=True)
class MonthDate:
    """A calendar month. Ordering is lexicographic on (year, month)."""

    year: int
    month: int

    def __post_init__(self) -> None:
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")

    @property
    def ordinal(self) -> int:
        return 12 * self.year + (self.month - 1)

    @classmethod
    def from_ordinal(cls, k: int) -> MonthDate:
        return cls(k // 12, k % 12 + 1)

    @classmethod
    def parse(cls, text: str) -> MonthDate:
        """Parse ``YYYY-MM``."""
        year, month = text.strip().split("-")
        return cls(int(year), int(month))

    def __add__(self, months: int) -> MonthDate:
        return MonthDate.from_ordinal(self.ordinal + int(months))

    def __sub__(self, months: int) -> MonthDate:
        return MonthDate.from_ordinal(self.ordinal - int(months))

    def distance(self, other: MonthDate) -> int:
        """Number of months from ``self`` to ``other``."""
        return other.ordinal - self.ordinal

    def label(self) -> str:
        """Short human label, e.g. ``May 1987``."""
        return f"{_MONTH_ABBR[self.month - 1]} {self.year}"

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


def distance(a: MonthDate, b: MonthDate) -> int:
    return a.distance(b)


@dataclass(frozen=True, eq=False)
class MonthlySeries:
    """Evenly spaced monthly observations anchored at ``start``.

    ``values[k]`` belongs to month ``start + k``. The array is stored as a
    read-only float64 copy.
    """

    start: MonthDate
    values: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a MonthlySeries needs a non-empty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MonthlySeries):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.values, other.values)

    __hash__ = None

    @property
    def end(self) -> MonthDate:
        return self.start + (len(self) - 1)

    def date_at(self, index: int) -> MonthDate:
        if not 0 <= index < len(self):
            raise BoundsError(f"index {index} outside 0..{len(self) - 1}")
        return self.start + index

    def index_of(self, date: MonthDate) -> int:
        k = self.start.distance(date)
        if not 0 <= k < len(self):
            raise BoundsError(f"{date} outside {self.start}..{self.end}")
        return k

    def dates(self) -> list[MonthDate]:
        return [self.start + k for k in range(len(self))]

    def replace_values(self, values: np.ndarray) -> MonthlySeries:
        return MonthlySeries(self.start, values, self.name)


class RawRow(NamedTuple):
    date_text: str
    date: MonthDate
    trademarks: int
    patents: int


@dataclass(frozen=True)
class RawTable:
    rows: tuple[RawRow, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class Segment:
    """Inclusive month range; ``label`` 0 denotes the full span."""

    label: int
    start: MonthDate
    end: MonthDate

    def __post_init__(self) -> None:
        if self.end < self.start:
            raise ValueError(f"segment end {self.end} precedes start {self.start}")

    def __len__(self) -> int:
        return self.start.distance(self.end) + 1


def _parse_date(text: str, lineno: int) -> MonthDate:
    parts = text.strip().split("/")
    try:
        month, day, year = (int(p) for p in parts)
    except ValueError:
        raise ParseError(f"line {lineno}: date {text!r} is not M/D/YYYY") from None
    if day != 1 or not 1 <= month <= 12:
        raise ParseError(f"line {lineno}: date {text!r} is not the first of a month")
    return MonthDate(year, month)


def _parse_count(text: str, lineno: int, column: str) -> int:
    text = text.strip()
    if not text.isdigit():
        raise ParseError(f"line {lineno}: {column} value {text!r} is not a non-negative integer")
    return int(text)


def parse_csv(data: bytes) -> RawTable:
    """Parse the three-column monthly count file.

    Raises
    ------
    FormatError
        Header differs from the expected one; the message names the column.
    ParseError
        A date or count cannot be parsed (message carries the line number).
    SequencingError
        Rows are not consecutive months.
    """
    text = data.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty input: missing header row") from None
    if len(header) != len(HEADER):
        raise FormatError(f"expected {len(HEADER)} columns {HEADER}, got {len(header)}")
    for got, want in zip(header, HEADER):
        if got != want:
            raise FormatError(f"header column {got!r} should be {want!r}")

    rows: list[RawRow] = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec or all(not c.strip() for c in rec):
            continue
        if len(rec) != 3:
            raise ParseError(f"line {lineno}: expected 3 fields, got {len(rec)}")
        date = _parse_date(rec[0], lineno)
        tm = _parse_count(rec[1], lineno, HEADER[1])
        pt = _parse_count(rec[2], lineno, HEADER[2])
        if rows and rows[-1].date.distance(date) != 1:
            prev = rows[-1].date
            kind = "regresses" if date <= prev else "skips months"
            raise SequencingError(f"line {lineno}: date {date} {kind} after {prev}")
        rows.append(RawRow(rec[0], date, tm, pt))
    return RawTable(tuple(rows))


def serialize_csv(table: RawTable) -> bytes:
    """Inverse of :func:`parse_csv` (LF line endings)."""
    lines = [",".join(HEADER)]
    lines += [f"{r.date_text},{r.trademarks},{r.patents}" for r in table.rows]
    return ("\n".join(lines) + "\n").encode("utf-8")


def bundled_csv_bytes() -> bytes:
    """Raw bytes of the bundled USPTO monthly file (Sep 1977 - Dec 2016)."""
    return resources.files("ipseries").joinpath("data/uspto_monthly.csv").read_bytes()


def load_bundled() -> RawTable:
    return parse_csv(bundled_csv_bytes())


def to_monthly_series(
    raw: RawTable,
    column: Literal["trademarks", "patents"],
    keep: int = DEFAULT_KEEP,
) -> MonthlySeries:
    """First ``keep`` values of one column, anchored at the first row's date."""
    if column not in COLUMNS:
        raise ValueError(f"column must be one of {COLUMNS}")
    if keep < 1 or keep > len(raw):
        raise BoundsError(f"keep={keep} but the table has {len(raw)} rows")
    values = np.array([getattr(r, column) for r in raw.rows[:keep]], dtype=float)
    return MonthlySeries(raw.rows[0].date, values, column.capitalize())


def slice_segment(series: MonthlySeries, seg: Segment) -> MonthlySeries:
    """Copy of the observations between ``seg.start`` and ``seg.end`` inclusive."""
    if seg.start < series.start or seg.end > series.end:
        raise BoundsError(
            f"segment {seg.start}..{seg.end} outside series span {series.start}..{series.end}"
        )
    i = series.start.distance(seg.start)
    j = series.start.distance(seg.end)
    return MonthlySeries(seg.start, series.values[i : j + 1].copy(), series.name)

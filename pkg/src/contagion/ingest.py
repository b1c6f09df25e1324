"""Reading bank balance sheets and shock scenarios from CSV.

``banks.csv`` holds one bank per row::

    bank_id,country,total_assets,equity,c2100,c1100,c1200,...,c6700

Amounts are in millions of a single currency. ``c2100`` is the aggregate
claim on other credit institutions; the other twenty ``c####`` columns are
external exposures by asset class. ``scenario.csv`` has the header
``asset_code,factor`` and one price factor per external class.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cascade import ShockScenario
from .errors import ParseError, ValidationError
from .model import PortfolioMatrix
from .reconstruct import Marginals


class IngestWarning(UserWarning):
    """Input is usable but incomplete or inconsistent."""


ASSET_CLASSES = (
    ("1100", "Central banks and central governments"),
    ("1200", "Regional governments or local authorities"),
    ("1300", "Public sector entities"),
    ("1400", "Multilateral Development Banks"),
    ("1500", "International Organisations"),
    ("1700", "General governments"),
    ("2100", "Credit institutions"),
    ("2200", "Other financial corporations"),
    ("3000", "Corporates / Non financial corporations"),
    ("4110", "Retail - Secured by real estate property - SME"),
    ("4120", "Retail - Secured by real estate property - Non SME"),
    ("4200", "Retail - Qualifying Revolving"),
    ("4310", "Retail - Other - SME"),
    ("4320", "Retail - Other - Non SME"),
    ("4500", "Retail - SME"),
    ("4700", "Households"),
    ("5000", "Secured by mortgages on immovable property"),
    ("6400", "Items associated with particularly high risk"),
    ("6500", "Covered bonds"),
    ("6600", "Claims on institutions and corporates with a ST credit assessment"),
    ("6700", "Collective investments undertakings (CIU)"),
)


@dataclass(frozen=True)
class AssetClassCatalog:
    codes: tuple = tuple(c for c, _ in ASSET_CLASSES)
    names: dict = field(default_factory=lambda: dict(ASSET_CLASSES))
    interbank_code: str = "2100"

    def __post_init__(self):
        if len(set(self.codes)) != len(self.codes):
            raise ValueError("asset codes must be unique")
        if self.interbank_code not in self.codes:
            raise ValueError(f"interbank code {self.interbank_code} missing from catalog")

    @property
    def external_codes(self) -> tuple:
        return tuple(c for c in self.codes if c != self.interbank_code)

    @property
    def m(self) -> int:
        return len(self.external_codes)

    def header(self) -> list:
        cols = ["bank_id", "country", "total_assets", "equity", "c" + self.interbank_code]
        return cols + ["c" + c for c in self.external_codes]


CATALOG = AssetClassCatalog()

_FIXED = ("bank_id", "country", "total_assets", "equity")
_CODE_COL = re.compile(r"^c(\d+)$")


@dataclass(frozen=True)
class BankRecord:
    bank_id: str
    country: str
    total_assets: float
    equity: float
    interbank: float
    external_exposures: dict

    @property
    def external_total(self) -> float:
        return float(sum(self.external_exposures.values()))


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="", encoding="utf-8")
    return source


def _number(text, line, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(line, column, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(line, column, f"not a finite number: {text!r}")
    return value


def _validate(rec: BankRecord, catalog: AssetClassCatalog):
    if not re.fullmatch(r"[A-Z]{2}", rec.country):
        raise ValidationError(rec.bank_id, f"country {rec.country!r} is not a two-letter code")
    if rec.total_assets <= 0:
        raise ValidationError(rec.bank_id, "total_assets must be positive")
    if rec.equity <= 0:
        raise ValidationError(rec.bank_id, "equity must be positive")
    if rec.interbank < 0:
        raise ValidationError(rec.bank_id, f"exposure c{catalog.interbank_code} is negative")
    for code, value in rec.external_exposures.items():
        if value < 0:
            raise ValidationError(rec.bank_id, f"exposure c{code} is negative")
    if rec.interbank + rec.external_total > rec.total_assets * (1 + 1e-6):
        warnings.warn(
            f"bank {rec.bank_id!r}: exposures {rec.interbank + rec.external_total:g} exceed "
            f"total assets {rec.total_assets:g}",
            IngestWarning,
            stacklevel=3,
        )


def parse_banks(source, catalog: AssetClassCatalog = CATALOG) -> list[BankRecord]:
    """Parse and validate a ``banks.csv`` file or text stream.

    Columns may come in any order. Asset-code columns absent from the file
    are read as zero with a warning; codes outside the catalog are rejected.

    Raises
    ------
    ParseError
        Malformed header, unknown column, wrong field count or non-numeric value.
    ValidationError
        A record breaks a balance-sheet invariant or repeats a bank_id.
    """
    stream = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(1, None, "empty file") from None
        seen = set()
        for col in header:
            if col in seen:
                raise ParseError(1, col, "duplicate column")
            seen.add(col)
            m = _CODE_COL.match(col)
            if col in _FIXED:
                continue
            if m is None:
                raise ParseError(1, col, "unknown column")
            if m.group(1) not in catalog.codes:
                raise ParseError(1, col, f"unknown asset code {m.group(1)}")
        for col in _FIXED:
            if col not in seen:
                raise ParseError(1, col, "required column missing")
        missing = [c for c in catalog.codes if "c" + c not in seen]
        if missing:
            warnings.warn(
                "asset-code columns missing, read as zero: " + ", ".join(missing),
                IngestWarning,
                stacklevel=2,
            )

        records, ids = [], set()
        for row in reader:
            line = reader.line_num
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != len(header):
                raise ParseError(line, None, f"expected {len(header)} fields, got {len(row)}")
            fields = dict(zip(header, (f.strip() for f in row)))
            bank_id = fields["bank_id"]
            if not bank_id:
                raise ParseError(line, "bank_id", "empty bank_id")
            amounts = {
                c: _number(fields["c" + c], line, "c" + c) if "c" + c in fields else 0.0
                for c in catalog.codes
            }
            rec = BankRecord(
                bank_id=bank_id,
                country=fields["country"],
                total_assets=_number(fields["total_assets"], line, "total_assets"),
                equity=_number(fields["equity"], line, "equity"),
                interbank=amounts.pop(catalog.interbank_code),
                external_exposures=amounts,
            )
            if bank_id in ids:
                raise ValidationError(bank_id, "duplicate bank_id")
            _validate(rec, catalog)
            ids.add(bank_id)
            records.append(rec)
        return records
    finally:
        if stream is not source:
            stream.close()


def _fmt(v: float) -> str:
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def serialize_banks(records, dest=None, catalog: AssetClassCatalog = CATALOG) -> str:
    """Write records in the canonical column order; returns the CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(catalog.header())
    for r in records:
        writer.writerow(
            [r.bank_id, r.country, _fmt(r.total_assets), _fmt(r.equity), _fmt(r.interbank)]
            + [_fmt(r.external_exposures.get(c, 0.0)) for c in catalog.external_codes]
        )
    text = buf.getvalue()
    if dest is not None:
        if isinstance(dest, (str, os.PathLike)):
            with open(dest, "w", newline="", encoding="utf-8") as fh:
                fh.write(text)
        else:
            dest.write(text)
    return text


def build_portfolio(records, catalog: AssetClassCatalog = CATALOG) -> PortfolioMatrix:
    """External holdings, one row per bank and one column per external class, at unit prices."""
    d = np.array(
        [[r.external_exposures.get(c, 0.0) for c in catalog.external_codes] for r in records],
        dtype=float,
    ).reshape(len(records), catalog.m)
    if not d.any():
        warnings.warn("all external exposures are zero", IngestWarning, stacklevel=2)
    return PortfolioMatrix(d, np.ones(catalog.m))


def derive_marginals(records) -> Marginals:
    """Interbank assets double as liabilities: ``a = l = c2100``."""
    ib = np.array([r.interbank for r in records], dtype=float)
    return Marginals(ib, ib.copy())


def derive_liability_ratios(records) -> np.ndarray:
    """External liabilities over total assets, ``(TA - E - IB) / TA``.

    Raises
    ------
    ValidationError
        If equity plus interbank liabilities exceed total assets.
    """
    out = np.empty(len(records))
    for k, r in enumerate(records):
        ext = r.total_assets - r.equity - r.interbank
        if ext < 0:
            raise ValidationError(
                r.bank_id, "equity plus interbank liabilities exceed total assets"
            )
        out[k] = ext / r.total_assets
    return out


def parse_scenario(source, catalog: AssetClassCatalog = CATALOG, label: str | None = None) -> ShockScenario:
    """Read per-class price factors; classes not listed keep factor 1."""
    stream = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(1, None, "empty file") from None
        if header != ["asset_code", "factor"]:
            raise ParseError(1, None, f"expected header asset_code,factor, got {','.join(header)}")
        factors = {}
        for row in reader:
            line = reader.line_num
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != 2:
                raise ParseError(line, None, f"expected 2 fields, got {len(row)}")
            code, value = row[0].strip(), _number(row[1].strip(), line, "factor")
            if code == catalog.interbank_code:
                raise ParseError(line, "asset_code", f"{code} is the interbank class, not an external asset")
            if code not in catalog.external_codes:
                raise ParseError(line, "asset_code", f"unknown asset code {code!r}")
            if code in factors:
                raise ParseError(line, "asset_code", f"duplicate asset code {code}")
            if value < 0:
                raise ParseError(line, "factor", "price factor must be nonnegative")
            factors[code] = value
        name = getattr(stream, "name", "scenario")
    finally:
        if stream is not source:
            stream.close()
    absent = [c for c in catalog.external_codes if c not in factors]
    if absent:
        warnings.warn(
            "no factor for asset classes " + ", ".join(absent) + "; using 1.0",
            IngestWarning,
            stacklevel=2,
        )
    vec = [factors.get(c, 1.0) for c in catalog.external_codes]
    return ShockScenario(np.array(vec), label if label is not None else os.path.basename(str(name)))

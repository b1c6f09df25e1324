"""
Building banks.csv from transparency-exercise exposures
=======================================================

A documentation script, not part of the package. It pivots a long table of
supervisory exposure items into the one-row-per-bank layout that
``contagion.ingest.parse_banks`` reads.

Expected inputs (UTF-8 CSV, amounts in millions):

``exposures.csv``
    ``bank_id,country,item,exposure_code,amount``; one row per reported
    item, ``exposure_code`` being one of the 21 asset-class codes
    (1100 ... 6700, with 2100 for credit institutions).
``balance.csv``
    ``bank_id,total_assets,equity``; equity as restated.

Some asset classes are reported under two families of items: gross credit
exposures (items 183203 and 183303) and non-performing exposures (items
183904 and 183905). Which family feeds the exposure figures is a modelling
choice, so it is a flag here. Within a family the two items are summed.

Usage::

    python demos/eba_to_csv.py exposures.csv balance.csv banks.csv --items credit
"""

import argparse
import csv
from collections import defaultdict

from contagion.ingest import CATALOG, BankRecord, serialize_banks

ITEMS = {
    "credit": {"183203", "183303"},
    "npe": {"183904", "183905"},
}


def pivot(exposures_path, balance_path, family):
    wanted = ITEMS[family]
    amounts = defaultdict(lambda: defaultdict(float))
    countries = {}
    with open(exposures_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            countries[row["bank_id"]] = row["country"].strip()
            if row["item"].strip() not in wanted:
                continue
            code = row["exposure_code"].strip()
            if code not in CATALOG.codes:
                raise SystemExit(f"unknown exposure code {code!r} for bank {row['bank_id']}")
            amounts[row["bank_id"]][code] += float(row["amount"])

    records = []
    with open(balance_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            bank = row["bank_id"]
            held = amounts.get(bank, {})
            records.append(BankRecord(
                bank_id=bank,
                country=countries.get(bank, ""),
                total_assets=float(row["total_assets"]),
                equity=float(row["equity"]),
                interbank=held.get(CATALOG.interbank_code, 0.0),
                external_exposures={c: held.get(c, 0.0) for c in CATALOG.external_codes},
            ))
    return records


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[1])
    p.add_argument("exposures")
    p.add_argument("balance")
    p.add_argument("output")
    p.add_argument("--items", choices=sorted(ITEMS), default="credit",
                   help="which item family supplies the exposure amounts")
    args = p.parse_args()
    records = pivot(args.exposures, args.balance, args.items)
    serialize_banks(records, args.output)
    print(f"wrote {len(records)} banks to {args.output}")


if __name__ == "__main__":
    main()

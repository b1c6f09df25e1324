"""Regenerate the synthetic 48-bank fixture.

Bank ids and countries follow the public EBA 2018 roster; every amount is
drawn at random and bears no relation to any bank's actual balance sheet.
The fixture exists to exercise the pipeline at realistic size.

    python tests/data/generate_synthetic.py
"""

import os

import numpy as np

from contagion.ingest import CATALOG, BankRecord, serialize_banks

ROSTER = [
    ("RBI", "AT"), ("EBS", "AT"), ("KBC", "BE"), ("Belfius", "BE"),
    ("DZ Bank", "DE"), ("LBBW", "DE"), ("DBK", "DE"), ("CBK", "DE"),
    ("NORD/LB", "DE"), ("BayernLB", "DE"), ("Helaba", "DE"), ("NRW", "DE"),
    ("Danske", "DK"), ("JYSK", "DK"), ("Nykredit", "DK"), ("SAN", "ES"),
    ("BBVA", "ES"), ("CABK", "ES"), ("SAB", "ES"), ("OP", "FI"),
    ("BNP", "FR"), ("ACA", "FR"), ("GLE", "FR"), ("GCM", "FR"),
    ("BPCE", "FR"), ("LABP", "FR"), ("BARC", "GB"), ("LLOY", "GB"),
    ("HSBC", "GB"), ("RBS", "GB"), ("OTP", "HU"), ("BIR", "IE"),
    ("AIB", "IE"), ("UNCRY", "IT"), ("ISP", "IT"), ("BPM", "IT"),
    ("UBI", "IT"), ("BNG", "NL"), ("ABN", "NL"), ("ING", "NL"),
    ("Rabobank", "NL"), ("DNB", "NO"), ("PKO", "PL"), ("PEO", "PL"),
    ("SEB", "SE"), ("Nordea", "SE"), ("SWDB", "SE"), ("SHB", "SE"),
]


def main(seed=2018):
    rng = np.random.default_rng(seed)
    records = []
    for bank_id, country in ROSTER:
        total = float(np.round(np.exp(rng.uniform(np.log(4e4), np.log(2e6))), 1))
        equity = float(np.round(total * rng.uniform(0.045, 0.085), 1))
        interbank = float(np.round(total * rng.uniform(0.02, 0.09), 1))
        weights = rng.dirichlet(np.full(CATALOG.m, 0.6))
        external = np.round((total - interbank) * weights, 1)
        # balance sheet closes exactly, so model equity equals reported equity at unit prices
        total = float(np.round(interbank + external.sum(), 1))
        records.append(BankRecord(bank_id, country, total, equity, interbank,
                                  dict(zip(CATALOG.external_codes, external.tolist()))))
    here = os.path.dirname(os.path.abspath(__file__))
    serialize_banks(records, os.path.join(here, "synthetic_banks.csv"))
    factors = np.round(rng.uniform(0.95, 1.0, CATALOG.m), 5)
    with open(os.path.join(here, "synthetic_scenario.csv"), "w", encoding="utf-8") as fh:
        fh.write("asset_code,factor\n")
        for code, f in zip(CATALOG.external_codes, factors):
            fh.write(f"{code},{float(f)!r}\n")


if __name__ == "__main__":
    main()

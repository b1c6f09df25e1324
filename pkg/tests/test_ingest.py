import csv
import io
import warnings

import numpy as np
import pytest

from contagion.errors import ParseError, ValidationError
from contagion.ingest import (
    ASSET_CLASSES,
    CATALOG,
    IngestWarning,
    build_portfolio,
    derive_liability_ratios,
    derive_marginals,
    parse_banks,
    parse_scenario,
    serialize_banks,
)

HEADER = ",".join(CATALOG.header())


def row(bank_id, country="DE", total=100, equity=10, interbank=20, ext=None):
    ext = ext or {}
    values = [str(ext.get(c, 0)) for c in CATALOG.external_codes]
    return ",".join([bank_id, country, str(total), str(equity), str(interbank), *values])


def parse_text(*rows, header=HEADER):
    return parse_banks(io.StringIO("\n".join([header, *rows]) + "\n"))


TWO_BANKS = "\n".join([
    HEADER,
    row("AAA", "FR", 250.5, 12.25, 30, {"1100": 100.5, "6700": 7}),
    row("BBB", "IT", 80, 8, 0, {"4110": 70}),
]) + "\n"


class TestCatalog:
    def test_codes(self):
        assert [c for c, _ in ASSET_CLASSES] == [
            "1100", "1200", "1300", "1400", "1500", "1700", "2100", "2200", "3000", "4110", "4120",
            "4200", "4310", "4320", "4500", "4700", "5000", "6400", "6500", "6600", "6700",
        ]
        assert len(set(CATALOG.codes)) == 21
        assert CATALOG.m == 20
        assert "2100" not in CATALOG.external_codes
        assert CATALOG.header()[:5] == ["bank_id", "country", "total_assets", "equity", "c2100"]


class TestParseBanks:
    def test_two_bank_round_trip(self):
        recs = parse_banks(io.StringIO(TWO_BANKS))
        assert [r.bank_id for r in recs] == ["AAA", "BBB"]
        a = recs[0]
        assert (a.country, a.total_assets, a.equity, a.interbank) == ("FR", 250.5, 12.25, 30.0)
        assert a.external_exposures["1100"] == 100.5 and a.external_exposures["6700"] == 7.0
        assert serialize_banks(recs) == TWO_BANKS

    def test_columns_in_any_order(self):
        rows = list(csv.reader(io.StringIO(TWO_BANKS)))
        perm = [3, 0, 2, 1] + list(range(4, len(rows[0])))[::-1]
        shuffled = "\n".join(",".join(r[k] for k in perm) for r in rows) + "\n"
        assert serialize_banks(parse_banks(io.StringIO(shuffled))) == TWO_BANKS

    def test_negative_exposure(self):
        with pytest.raises(ValidationError) as err:
            parse_text(row("NEG", ext={"3000": -1}))
        assert err.value.bank_id == "NEG"
        assert "c3000" in err.value.invariant

    def test_duplicate_bank(self):
        with pytest.raises(ValidationError) as err:
            parse_text(row("DUP"), row("DUP"))
        assert err.value.bank_id == "DUP"

    def test_unknown_code(self):
        with pytest.raises(ParseError) as err:
            parse_text(row("X"), header=HEADER.replace("c6700", "c9999"))
        assert err.value.line == 1 and err.value.column == "c9999"

    def test_field_count_and_numbers(self):
        with pytest.raises(ParseError) as err:
            parse_text(row("X"), "Y,DE,1")
        assert err.value.line == 3
        with pytest.raises(ParseError) as err:
            parse_text(row("X", total="lots"))
        assert err.value.column == "total_assets"
        with pytest.raises(ParseError):
            parse_text(row("X", total="nan"))

    @pytest.mark.parametrize("kwargs", [{"country": "Germany"}, {"total": 0}, {"equity": -1}, {"interbank": -5}])
    def test_invariants(self, kwargs):
        with pytest.raises(ValidationError):
            parse_text(row("BAD", **kwargs))

    def test_missing_code_column_warns(self):
        header = HEADER.replace(",c6700", "")
        text = row("X", ext={"1100": 5})
        text = text[: text.rfind(",")]
        with pytest.warns(IngestWarning, match="6700"):
            recs = parse_text(text, header=header)
        assert recs[0].external_exposures["6700"] == 0.0

    def test_exposures_above_total_warn(self):
        with pytest.warns(IngestWarning, match="exceed"):
            parse_text(row("BIG", total=100, interbank=50, ext={"1100": 60}))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            parse_text(row("OK", total=100, interbank=50, ext={"1100": 50.00001}))

    def test_synthetic_fixture(self, synthetic_banks):
        recs = parse_banks(synthetic_banks)
        assert len(recs) == 48
        assert len({r.country for r in recs}) == 15
        with open(synthetic_banks, encoding="utf-8") as fh:
            assert serialize_banks(recs) == fh.read()


class TestPortfolio:
    def test_single_entry(self):
        recs = parse_text(row("X", ext={"4500": 3.5}))
        port = build_portfolio(recs)
        assert port.d.shape == (1, 20)
        assert np.count_nonzero(port.d) == 1
        assert port.d[0, CATALOG.external_codes.index("4500")] == 3.5
        np.testing.assert_array_equal(port.p, np.ones(20))

    def test_all_zero_warns(self):
        recs = parse_text(row("X"), row("Y"))
        with pytest.warns(IngestWarning):
            port = build_portfolio(recs)
        assert not port.d.any()

    def test_column_sums_match_streaming_pass(self, synthetic_banks):
        totals = dict.fromkeys(CATALOG.external_codes, 0.0)
        interbank = 0.0
        with open(synthetic_banks, newline="", encoding="utf-8") as fh:
            for rec in csv.DictReader(fh):
                for code in totals:
                    totals[code] += float(rec["c" + code])
                interbank += float(rec["c2100"])
        recs = parse_banks(synthetic_banks)
        port = build_portfolio(recs)
        np.testing.assert_allclose(port.d.sum(axis=0), list(totals.values()), rtol=1e-12)
        assert derive_marginals(recs).total == pytest.approx(interbank, rel=1e-12)


class TestDerived:
    def test_marginals_copy_interbank(self):
        recs = parse_text(row("A", interbank=10), row("B", interbank=0), row("C", interbank=5))
        m = derive_marginals(recs)
        np.testing.assert_array_equal(m.a, [10, 0, 5])
        np.testing.assert_array_equal(m.l, [10, 0, 5])

    def test_zero_marginals(self):
        m = derive_marginals(parse_text(row("A", interbank=0), row("B", interbank=0)))
        assert m.total == 0

    def test_liability_ratio(self):
        recs = parse_text(row("A", total=100, equity=10, interbank=20), row("B", total=50, equity=50, interbank=0))
        np.testing.assert_allclose(derive_liability_ratios(recs), [0.7, 0.0])

    def test_liability_ratio_negative(self):
        recs = parse_text(row("A", total=100, equity=60, interbank=50))
        with pytest.raises(ValidationError) as err:
            derive_liability_ratios(recs)
        assert err.value.bank_id == "A"


class TestScenario:
    def test_fixture(self, synthetic_scenario):
        shock = parse_scenario(synthetic_scenario)
        assert shock.factors.shape == (20,)
        assert shock.label == "synthetic_scenario.csv"
        assert shock.factors[0] == 0.97193
        assert np.all((shock.factors >= 0.95) & (shock.factors <= 1.0))

    def test_absent_classes_default(self):
        with pytest.warns(IngestWarning, match="using 1.0"):
            shock = parse_scenario(io.StringIO("asset_code,factor\n1100,0.5\n"), label="s")
        assert shock.factors[0] == 0.5
        np.testing.assert_array_equal(shock.factors[1:], np.ones(19))
        assert shock.label == "s"

    @pytest.mark.parametrize("body", [
        "code,factor\n1100,1\n",
        "asset_code,factor\n2100,0.9\n",
        "asset_code,factor\n9999,0.9\n",
        "asset_code,factor\n1100,0.9\n1100,0.8\n",
        "asset_code,factor\n1100,-0.1\n",
        "asset_code,factor\n1100,abc\n",
        "asset_code,factor\n1100\n",
    ])
    def test_rejects(self, body):
        with pytest.raises(ParseError):
            parse_scenario(io.StringIO(body))

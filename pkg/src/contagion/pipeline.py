"""End-to-end stress test: ingest, reconstruct, calibrate, cascade, report."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
from collections import Counter
from dataclasses import asdict, dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .cascade import FailureParams, ShockScenario, run_cascade
from .errors import InputError
from .export import FORMATS, export_graph
from .ingest import CATALOG, build_portfolio, derive_liability_ratios, derive_marginals, parse_banks, parse_scenario
from .model import capital_ratios, equity_values, interdependency, to_fraction_matrix
from .netstats import FIELDS, network_statistics
from .reconstruct import METHODS, ExposureMatrix, reconstruct

log = logging.getLogger(__name__)

LEVEL_NAMES = ("First", "Second", "Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth", "Ninth", "Tenth")


@dataclass
class RunConfig:
    banks_path: str
    scenario_path: str | None = None
    methods: tuple = METHODS
    hala_seed: int = 0
    hala_ensemble: int = 1
    theta_grid: tuple = (0.971, 0.973)
    beta_grid: tuple = (0.3, 0.8)
    threshold_basis: str = "reported"
    link_threshold: float = 0.0
    output_dir: str | None = None
    export: str | None = None

    def __post_init__(self):
        self.methods = tuple(self.methods)
        self.theta_grid = tuple(float(t) for t in self.theta_grid)
        self.beta_grid = tuple(float(b) for b in self.beta_grid)
        if not self.methods or not set(self.methods) <= set(METHODS):
            raise InputError(f"methods must be a nonempty subset of {METHODS}, got {self.methods}")
        if len(set(self.methods)) != len(self.methods):
            raise InputError("methods listed twice")
        if not self.theta_grid or not all(0 < t <= 1 for t in self.theta_grid):
            raise InputError("theta grid must be nonempty with values in (0, 1]")
        if not self.beta_grid or not all(0 <= b <= 1 for b in self.beta_grid):
            raise InputError("beta grid must be nonempty with values in [0, 1]")
        if self.hala_ensemble < 1:
            raise InputError("hala ensemble size must be at least 1")
        if self.threshold_basis not in ("reported", "model"):
            raise InputError("threshold_basis must be 'reported' or 'model'")
        if self.link_threshold < 0:
            raise InputError("link threshold must be nonnegative")
        if self.export is not None and self.export not in FORMATS:
            raise InputError(f"export format must be one of {FORMATS}")

    def echo(self) -> dict:
        d = asdict(self)
        d["methods"] = list(self.methods)
        d["theta_grid"] = list(self.theta_grid)
        d["beta_grid"] = list(self.beta_grid)
        return d


@dataclass(frozen=True, eq=False)
class CalibratedSystem:
    """One reconstructed network together with the model matrices it implies."""

    label: str
    exposures: ExposureMatrix
    fractions: object
    ratios: object
    interdependency: object
    portfolio: object
    reported_equity: np.ndarray
    model_equity: np.ndarray


def calibrate(records, exposures: ExposureMatrix, label: str | None = None) -> CalibratedSystem:
    """Turn nominal exposures into ``C``, capital ratios and ``A``.

    Fractions divide by reported total assets; external liability ratios
    come from the balance sheet. Model equity is ``A D p`` at unit prices.
    """
    port = build_portfolio(records)
    totals = np.array([r.total_assets for r in records])
    c = to_fraction_matrix(exposures.x, totals)
    ratios = capital_ratios(c, derive_liability_ratios(records))
    a = interdependency(c, ratios)
    return CalibratedSystem(
        label=label or exposures.method,
        exposures=exposures,
        fractions=c,
        ratios=ratios,
        interdependency=a,
        portfolio=port,
        reported_equity=np.array([r.equity for r in records]),
        model_equity=equity_values(a, port),
    )


@dataclass
class StressReport:
    data: dict
    stats_csv: str
    hierarchy_csv: str
    systems: list = field(default_factory=list, repr=False)

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2) + "\n"


def report_schema() -> dict:
    text = resources.files("contagion").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _networks(config, marginals):
    out = []
    for method in config.methods:
        if method == "hala":
            for k in range(config.hala_ensemble):
                seed = config.hala_seed + k
                label = "hala" if config.hala_ensemble == 1 else f"hala[{seed}]"
                out.append((label, reconstruct(marginals, "hala", seed=seed)))
        else:
            out.append((method, reconstruct(marginals, method)))
    return out


def _fmt(v):
    if v is None:
        return "NaN"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run_pipeline(config: RunConfig) -> StressReport:
    """Run every (network, theta, beta) combination and write the reports.

    With ``output_dir`` set, writes ``report.json``, ``stats.csv``,
    ``hierarchies.csv`` and, if requested, one graph file per network for
    both the exposure and the interdependency matrix.
    """
    records = parse_banks(config.banks_path)
    if not records:
        raise InputError("no banks in input")
    ids = [r.bank_id for r in records]
    countries = [r.country for r in records]
    if config.scenario_path:
        shock = parse_scenario(config.scenario_path)
    else:
        shock = ShockScenario.unit(CATALOG.m, "baseline")
    marginals = derive_marginals(records)

    systems = [calibrate(records, x, label) for label, x in _networks(config, marginals)]

    networks, cascades = [], []
    stats_buf = io.StringIO()
    stats_w = csv.writer(stats_buf, lineterminator="\n")
    stats_w.writerow(["network", "method", "seed", *FIELDS])
    hier_buf = io.StringIO()
    hier_w = csv.writer(hier_buf, lineterminator="\n")
    hier_w.writerow(["network", "theta", "beta", "level", "name", "banks"])

    for sys_ in systems:
        x = sys_.exposures
        stats = network_statistics(x, config.link_threshold).as_row()
        stats_w.writerow([sys_.label, x.method, "" if x.seed is None else x.seed, *(_fmt(stats[f]) for f in FIELDS)])
        gap = sys_.model_equity - sys_.reported_equity
        worst = int(np.argmax(np.abs(gap)))
        log.info(
            "%s: model vs reported equity, max gap %.6g at %s (%.3g%%)",
            sys_.label, gap[worst], ids[worst], 100 * gap[worst] / sys_.reported_equity[worst],
        )
        networks.append({
            "network": sys_.label,
            "method": x.method,
            "seed": x.seed,
            "stats": stats,
            "calibration": [
                {
                    "bank_id": ids[i],
                    "reported_equity": float(sys_.reported_equity[i]),
                    "model_equity": float(sys_.model_equity[i]),
                    "difference": float(gap[i]),
                }
                for i in range(len(ids))
            ],
        })
        v0 = sys_.reported_equity if config.threshold_basis == "reported" else sys_.model_equity
        for theta in config.theta_grid:
            for beta in config.beta_grid:
                res = run_cascade(sys_.interdependency, sys_.portfolio, shock, FailureParams(theta, beta, v0))
                levels = res.named_hierarchy(ids)
                cascades.append({
                    "network": sys_.label,
                    "method": x.method,
                    "seed": x.seed,
                    "theta": theta,
                    "beta": beta,
                    "terminated_at": res.terminated_at,
                    "hierarchy": levels,
                    "failed": [ids[i] for i in sorted(res.failed)],
                })
                if not levels:
                    hier_w.writerow([sys_.label, repr(theta), repr(beta), 0, "No Failure", ""])
                for k, level in enumerate(levels, 1):
                    name = (LEVEL_NAMES[k - 1] if k <= len(LEVEL_NAMES) else f"Level {k}") + " Failure"
                    hier_w.writerow([sys_.label, repr(theta), repr(beta), k, name, "; ".join(level)])

    ensembles = []
    if "hala" in config.methods and config.hala_ensemble > 1:
        for theta in config.theta_grid:
            for beta in config.beta_grid:
                counts = Counter(
                    tuple(c["failed"]) for c in cascades
                    if c["method"] == "hala" and c["theta"] == theta and c["beta"] == beta
                )
                ensembles.append({
                    "theta": theta,
                    "beta": beta,
                    "runs": config.hala_ensemble,
                    "frequencies": [
                        {"failed": list(k), "count": v}
                        for k, v in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
                    ],
                })

    data = {
        "schema_version": 1,
        "provenance": {
            "tool": "contagion",
            "version": __version__,
            "config": config.echo(),
            "seeds": [s.exposures.seed for s in systems if s.exposures.seed is not None],
            "inputs": {
                "banks_sha256": _digest(config.banks_path),
                "scenario_sha256": _digest(config.scenario_path) if config.scenario_path else None,
            },
        },
        "banks": [{"bank_id": b, "country": c} for b, c in zip(ids, countries)],
        "scenario": {
            "label": shock.label,
            "factors": {code: float(f) for code, f in zip(CATALOG.external_codes, shock.factors)},
        },
        "networks": networks,
        "cascades": cascades,
        "ensembles": ensembles,
    }
    jsonschema.validate(data, report_schema())
    report = StressReport(data, stats_buf.getvalue(), hier_buf.getvalue(), systems)

    if config.output_dir:
        os.makedirs(config.output_dir, exist_ok=True)
        for name, text in (
            ("report.json", report.to_json()),
            ("stats.csv", report.stats_csv),
            ("hierarchies.csv", report.hierarchy_csv),
        ):
            with open(os.path.join(config.output_dir, name), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        if config.export:
            for sys_ in systems:
                stem = sys_.label.replace("[", "_").replace("]", "")
                for kind, mat in (("exposures", sys_.exposures), ("interdependency", sys_.interdependency)):
                    export_graph(
                        mat,
                        os.path.join(config.output_dir, f"{stem}_{kind}.{config.export}"),
                        config.export,
                        bank_ids=ids,
                        equity=sys_.reported_equity,
                        country=countries,
                        link_threshold=config.link_threshold if kind == "exposures" else 0.0,
                    )
    return report

"""Command line entry point: ``contagion --banks banks.csv --scenario adverse.csv --out results/``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O error.
Log verbosity follows the ``CONTAGION_LOG`` environment variable (a logging
level name, default ``WARNING``); logs go to standard error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .errors import InputError, NumericalError
from .export import FORMATS
from .reconstruct import METHODS

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("contagion")


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _methods(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in items if t not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
    return items


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="contagion",
        description="Reconstruct interbank networks and trace failure hierarchies under a price shock.",
    )
    p.add_argument("--banks", required=True, help="bank balance sheets (banks.csv)")
    p.add_argument("--scenario", help="per-class price factors (scenario.csv); omit for no shock")
    p.add_argument("--methods", type=_methods, default=list(METHODS),
                   help="comma-separated subset of anan,hala,maxe (default: all)")
    p.add_argument("--theta", type=_floats, default=[0.971, 0.973],
                   help="comma-separated failure threshold fractions (default: 0.971,0.973)")
    p.add_argument("--beta", type=_floats, default=[0.3, 0.8],
                   help="comma-separated failure cost coefficients (default: 0.3,0.8)")
    p.add_argument("--seed", type=int, default=0, help="seed of the first hala realization")
    p.add_argument("--ensemble", type=int, default=1, help="number of hala realizations")
    p.add_argument("--threshold-basis", choices=("reported", "model"), default="reported",
                   help="baseline equity for thresholds: reported figures or model equity A D p")
    p.add_argument("--link-threshold", type=float, default=0.0,
                   help="exposures at or below this amount do not count as links")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--export", choices=FORMATS, help="also write graph files in this format")
    return p


def _setup_logging():
    level = os.environ.get("CONTAGION_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.captureWarnings(True)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging()
    from .pipeline import RunConfig, run_pipeline

    try:
        config = RunConfig(
            banks_path=args.banks,
            scenario_path=args.scenario,
            methods=tuple(args.methods),
            hala_seed=args.seed,
            hala_ensemble=args.ensemble,
            theta_grid=tuple(args.theta),
            beta_grid=tuple(args.beta),
            threshold_basis=args.threshold_basis,
            link_threshold=args.link_threshold,
            output_dir=args.out,
            export=args.export,
        )
        report = run_pipeline(config)
    except InputError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INPUT
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    log.info("wrote %d cascade entries to %s", len(report.data["cascades"]), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

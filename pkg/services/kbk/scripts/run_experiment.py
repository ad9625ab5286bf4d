"""Command-line entry point for single scenario runs and batches.

    python -m services.kbk.scripts.run_experiment --scenario soliton-test
    python -m services.kbk.scripts.run_experiment --batch sweeps.cfg --out runs/

Exit codes: 0 ok, 2 invalid configuration, 3 output failure, 4 blow-up,
5 under-resolved (DFT tail >= 1e-6).
"""

import argparse
import json
import logging
import sys
from typing import Any, Sequence

from services.kbk.core.config import configure_logging, settings
from services.kbk.core.run_outputs import OutputError
from services.kbk.core.scenario_config import SCENARIO_DEFAULTS, build_config, load_config_file
from services.kbk.core.scenario_runner import EXIT_CONFIG, EXIT_OUTPUT, run_batch, run_scenario

logger = logging.getLogger(__name__)

FLAG_FIELDS = ("scenario", "L", "N", "T", "Nt", "C", "lam", "mu", "A", "eps",
               "snapshot_count", "dealias", "output_dir")


def _count(raw: str) -> int:
    """Integer, also accepting 2^k."""
    raw = raw.strip()
    if raw.startswith("2^"):
        return 2 ** int(raw[2:])
    return int(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="KBK pseudospectral experiments")
    parser.add_argument("--scenario", choices=sorted(SCENARIO_DEFAULTS))
    parser.add_argument("--L", type=float, help="half-period scale: x in L*[-pi, pi)")
    parser.add_argument("--N", type=_count, help="Fourier modes (power of two, 2^k accepted)")
    parser.add_argument("--T", type=float, help="final time")
    parser.add_argument("--Nt", type=_count, help="number of time steps")
    parser.add_argument("--C", type=float, help="soliton velocity")
    parser.add_argument("--lambda", dest="lam", type=float, help="scaling of v")
    parser.add_argument("--mu", type=float, help="scaling of eta")
    parser.add_argument("--A", type=float, help="Gaussian amplitude")
    parser.add_argument("--eps", type=float, help="dispersion scale")
    parser.add_argument("--snapshots", dest="snapshot_count", type=int)
    parser.add_argument("--dealias", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--out", dest="output_dir", help=f"default {settings.output_dir}")
    parser.add_argument("--config", help="key=value file with one scenario")
    parser.add_argument("--batch", help="key=value file, scenarios separated by blank lines")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--log-level", default=None)
    return parser


def _flags(args: argparse.Namespace) -> dict[str, Any]:
    return {name: getattr(args, name) for name in FLAG_FIELDS if getattr(args, name) is not None}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    flags = _flags(args)
    try:
        if args.batch:
            configs = [build_config(block, flags) for block in load_config_file(args.batch)]
            rows = run_batch(configs, workers=args.workers, output_dir=args.output_dir)
            for row in rows:
                print(json.dumps(row.as_dict(), sort_keys=True))
            return max(row.exit_code for row in rows)

        file_values: dict[str, Any] = {}
        if args.config:
            blocks = load_config_file(args.config)
            if len(blocks) > 1:
                raise ValueError(f"{args.config} holds {len(blocks)} scenarios; use --batch")
            file_values = blocks[0]
        result = run_scenario(build_config(file_values, flags))
        print(json.dumps({k: result.summary[k] for k in ("run_dir", "status", "exit_code")}))
        return result.exit_code
    except OutputError as e:
        logger.error("Output failure: %s", e)
        return EXIT_OUTPUT
    except ValueError as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

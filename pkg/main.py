"""
Mobile-agent itinerary planning benchmark.
Command-line entry point: runs the reproduction scenarios and writes CSV
tables plus a gnuplot script.

    python main.py simulate --config experiment.conf --scenario both --out results/
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from mip_sim.config import ExperimentConfig, build_config, config, load_config
from mip_sim.errors import ConfigError, SimulationError
from mip_sim.experiments import ExperimentRunner, Scenario
from mip_sim.logger import setup_logging
from mip_sim.reporter import Reporter

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_SIMULATION_ERROR = 2

logger = logging.getLogger("MipSim.Main")


def parse_seeds(raw: str) -> List[int]:
    """`30` means seeds 0..29; `3,5,8` lists seeds explicitly"""
    if "," in raw:
        return [int(part) for part in raw.split(",") if part.strip()]
    count = int(raw)
    if count < 1:
        raise ValueError("seed count must be positive")
    return list(range(count))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mip-sim", description=__doc__.strip().splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Run reproduction scenarios")
    simulate.add_argument("--config", help="Experiment file (key = value lines); defaults if omitted")
    simulate.add_argument("--scenario", choices=[s.value for s in Scenario], default=Scenario.BOTH.value)
    simulate.add_argument("--out", help="Output directory (default: output_path from the config)")
    simulate.add_argument("--planner", action="append", help="Planner to run; repeat for several")
    simulate.add_argument("--seeds", help="Seed count or comma-separated seed list")
    simulate.add_argument("--k", help="Partition count or 'auto'")
    simulate.add_argument("--ma-dpt", help="GIGM-MIP payload threshold in bits or 'auto'")
    simulate.add_argument("--workers", type=int, help="Worker processes for independent trials")
    simulate.add_argument("--log-level", help="Logging level (default: MIP_LOG_LEVEL or INFO)")
    return parser


def apply_overrides(experiment: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    overrides: Dict[str, Any] = {}
    if args.planner:
        overrides["planners"] = args.planner
    if args.seeds:
        try:
            overrides["seeds"] = parse_seeds(args.seeds)
        except ValueError as e:
            raise ConfigError(str(e), field="seeds") from e
    if args.k:
        overrides["K"] = args.k
    if args.ma_dpt:
        overrides["ma_dpt"] = args.ma_dpt
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out:
        overrides["output_path"] = args.out
    if not overrides:
        return experiment
    return build_config({**experiment.model_dump(exclude_unset=True), **overrides})


def simulate(args: argparse.Namespace) -> int:
    try:
        experiment = load_config(args.config) if args.config else build_config({})
        experiment = apply_overrides(experiment, args)
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG_ERROR

    runner = ExperimentRunner(experiment)
    try:
        results = runner.run(Scenario(args.scenario))
        written = Reporter(experiment.output_path).write(results)
    except SimulationError as e:
        logger.error("Simulation failed: %s", e)
        return EXIT_SIMULATION_ERROR
    except OSError as e:
        logger.error("Could not write results: %s", e)
        return EXIT_SIMULATION_ERROR

    for path in written:
        logger.info("Output: %s", path)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    config.reload()

    args = build_parser().parse_args(argv)
    if args.log_level:
        config.set("log_level", args.log_level)
    setup_logging(config.get("log_level", "INFO"), config.get("log_dir"))

    status = config.validate_config()
    for warning in status["warnings"]:
        logger.warning(warning)
    if not status["valid"]:
        for issue in status["issues"]:
            logger.error("Settings error: %s", issue)
        return EXIT_CONFIG_ERROR

    if args.command == "simulate":
        return simulate(args)
    return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""
Trend reproduction check
Runs both scenarios with the default setup and reports the directional
comparisons between CMIP, GIGM-MIP and CL-MIP.
"""
import json
import logging
import os
import sys

# Add paths for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mip_sim.config import build_config, load_config
from mip_sim.experiments import ExperimentRunner, Scenario, trend_report
from mip_sim.logger import setup_logging

logger = logging.getLogger("MipSim.TrendCheck")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    setup_logging(os.getenv("MIP_LOG_LEVEL", "INFO"))
    experiment = load_config(argv[0]) if argv else build_config({})

    results = ExperimentRunner(experiment).run(Scenario.BOTH)
    report = trend_report(results[Scenario.SOURCES], results[Scenario.AGGREGATION])

    print(json.dumps(report, indent=2, sort_keys=True, default=str))
    failed = [name for name, check in report.items() if not check["passed"]]
    if failed:
        logger.warning("Trend checks not reproduced: %s", ", ".join(failed))
        return 1
    logger.info("All %d trend checks reproduced", len(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())

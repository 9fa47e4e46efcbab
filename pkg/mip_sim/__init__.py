"""
mip_sim: itinerary planning and simulation for mobile-agent data gathering
in wireless sensor networks.
"""

from .config import ExperimentConfig, load_config
from .experiments import ExperimentRunner, run_vary_aggregation, run_vary_sources
from .metrics import event_to_sink_throughput, task_duration, total_energy
from .network import build_topology, deploy_connected, deploy_nodes, hop_path, select_sources
from .planners import plan, plan_clmip, plan_cmip, plan_gigm
from .reporter import emit_csv, emit_plot_script
from .simulator import simulate_agent, simulate_mission

__version__ = "1.0.0"
__all__ = [
    "ExperimentConfig",
    "ExperimentRunner",
    "build_topology",
    "deploy_connected",
    "deploy_nodes",
    "emit_csv",
    "emit_plot_script",
    "event_to_sink_throughput",
    "hop_path",
    "load_config",
    "plan",
    "plan_clmip",
    "plan_cmip",
    "plan_gigm",
    "run_vary_aggregation",
    "run_vary_sources",
    "select_sources",
    "simulate_agent",
    "simulate_mission",
    "task_duration",
    "total_energy",
]

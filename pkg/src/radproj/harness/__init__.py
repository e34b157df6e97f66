"""Sweep orchestration, reports and the command line."""

from .config import ConfigError, SweepConfig, smoke_config
from .runner import cell_seed, run_hunt, run_stats, run_verify

__all__ = ["ConfigError", "SweepConfig", "cell_seed", "run_hunt", "run_stats", "run_verify", "smoke_config"]

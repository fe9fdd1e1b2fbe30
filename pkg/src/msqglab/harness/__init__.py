"""Config ingestion, scenario runner and CLI."""
from .config import SCENARIOS, RunConfig, validate_config
from .scenarios import RunReport, run_scenario

__all__ = ["SCENARIOS", "RunConfig", "RunReport", "run_scenario", "validate_config"]

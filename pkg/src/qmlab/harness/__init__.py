from .config import ConfigError, ScenarioConfig, dumps_config, load_config, loads_config
from .report import Check, RunReport
from .cli import main, run

__all__ = ["Check", "ConfigError", "RunReport", "ScenarioConfig", "dumps_config", "load_config", "loads_config", "main", "run"]

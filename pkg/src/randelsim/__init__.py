"""Discrete-event simulator for RAN-delegated 5G core control decisions."""

from .harness import compare_designs, run_scenario
from .kernel import Kernel
from .metrics import MetricsReport
from .scenario import (ScenarioConfig, ScenarioError, load_preset,
                       load_scenario, preset_names)
from .simulation import Simulation

__all__ = [
    "Kernel",
    "MetricsReport",
    "ScenarioConfig",
    "ScenarioError",
    "Simulation",
    "compare_designs",
    "load_preset",
    "load_scenario",
    "preset_names",
    "run_scenario",
]

__version__ = "0.1.0"

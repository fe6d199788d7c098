from .experiments import ExperimentName, ExperimentTable, emit_csv, run_ensemble, run_experiment
from .simulation_workflow import Simulation, load_workload, run_single

__all__ = [
    "ExperimentName",
    "ExperimentTable",
    "Simulation",
    "emit_csv",
    "load_workload",
    "run_ensemble",
    "run_experiment",
    "run_single",
]

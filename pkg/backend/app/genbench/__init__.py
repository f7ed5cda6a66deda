"""
Seeded instance generators and the benchmark harness.

Public API:
- GenConfig, GroundTruth, load_config
- generate_name_instance / generate_hierarchical_instance /
  generate_relational_instance / generate_oo_instance / generate_online_scenario
- generate (dispatch on model tag)
- InstanceTraverser, RunReport, run_instance, bench_directory, write_reports
"""

from .config import GenConfig, GroundTruth, dump_json, load_config, phase_rngs
from .name_gen import generate_name_instance
from .hier_gen import generate_hierarchical_instance
from .rel_gen import generate_relational_instance
from .oo_gen import generate_oo_instance
from .online_gen import generate_online_scenario
from .bench import InstanceTraverser, RunReport, bench_directory, format_reports, run_instance, write_reports

GENERATORS = {
    "name": generate_name_instance,
    "hierarchical": generate_hierarchical_instance,
    "relational": generate_relational_instance,
    "oo": generate_oo_instance,
    "online": generate_online_scenario,
}


def generate(model: str, cfg: GenConfig):
    """Returns (instance or event list, GroundTruth)."""
    try:
        generator = GENERATORS[model]
    except KeyError as exc:
        raise ValueError(f"No generator for model {model!r}") from exc
    return generator(cfg)


__all__ = [
    "GenConfig",
    "GroundTruth",
    "dump_json",
    "load_config",
    "phase_rngs",
    "generate_name_instance",
    "generate_hierarchical_instance",
    "generate_relational_instance",
    "generate_oo_instance",
    "generate_online_scenario",
    "GENERATORS",
    "generate",
    "InstanceTraverser",
    "RunReport",
    "bench_directory",
    "run_instance",
    "format_reports",
    "write_reports",
]

from .generators import b3_instance, gen_b1, gen_b2, gen_b3, generate
from .harness import CSV_HEADER, BenchConfig, format_summary, instance_seed, run_suite, summarize, to_csv

__all__ = [
    "BenchConfig", "CSV_HEADER", "b3_instance", "format_summary", "gen_b1", "gen_b2",
    "gen_b3", "generate", "instance_seed", "run_suite", "summarize", "to_csv",
]

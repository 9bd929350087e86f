"""Experiment harness: run strategies over generated instances, emit CSV
rows and a summary table."""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .generators import generate

CSV_HEADER = ("family", "size", "instance", "strategy", "seed", "time_s", "solved",
              "n_rules", "candidates", "nodes", "nogoods")


@dataclass
class BenchConfig:
    family: str
    sizes: list
    instances: int = 20
    seed: int = 0
    strategies: list = field(default_factory=lambda: ["fc", "sa", "baseline"])
    timeout: float = 600.0
    max_n: int = 8
    max_skolems: int = 3
    timing: bool = True
    gen_kw: dict = field(default_factory=dict)


def instance_seed(seed, family, size, i) -> str:
    return f"{seed}:{family}:{size}:{i}"


def threads() -> int:
    try:
        return max(1, int(os.environ.get("MILKIT_THREADS", "1")))
    except ValueError:
        return 1


def _run_one(cfg: BenchConfig, size, i, strategy) -> dict:
    from ..solver import solve

    problem = generate(cfg.family, size, instance_seed(cfg.seed, cfg.family, size, i), **cfg.gen_kw)
    res = solve(problem, strategy, max_n=cfg.max_n, max_skolems=cfg.max_skolems,
                timeout=cfg.timeout)
    st = res.stats
    return {
        "family": cfg.family,
        "size": size,
        "instance": i,
        "strategy": strategy,
        "seed": cfg.seed,
        "time_s": f"{res.time_s:.3f}" if cfg.timing else "",
        "solved": int(res.solved),
        "n_rules": res.size if res.solved else "",
        "candidates": st.candidates,
        "nodes": st.nodes,
        "nogoods": st.nogoods,
        "status": res.status,
        "_time": res.time_s,
    }


def run_suite(cfg: BenchConfig, workers=None) -> list:
    """One row per (size, instance, strategy), in that order."""
    jobs = [(s, i, st) for s in cfg.sizes for i in range(cfg.instances) for st in cfg.strategies]
    workers = threads() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_run_one, cfg, *j) for j in jobs]
            return [f.result() for f in futs]
    return [_run_one(cfg, *j) for j in jobs]


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_HEADER, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def summarize(rows) -> list:
    """Per (size, strategy): mean time, standard error, timeouts, solved
    count, mean solution size and mean candidate count."""
    groups = {}
    for r in rows:
        groups.setdefault((r["size"], r["strategy"]), []).append(r)
    out = []
    for (size, strategy), rs in groups.items():
        times = [r["_time"] for r in rs]
        m = sum(times) / len(times)
        se = 0.0
        if len(times) > 1:
            var = sum((t - m) ** 2 for t in times) / (len(times) - 1)
            se = math.sqrt(var) / math.sqrt(len(times))
        sizes = [r["n_rules"] for r in rs if r["solved"]]
        out.append({
            "size": size,
            "strategy": strategy,
            "runs": len(rs),
            "mean_s": m,
            "stderr_s": se,
            "timeouts": sum(r["status"] == "timeout" for r in rs),
            "solved": len(sizes),
            "mean_rules": sum(sizes) / len(sizes) if sizes else None,
            "mean_candidates": sum(r["candidates"] for r in rs) / len(rs),
        })
    return out


def format_summary(summary, timing: bool = True) -> str:
    lines = [f"{'size':>5} {'strategy':<9} {'runs':>4} {'mean_s':>9} {'stderr':>8} "
             f"{'t/o':>4} {'solved':>6} {'rules':>6} {'cands':>8}"]
    for s in summary:
        mean = f"{s['mean_s']:9.3f}" if timing else f"{'-':>9}"
        se = f"{s['stderr_s']:8.3f}" if timing else f"{'-':>8}"
        rules = f"{s['mean_rules']:6.2f}" if s["mean_rules"] is not None else f"{'-':>6}"
        lines.append(f"{s['size']:>5} {s['strategy']:<9} {s['runs']:>4} {mean} {se} "
                     f"{s['timeouts']:>4} {s['solved']:>6} {rules} {s['mean_candidates']:8.1f}")
    return "\n".join(lines) + "\n"

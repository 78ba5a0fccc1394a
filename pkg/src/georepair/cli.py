"""Command-line front end: solve, bench, oracle and gen subcommands.

Artifacts per solve: ``schedule.csv`` (one row per repaired target with
impulse vectors and timing), ``convergence.csv`` (per-generation best and
average fitness) and ``summary.json``. Exit codes: 0 when the best plan is
feasible, 2 when the best plan violates a constraint, 1 on errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path

from .planning import Evaluation, InstanceTooLarge, exhaustive_solve
from .scenarios import ParseError, ValidationError, load, random_scenario, save
from .search import (
    GaParams,
    LnsParams,
    SolveResult,
    solve_ga,
    solve_lambert_ga,
    solve_lns_aga,
)

ALGORITHMS = ("lns-aga", "ga", "lambert-ga", "oracle")

SCHEDULE_COLUMNS = [
    "servicer", "target",
    "impulse1_x_mps", "impulse1_y_mps", "impulse1_z_mps",
    "impulse2_x_mps", "impulse2_y_mps", "impulse2_z_mps",
    "impulse1_time", "impulse1_time_iso",
    "impulse2_time", "impulse2_time_iso",
    "coast_time_s", "maneuver_time_s", "leg_dv_mps",
]


@dataclass
class RunConfig:
    """Solver selection and parameter overrides for one CLI invocation."""

    algorithm: str = "lns-aga"
    seed: int = 1
    runs: int = 1
    ga: GaParams = field(default_factory=GaParams)
    lns: LnsParams = field(default_factory=LnsParams)
    max_revolutions: int = 4
    slack_rule: str = "largest"
    jobs: int = 1
    out_dir: Path = Path(".")

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass
class BenchSummary:
    """Tables-style statistics of repeated solver executions."""

    algorithm: str
    runs: int
    min_dv: float
    avg_dv: float
    std_dv: float
    feasible_proportion: float
    min_wall_s: float
    avg_wall_s: float
    max_wall_s: float

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm, "runs": self.runs,
            "min_dv_mps": self.min_dv, "avg_dv_mps": self.avg_dv,
            "std_dv_mps": self.std_dv,
            "feasible_proportion": self.feasible_proportion,
            "min_wall_s": self.min_wall_s, "avg_wall_s": self.avg_wall_s,
            "max_wall_s": self.max_wall_s,
        }


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="georepair",
        description="Plan multi-servicer GEO repair missions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_flags(p, multi_algo=False):
        if multi_algo:
            p.add_argument("--algo", default="lns-aga,ga,lambert-ga",
                           help="comma-separated algorithms to benchmark")
        else:
            p.add_argument("--algo", default="lns-aga", choices=ALGORITHMS)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--runs", type=int, default=1)
        p.add_argument("--pop-size", type=int, default=100)
        p.add_argument("--min-iters", type=int, default=100)
        p.add_argument("--stall-iters", type=int, default=50)
        p.add_argument("--pc-hi", type=float, default=0.9)
        p.add_argument("--pc-lo", type=float, default=0.7)
        p.add_argument("--pm-hi", type=float, default=0.2)
        p.add_argument("--pm-lo", type=float, default=0.01)
        p.add_argument("--phi", type=float, default=1.0,
                       help="deadline penalty weight per minute late")
        p.add_argument("--gamma", type=float, default=10.0,
                       help="budget penalty weight per m/s over")
        p.add_argument("--remove-rate", type=float, default=0.3)
        p.add_argument("--elite-rate", type=float, default=0.1)
        p.add_argument("--lns-iters", type=int, default=2)
        p.add_argument("--beta", type=float, default=0.5)
        p.add_argument("--det-p", type=float, default=6.0)
        p.add_argument("--slack-rule", default="largest",
                       choices=("largest", "smallest"))
        p.add_argument("--max-rev", type=int, default=4,
                       help="revolution cap for the exhaustive oracle")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", type=Path, default=Path("."))

    p_solve = sub.add_parser("solve", help="solve one scenario file")
    p_solve.add_argument("scenario", type=Path)
    add_solver_flags(p_solve)

    p_bench = sub.add_parser("bench",
                             help="run repeated-seed benchmark statistics")
    p_bench.add_argument("scenario", type=Path)
    add_solver_flags(p_bench, multi_algo=True)

    p_oracle = sub.add_parser("oracle",
                              help="exhaustive optimum of a small instance")
    p_oracle.add_argument("scenario", type=Path)
    p_oracle.add_argument("--max-rev", type=int, default=4)
    p_oracle.add_argument("--phi", type=float, default=1.0)
    p_oracle.add_argument("--gamma", type=float, default=10.0)
    p_oracle.add_argument("--out", type=Path, default=Path("."))

    p_gen = sub.add_parser("gen", help="generate a random scenario file")
    p_gen.add_argument("out_path", type=Path)
    p_gen.add_argument("--targets", type=int, required=True)
    p_gen.add_argument("--servicers", type=int, required=True)
    p_gen.add_argument("--days", type=float, required=True)
    p_gen.add_argument("--seed", type=int, default=1)
    return parser


def _config_from_args(args) -> RunConfig:
    ga = GaParams(population_size=args.pop_size,
                  min_iterations=args.min_iters,
                  stall_iterations=args.stall_iters,
                  pc_hi=args.pc_hi, pc_lo=args.pc_lo,
                  pm_hi=args.pm_hi, pm_lo=args.pm_lo,
                  phi=args.phi, gamma=args.gamma)
    lns = LnsParams(remove_rate=args.remove_rate,
                    determinism_p=args.det_p, beta=args.beta,
                    lns_iterations=args.lns_iters,
                    elite_fraction=args.elite_rate)
    algo = args.algo if args.algo in ALGORITHMS else "lns-aga"
    return RunConfig(algorithm=algo, seed=args.seed, runs=args.runs,
                     ga=ga, lns=lns, max_revolutions=args.max_rev,
                     slack_rule=args.slack_rule, jobs=args.jobs,
                     out_dir=args.out)


def _run_one(scenario, algorithm: str, config: RunConfig, seed: int):
    """One solver execution: (SolveResult-like, evaluation, wall seconds)."""
    start = time.perf_counter()
    if algorithm == "lns-aga":
        result = solve_lns_aga(scenario, config.ga, config.lns, seed,
                               config.slack_rule)
    elif algorithm == "ga":
        result = solve_ga(scenario, config.ga, seed, config.slack_rule)
    elif algorithm == "lambert-ga":
        result = solve_lambert_ga(scenario, config.ga, seed)
    elif algorithm == "oracle":
        plan, evaluation = exhaustive_solve(scenario, config.max_revolutions,
                                            config.ga.phi, config.ga.gamma)
        result = SolveResult(best_plan=plan, best_evaluation=evaluation,
                             history=[(evaluation.fitness,
                                       evaluation.fitness)],
                             generations_run=0, seed=seed)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(algorithm)
    return result, time.perf_counter() - start


def _fmt_time(epoch, seconds: float, iso: bool = False) -> str:
    stamp = epoch + timedelta(seconds=seconds)
    if iso:
        return stamp.strftime("%Y-%m-%dT%H:%M:%SZ")
    return stamp.strftime("%m/%d %H:%M:%S")


def write_schedule(path: Path, scenario, evaluation: Evaluation):
    names = {s.id: s.name for s in scenario.servicers}
    names_t = {t.id: t.name for t in scenario.targets}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCHEDULE_COLUMNS)
        for leg in evaluation.leg_details:
            sol = leg.solution
            writer.writerow([
                names[leg.servicer_id], names_t[leg.target_id],
                f"{sol.impulse1[0]:.6f}", f"{sol.impulse1[1]:.6f}",
                f"{sol.impulse1[2]:.6f}",
                f"{sol.impulse2[0]:.6f}", f"{sol.impulse2[1]:.6f}",
                f"{sol.impulse2[2]:.6f}",
                _fmt_time(scenario.epoch, sol.t1),
                _fmt_time(scenario.epoch, sol.t1, iso=True),
                _fmt_time(scenario.epoch, sol.t2),
                _fmt_time(scenario.epoch, sol.t2, iso=True),
                f"{sol.coast_time:.3f}", f"{sol.phase_time:.3f}",
                f"{sol.total_dv:.6f}",
            ])


def write_convergence(path: Path, result: SolveResult):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "best_fitness", "avg_fitness"])
        for gen, (best, avg) in enumerate(result.history):
            writer.writerow([gen, f"{best:.6f}", f"{avg:.6f}"])


def _summary_payload(scenario, algorithm, result: SolveResult,
                     config: RunConfig, wall: float) -> dict:
    ev = result.best_evaluation
    return {
        "algorithm": algorithm,
        "seed": result.seed,
        "feasible": ev.feasible,
        "fitness": ev.fitness,
        "total_dv_mps": ev.total_dv,
        "per_servicer_dv_mps": {
            s.name: dv for s, dv in zip(scenario.servicers,
                                        ev.per_servicer_dv)},
        "deadline_penalty_s": ev.deadline_penalty,
        "budget_penalty_mps": ev.budget_penalty,
        "generations": result.generations_run,
        "runtime_s": wall,
        "routes": [{
            "servicer": scenario.servicer(r.servicer_id).name,
            "targets": [scenario.target(t).name for t in r.target_sequence],
            "revolutions": list(r.revolutions),
        } for r in result.best_plan.routes],
        "params": {
            "population_size": config.ga.population_size,
            "min_iterations": config.ga.min_iterations,
            "stall_iterations": config.ga.stall_iterations,
            "pc": [config.ga.pc_lo, config.ga.pc_hi],
            "pm": [config.ga.pm_lo, config.ga.pm_hi],
            "phi": config.ga.phi, "gamma": config.ga.gamma,
            "remove_rate": config.lns.remove_rate,
            "determinism_p": config.lns.determinism_p,
            "beta": config.lns.beta,
            "lns_iterations": config.lns.lns_iterations,
            "elite_fraction": config.lns.elite_fraction,
            "slack_rule": config.slack_rule,
        },
        "scenario": {
            "servicers": len(scenario.servicers),
            "targets": len(scenario.targets),
            "deadline_hours": scenario.deadline / 3600.0,
        },
    }


def cmd_solve(scenario_path: Path, config: RunConfig) -> int:
    scenario = load(scenario_path)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    result, wall = _run_one(scenario, config.algorithm, config, config.seed)
    write_schedule(config.out_dir / "schedule.csv", scenario,
                   result.best_evaluation)
    write_convergence(config.out_dir / "convergence.csv", result)
    payload = _summary_payload(scenario, config.algorithm, result, config,
                               wall)
    with open(config.out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    ev = result.best_evaluation
    print(f"{config.algorithm}: fitness {ev.fitness:.4f}, total dv "
          f"{ev.total_dv:.4f} m/s, feasible={ev.feasible}")
    return 0 if ev.feasible else 2


def _bench_worker(payload):
    scenario, algorithm, config, seed = payload
    result, wall = _run_one(scenario, algorithm, config, seed)
    ev = result.best_evaluation
    return {
        "algorithm": algorithm, "seed": seed, "fitness": ev.fitness,
        "total_dv_mps": ev.total_dv, "feasible": ev.feasible,
        "deadline_penalty_s": ev.deadline_penalty,
        "budget_penalty_mps": ev.budget_penalty,
        "generations": result.generations_run, "wall_s": wall,
    }


def cmd_bench(scenario_path: Path, config: RunConfig,
              algorithms=None) -> tuple[list[BenchSummary], int]:
    scenario = load(scenario_path)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    if algorithms is None:
        algorithms = [config.algorithm]
    tasks = [(scenario, algo, config, config.seed + i)
             for algo in algorithms for i in range(config.runs)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_bench_worker, tasks))
    else:
        rows = [_bench_worker(t) for t in tasks]

    with open(config.out_dir / "runs.csv", "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)

    summaries = []
    for algo in algorithms:
        sub = [r for r in rows if r["algorithm"] == algo]
        dvs = [r["total_dv_mps"] for r in sub]
        walls = [r["wall_s"] for r in sub]
        mean = sum(dvs) / len(dvs)
        std = (math.sqrt(sum((d - mean) ** 2 for d in dvs) / (len(dvs) - 1))
               if len(dvs) > 1 else 0.0)
        summaries.append(BenchSummary(
            algorithm=algo, runs=len(sub), min_dv=min(dvs), avg_dv=mean,
            std_dv=std,
            feasible_proportion=sum(r["feasible"] for r in sub) / len(sub),
            min_wall_s=min(walls), avg_wall_s=sum(walls) / len(walls),
            max_wall_s=max(walls)))
    with open(config.out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump({"scenario": str(scenario_path), "seed": config.seed,
                   "runs": config.runs,
                   "algorithms": [s.as_dict() for s in summaries]},
                  fh, indent=2)
        fh.write("\n")
    with open(config.out_dir / "summary.csv", "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "runs", "min_dv_mps", "avg_dv_mps",
                         "std_dv_mps", "feasible_proportion", "min_wall_s",
                         "avg_wall_s", "max_wall_s"])
        for s in summaries:
            writer.writerow([s.algorithm, s.runs, f"{s.min_dv:.4f}",
                             f"{s.avg_dv:.4f}", f"{s.std_dv:.4f}",
                             f"{s.feasible_proportion:.3f}",
                             f"{s.min_wall_s:.2f}", f"{s.avg_wall_s:.2f}",
                             f"{s.max_wall_s:.2f}"])
    for s in summaries:
        print(f"{s.algorithm}: min {s.min_dv:.2f}, avg {s.avg_dv:.2f}, "
              f"std {s.std_dv:.2f}, feasible {s.feasible_proportion:.0%}")
    return summaries, 0


def cmd_oracle(scenario_path: Path, max_revolutions: int, out_dir: Path,
               phi: float = 1.0, gamma: float = 10.0) -> int:
    scenario = load(scenario_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    plan, evaluation = exhaustive_solve(scenario, max_revolutions, phi, gamma)
    result = SolveResult(best_plan=plan, best_evaluation=evaluation,
                         history=[(evaluation.fitness, evaluation.fitness)],
                         generations_run=0, seed=0)
    config = RunConfig(algorithm="oracle", max_revolutions=max_revolutions,
                       out_dir=out_dir)
    config.ga.phi, config.ga.gamma = phi, gamma
    write_schedule(out_dir / "schedule.csv", scenario, evaluation)
    payload = _summary_payload(scenario, "oracle", result, config, 0.0)
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"oracle: fitness {evaluation.fitness:.4f}, "
          f"feasible={evaluation.feasible}")
    return 0 if evaluation.feasible else 2


def cmd_gen(n_targets: int, n_servicers: int, duration_days: float,
            seed: int, out_path: Path) -> int:
    scenario = random_scenario(n_targets, n_servicers, duration_days, seed)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save(scenario, out_path)
    print(f"wrote {out_path} ({n_targets} targets, {n_servicers} servicers, "
          f"{duration_days} days)")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args.scenario, _config_from_args(args))
        if args.command == "bench":
            algos = [a.strip() for a in args.algo.split(",") if a.strip()]
            for a in algos:
                if a not in ALGORITHMS:
                    raise ValueError(f"unknown algorithm {a!r}")
            config = _config_from_args(args)
            _, code = cmd_bench(args.scenario, config, algos)
            return code
        if args.command == "oracle":
            return cmd_oracle(args.scenario, args.max_rev, args.out,
                              args.phi, args.gamma)
        if args.command == "gen":
            return cmd_gen(args.targets, args.servicers, args.days,
                           args.seed, args.out_path)
        raise ValueError(f"unknown command {args.command!r}")
    except (ParseError, ValidationError, InstanceTooLarge, OSError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

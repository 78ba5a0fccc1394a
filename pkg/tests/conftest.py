"""Shared builders for synthetic mission scenarios."""

from datetime import datetime, timezone

from georepair.astro import GEO, GeoOrbit
from georepair.planning import Scenario, Servicer, Target

EPOCH = datetime(2021, 3, 12, 4, 0, 0, tzinfo=timezone.utc)


def make_scenario(servicers, targets, deadline_s, constants=GEO):
    """Build a Scenario from (inc_deg, raan_deg, u_deg, dv_budget_mps) servicer
    tuples and (inc_deg, raan_deg, u_deg, repair_s) target tuples."""
    svc = [Servicer(i + 1, f"SSc{i + 1}",
                    GeoOrbit.from_degrees(inc, raan, u), budget)
           for i, (inc, raan, u, budget) in enumerate(servicers)]
    tgt = [Target(i + 1, f"T{i + 1:02d}",
                  GeoOrbit.from_degrees(inc, raan, u), repair)
           for i, (inc, raan, u, repair) in enumerate(targets)]
    return Scenario(epoch=EPOCH, deadline=deadline_s, servicers=svc,
                    targets=tgt, constants=constants)


def random_scenario_tuple(rng, n_targets, n_servicers, deadline_s,
                          budget=2000.0, repair_s=86400.0):
    servicers = [(rng.uniform(0, 10), rng.uniform(0, 360),
                  rng.uniform(0, 360), budget) for _ in range(n_servicers)]
    targets = [(rng.uniform(0, 10), rng.uniform(0, 360),
                rng.uniform(0, 360), repair_s) for _ in range(n_targets)]
    return make_scenario(servicers, targets, deadline_s)

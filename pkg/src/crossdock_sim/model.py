"""Crossdock order-picking model.

Orders arrive with exponential interarrival times and are routed to one
of two picking points (A, B) for either manual or automated fulfillment.
Manual orders prefer an idle skilled operative, fall back to an idle
unskilled one (slower by a fixed factor), and otherwise wait in the
point's shared manual FIFO queue. Automated orders queue at the point's
dispenser pool. The output measure is Total Usage Cost: busy, idle and
per-use charges summed over every resource pool.

Every stochastic draw belongs to one named source; in dedicated-streams
mode each source owns its own stream (the CRN discipline), in
default-stream mode all sources share one. Service times are drawn at
arrival so per-stream draw sequences do not depend on resource counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

from .errors import ConfigurationError
from .kernel import EventCalendar, ResourcePool
from .rng import (
    SHARED_SOURCE,
    DistributionSpec,
    exponential_inverse,
    stream_create,
    triangular_inverse,
)

POINTS = ("A", "B")
RESOURCE_CLASSES = ("skilled", "unskilled", "dispenser")

# Config fields an optimizer may vary; everything else is part of the
# experimental frame and must match across compared alternatives.
DECISION_FIELDS = ("skilled_per_point", "unskilled_per_point", "dispensers_per_point")

CRN_MODES = ("default_stream", "dedicated_streams")

# event codes for the run loop
_ARRIVAL = 0
_MANUAL_DONE = 1
_AUTO_DONE = 2


@dataclass(frozen=True)
class ClassRates:
    busy_rate: float  # currency per busy unit-hour
    idle_rate: float  # currency per idle unit-hour
    per_use: float  # currency per grant

    def to_dict(self) -> dict:
        return {
            "busy_rate": self.busy_rate,
            "idle_rate": self.idle_rate,
            "per_use": self.per_use,
        }


@dataclass(frozen=True)
class CostRates:
    skilled: ClassRates
    unskilled: ClassRates
    dispenser: ClassRates

    def for_class(self, resource_class: str) -> ClassRates:
        return getattr(self, resource_class)

    def to_dict(self) -> dict:
        return {c: self.for_class(c).to_dict() for c in RESOURCE_CLASSES}

    @classmethod
    def from_dict(cls, data: dict, problems: list[str]) -> "CostRates | None":
        if not isinstance(data, dict):
            problems.append("cost_rates: expected an object")
            return None
        unknown = set(data) - set(RESOURCE_CLASSES)
        if unknown:
            problems.append(f"cost_rates: unknown fields {sorted(unknown)}")
        rates = {}
        for c in RESOURCE_CLASSES:
            entry = data.get(c)
            if not isinstance(entry, dict):
                problems.append(f"cost_rates.{c}: missing or not an object")
                return None
            bad = set(entry) - {"busy_rate", "idle_rate", "per_use"}
            if bad:
                problems.append(f"cost_rates.{c}: unknown fields {sorted(bad)}")
                return None
            try:
                rates[c] = ClassRates(
                    float(entry["busy_rate"]),
                    float(entry["idle_rate"]),
                    float(entry["per_use"]),
                )
            except (KeyError, TypeError, ValueError):
                problems.append(
                    f"cost_rates.{c}: needs numeric busy_rate, idle_rate, per_use"
                )
                return None
            for name in ("busy_rate", "idle_rate", "per_use"):
                if getattr(rates[c], name) < 0:
                    problems.append(f"cost_rates.{c}.{name}: must be >= 0")
        if len(rates) != len(RESOURCE_CLASSES):
            return None
        return cls(**rates)


_CONFIG_FIELDS = (
    "arrival",
    "manual_service",
    "auto_service",
    "unskilled_factor",
    "p_auto",
    "p_point_A",
    "skilled_per_point",
    "unskilled_per_point",
    "dispensers_per_point",
    "cost_rates",
    "horizon",
    "crn_mode",
)


@dataclass(frozen=True)
class ModelConfig:
    """Full parameterization of the crossdock model.

    Times are simulation minutes; rates are currency per hour. The three
    *_per_point counts describe the symmetric baseline layout; the
    optimizer overrides them with an explicit `ResourceLayout`.
    """

    arrival: DistributionSpec
    manual_service: DistributionSpec
    auto_service: DistributionSpec
    unskilled_factor: float
    p_auto: float
    p_point_A: float
    skilled_per_point: int
    unskilled_per_point: int
    dispensers_per_point: int
    cost_rates: CostRates
    horizon: float
    crn_mode: str

    def validate(self) -> list[str]:
        problems = []
        problems += self.arrival.validate("arrival")
        if self.arrival.kind != "exponential":
            problems.append("arrival: must be exponential")
        problems += self.manual_service.validate("manual_service")
        if self.manual_service.kind != "triangular":
            problems.append("manual_service: must be triangular")
        problems += self.auto_service.validate("auto_service")
        if self.auto_service.kind != "triangular":
            problems.append("auto_service: must be triangular")
        if self.unskilled_factor < 1:
            problems.append("unskilled_factor: must be >= 1")
        if not 0 <= self.p_auto <= 1:
            problems.append("p_auto: must be in [0, 1]")
        if not 0 <= self.p_point_A <= 1:
            problems.append("p_point_A: must be in [0, 1]")
        for name in DECISION_FIELDS:
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                problems.append(f"{name}: must be a non-negative integer")
        if not self.horizon > 0:
            problems.append("horizon: must be > 0")
        if self.crn_mode not in CRN_MODES:
            problems.append(f"crn_mode: must be one of {CRN_MODES}")
        return problems

    def to_dict(self) -> dict:
        return {
            "arrival": self.arrival.to_dict(),
            "manual_service": self.manual_service.to_dict(),
            "auto_service": self.auto_service.to_dict(),
            "unskilled_factor": self.unskilled_factor,
            "p_auto": self.p_auto,
            "p_point_A": self.p_point_A,
            "skilled_per_point": self.skilled_per_point,
            "unskilled_per_point": self.unskilled_per_point,
            "dispensers_per_point": self.dispensers_per_point,
            "cost_rates": self.cost_rates.to_dict(),
            "horizon": self.horizon,
            "crn_mode": self.crn_mode,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        """Strict parse: unknown or missing fields are errors, and every
        problem found is reported in one message."""
        if not isinstance(data, dict):
            raise ConfigurationError("config: expected a JSON object")
        problems = []
        unknown = set(data) - set(_CONFIG_FIELDS)
        if unknown:
            problems.append(f"unknown fields {sorted(unknown)}")
        missing = set(_CONFIG_FIELDS) - set(data)
        if missing:
            problems.append(f"missing fields {sorted(missing)}")
        if problems:
            raise ConfigurationError("config: " + "; ".join(problems))

        dists = {}
        for field in ("arrival", "manual_service", "auto_service"):
            try:
                dists[field] = DistributionSpec.from_dict(data[field], field)
            except ConfigurationError as exc:
                problems.append(str(exc))
        rates = CostRates.from_dict(data["cost_rates"], problems)

        def number(field):
            v = data[field]
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                problems.append(f"{field}: must be a number")
                return 0.0
            return float(v)

        def count(field):
            v = data[field]
            if not isinstance(v, int) or isinstance(v, bool):
                problems.append(f"{field}: must be an integer")
                return 0
            return v

        config = None
        if not problems:
            config = cls(
                arrival=dists["arrival"],
                manual_service=dists["manual_service"],
                auto_service=dists["auto_service"],
                unskilled_factor=number("unskilled_factor"),
                p_auto=number("p_auto"),
                p_point_A=number("p_point_A"),
                skilled_per_point=count("skilled_per_point"),
                unskilled_per_point=count("unskilled_per_point"),
                dispensers_per_point=count("dispensers_per_point"),
                cost_rates=rates,
                horizon=number("horizon"),
                crn_mode=data["crn_mode"],
            )
            problems += config.validate()
        if problems:
            raise ConfigurationError("config: " + "; ".join(problems))
        return config

    def with_crn_mode(self, crn_mode: str) -> "ModelConfig":
        return replace(self, crn_mode=crn_mode)


@dataclass(frozen=True)
class ResourceLayout:
    """Per-point resource counts; may be asymmetric."""

    skilled_A: int
    skilled_B: int
    unskilled_A: int
    unskilled_B: int
    dispensers_A: int
    dispensers_B: int

    @classmethod
    def symmetric(cls, config: ModelConfig) -> "ResourceLayout":
        return cls(
            skilled_A=config.skilled_per_point,
            skilled_B=config.skilled_per_point,
            unskilled_A=config.unskilled_per_point,
            unskilled_B=config.unskilled_per_point,
            dispensers_A=config.dispensers_per_point,
            dispensers_B=config.dispensers_per_point,
        )

    @classmethod
    def from_totals(cls, dispensers: int, operatives: int) -> "ResourceLayout":
        """Distribute decision-variable totals over points.

        Dispensers go round-robin across points, A first. Operatives go
        round-robin over (A skilled, B skilled, A unskilled, B unskilled).
        """
        if dispensers < 0 or operatives < 0:
            raise ConfigurationError("resource totals must be >= 0")
        return cls(
            dispensers_A=(dispensers + 1) // 2,
            dispensers_B=dispensers // 2,
            skilled_A=(operatives + 3) // 4,
            skilled_B=(operatives + 2) // 4,
            unskilled_A=(operatives + 1) // 4,
            unskilled_B=operatives // 4,
        )

    def capacity(self, resource_class: str, point: str) -> int:
        field = {"dispenser": "dispensers"}.get(resource_class, resource_class)
        return getattr(self, f"{field}_{point}")

    def manual_total(self) -> int:
        return self.skilled_A + self.skilled_B + self.unskilled_A + self.unskilled_B

    def dispenser_total(self) -> int:
        return self.dispensers_A + self.dispensers_B


@dataclass(frozen=True)
class PoolStats:
    busy_time: float  # unit-minutes
    idle_time: float  # unit-minutes
    grants: int


@dataclass(frozen=True)
class ReplicationOutput:
    """One replication's cost plus audit counters."""

    total_usage_cost: float
    arrivals: int
    completions: int
    in_system_at_end: int
    pools: dict  # pool name -> PoolStats
    log: tuple | None = None  # optional event log, see run_replication


def total_usage_cost(pool_stats: dict, rates: CostRates) -> float:
    """Sum busy/idle/per-use charges over pools; times convert to hours.

    Pool names are "<class>_<point>", e.g. "skilled_A".
    """
    total = 0.0
    for name, stats in pool_stats.items():
        r = rates.for_class(name.rsplit("_", 1)[0])
        total += (
            r.busy_rate * stats.busy_time / 60.0
            + r.idle_rate * stats.idle_time / 60.0
            + r.per_use * stats.grants
        )
    return total


class CrossdockModel:
    """Executable model: validated config plus a concrete resource layout."""

    def __init__(self, config: ModelConfig, layout: ResourceLayout):
        self.config = config
        self.layout = layout

    def pool_capacities(self) -> dict:
        return {
            f"{cls}_{pt}": self.layout.capacity(cls, pt)
            for pt in POINTS
            for cls in RESOURCE_CLASSES
        }

    def run(self, master_seed: int, replication_index: int,
            collect_log: bool = False) -> ReplicationOutput:
        config = self.config
        log = [] if collect_log else None

        if config.crn_mode == "default_stream":
            shared = stream_create(master_seed, SHARED_SOURCE, replication_index)
            s_arrival = s_type = s_point = shared
            s_manual = {"A": shared, "B": shared}
            s_auto = {"A": shared, "B": shared}
        else:
            s_arrival = stream_create(master_seed, "arrival", replication_index)
            s_type = stream_create(master_seed, "order_type", replication_index)
            s_point = stream_create(master_seed, "point_choice", replication_index)
            s_manual = {
                p: stream_create(master_seed, f"manual_service_point_{p}", replication_index)
                for p in POINTS
            }
            s_auto = {
                p: stream_create(master_seed, f"auto_service_point_{p}", replication_index)
                for p in POINTS
            }

        skilled = {p: ResourcePool(f"skilled_{p}", self.layout.capacity("skilled", p))
                   for p in POINTS}
        unskilled = {p: ResourcePool(f"unskilled_{p}", self.layout.capacity("unskilled", p))
                     for p in POINTS}
        dispenser = {p: ResourcePool(f"dispenser_{p}", self.layout.capacity("dispenser", p))
                     for p in POINTS}
        manual_queue = {p: [] for p in POINTS}  # shared FIFO per point

        horizon = config.horizon
        arr_mean = config.arrival.mean
        m_lo, m_mode, m_hi = (config.manual_service.low,
                              config.manual_service.mode,
                              config.manual_service.high)
        a_lo, a_mode, a_hi = (config.auto_service.low,
                              config.auto_service.mode,
                              config.auto_service.high)
        factor = config.unskilled_factor
        p_auto = config.p_auto
        p_point_A = config.p_point_A

        cal = EventCalendar()
        arrivals = 0
        completions = 0

        cal.schedule(exponential_inverse(s_arrival.uniform(), arr_mean), _ARRIVAL)

        while True:
            ev = cal.next_event()
            if ev is None:
                break
            t, action, payload = ev
            if t > horizon:
                break
            if action == _ARRIVAL:
                arrivals += 1
                eid = arrivals
                cal.schedule(t + exponential_inverse(s_arrival.uniform(), arr_mean),
                             _ARRIVAL)
                auto = s_type.uniform() < p_auto
                point = "A" if s_point.uniform() < p_point_A else "B"
                if log is not None:
                    log.append((t, "arrival", eid, "", 0, 0))
                if auto:
                    svc = triangular_inverse(s_auto[point].uniform(), a_lo, a_mode, a_hi)
                    pool = dispenser[point]
                    if pool.seize((eid, svc), t):
                        cal.schedule(t + svc, _AUTO_DONE, (point, eid))
                        if log is not None:
                            log.append((t, "grant", eid, pool.name,
                                        len(pool.wait_queue), pool.busy_units))
                    elif log is not None:
                        log.append((t, "enqueue", eid, pool.name,
                                    len(pool.wait_queue), pool.busy_units))
                else:
                    base = triangular_inverse(s_manual[point].uniform(),
                                              m_lo, m_mode, m_hi)
                    sk = skilled[point]
                    un = unskilled[point]
                    if sk.busy_units < sk.capacity:
                        sk.seize(eid, t)
                        cal.schedule(t + base, _MANUAL_DONE, (point, sk, eid))
                        if log is not None:
                            log.append((t, "grant", eid, sk.name,
                                        len(manual_queue[point]), sk.busy_units))
                    elif un.busy_units < un.capacity:
                        un.seize(eid, t)
                        cal.schedule(t + base * factor, _MANUAL_DONE, (point, un, eid))
                        if log is not None:
                            log.append((t, "grant", eid, un.name,
                                        len(manual_queue[point]), un.busy_units))
                    else:
                        manual_queue[point].append((eid, base))
                        if log is not None:
                            log.append((t, "enqueue", eid, f"manual_{point}",
                                        len(manual_queue[point]), 0))
            elif action == _MANUAL_DONE:
                point, pool, eid = payload
                completions += 1
                pool.release(t)
                if log is not None:
                    log.append((t, "complete", eid, pool.name,
                                len(manual_queue[point]), pool.busy_units))
                queue = manual_queue[point]
                if queue:
                    # freed unit takes the queue head; duration depends on
                    # which class freed up
                    next_eid, base = queue.pop(0)
                    pool.seize(next_eid, t)
                    dur = base * factor if pool is unskilled[point] else base
                    cal.schedule(t + dur, _MANUAL_DONE, (point, pool, next_eid))
                    if log is not None:
                        log.append((t, "grant", next_eid, pool.name,
                                    len(queue), pool.busy_units))
            else:  # _AUTO_DONE
                point, eid = payload
                completions += 1
                pool = dispenser[point]
                granted = pool.release(t)
                if log is not None:
                    log.append((t, "complete", eid, pool.name,
                                len(pool.wait_queue), pool.busy_units))
                if granted is not None:
                    next_eid, svc = granted
                    cal.schedule(t + svc, _AUTO_DONE, (point, next_eid))
                    if log is not None:
                        log.append((t, "grant", next_eid, pool.name,
                                    len(pool.wait_queue), pool.busy_units))

        pool_stats = {}
        for pools in (skilled, unskilled, dispenser):
            for pool in pools.values():
                busy, idle, grants = pool.finalize_stats(horizon)
                pool_stats[pool.name] = PoolStats(busy, idle, grants)

        return ReplicationOutput(
            total_usage_cost=total_usage_cost(pool_stats, config.cost_rates),
            arrivals=arrivals,
            completions=completions,
            in_system_at_end=arrivals - completions,
            pools=pool_stats,
            log=tuple(log) if log is not None else None,
        )


def build_model(config: ModelConfig, layout: ResourceLayout | None = None) -> CrossdockModel:
    """Validate config (and optional layout override) into an executable
    model. Raises ConfigurationError listing every violated field."""
    problems = config.validate()
    if layout is None and not problems:
        layout = ResourceLayout.symmetric(config)
    if layout is not None and not problems:
        if config.p_auto > 0 and layout.dispenser_total() == 0:
            problems.append(
                "dispensers: automated orders have positive probability but no "
                "dispenser exists at any point"
            )
        if config.p_auto < 1 and layout.manual_total() == 0:
            problems.append(
                "operatives: manual orders have positive probability but no "
                "operative exists at any point"
            )
    if problems:
        raise ConfigurationError("config: " + "; ".join(problems))
    return CrossdockModel(config, layout)


def run_replication(config: ModelConfig, master_seed: int, replication_index: int,
                    layout: ResourceLayout | None = None,
                    collect_log: bool = False) -> ReplicationOutput:
    """One terminating replication; a pure function of its arguments."""
    if replication_index < 0:
        raise ConfigurationError("replication_index must be >= 0")
    return build_model(config, layout).run(master_seed, replication_index, collect_log)


def _run_one(config, master_seed, layout, index):
    return run_replication(config, master_seed, index, layout=layout)


def run_replications(config: ModelConfig, master_seed: int, indices,
                     layout: ResourceLayout | None = None,
                     threads: int = 1) -> list:
    """Run a batch of replications, optionally in worker processes.

    Results are returned in the order of `indices` regardless of worker
    scheduling, so output bytes never depend on the thread count.
    """
    indices = list(indices)
    build_model(config, layout)  # fail fast before forking workers
    if threads <= 1 or len(indices) <= 1:
        return [run_replication(config, master_seed, i, layout=layout) for i in indices]
    worker = partial(_run_one, config, master_seed, layout)
    chunk = max(1, math.ceil(len(indices) / (4 * threads)))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, indices, chunksize=chunk))

"""Experiment runner: one handler per subcommand, each producing a self-checked report."""

import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog

from core.domain.entities import (
    ExperimentConfig,
    FunctionalKind,
    HyperfiniteTag,
    Metric,
    SearchMode,
    Subcommand,
)
from core.domain.graph import Graph
from core.domain.values import ScalarValue
from core.exceptions import (
    InvalidInputException,
    InvariantViolationException,
    SequenceTooShortException,
    UnknownKernelException,
)
from core.usecases.functionals import (
    builtin_functional,
    check_subadditive_axioms,
    fekete_limit,
    normalized_limit,
    subadditive_limit,
    verify_almost_additive,
)
from core.usecases.local_stats import (
    almost_injectivity,
    ball_growth,
    class_census,
    d_pi,
    d_pi_tail,
    weak_cauchy_profile,
)
from core.usecases.metrics import (
    delta,
    delta_rho,
    delta_rho_upper_from_partitions,
    delta_S,
    strong_cauchy_profile,
    strong_weak_consistency,
)
from core.usecases.partition import (
    Partition,
    equipartition_compare,
    exceptional_vertices,
    hyperfiniteness_profile,
    partition_auto,
    pipeline_parameters,
    validate_partition,
)
from core.usecases.ports import DocumentSourcePort, GraphSourcePort, ReportSinkPort
from core.usecases.references import reference_curve
from core.usecases.sequences import build_sequence, generate
from core.usecases.spectral import (
    BUILTIN_KERNELS,
    KernelSpec,
    assemble,
    builtin_kernel,
    ids_experiment,
    trace_functional,
)

logger = structlog.get_logger()

# samples above this size are skipped by the axiom checks
AXIOM_SAMPLE_LIMIT = 14

Table = Tuple[str, List[str], List[List[Any]]]


@dataclass
class Outcome:
    """What a handler produced before it is wrapped into a report."""

    results: Dict[str, Any]
    checks: Dict[str, Any] = field(default_factory=dict)
    tables: List[Table] = field(default_factory=list)


@dataclass
class RunResult:
    """Locations and contents of one finished run."""

    report: Dict[str, Any]
    files: List[str]


def _profile_rows(profile) -> List[List[Any]]:
    return [[pair.i, pair.j, pair.value] for pair in profile.pairs]


def _tail_rows(profile) -> List[List[Any]]:
    return [[m, value] for m, value in enumerate(profile.tail_sup)]


def _estimate_document(estimate) -> Dict[str, Any]:
    return estimate.model_dump(mode="json")


def _common_K(partitions: Sequence[Partition]) -> List[Partition]:
    """Partitions compared pairwise share K: the largest achieved bound."""
    K = max(p.K for p in partitions)
    return [p if p.K == K else replace(p, K=K) for p in partitions]


class ExperimentRunner:
    """Dispatches an ExperimentConfig to its subcommand and writes the report."""

    def __init__(
        self,
        graphs: GraphSourcePort,
        documents: DocumentSourcePort,
        sink: ReportSinkPort,
        versions: Optional[Mapping[str, Any]] = None,
    ):
        self.graphs = graphs
        self.documents = documents
        self.sink = sink
        self.versions = dict(versions or {})
        self._handlers: Dict[str, Callable[[ExperimentConfig], Outcome]] = {
            Subcommand.GEN.value: self._gen,
            Subcommand.STATS.value: self._stats,
            Subcommand.DIST.value: self._dist,
            Subcommand.PARTITION.value: self._partition,
            Subcommand.LIMIT.value: self._limit,
            Subcommand.SUBADD.value: self._subadd,
            Subcommand.IDS.value: self._ids,
            Subcommand.FEKETE.value: self._fekete,
        }

    def run(self, config: ExperimentConfig) -> RunResult:
        """Execute the configured subcommand and persist its report and tables."""
        subcommand = Subcommand(config.subcommand).value
        started_at = datetime.now(timezone.utc).isoformat()
        start = time.perf_counter()
        logger.info("Experiment started", subcommand=subcommand, seed=config.seed, threads=config.threads)

        try:
            outcome = self._handlers[subcommand](config)
        except Exception as e:
            logger.error("Experiment failed", subcommand=subcommand, error=str(e))
            raise

        files: List[str] = []
        for name, header, rows in outcome.tables:
            location = self.sink.write_csv(name, header, rows)
            if location:
                files.append(location)

        report = {
            "config": config.model_dump(mode="json"),
            "versions": self.versions,
            "started_at": started_at,
            "wall_time_seconds": time.perf_counter() - start,
            "results": outcome.results,
            "checks": outcome.checks,
            "tables": sorted(name for name, _, _ in outcome.tables),
        }
        location = self.sink.write_json(subcommand, report)
        if location:
            files.insert(0, location)
        logger.info("Experiment completed", subcommand=subcommand, files=len(files),
                    wall_time_seconds=report["wall_time_seconds"])
        return RunResult(report=report, files=files)

    # inputs

    def _graph_inputs(self, config: ExperimentConfig, count: int) -> List[Graph]:
        if len(config.inputs) != count:
            raise InvalidInputException("inputs", config.inputs, f"exactly {count} edge-list file(s) required")
        return [self.graphs.read(path) for path in config.inputs]

    def _sequence(self, config: ExperimentConfig, minimum: int = 1):
        if config.manifest is None:
            raise InvalidInputException("manifest", None, "a sequence manifest is required")
        manifest = self.documents.load_manifest(config.manifest)
        seq = build_sequence(
            manifest,
            self.graphs,
            threads=config.threads,
            default_seed=config.seed,
            rejection_cap=config.rejection_cap,
            max_derived_seeds=config.max_derived_seeds,
        )
        if len(seq) < minimum:
            raise SequenceTooShortException(len(seq), minimum)
        return manifest, seq

    def _kernel(self, config: ExperimentConfig) -> KernelSpec:
        name = config.kernel or "adjacency"
        if name in BUILTIN_KERNELS:
            return builtin_kernel(name)
        if name.endswith(".json"):
            return self.documents.load_kernel(name)
        raise UnknownKernelException(name)

    def _search_mode(self, config: ExperimentConfig, n: int) -> SearchMode:
        if config.search_mode is not None:
            return SearchMode(config.search_mode)
        return SearchMode.EXACT if n <= config.exact_limit else SearchMode.HEURISTIC

    # subcommands

    def _gen(self, config: ExperimentConfig) -> Outcome:
        if config.family is None:
            raise InvalidInputException("family", None, "a generator family is required")
        g = generate(config.family, config.params, config.seed, config.rejection_cap, config.max_derived_seeds)
        if config.output:
            self.graphs.write(g, config.output)
        degrees = [g.degree(v) for v in range(g.n)]
        return Outcome(
            results={
                "family": config.family,
                "params": config.params,
                "n": g.n,
                "edges": g.num_edges,
                "d": g.degree_bound,
                "max_degree": g.max_degree,
                "output": config.output,
            },
            checks={"degree_bound_respected": g.max_degree <= g.degree_bound},
            tables=[("gen_degrees", ["vertex", "degree"], [[v, d] for v, d in enumerate(degrees)])],
        )

    def _stats(self, config: ExperimentConfig) -> Outcome:
        if config.manifest is not None:
            return self._weak_profile(config)
        graphs = [self.graphs.read(path) for path in config.inputs]
        if not 1 <= len(graphs) <= 2:
            raise InvalidInputException("inputs", config.inputs, "one or two edge-list files required")
        vectors = [class_census(g, config.radius, config.canonical_limit, config.threads) for g in graphs]

        results: Dict[str, Any] = {
            "members": [
                {"radius": s.r_max, "n": s.n, "classes": s.to_document()} for s in vectors
            ],
            "ball_growth": [ball_growth(g, config.radius) for g in graphs],
        }
        checks: Dict[str, Any] = {"census_normalized": True}
        if len(vectors) == 2:
            report = almost_injectivity(graphs[0], graphs[1], config.component_limit)
            results["d_pi"] = d_pi(vectors[0], vectors[1])
            results["d_pi_tail"] = d_pi_tail(vectors[0], vectors[1])
            results["almost_injectivity"] = {
                "common_base": report.common_base,
                "base_counts": report.base_counts,
                "multiplicities": report.multiplicities,
            }

        rows = []
        for index, s in enumerate(vectors):
            for key in s.classes():
                frequency = s.frequency(key)
                rows.append([index, key.hex, key.radius, key.size, s.counts[key], s.n, float(frequency)])
        return Outcome(
            results=results,
            checks=checks,
            tables=[("stats_classes", ["member", "key", "radius", "ball_size", "num", "den", "frequency"], rows)],
        )

    def _weak_profile(self, config: ExperimentConfig) -> Outcome:
        manifest, seq = self._sequence(config, minimum=2)
        report = weak_cauchy_profile(
            seq, config.radius, config.max_pairs, config.tolerance, config.canonical_limit, config.threads
        )
        return Outcome(
            results={
                "sizes": [g.n for g in seq],
                "converged_at": report.profile.converged_at(config.tolerance),
                "tail_sup": report.profile.tail_sup,
                "limit_estimates": {key.hex: float(value) for key, value in sorted(report.limit_estimates.items())},
                "stable_classes": [key.hex for key in report.stable_classes],
            },
            checks={"census_normalized": True},
            tables=[
                ("weak_profile", ["i", "j", "d_pi"], _profile_rows(report.profile)),
                ("weak_tail", ["m", "tail_sup"], _tail_rows(report.profile)),
            ],
        )

    def _dist(self, config: ExperimentConfig) -> Outcome:
        if config.manifest is not None:
            return self._strong_profile(config)
        g, h = self._graph_inputs(config, 2)
        metric = Metric(config.metric)
        if metric is Metric.DELTA:
            value = delta(g, h, config.star_mode)
            results: Dict[str, Any] = {"value": value, "kind": "exact", "witness": None, "multiples": None}
        elif metric is Metric.DELTA_S:
            estimate = delta_S(
                g, h,
                mode=self._search_mode(config, g.n),
                star_mode=config.star_mode,
                exact_limit=config.exact_limit,
                seed=config.seed,
                restarts=config.restarts,
                sweeps=config.sweeps,
            )
            results = _estimate_document(estimate)
        else:
            estimate = delta_rho(
                g, h, config.multiple_cap,
                star_mode=config.star_mode,
                exact_limit=config.exact_limit,
                seed=config.seed,
                restarts=config.restarts,
                sweeps=config.sweeps,
            )
            results = _estimate_document(estimate)
        results["metric"] = metric.value
        return Outcome(results=results, checks={"value_in_unit_interval": 0.0 <= results["value"] <= 1.0})

    def _strong_profile(self, config: ExperimentConfig) -> Outcome:
        manifest, seq = self._sequence(config, minimum=2)
        partitions = None
        if config.eps1 is not None:
            partitions = [
                partition_auto(g, config.eps1, config.seed, config.strategy, config.max_component,
                               config.component_limit)
                for g in seq
            ]
            partitions = _common_K(partitions)
        strong = strong_cauchy_profile(
            seq,
            config.multiple_cap,
            partitions=partitions,
            eps1=config.eps1,
            max_pairs=config.max_pairs,
            star_mode=config.star_mode,
            exact_limit=config.exact_limit,
            seed=config.seed,
            restarts=config.restarts,
            sweeps=config.sweeps,
            threads=config.threads,
        )
        weak = weak_cauchy_profile(
            seq, config.radius, config.max_pairs, config.tolerance, config.canonical_limit, config.threads
        )
        consistency = strong_weak_consistency(strong.profile, weak.profile, config.tolerance)
        rows = []
        for (i, j), estimate in sorted(strong.estimates.items()):
            q, p = estimate.multiples or (None, None)
            rows.append([i, j, estimate.value, estimate.kind, q, p, strong.partition_bounds.get((i, j))])
        return Outcome(
            results={
                "sizes": [g.n for g in seq],
                "tail_sup": strong.profile.tail_sup,
                "weak_tail_sup": weak.profile.tail_sup,
                "converged_at": strong.profile.converged_at(config.tolerance),
                "consistency": consistency,
            },
            checks={"strong_implies_weak": consistency["consistent"]},
            tables=[
                ("strong_profile", ["i", "j", "delta_rho", "kind", "q", "p", "partition_bound"], rows),
                ("strong_tail", ["m", "tail_sup"], _tail_rows(strong.profile)),
            ],
        )

    def _partition(self, config: ExperimentConfig) -> Outcome:
        if config.manifest is not None:
            return self._hyperfiniteness(config)
        graphs = [self.graphs.read(path) for path in config.inputs]
        if not 1 <= len(graphs) <= 2:
            raise InvalidInputException("inputs", config.inputs, "one or two edge-list files required")
        partitions = [
            partition_auto(g, config.eps, config.seed, config.strategy, config.max_component, config.component_limit)
            for g in graphs
        ]
        # reports always re-validate before they are written
        for p in partitions:
            validate_partition(p)

        results: Dict[str, Any] = {"partitions": [p.to_document() for p in partitions]}
        for document, p in zip(results["partitions"], partitions):
            document["exceptional_vertices"] = exceptional_vertices(p)
        checks: Dict[str, Any] = {
            "partition_valid": True,
            "cut_within_budget": all(p.eps <= p.requested_eps for p in partitions),
        }
        if len(partitions) == 2:
            pa, pb = _common_K(partitions)
            eps1 = config.eps1 if config.eps1 is not None else float(max(pa.eps, pb.eps))
            results["equipartition_distance"] = float(equipartition_compare(pa, pb))
            results["delta_rho_upper"] = delta_rho_upper_from_partitions(pa, pb, eps1)
            results["pipeline"] = pipeline_parameters(
                config.eps, pa.source.degree_bound, max(1, len(set(pa.class_counts) | set(pb.class_counts))), pa.K
            )

        rows = [
            [index, number, len(component)]
            for index, p in enumerate(partitions)
            for number, component in enumerate(p.components)
        ]
        return Outcome(
            results=results,
            checks=checks,
            tables=[("partition_components", ["member", "component", "size"], rows)],
        )

    def _hyperfiniteness(self, config: ExperimentConfig) -> Outcome:
        manifest, seq = self._sequence(config)
        report = hyperfiniteness_profile(
            seq, [config.eps], config.strategy, config.seed, config.max_component, config.component_limit,
            config.threads,
        )
        expected = manifest.hyperfinite_expected
        checks: Dict[str, Any] = {"evidenced": report.evidenced}
        if expected is not HyperfiniteTag.UNKNOWN:
            checks["matches_tag"] = report.evidenced == (expected is HyperfiniteTag.YES)
        header = ["member", "n", "eps", "K", "max_component", "cut_fraction", "within_budget"]
        return Outcome(
            results={"rows": report.rows, "evidenced": report.evidenced, "expected": expected.value},
            checks=checks,
            tables=[("hyperfiniteness", header, [[row[k] for k in header] for row in report.rows])],
        )

    def _limit(self, config: ExperimentConfig) -> Outcome:
        if config.functional is None:
            raise InvalidInputException("functional", None, "a functional name is required")
        f = builtin_functional(config.functional)
        manifest, seq = self._sequence(config)
        report = normalized_limit(f, seq, config.tolerance, config.max_pairs, config.threads)

        results: Dict[str, Any] = {
            "functional": f.name,
            "kind": FunctionalKind(f.kind).value,
            "D": f.constant(manifest.d),
            "sizes": [g.n for g in seq],
            "converged_at": report.converged_at,
            "tail_sup": report.profile.tail_sup,
        }
        checks: Dict[str, Any] = {}
        tables: List[Table] = [("limit_profile", ["i", "j", "distance"], _profile_rows(report.profile))]

        if isinstance(report.limit, ScalarValue):
            results["limit"] = report.limit.value
            tables.append((
                "limit_normalized", ["member", "n", "value"],
                [[index, g.n, value.value] for index, (g, value) in enumerate(zip(seq, report.normalized))],
            ))
        else:
            results["limit"] = {"jumps": int(report.limit.points.size), "sup_norm": report.limit.norm()}
            rows = []
            for index, (g, value) in enumerate(zip(seq, report.normalized)):
                for x, y in zip(value.points, value.values):
                    rows.append([index, g.n, float(x), float(y)])
            tables.append(("limit_normalized", ["member", "n", "x", "value"], rows))

        if config.check:
            pairs = [(seq[i], seq[i + 1]) for i in range(len(seq) - 1)]
            additivity = verify_almost_additive(f, pairs, config.multiple_cap, config.exact_limit, config.seed)
            results["almost_additivity"] = {
                "D": additivity.D,
                "empirical_D": additivity.empirical_D,
                "rows": additivity.rows,
            }
            checks["almost_additive"] = additivity.passed
            if additivity.passed is False:
                raise InvariantViolationException(
                    "almost-additivity bound",
                    {"functional": f.name, "empirical_D": additivity.empirical_D, "D": additivity.D}
                )
        return Outcome(results=results, checks=checks, tables=tables)

    def _subadd(self, config: ExperimentConfig) -> Outcome:
        h = builtin_functional(config.functional or "log-indep-sets")
        manifest, seq = self._sequence(config)
        report = subadditive_limit(h, seq, config.floor, config.tolerance, config.threads)
        samples = [g for g in seq if g.n <= AXIOM_SAMPLE_LIMIT]
        axioms = check_subadditive_axioms(h, samples, config.seed, config.strict)
        return Outcome(
            results={
                "functional": h.name,
                "lambda": report.lam,
                "liminf": report.liminf,
                "limsup": report.limsup,
                "gap": report.gap,
                "converged": report.converged,
                "axioms": axioms.results,
                "axiom_samples": len(samples),
                "violations": [vars(violation) for violation in axioms.violations],
            },
            checks={"axioms_passed": axioms.passed},
            tables=[(
                "subadd_normalized", ["member", "n", "value"],
                [[index, g.n, value] for index, (g, value) in enumerate(zip(seq, report.normalized))],
            )],
        )

    def _ids(self, config: ExperimentConfig) -> Outcome:
        k = self._kernel(config)
        manifest, seq = self._sequence(config)
        reference = reference_curve(config.reference, k.name) if config.reference else None
        report = ids_experiment(
            seq, k, reference,
            dense_limit=config.dense_limit,
            decimals=config.eigenvalue_decimals,
            grid_points=config.query_grid_points,
            max_pairs=config.max_pairs,
            limit=config.canonical_limit,
            threads=config.threads,
            shift=config.inertia_shift,
        )

        normalized = []
        for cdf in report.cdfs:
            above = float(cdf(cdf.bound + 1.0)) if cdf.n else 1.0
            below = float(cdf(-cdf.bound - 1.0)) if cdf.n else 0.0
            normalized.append(np.isclose(above, 1.0) and np.isclose(below, 0.0))
        if not all(normalized):
            raise InvariantViolationException("CDF normalization", {"members": normalized})

        traces = []
        for g, cdf in zip(seq, report.cdfs):
            if cdf.mode == "dense":
                stats = class_census(g, k.R, config.canonical_limit)
                traces.append(trace_functional(stats, k, assemble(g, k, config.canonical_limit))["trace"])
            else:
                traces.append(None)

        rows = []
        for index, (g, cdf) in enumerate(zip(seq, report.cdfs)):
            distance = report.reference_distances[index] if report.reference_distances else None
            rows.append([index, g.n, cdf.mode, distance, report.null_members[index], traces[index]])
        tables: List[Table] = [
            ("ids", ["member", "n", "mode", "sup_distance", "null", "trace"], rows),
            ("ids_profile", ["i", "j", "sup_distance"], _profile_rows(report.profile)),
        ]
        for index, cdf in enumerate(report.cdfs):
            tables.append((f"ids_cdf_{index}", ["lambda", "N"], [list(row) for row in cdf.rows(config.query_grid_points)]))

        return Outcome(
            results={
                "kernel": k.name,
                "reference": config.reference,
                "sizes": report.sizes,
                "reference_distances": report.reference_distances,
                "tail_sup": report.profile.tail_sup,
                "null_sequence": report.null_sequence,
                "traces": traces,
            },
            checks={"cdf_normalized": True, "trace_identity": True},
            tables=tables,
        )

    def _fekete(self, config: ExperimentConfig) -> Outcome:
        if len(config.inputs) != 1:
            raise InvalidInputException("inputs", config.inputs, "exactly one sequence file required")
        a = self.documents.load_reals(config.inputs[0])
        report = fekete_limit(a)
        return Outcome(
            results={
                "limit": report.infimum,
                "last_ratio": report.last_ratio,
                "richardson": report.richardson,
                "subadditive": report.subadditive,
                "violation_count": report.violation_count,
                "violations": [list(pair) for pair in report.violations],
            },
            checks={"subadditive": report.subadditive},
            tables=[("fekete_ratios", ["n", "a_n", "ratio"], [[n, value, value / n] for n, value in enumerate(a, start=1)])],
        )

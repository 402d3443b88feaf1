"""Tests for the experiment runner."""

import json

import pytest

from core.domain.entities import ExperimentConfig
from core.domain.graph import disjoint_multiple
from core.exceptions import InvalidInputException, InvariantViolationException
from core.usecases.functionals import AlmostAdditivityReport
from core.usecases.sequences import gen_cycle, gen_path

FAST_SEARCH = {"restarts": 0, "sweeps": 5, "multiple_cap": 1}


def _read(report_dir, name):
    return json.loads((report_dir / name).read_text(encoding="utf-8"))


def test_gen_writes_graph_and_report(runner, report_dir, tmp_path):
    """gen stores the edge list and a degree table next to the report."""
    output = str(tmp_path / "p5.txt")
    result = runner.run(ExperimentConfig(subcommand="gen", family="path", params={"n": 5}, output=output))

    assert result.report["results"]["edges"] == 4
    assert result.report["checks"]["degree_bound_respected"]
    assert (tmp_path / "p5.txt").read_text(encoding="utf-8").startswith("5 2\n")
    assert result.files[0].endswith("gen.json")
    assert (report_dir / "gen_degrees.csv").exists()
    assert _read(report_dir, "gen.json")["versions"] == {"graphlim": "test"}


def test_dist_exact_path_versus_triangle(runner, report_dir, write_graph, p3, k3):
    """deltaS(P3, K3) is exactly one with a witness permutation."""
    inputs = [write_graph(p3, "p3.txt"), write_graph(k3, "k3.txt")]
    runner.run(ExperimentConfig(subcommand="dist", inputs=inputs, exact_limit=8))

    report = _read(report_dir, "dist.json")
    assert report["results"]["value"] == 1.0
    assert report["results"]["kind"] == "exact"
    assert report["results"]["metric"] == "deltaS"
    assert sorted(report["results"]["witness"]) == [0, 1, 2]
    assert report["config"]["subcommand"] == "dist"


def test_dist_identity_metric(runner, write_graph):
    """The identity-labeled distance of a path and its cycle."""
    inputs = [write_graph(gen_path(10), "p.txt"), write_graph(gen_cycle(10), "c.txt")]
    result = runner.run(ExperimentConfig(subcommand="dist", inputs=inputs, metric="delta"))

    assert result.report["results"]["value"] == pytest.approx(0.2)


def test_dist_needs_two_inputs(runner, write_graph, p3):
    """A single file is not a pair."""
    with pytest.raises(InvalidInputException):
        runner.run(ExperimentConfig(subcommand="dist", inputs=[write_graph(p3, "p3.txt")]))


def test_stats_on_disjoint_multiples(runner, write_graph):
    """2C4 and 3C4 share statistics and a common base."""
    c4 = gen_cycle(4)
    inputs = [write_graph(disjoint_multiple(c4, 2), "a.txt"), write_graph(disjoint_multiple(c4, 3), "b.txt")]
    result = runner.run(ExperimentConfig(subcommand="stats", inputs=inputs, radius=2))

    assert result.report["results"]["d_pi"] == 0.0
    assert result.report["results"]["almost_injectivity"]["common_base"]
    assert len(result.report["results"]["members"]) == 2


def test_stats_weak_profile(runner, write_manifest, path_members):
    """A manifest switches stats to the weak Cauchy profile."""
    manifest = write_manifest(2, path_members([10, 20, 40]))
    result = runner.run(ExperimentConfig(subcommand="stats", manifest=manifest, radius=1))

    assert result.report["results"]["sizes"] == [10, 20, 40]
    assert "weak_profile" in result.report["tables"]


def test_partition_single_path(runner, report_dir, write_graph):
    """P10 at eps 0.25 is cut once between 7 and 8."""
    result = runner.run(ExperimentConfig(subcommand="partition", inputs=[write_graph(gen_path(10), "p.txt")], eps=0.25))

    document = result.report["results"]["partitions"][0]
    assert document["exceptional_vertices"] == [7, 8]
    assert result.report["checks"] == {"partition_valid": True, "cut_within_budget": True}
    assert (report_dir / "partition_components.csv").exists()


def test_partition_pair_bounds(runner, write_graph):
    """Two partitioned paths give an equipartition distance and pipeline constants."""
    inputs = [write_graph(gen_path(400), "a.txt"), write_graph(gen_path(800), "b.txt")]
    result = runner.run(ExperimentConfig(subcommand="partition", inputs=inputs, eps=0.05, eps1=0.05))

    assert result.report["results"]["delta_rho_upper"] == pytest.approx(0.4)
    assert result.report["results"]["equipartition_distance"] < 0.05
    assert "bound" in result.report["results"]["pipeline"]


def test_partition_hyperfiniteness_matches_tag(runner, write_manifest, path_members):
    """Paths tagged hyperfinite are evidenced as such."""
    manifest = write_manifest(2, path_members([20, 40, 80]), tags={"hyperfinite": "yes"})
    result = runner.run(ExperimentConfig(subcommand="partition", manifest=manifest, eps=0.25))

    assert result.report["checks"] == {"evidenced": True, "matches_tag": True}


def test_limit_of_vertex_count_with_check(runner, write_manifest, path_members):
    """vcount normalizes to one and passes its almost-additivity check."""
    manifest = write_manifest(2, path_members([4, 8]))
    result = runner.run(
        ExperimentConfig(subcommand="limit", manifest=manifest, functional="vcount", check=True, **FAST_SEARCH)
    )

    assert result.report["results"]["limit"] == 1.0
    assert result.report["checks"]["almost_additive"] is True


def test_limit_check_failure_is_an_invariant_violation(runner, report_dir, write_manifest, path_members, mocker):
    """A failed almost-additivity check aborts without a report."""
    failed = AlmostAdditivityReport(functional="vcount", D=0.0, rows=[], passed=False, empirical_D=1.0)
    mocker.patch("core.usecases.experiments.verify_almost_additive", return_value=failed)
    manifest = write_manifest(2, path_members([3, 5]))

    with pytest.raises(InvariantViolationException):
        runner.run(ExperimentConfig(subcommand="limit", manifest=manifest, functional="vcount", check=True))
    assert not (report_dir / "limit.json").exists()


def test_limit_requires_functional(runner, write_manifest, path_members):
    """limit needs a functional name."""
    with pytest.raises(InvalidInputException):
        runner.run(ExperimentConfig(subcommand="limit", manifest=write_manifest(2, path_members([3]))))


def test_subadd_independent_sets(runner, write_manifest, path_members):
    """log2 i(P_n)/n decreases towards log2 of the golden ratio and passes the axioms."""
    manifest = write_manifest(2, path_members([4, 6, 8, 40]))
    result = runner.run(ExperimentConfig(subcommand="subadd", manifest=manifest))

    results = result.report["results"]
    assert results["functional"] == "log-indep-sets"
    assert results["axiom_samples"] == 3
    assert result.report["checks"]["axioms_passed"]
    assert 0.69 < results["lambda"] < 0.75


def test_ids_against_arcsine(runner, report_dir, write_manifest, path_members):
    """Adjacency spectra of paths stay within 1/n of the arcsine law."""
    manifest = write_manifest(2, path_members([10, 20, 40]))
    result = runner.run(ExperimentConfig(subcommand="ids", manifest=manifest, reference="arccos-1d"))

    results = result.report["results"]
    assert results["kernel"] == "adjacency"
    assert all(d <= 1.5 / n for d, n in zip(results["reference_distances"], results["sizes"]))
    assert results["traces"] == [0.0, 0.0, 0.0]
    assert (report_dir / "ids_cdf_2.csv").exists()


def test_fekete_from_file(runner, report_dir, tmp_path):
    """a_n = n is additive with limit one."""
    path = tmp_path / "a.txt"
    path.write_text("\n".join(str(n) for n in range(1, 21)) + "\n", encoding="utf-8")
    runner.run(ExperimentConfig(subcommand="fekete", inputs=[str(path)]))

    report = _read(report_dir, "fekete.json")
    assert report["results"]["limit"] == 1.0
    assert report["results"]["violation_count"] == 0
    assert report["tables"] == ["fekete_ratios"]

"""Tests for graph generators and manifest-driven sequences."""

import pytest

from adapters.io.documents import parse_manifest
from adapters.io.edge_list import EdgeListAdapter
from core.exceptions import (
    GenerationInfeasibleException,
    InvalidInputException,
    InvalidManifestException,
    ParameterOutOfRangeException,
    RejectionCapExceededException,
    UnknownFamilyException,
)
from core.usecases.sequences import (
    FAMILIES,
    build_sequence,
    gen_cycle,
    gen_random_regular,
    gen_torus,
    gen_tree_ball,
    generate,
)


def test_random_regular_on_four_vertices_is_k4():
    """The only simple 3-regular graph on four vertices is K4."""
    g = gen_random_regular(4, 3, seed=3)

    assert g.edges == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_random_regular_is_seeded_and_regular():
    """Equal seeds give equal graphs; every degree equals d."""
    g = gen_random_regular(30, 3, seed=11)

    assert g == gen_random_regular(30, 3, seed=11)
    assert all(g.degree(v) == 3 for v in range(g.n))
    assert g.degree_bound == 3


@pytest.mark.parametrize("n,d", [(5, 3), (3, 3)])
def test_random_regular_infeasible(n, d):
    """Odd n*d and n <= d have no simple d-regular graph."""
    with pytest.raises(GenerationInfeasibleException):
        gen_random_regular(n, d)


def test_random_regular_retries_with_derived_seeds(mocker):
    """A rejection-capped attempt moves on to the next derived seed."""
    target = gen_cycle(6)
    pairing = mocker.patch("core.usecases.sequences._pairing_attempts", side_effect=[None, None, target])

    assert gen_random_regular(6, 2, seed=1) is target
    assert pairing.call_count == 3


def test_random_regular_gives_up_after_derived_seeds(mocker):
    """Exhausting the derived seeds surfaces the rejection error."""
    mocker.patch("core.usecases.sequences._pairing_attempts", return_value=None)

    with pytest.raises(RejectionCapExceededException):
        gen_random_regular(6, 2, seed=1, max_derived_seeds=2)


def test_tree_ball_and_torus_dimensions():
    """Binary tree balls have 2^(depth+1) - 1 vertices; 1-dimensional tori are cycles."""
    assert gen_tree_ball(3).n == 15
    assert gen_tree_ball(3).max_degree == 3
    assert gen_torus(7, dim=1) == gen_cycle(7)
    with pytest.raises(ParameterOutOfRangeException):
        gen_torus(2)


def test_generate_by_family():
    """Families are looked up by name with integer parameters."""
    assert set(FAMILIES) == {"path", "cycle", "torus", "box", "tree-ball", "random-regular"}
    assert generate("box", {"b": "3"}).n == 9
    assert generate("random-regular", {"n": 10, "d": 3}, seed=2) == gen_random_regular(10, 3, seed=2)


def test_generate_rejects_bad_requests():
    """Unknown families, unknown parameters and non-integers."""
    with pytest.raises(UnknownFamilyException):
        generate("petersen", {})
    with pytest.raises(InvalidInputException):
        generate("path", {"m": 3})
    with pytest.raises(InvalidInputException):
        generate("path", {"n": "three"})
    with pytest.raises(InvalidInputException):
        generate("cycle", {})


def test_build_sequence_lifts_to_manifest_bound(write_graph, tmp_path):
    """Members from files and families share the manifest degree bound."""
    path = write_graph(gen_cycle(5), "c5.txt")
    manifest = parse_manifest(
        {"d": 4, "members": [{"path": path}, {"family": "torus", "params": {"b": 3}}]},
        "inline",
        tmp_path,
    )

    seq = build_sequence(manifest, EdgeListAdapter())
    assert [g.n for g in seq] == [5, 9]
    assert all(g.degree_bound == 4 for g in seq)


def test_build_sequence_rejects_degree_above_bound(path_members):
    """A member may not exceed d."""
    manifest = parse_manifest({"d": 1, "members": path_members([3])}, "inline")

    with pytest.raises(InvalidManifestException):
        build_sequence(manifest, EdgeListAdapter())


def test_build_sequence_requires_increasing_sizes(path_members):
    """Sizes must grow unless the manifest allows otherwise."""
    members = path_members([5, 5])

    with pytest.raises(InvalidManifestException):
        build_sequence(parse_manifest({"d": 2, "members": members}, "inline"), EdgeListAdapter())
    relaxed = parse_manifest({"d": 2, "members": members, "allow_nonincreasing": True}, "inline")
    assert len(build_sequence(relaxed, EdgeListAdapter(), threads=2)) == 2


def test_manifest_validation_errors(path_members):
    """Schema errors become manifest errors naming the field."""
    with pytest.raises(InvalidManifestException):
        parse_manifest({"d": 0, "members": path_members([3])}, "inline")
    with pytest.raises(InvalidManifestException):
        parse_manifest({"d": 2, "members": [{"family": "path", "path": "x.txt"}]}, "inline")
    with pytest.raises(InvalidManifestException):
        parse_manifest({"d": 2, "members": path_members([3]), "tags": {"hyperfinite": "maybe"}}, "inline")

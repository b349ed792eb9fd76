import math

import pytest

from services.chain_service import (
    ChainEdge,
    CircleChainSpec,
    Relation,
    check_pleating_conditions,
    check_realness,
    disc_relation,
    genus_two_reality_sets,
    peripheral_disc,
    preserves_circle,
    sweep_pleating,
    validate_chain_combinatorics,
)
from services.fixture_registry import get_fixture_registry, riley_chain
from services.group_service import build_rank2_trace, build_riley
from utils.circlespace import CircleKind, from_center_radius
from utils.errors import ChainInvalid, GeometryError, MarkersDegenerate
from utils.mobius import ComplexPoint
from utils.words import Word


def circle(x: float, y: float, r: float):
    return from_center_radius(ComplexPoint.finite(complex(x, y)), r)


def test_riley_chain_combinatorics():
    report = validate_chain_combinatorics(build_riley(2j), riley_chain())
    assert report.passed
    assert report.forest and report.connected
    assert [c.relation for c in report.edge_checks] == ["equal", "conjugate by Y", "conjugate by X"]
    # every leaf is parabolic, so tr^2 cannot separate them
    assert report.warnings


def test_riley_realness_on_and_off_the_slice():
    chain = riley_chain()
    on = check_pleating_conditions(build_riley(2j), chain, truncation=1)
    assert on.condition_verdicts["realness"]
    assert set(on.discs) == {"L", "R"}
    assert all(d.kind() is CircleKind.REAL_CIRCLE or d.kind() is CircleKind.LINE for d in on.discs.values())

    off = check_pleating_conditions(build_riley(0.3 + 2j), chain, truncation=1)
    assert not off.condition_verdicts["realness"]
    assert not off.passed
    failing = [c for r in off.realness for c in r.checks if not c.passed]
    assert any("Im(tr^2)" in c.reason for c in failing)


def test_combinatorics_rejects_wrong_conjugator():
    chain = riley_chain()
    chain.edges[1] = ChainEdge("L", "L", Word.parse("X"), "hnn",
                               stable=Word.parse("X"), target_leaf=Word.parse("Y^-1 X Y"))
    report = validate_chain_combinatorics(build_riley(2j), chain)
    assert not report.passed
    assert report.errors


def test_combinatorics_rejects_tree_cycle_and_unknown_vertex():
    chain = riley_chain()
    chain.edges.append(ChainEdge("R", "L", Word.parse("X^-1 Y^-1 X Y")))
    report = validate_chain_combinatorics(build_riley(2j), chain)
    assert not report.forest and not report.passed

    chain = riley_chain()
    chain.edges.append(ChainEdge("L", "Q", Word.parse("X")))
    report = validate_chain_combinatorics(build_riley(2j), chain)
    assert not report.passed
    assert "unknown vertex 'Q'" in report.errors[0]


def test_hnn_edge_needs_stable_word():
    with pytest.raises(GeometryError):
        ChainEdge("L", "L", Word.parse("X"), "hnn")
    with pytest.raises(GeometryError):
        CircleChainSpec.from_json({
            "vertices": [v.to_json() for v in riley_chain().vertices],
            "edges": [{"from": "L", "to": "L", "leaf": "X", "kind": "hnn"}],
        })


def test_compression_body_disc_is_preserved():
    fixture = get_fixture_registry().get("compression-theta3")
    vertex = fixture.chain.vertices[0]
    disc = peripheral_disc(fixture.group, vertex)
    assert preserves_circle(fixture.group, vertex.generator_words, disc, 1e-6)
    assert check_realness(fixture.group, vertex).passed


def test_markers_with_shared_fixed_point():
    chain = riley_chain()
    vertex = chain.vertices[0]
    vertex.markers[1] = vertex.markers[0]
    with pytest.raises(MarkersDegenerate):
        peripheral_disc(build_riley(2j), vertex)


def test_real_pants_group():
    fixture = get_fixture_registry().get("pants-real")
    report = check_realness(fixture.group, fixture.chain.vertices[0])
    assert report.passed
    assert [c.trace_squared.real for c in report.checks] == pytest.approx([9, 9, 9])
    assert genus_two_reality_sets(fixture.group) == ["(trX, trY, -trXY) > 2"]
    assert genus_two_reality_sets(build_rank2_trace(3, 3, 1j)) == []


def test_disc_relations():
    unit = circle(0, 0, 1)
    assert disc_relation(unit, circle(2, 0, 1)).relation is Relation.TANGENT
    assert disc_relation(unit, circle(3, 0, 1)).relation is Relation.DISJOINT
    assert disc_relation(unit, circle(0, 0, 0.5)).relation is Relation.NESTED
    assert disc_relation(unit, circle(0, 0, 1)).relation is Relation.COINCIDENT
    crossing = disc_relation(unit, circle(1, 0, 1))
    assert crossing.relation is Relation.INTERSECTING
    assert min(crossing.angle, math.pi - crossing.angle) == pytest.approx(math.pi / 3)


def test_oriented_relation_flips_with_orientation():
    unit = circle(0, 0, 1)
    outside = circle(3, 0, 1)
    assert disc_relation(unit, outside, oriented=True).relation is Relation.DISJOINT
    # the complement of the unit disc contains the other disc
    assert disc_relation(unit.scaled(-1.0), outside, oriented=True).relation is Relation.NESTED


def test_sweep_stops_at_first_failure():
    sweep = sweep_pleating(build_riley(2j), riley_chain(), [{"rho": 0.3 + 2j}, {"rho": 2j}], truncation=1)
    assert not sweep.passed
    assert sweep.first_failure == 0


def test_pleating_check_rejects_an_invalid_chain():
    chain = riley_chain()
    chain.edges.append(ChainEdge("L", "Z", Word.parse("X")))
    with pytest.raises(ChainInvalid, match="unknown vertex 'Z'"):
        check_pleating_conditions(build_riley(2j), chain, truncation=1)


def test_tangent_translate_away_from_the_incident_discs_fails():
    group = build_riley(2j)
    full = check_pleating_conditions(group, riley_chain(), truncation=1)
    # every cusp tangency of the full chain is an incident translate
    assert full.condition_verdicts["disjointness"]

    # alone, the X-cusp vertex touches Y^-1 and Y of its own disc at cusps
    alone = check_pleating_conditions(group, CircleChainSpec([riley_chain().vertices[0]], []), truncation=1)
    assert alone.condition_verdicts["realness"]
    assert not alone.condition_verdicts["disjointness"]
    failing = [c for c in alone.separations if not c.passed]
    assert {c.second for c in failing} >= {"Y^-1 . L", "Y . L"}
    assert all(c.relation == "tangent" for c in failing)

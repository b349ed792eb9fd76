import math

import numpy as np
import pytest

import config
from services.chain_service import ChainEdge
from services.domain_service import (
    GraftedDomain,
    bracket_holds,
    build_compatible_domains,
    build_grafted_domain,
    certify_domain,
    coarse_holonomy,
    fine_holonomy,
    holonomy_position,
    twist_domain,
)
from services.fixture_registry import get_fixture_registry, pants_chain, pants_hexagon_group
from services.polygon_service import angle_sum_at_vertices
from utils.circlespace import CircleKind, center, from_center_radius, mobius_apply, pencil_of
from utils.errors import FramesNotOnPencil, ParabolicUnsupported, StepFailed, SubarcEmpty
from utils.mobius import ComplexPoint, MobiusMap, fixed_points, one_parameter_power, power
from utils.words import Word

HYPERBOLIC = MobiusMap.of(2, 3, 1, 2)
RILEY_Y = MobiusMap.of(1, 0, 2j, 1)


def loop_edge(stable: str) -> ChainEdge:
    return ChainEdge("P", "P", Word.parse("A"), "hnn", stable=Word.parse(stable), target_leaf=Word.parse("A"))


def pants_domains(a: float = 0.5, edges=None):
    group = pants_hexagon_group(a)
    chain = pants_chain(edges)
    return group, chain, build_compatible_domains(group, chain, verify=False)


def test_pants_hexagon_uses_ford_circles():
    _, _, (domain,) = pants_domains()
    centers = [-3, -0.5, 0.5, 3, 4, -4]
    for c, expected in zip(domain.circles, centers):
        assert center(c).value == pytest.approx(expected)
    pair = fixed_points(domain.pairings[0])
    assert sorted(p.value.real for p in (pair.attracting, pair.repelling)) == pytest.approx([-2.5, -1])
    assert domain.check().passed


def test_pants_hexagon_vertex_angles():
    _, _, (domain,) = pants_domains()
    polygon = domain.polygon()
    cycles = angle_sum_at_vertices(polygon)
    assert len(polygon.vertices) == 6
    assert [v.angle for v in polygon.vertices] == pytest.approx([2 * math.pi / 3] * 6)
    assert len(cycles) == 2
    for cycle in cycles:
        assert len(cycle.points) == 3
        assert cycle.total_angle == pytest.approx(2 * math.pi, abs=1e-6)


def test_angle_sums_stay_constant_along_a_path():
    for a in np.linspace(0.3, 0.8, 10):
        _, _, (domain,) = pants_domains(float(a))
        for cycle in angle_sum_at_vertices(domain.polygon()):
            assert abs(cycle.total_angle - 2 * math.pi) <= 1e-6


def test_holonomy_of_powers():
    assert coarse_holonomy(HYPERBOLIC, power(HYPERBOLIC, 2)) == 2
    assert coarse_holonomy(HYPERBOLIC, one_parameter_power(HYPERBOLIC, 0.5)) == 0
    assert holonomy_position(HYPERBOLIC, one_parameter_power(HYPERBOLIC, 1.5)) == pytest.approx(1.5)
    assert bracket_holds(HYPERBOLIC, power(HYPERBOLIC, 3), 3)
    assert not bracket_holds(HYPERBOLIC, power(HYPERBOLIC, 3), 2)


def test_parabolic_coarse_holonomy():
    assert coarse_holonomy(RILEY_Y, MobiusMap.of(1, 0, 0, 1)) == 0
    with pytest.raises(ParabolicUnsupported):
        coarse_holonomy(RILEY_Y, power(RILEY_Y, 2))
    assert coarse_holonomy(RILEY_Y, power(RILEY_Y, 2), allow_parabolic=True) == 2


def test_fine_holonomy_shares_fixed_points():
    pencil = pencil_of(HYPERBOLIC)
    p = pencil.frame[2]
    hp = mobius_apply(HYPERBOLIC, p)
    fine = fine_holonomy(HYPERBOLIC, (p, hp), (hp, mobius_apply(HYPERBOLIC, hp)))
    assert holonomy_position(HYPERBOLIC, fine) == pytest.approx(1)
    assert fixed_points(fine).attracting.value == pytest.approx(math.sqrt(3))
    unit = from_center_radius(ComplexPoint.finite(0), 1)
    with pytest.raises(FramesNotOnPencil):
        fine_holonomy(HYPERBOLIC, (unit, hp), (hp, p))


def test_symmetric_graft_holonomy():
    edge = loop_edge("A A^-1")
    group, chain, domains = pants_domains(edges=[edge])
    grafted = build_grafted_domain(group, chain, domains)
    assert grafted.deltas == {edge.label: 0}
    graft = grafted.grafts[0]
    # the split circle is P itself, so one sub-arc collapses
    assert graft.degenerate
    assert graft.w.value == pytest.approx(-2)
    assert graft.w_prime.value == pytest.approx(-1.5)


def test_graft_across_the_leaf():
    edge = loop_edge("A")
    group, chain, domains = pants_domains(edges=[edge])
    grafted = build_grafted_domain(group, chain, domains)
    assert grafted.deltas == {edge.label: 1}
    words = [str(p.word) for p in grafted.grafts[0].pairings]
    assert words == ["A^-1 A", "A^-1 A A"]

    report = certify_domain(group, grafted)
    assert report.verdicts["words"]
    assert report.verdicts["1a"]
    assert set(report.to_json()["conditions"]) == {"1a", "1b", "2a", "closure", "words"}


def test_shifted_coarse_holonomy_empties_the_subarc():
    edge = loop_edge("A")
    group, chain, domains = pants_domains(edges=[edge])
    with pytest.raises(SubarcEmpty):
        build_grafted_domain(group, chain, domains, deltas={edge.label: 6})


def test_twist_at_the_base_point_keeps_the_cut():
    edge = loop_edge("A")
    group, chain, domains = pants_domains(edges=[edge])
    base = build_grafted_domain(group, chain, domains)
    twisted = twist_domain(group, chain, base)
    before, after = base.grafts[0], twisted.grafts[0]
    assert after.holonomy.delta == 1
    assert after.rotation == pytest.approx(1)
    for p, q in ((before.w, after.w), (before.z, after.z), (before.w_prime, after.w_prime)):
        assert p.value == pytest.approx(q.value)


def test_grafted_domain_json():
    edge = loop_edge("A")
    group, chain, domains = pants_domains(edges=[edge])
    grafted = build_grafted_domain(group, chain, domains)
    restored = GraftedDomain.from_json(grafted.to_json())
    assert restored.deltas == grafted.deltas
    assert restored.x == grafted.x
    assert len(restored.vertex_domains[0].circles) == 6


def riley_base():
    fixture = get_fixture_registry().get("riley-apollonian")
    domains = build_compatible_domains(fixture.group, fixture.chain, fixture.x)
    return fixture, domains


def test_riley_hexagons_start_at_the_perpendicular_foot():
    fixture, (left, right) = riley_base()
    assert fixture.x == pytest.approx(0.125)
    assert (left.owner, right.owner) == ("L", "R")
    assert left.check().passed and right.check().passed

    # C1 of the commutator-cusp vertex passes through v1 = -0.3 + 0.7i
    assert center(left.circles[0]).value == pytest.approx(-13 / 60 + 0.5j)
    assert center(left.circles[4]).value == pytest.approx(-5 / 6 + 0.5j)
    assert center(left.circles[5]).value == pytest.approx(-0.3 + 0.5j)
    # v1 of the other vertex is (-43 + 35i) / 106, C1 tangent to the real axis at 0
    assert center(right.circles[0]).value == pytest.approx(29j / 70)


def test_riley_hexagon_circles_face_the_vertices():
    _, (left, _) = riley_base()
    c3, c4 = left.circles[2], left.circles[3]
    assert c3.kind() is CircleKind.LINE and c4.kind() is CircleKind.LINE
    v1 = ComplexPoint.finite(-0.3 + 0.7j)
    # C3 is Re z = 11/34 and keeps the left side, C4 is Re z = -23/34 and keeps the right
    assert c3.quadric_value(v1) > 0
    assert c3.quadric_value(ComplexPoint.finite(1 + 0.7j)) < 0
    assert c4.quadric_value(v1) > 0
    assert c4.quadric_value(ComplexPoint.finite(-1 + 0.7j)) < 0


def test_riley_graft_and_certificate():
    fixture, domains = riley_base()
    grafted = build_grafted_domain(fixture.group, fixture.chain, domains)
    assert len(grafted.grafts) == 2
    assert set(grafted.deltas.values()) == {0}

    across_x, across_y = grafted.grafts
    assert across_x.source == "L" and across_y.source == "R"
    assert across_x.w.value == pytest.approx(-23 / 34 - 0.5j)
    assert across_x.w_prime.value == pytest.approx(11 / 34 - 0.5j)
    assert across_y.w.value == pytest.approx(29j / 35)
    assert across_y.w_prime.value == pytest.approx(-29j / 23)

    report = certify_domain(fixture.group, grafted)
    assert report.passed, report.to_json()
    assert report.margins["1b"] > 0


def test_riley_twist_sweep_stays_certified():
    fixture, domains = riley_base()
    base = build_grafted_domain(fixture.group, fixture.chain, domains)
    previous = base
    for k in range(1, 11):
        group = fixture.group.with_params(rho=2j + 0.002j * k)
        previous = twist_domain(group, fixture.chain, base, previous=previous)
        report = certify_domain(group, previous)
        assert report.verdicts["1a"], (k, report.offenders["1a"])
        assert report.verdicts["1b"], (k, report.offenders["1b"])
        assert report.verdicts["words"], (k, report.offenders["words"])


def test_riley_twist_to_an_elliptic_commutator_fails_at_step_one():
    fixture, domains = riley_base()
    base = build_grafted_domain(fixture.group, fixture.chain, domains)
    # rho = i makes tr[X, Y] = 1
    with pytest.raises(StepFailed) as failure:
        twist_domain(fixture.group.with_params(rho=1j), fixture.chain, base)
    assert failure.value.step == 1


def angle_checks(report, edge):
    return {k.subject: k for k in report.checks if k.condition == "1b" and k.subject.startswith(edge.label)}


def test_tilted_cut_meets_the_end_circles_at_forty_five_degrees():
    edge = loop_edge("A")
    group, chain, domains = pants_domains(edges=[edge])
    report = certify_domain(group, build_grafted_domain(group, chain, domains))
    checks = angle_checks(report, edge)
    for label in ("w", "w'"):
        check = checks[f"{edge.label}: {label}"]
        assert check.passed
        assert float(check.detail.split()[1]) == pytest.approx(math.pi / 4, abs=1e-6)


def test_perpendicular_cut_fails_the_angle_window(monkeypatch):
    monkeypatch.setattr(config, "CHAT_TILT", 0.0)
    edge = loop_edge("A")
    group, chain, domains = pants_domains(edges=[edge])
    grafted = build_grafted_domain(group, chain, domains)
    assert grafted.grafts[0].w.value == pytest.approx(-2)
    assert grafted.grafts[0].w_prime.value == pytest.approx(-1.5)

    report = certify_domain(group, grafted)
    assert not report.verdicts["1b"]
    assert {f"{edge.label}: w", f"{edge.label}: w'"} <= set(report.offenders["1b"])
    assert report.margins["1b"] < 0
    assert not report.passed

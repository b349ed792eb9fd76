import pytest

from services.fixture_registry import SCHOTTKY_85_SEED, get_fixture_registry
from services.group_service import build_explicit, build_rank2_trace, build_riley
from services.trace_solver import TraceSolver, TraceSystem, solve_trace_system
from utils.errors import GeometryError, NoConvergence, SingularJacobian
from utils.words import Word


def riley_system(*constraints, overdetermined=False):
    return TraceSystem(
        build_riley(0.5),
        [(Word.parse(w), complex(t)) for w, t in constraints],
        ["rho"],
        overdetermined,
    )


def test_schottky_85_reproduces_seed_point():
    system, seed = get_fixture_registry().get("schottky-85").system
    result = TraceSolver().solve(system, seed)

    assert result.residual_norm <= 1e-10
    for name, seeded in SCHOTTKY_85_SEED.items():
        assert abs(result.values[name].real - seeded.real) <= 5e-4
        assert abs(result.values[name].imag - seeded.imag) <= 5e-4
    group = system.group_at(result.values)
    for word, _ in system.constraints:
        assert abs(group.trace_squared(word) - 4) <= 1e-9
    assert result.history[0] > result.history[-1]


def test_riley_commutator_cusp():
    system = riley_system(("X Y X^-1 Y^-1", 4))
    result = TraceSolver().solve(system, {"rho": 2j + 0.1})
    assert abs(result.values["rho"] - 2j) <= 1e-8
    assert result.iterations >= 1


def test_seed_already_on_solution_takes_no_steps():
    system = riley_system(("X Y", 16))
    result = TraceSolver().solve(system, {"rho": 2})
    assert result.iterations == 0
    assert result.values["rho"] == 2


def test_singular_jacobian():
    # d/drho (2 + rho)^2 vanishes at rho = -2
    system = riley_system(("X Y", 1))
    with pytest.raises(SingularJacobian):
        TraceSolver().solve(system, {"rho": -2})


def test_inconsistent_overdetermined_system():
    system = riley_system(("X Y", 1), ("X Y", 9), overdetermined=True)
    with pytest.raises(NoConvergence):
        TraceSolver().solve(system, {"rho": 0.5})


def test_iteration_limit():
    system = riley_system(("X Y X^-1 Y^-1", 4))
    with pytest.raises(NoConvergence):
        TraceSolver(max_iterations=1).solve(system, {"rho": 1 + 1j})


def test_trace_system_validation():
    base = build_rank2_trace(2, 2, 2)
    with pytest.raises(GeometryError):
        TraceSystem(base, [(Word.parse("X Y"), 4)], ["tX", "tY", "tXY"])
    with pytest.raises(GeometryError):
        TraceSystem(base, [(Word.parse("X Y"), 4)], ["branch"])
    with pytest.raises(GeometryError):
        riley_system(("X Y", 1), ("X Y^-1", 1))
    with pytest.raises(GeometryError):
        TraceSystem(build_explicit({"A": [[2, 1], [1, 1]]}), [(Word.parse("A"), 4)], ["rho"])
    with pytest.raises(GeometryError):
        TraceSolver().solve(riley_system(("X Y", 1)), {})


def test_solve_trace_system_returns_values():
    values = solve_trace_system(riley_system(("X Y", 9)), {"rho": 0.7})
    # (2 + rho)^2 = 9 from 0.7 lands on rho = 1
    assert abs(values["rho"] - 1) <= 1e-9

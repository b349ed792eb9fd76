from pathlib import Path

import numpy as np
import pytest

from services.fixture_registry import get_fixture_registry
from services.group_service import build_explicit
from services.render_service import (
    Layer,
    Scene,
    build_scene,
    emit_ppm,
    emit_svg,
    orbit_circles,
    render_ppm,
    render_svg,
)
from utils.circlespace import from_center_radius
from utils.errors import BudgetExceeded, GeometryError
from utils.mobius import ComplexPoint, MobiusMap

# isometric circles |z -+ 2| = 1 and |z -+ 2i| = 1, a classical Schottky group
SCHOTTKY = build_explicit({
    "A": MobiusMap.of(2, 3, 1, 2).matrix,
    "B": MobiusMap.of(2, -3j, 1j, 2).matrix,
})


def circle(z: complex, r: float):
    return from_center_radius(ComplexPoint.finite(z), r)


def ppm_pixels(data: bytes, n: int) -> np.ndarray:
    header = f"P6\n{n} {n}\n255\n".encode("ascii")
    assert data.startswith(header)
    assert len(data) == len(header) + n * n * 3
    return np.frombuffer(data[len(header):], dtype=np.uint8).reshape(n, n, 3)


def test_orbit_of_length_zero_is_the_seeds():
    seeds = [circle(-2, 1), circle(-2, 1).scaled(3.0), circle(2j, 1)]
    orbit = orbit_circles(SCHOTTKY, seeds, 0)
    assert len(orbit) == 2
    with pytest.raises(GeometryError):
        orbit_circles(SCHOTTKY, seeds, -1)


def test_orbit_counts_reduced_words():
    seed = [circle(-2, 1)]
    # 1 + 4 + 12 reduced words of length <= 2, all images distinct
    assert len(orbit_circles(SCHOTTKY, seed, 1)) == 5
    assert len(orbit_circles(SCHOTTKY, seed, 2)) == 17


def test_orbit_cap():
    with pytest.raises(BudgetExceeded):
        orbit_circles(SCHOTTKY, [circle(-2, 1)], 3, cap=5)


def test_unit_circle_svg():
    scene = Scene([Layer(circles=[circle(0, 1)])])
    svg = render_svg(scene, 512)
    assert '<circle cx="256" cy="256" r="128"' in svg
    assert svg.rstrip().endswith("</svg>")


def test_unit_circle_ppm():
    n = 64
    image = ppm_pixels(render_ppm(Scene([Layer(circles=[circle(0, 1)])]), n), n)
    # radius n / 4 pixels around the image center
    assert (image[31, 47] == 0).all()
    assert (image[31, 31] == 255).all()
    assert (image[31, 52] == 255).all()


def test_rendering_is_deterministic():
    orbit = orbit_circles(SCHOTTKY, [circle(-2, 1), circle(2j, 1)], 2)
    scene = build_scene(orbit=orbit, discs=[circle(0, 1.5)])
    assert render_svg(scene, 256) == render_svg(scene, 256)
    assert render_ppm(scene, 96) == render_ppm(scene, 96)


def test_empty_scene():
    svg = render_svg(Scene(), 128)
    assert "<svg" in svg and "</svg>" in svg
    assert "<circle" not in svg
    image = ppm_pixels(render_ppm(Scene(), 16), 16)
    assert (image == 255).all()


def test_scene_validation():
    with pytest.raises(GeometryError):
        Scene(viewport=(0, 0, 0))
    with pytest.raises(GeometryError):
        render_svg(Scene([Layer(circles=[circle(0, 1)], stroke="octarine")]))
    with pytest.raises(GeometryError):
        render_ppm(Scene([Layer(circles=[circle(0, 1)], stroke="#12345z")]), 8)
    with pytest.raises(GeometryError):
        render_ppm(Scene(), 0)
    with pytest.raises(GeometryError):
        Scene.from_json({"viewport": [0, 1], "layers": []})


def test_scene_json():
    scene = build_scene(orbit=[circle(0, 1)], discs=[circle(1, 0.5)], viewport=(1, 0, 3))
    restored = Scene.from_json(scene.to_json())
    assert restored.viewport == (1.0, 0.0, 3.0)
    assert [layer.stroke for layer in restored.layers] == ["black", "blue"]
    assert render_svg(restored, 64) == render_svg(scene, 64)


def test_emit_files(output_dir):
    scene = build_scene(orbit=[circle(0, 1)])
    svg_path = emit_svg(scene, "orbit.svg", 64)
    ppm_path = emit_ppm(scene, "orbit.ppm", 32)
    assert svg_path == str(output_dir / "orbit.svg")
    assert (output_dir / "orbit.svg").read_text().startswith("<?xml")
    ppm_pixels((output_dir / "orbit.ppm").read_bytes(), 32)
    assert ppm_path == str(output_dir / "orbit.ppm")


def test_riley_orbit_render_is_byte_stable(output_dir):
    fixture = get_fixture_registry().get("riley-apollonian")
    paths = []
    for name in ("first.svg", "second.svg"):
        orbit = orbit_circles(fixture.group, fixture.seeds, 8)
        paths.append(emit_svg(build_scene(orbit=orbit, viewport=fixture.viewport), name, 512))
    first, second = (Path(p).read_bytes() for p in paths)
    assert first == second

    text = first.decode("utf-8")
    assert text.startswith("<?xml") and text.rstrip().endswith("</svg>")
    shallower = orbit_circles(fixture.group, fixture.seeds, 7)
    assert len(orbit) > len(shallower)
    assert text.count("<circle") > 100

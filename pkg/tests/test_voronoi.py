import re

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import Voronoi

from shire.voronoi import (
    DuplicateSites,
    build_voronoi,
    distance_to_skeleton,
    distances_to_skeleton,
    locate,
    phi,
    voronoi_svg,
)


def test_two_sites_single_line():
    d = build_voronoi([0, 1])
    assert len(d.edges) == 1 and not d.vertices
    e = d.edges[0]
    assert e.kind == "line"
    assert e.midpoint == pytest.approx(0.5)
    assert abs(e.direction.real) < 1e-15
    assert distance_to_skeleton(2 + 3j, d) == pytest.approx(1.5)


def test_triangle_three_rays():
    d = build_voronoi([0, 2, 1j])
    assert sorted(e.kind for e in d.edges) == ["ray"] * 3
    assert len(d.vertices) == 1
    v = d.vertices[0]
    # circumcenter of 0, 2, i
    assert v == pytest.approx(1 + 0.5j)
    for e in d.edges:
        origin, direction = e.ray
        assert origin == pytest.approx(v)
        i, j = e.site_pair
        far = origin + 100 * direction
        assert abs(far - d.sites[i]) == pytest.approx(abs(far - d.sites[j]))
        others = [abs(far - s) for k, s in enumerate(d.sites) if k not in (i, j)]
        assert min(others) > abs(far - d.sites[i])


def test_square_has_four_way_vertex():
    d = build_voronoi([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
    assert len(d.edges) == 4
    assert len(d.vertices) == 1 and abs(d.vertices[0]) < 1e-9
    assert locate(0, d).kind == "vertex"


def test_collinear_sites_parallel_lines():
    d = build_voronoi([0, 1, 3])
    assert sorted(e.kind for e in d.edges) == ["line", "line"]
    assert sorted(e.midpoint.real for e in d.edges) == pytest.approx([0.5, 2.0])


def test_duplicate_sites_rejected():
    with pytest.raises(DuplicateSites):
        build_voronoi([0, 1, 1 + 1e-14])
    with pytest.raises(ValueError):
        build_voronoi([1j])


def test_locate_and_phi():
    d = build_voronoi([0, 2, 1j])
    assert locate(0.1 + 0.1j, d).sites == (0,)
    assert locate(1 - 3j, d).kind == "edge"
    assert phi(3, d.sites) == pytest.approx(1.0)


def _random_sites(seed, k):
    rng = np.random.default_rng(seed)
    return list(rng.uniform(-5, 5, k) + 1j * rng.uniform(-5, 5, k))


@pytest.mark.parametrize("seed", range(8))
def test_matches_qhull(seed):
    sites = _random_sites(seed, 3 + seed)
    d = build_voronoi(sites)
    vor = Voronoi(np.column_stack([np.real(sites), np.imag(sites)]))
    ours = {e.site_pair: e for e in d.edges}
    theirs = {tuple(sorted(map(int, p))): rv for p, rv in zip(vor.ridge_points, vor.ridge_vertices)}
    assert set(ours) == set(theirs)
    for pair, rv in theirs.items():
        assert ours[pair].kind == ("ray" if -1 in rv else "segment")
    qv = [complex(x, y) for x, y in vor.vertices]
    mine = sorted(d.vertices, key=lambda z: (z.real, z.imag))
    qv = sorted(qv, key=lambda z: (z.real, z.imag))
    assert len(mine) == len(qv)
    assert max((abs(a - b) for a, b in zip(mine, qv)), default=0) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 8))
def test_distance_matches_brute_force(seed, k):
    sites = _random_sites(seed, k)
    d = build_voronoi(sites)
    rng = np.random.default_rng(seed + 1)
    pts = rng.uniform(-8, 8, 20) + 1j * rng.uniform(-8, 8, 20)
    fast = distances_to_skeleton(pts, d)
    for z, f in zip(pts, fast):
        assert f == pytest.approx(distance_to_skeleton(z, d), abs=1e-12)
        # the nearest skeleton point is equidistant from two sites
        dist = sorted(abs(z - s) for s in sites)
        # moving a distance f can close the gap to the second-nearest site by at most 2 f
        assert dist[1] - dist[0] <= 2 * f + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 7))
def test_edge_points_are_bisector_points(seed, k):
    sites = _random_sites(seed, k)
    d = build_voronoi(sites)
    for e in d.edges:
        lo, hi = e.clipped(50, d.center)
        if lo == hi:  # edge misses the disk
            continue
        for s in np.linspace(lo, hi, 5):
            z = e.point(s)
            i, j = e.site_pair
            dist = [abs(z - w) for w in sites]
            assert dist[i] == pytest.approx(dist[j], abs=1e-9)
            assert min(dist) >= dist[i] - 1e-9


def test_svg_markers():
    d = build_voronoi([0, -2, 4 + 3j, 3 - 5j, -3 - 9j])
    zeros = [0.5 + 0.5j, -1 + 0j, 2 - 2j]
    svg = voronoi_svg(d, zeros, title="a < b")
    assert len(re.findall(r'class="site"', svg)) == 5
    assert len(re.findall(r'class="zero"', svg)) == 3
    assert len(re.findall(r'class="edge"', svg)) == len(d.edges)
    assert "a &lt; b" in svg
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_svg_viewport_is_padded_site_box():
    d = build_voronoi([0, 4, 4j])
    svg = voronoi_svg(d, size=600)
    w, h = map(float, re.search(r'width="([\d.]+)" height="([\d.]+)"', svg).groups())
    # box 4 x 4 grows by 25% per side: 6 x 6 drawn at 600 px
    assert w == pytest.approx(600) and h == pytest.approx(600)
    cx = [float(x) for x in re.findall(r'class="site" cx="([\d.]+)"', svg)]
    assert min(cx) == pytest.approx(100) and max(cx) == pytest.approx(500)
    assert len(re.findall(r'class="edge"', svg)) == 3

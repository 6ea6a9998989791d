from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardybound.geometry import (
    CurveSpec,
    discretize,
    halfstrip_exponent,
    halfstrip_map,
    parse_curve,
)
from hardybound.quadrature import gauss_legendre


@pytest.mark.parametrize("text,kind", [
    ("segment:-1,1@h=0.5", "segment_shifted"),
    ("segment: -2.5, 1e0 @ h=1e-1", "segment_shifted"),
    ("interval:-1,1", "boundary_interval"),
    ("polyline:(-1,1),(0,2),(1,1)", "polyline"),
])
def test_parse_curve(text, kind):
    c = parse_curve(text)
    assert c.kind == kind
    assert parse_curve(c.literal()) == c


@pytest.mark.parametrize("text", ["segment:-1,1", "segment:1,-1@h=1", "segment:-1,1@h=0",
                                  "segment:-1,1@h=-2", "polyline:(0,1)", "polyline:(0,1),(1,-1)",
                                  "circle:1", "segment:-1;1@h=1", "segment:-1,1@h=1,5"])
def test_parse_curve_rejects(text):
    with pytest.raises(ValueError):
        parse_curve(text)


def test_contains():
    c = CurveSpec.segment(-1, 1, 0.5)
    assert c.contains(0.3 + 0.5j) and c.contains(-1 + 0.5j)
    assert not c.contains(1.1 + 0.5j) and not c.contains(0.3 + 0.6j)
    p = CurveSpec.polyline([-1 + 1j, 2j, 1 + 1j])
    assert p.contains(-0.5 + 1.5j) and not p.contains(0.5j)


@pytest.mark.parametrize("mode", ["f64", "dd"])
def test_discretize_lengths(mode):
    rule = gauss_legendre(12, mode)
    seg = discretize(CurveSpec.segment(-2, 1, 0.3), rule)
    assert abs(seg.weights_f64.sum() - 3.0) < 1e-14
    assert np.allclose(seg.points_c128.imag, 0.3)
    poly = discretize(CurveSpec.polyline([-1 + 1j, 2j, 1 + 1j]), rule)
    assert abs(poly.weights_f64.sum() - 2 * math.sqrt(2)) < 1e-14
    assert poly.n == 24


def test_same_as():
    rule = gauss_legendre(8, "f64")
    a = discretize(CurveSpec.segment(-1, 1, 1), rule)
    b = discretize(CurveSpec.segment(-1, 1, 1), rule)
    c = discretize(CurveSpec.segment(-1, 1, 2), rule)
    assert a.same_as(b) and not a.same_as(c)


def test_halfstrip_map_boundary_correspondence():
    y = np.linspace(-0.99, 0.99, 41)
    img = halfstrip_map(1j * y)
    assert np.allclose(img.imag, 0, atol=1e-15) and np.all(np.abs(img.real) < 1)
    assert abs(halfstrip_map(1j) + 1) < 1e-15 and abs(halfstrip_map(-1j) - 1) < 1e-15
    x = np.linspace(0.1, 3, 10)
    assert np.allclose(halfstrip_map(x).real, 0, atol=1e-15) and np.all(halfstrip_map(x).imag > 0)


@given(st.floats(min_value=0.01, max_value=5), st.floats(min_value=-0.99, max_value=0.99))
def test_halfstrip_map_into_upper_half_plane(x, y):
    assert halfstrip_map(complex(x, y)).imag > 0


@given(st.floats(min_value=0.01, max_value=8))
def test_halfstrip_exponent_is_angle_exponent(x):
    # the image point i·sinh(πx/2) sees [−1, 1] under angle π·γ
    zeta = complex(halfstrip_map(x))
    angle = math.atan((zeta.real + 1) / zeta.imag) - math.atan((zeta.real - 1) / zeta.imag)
    assert abs(float(halfstrip_exponent(x)) - angle / math.pi) < 1e-12


def test_halfstrip_exponent_monotone_and_limits():
    g = halfstrip_exponent(np.linspace(0.01, 6, 200))
    assert np.all(np.diff(g) < 0) and g[0] < 1 and g[-1] > 0
    with pytest.raises(ValueError):
        halfstrip_exponent(0.0)

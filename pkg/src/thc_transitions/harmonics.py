"""Spherical harmonics, triple-product integrals and the Wigner 3j oracle.

Harmonics are orthonormal on the unit sphere and carry the Condon-Shortley
phase, so that conj(Y_lm) = (-1)^m Y_{l,-m}.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, NamedTuple, Tuple, Union

import numpy as np

from .errors import InvalidParameters

MAX_DEGREE = 16

ArrayLike = Union[float, np.ndarray]


class HarmonicIndex(NamedTuple):
    """Degree and order of a spherical harmonic."""

    l: int
    m: int


def _index(idx) -> HarmonicIndex:
    l, m = int(idx[0]), int(idx[1])
    if l < 0 or abs(m) > l:
        raise InvalidParameters(f"invalid harmonic index (l={l}, m={m})")
    return HarmonicIndex(l, m)


def _check_degrees(*indices: HarmonicIndex):
    for idx in indices:
        if idx.l > MAX_DEGREE:
            raise InvalidParameters(
                f"degree {idx.l} exceeds the supported maximum {MAX_DEGREE}"
            )


def legendre_normalized(l: int, m: int, theta: ArrayLike) -> np.ndarray:
    """Normalized associated Legendre function with Y_lm = P(cos theta) e^{i m phi}.

    Forward recurrence in l starting from the sectoral term, m >= 0.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.cos(theta)
    sin_theta = np.sin(theta)

    p_mm = np.full_like(x, 1.0 / math.sqrt(4.0 * math.pi))
    for i in range(1, m + 1):
        p_mm = -math.sqrt((2.0 * i + 1.0) / (2.0 * i)) * sin_theta * p_mm
    if l == m:
        return p_mm

    p_prev = p_mm
    p_curr = math.sqrt(2.0 * m + 3.0) * x * p_mm
    for ll in range(m + 2, l + 1):
        a = math.sqrt((4.0 * ll * ll - 1.0) / (ll * ll - m * m))
        b = math.sqrt(((ll - 1.0) ** 2 - m * m) / (4.0 * (ll - 1.0) ** 2 - 1.0))
        p_prev, p_curr = p_curr, a * (x * p_curr - b * p_prev)
    return p_curr


def ylm(idx, theta: ArrayLike, phi: ArrayLike):
    """Orthonormal spherical harmonic Y_lm(theta, phi).

    Returns a complex scalar for scalar input, an array otherwise.
    """
    l, m = _index(idx)
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr < 0) or np.any(theta_arr > math.pi):
        raise InvalidParameters("theta must lie in [0, pi]")

    value = legendre_normalized(l, abs(m), theta_arr) * np.exp(
        1j * abs(m) * np.asarray(phi, dtype=float)
    )
    if m < 0:
        value = (-1) ** m * np.conj(value)
    if np.ndim(value) == 0:
        return complex(value)
    return value


def ylm_gradient(idx, theta: ArrayLike, phi: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """(d/dtheta Y_lm, (1/sin theta) d/dphi Y_lm) on the unit sphere.

    theta must stay away from the poles.
    """
    l, m = _index(idx)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    y = ylm((l, m), theta, phi)

    d_theta = m / np.tan(theta) * y
    if m < l:
        raising = math.sqrt((l - m) * (l + m + 1))
        d_theta = d_theta + raising * np.exp(-1j * phi) * ylm((l, m + 1), theta, phi)
    d_phi = 1j * m * y / np.sin(theta)
    return d_theta, d_phi


def sphere_quadrature(n_theta: int, n_phi: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes in cos theta times equispaced phi nodes.

    Returns:
        (theta, phi, weights) flattened over the tensor grid
    """
    x, w_x = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    theta_grid, phi_grid = np.meshgrid(np.arccos(x), phi, indexing="ij")
    weights = np.outer(w_x, np.full(n_phi, 2.0 * math.pi / n_phi))
    return theta_grid.ravel(), phi_grid.ravel(), weights.ravel()


@dataclass(frozen=True)
class TripleProduct:
    """Value of the integral of Y_1 Y_2 conj(Y_3) over the unit sphere."""

    indices: Tuple[HarmonicIndex, HarmonicIndex, HarmonicIndex]
    value: complex


def triple_product_quadrature(i1, i2, i3) -> complex:
    """Integral of Y_{i1} Y_{i2} conj(Y_{i3}) by a quadrature exact for the integrand."""
    i1, i2, i3 = _index(i1), _index(i2), _index(i3)
    _check_degrees(i1, i2, i3)

    n_theta = i1.l + i2.l + i3.l + 1
    n_phi = abs(i1.m) + abs(i2.m) + abs(i3.m) + 1
    theta, phi, weights = sphere_quadrature(n_theta, n_phi)
    integrand = ylm(i1, theta, phi) * ylm(i2, theta, phi) * np.conj(ylm(i3, theta, phi))
    return complex(np.sum(weights * integrand))


def _factorial(n) -> int:
    return math.factorial(int(n))


@lru_cache(maxsize=None)
def wigner_3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3j symbol from the Racah formula in exact rational arithmetic."""
    if m1 + m2 + m3 != 0:
        return 0.0
    if j3 < abs(j1 - j2) or j3 > j1 + j2:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0

    triangle = Fraction(
        _factorial(j1 + j2 - j3) * _factorial(j1 - j2 + j3) * _factorial(-j1 + j2 + j3),
        _factorial(j1 + j2 + j3 + 1),
    )
    squared = (
        triangle
        * _factorial(j1 + m1) * _factorial(j1 - m1)
        * _factorial(j2 + m2) * _factorial(j2 - m2)
        * _factorial(j3 + m3) * _factorial(j3 - m3)
    )

    k_min = max(0, j2 - j3 - m1, j1 - j3 + m2)
    k_max = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = Fraction(0)
    for k in range(k_min, k_max + 1):
        denom = (
            _factorial(k)
            * _factorial(j1 + j2 - j3 - k)
            * _factorial(j1 - m1 - k)
            * _factorial(j2 + m2 - k)
            * _factorial(j3 - j2 + m1 + k)
            * _factorial(j3 - j1 - m2 + k)
        )
        total += Fraction((-1) ** k, denom)

    if total == 0:
        return 0.0
    sign = -1 if (j1 - j2 - m3) % 2 else 1
    # sqrt(squared) * total, with the square root taken of an exact rational
    magnitude = math.sqrt(squared.numerator) / math.sqrt(squared.denominator)
    return sign * magnitude * float(total)


def selection_allowed(i1, i2, i3) -> bool:
    """True when the triple product may be nonzero."""
    i1, i2, i3 = _index(i1), _index(i2), _index(i3)
    return (
        i1.m + i2.m == i3.m
        and abs(i1.l - i2.l) <= i3.l <= i1.l + i2.l
        and (i1.l + i2.l + i3.l) % 2 == 0
    )


def gaunt_closed_form(i1, i2, i3) -> float:
    """Integral of Y_{i1} Y_{i2} conj(Y_{i3}) through Wigner 3j symbols."""
    i1, i2, i3 = _index(i1), _index(i2), _index(i3)
    _check_degrees(i1, i2, i3)
    if not selection_allowed(i1, i2, i3):
        return 0.0

    (l1, m1), (l2, m2), (l3, m3) = i1, i2, i3
    norm = math.sqrt((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1) / (4.0 * math.pi))
    parity = wigner_3j(l1, l2, l3, 0, 0, 0)
    orders = wigner_3j(l1, l2, l3, m1, m2, -m3)
    phase = -1 if m3 % 2 else 1
    return phase * norm * parity * orders


def interaction_support(l_c: int) -> List[Tuple[int, int]]:
    """(l, n) pairs reached by quadratic products of the critical modes (l_c, n=1)."""
    if l_c not in (1, 2):
        raise InvalidParameters(f"interaction support is tabulated for l_c in {{1, 2}}, got {l_c}")

    support = [(l, 0) for l in range(1, 2 * l_c + 1)]
    support.append((0, 2))
    for l in range(1, 2 * l_c + 1):
        if gaunt_closed_form((l_c, 0), (l_c, 0), (l, 0)) != 0.0:
            support.append((l, 2))
    return sorted(support, key=lambda pair: (pair[1], pair[0]))


def all_indices(l_max: int) -> List[HarmonicIndex]:
    return [HarmonicIndex(l, m) for l in range(l_max + 1) for m in range(-l, l + 1)]


def orthonormality_matrix(l_max: int) -> np.ndarray:
    """Gram matrix of all Y_lm with l <= l_max under an exact quadrature."""
    indices = all_indices(l_max)
    theta, phi, weights = sphere_quadrature(2 * l_max + 1, 2 * l_max + 1)
    table = np.array([ylm(idx, theta, phi) for idx in indices])
    return (table * weights) @ np.conj(table).T


@dataclass(frozen=True)
class HarmonicsCheckReport:
    """Agreement between quadrature and closed-form triple products."""

    l_max: int
    n_triples: int
    n_allowed: int
    max_deviation: float
    selection_violations: int
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tolerance and self.selection_violations == 0


def harmonics_check(l_max: int) -> HarmonicsCheckReport:
    """Compare quadrature and closed-form values for every index triple up to l_max.

    One quadrature grid exact for degree 3 l_max is shared by all triples.
    Each first index is reduced to its worst deviation before the next.
    """
    if l_max > MAX_DEGREE:
        raise InvalidParameters(
            f"degree {l_max} exceeds the supported maximum {MAX_DEGREE}"
        )
    indices = all_indices(l_max)
    position = {idx: pos for pos, idx in enumerate(indices)}
    n_nodes = 3 * l_max + 1
    theta, phi, weights = sphere_quadrature(n_nodes, n_nodes)
    table = np.array([ylm(idx, theta, phi) for idx in indices])

    size = len(indices)
    conj_table = np.conj(table).T
    max_deviation, violations, n_allowed = 0.0, 0, 0
    for a, (l1, m1) in enumerate(indices):
        quadrature = (table[a] * table * weights) @ conj_table
        reference = np.zeros((size, size))
        allowed = np.zeros((size, size), dtype=bool)
        for b, (l2, m2) in enumerate(indices):
            m3 = m1 + m2
            for l3 in range(abs(l1 - l2), min(l1 + l2, l_max) + 1, 2):
                if abs(m3) > l3:
                    continue
                c = position[HarmonicIndex(l3, m3)]
                allowed[b, c] = True
                reference[b, c] = gaunt_closed_form((l1, m1), (l2, m2), (l3, m3))

        max_deviation = max(max_deviation, float(np.abs(quadrature - reference).max()))
        violations += int(np.count_nonzero(np.abs(quadrature[~allowed]) >= 1e-12))
        n_allowed += int(np.count_nonzero(allowed))

    return HarmonicsCheckReport(
        l_max=l_max,
        n_triples=size**3,
        n_allowed=n_allowed,
        max_deviation=max_deviation,
        selection_violations=violations,
    )

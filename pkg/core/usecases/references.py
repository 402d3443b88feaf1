"""Closed-form and quadrature reference curves for integrated densities of states."""

import math
from typing import Callable, Dict, Tuple

import numpy as np
from scipy import integrate

from core.exceptions import UnknownReferenceException

Curve = Callable[[np.ndarray], np.ndarray]

# built-in kernels on a k-regular lattice as a*A + b*I
LATTICE_FORMS: Dict[str, Callable[[int], Tuple[float, float]]] = {
    "adjacency": lambda k: (1.0, 0.0),
    "laplacian": lambda k: (1.0, -float(k)),
    "graph-laplacian": lambda k: (-1.0, float(k)),
    "degree": lambda k: (0.0, float(k)),
    "zero": lambda k: (0.0, 0.0),
}


def arcsine_cdf(x: np.ndarray) -> np.ndarray:
    """IDS of the adjacency operator on the integer line: 1 - arccos(x/2)/pi on [-2, 2]."""
    clipped = np.clip(np.asarray(x, dtype=float) / 2.0, -1.0, 1.0)
    return 1.0 - np.arccos(clipped) / np.pi


def _square_lattice_cdf(x: float) -> float:
    # adjacency of Z^2 is the sum of two independent arcsine variables
    if x <= -4.0:
        return 0.0
    if x >= 4.0:
        return 1.0
    value, _ = integrate.quad(lambda theta: float(arcsine_cdf(x - 2.0 * math.cos(theta))), 0.0, math.pi, limit=200)
    return value / math.pi


def square_lattice_cdf(x: np.ndarray) -> np.ndarray:
    return np.vectorize(_square_lattice_cdf, otypes=[float])(x)


def kesten_mckay_density(x: np.ndarray, d: int) -> np.ndarray:
    """Limiting adjacency spectral density of random d-regular graphs."""
    x = np.asarray(x, dtype=float)
    edge = 4.0 * (d - 1)
    inside = np.clip(edge - x * x, 0.0, None)
    return d * np.sqrt(inside) / (2.0 * np.pi * (d * d - x * x))


def kesten_mckay_cdf(d: int) -> Curve:
    radius = 2.0 * math.sqrt(d - 1)

    def single(x: float) -> float:
        if x <= -radius:
            return 0.0
        if x >= radius:
            return 1.0
        value, _ = integrate.quad(lambda t: float(kesten_mckay_density(t, d)), -radius, x, limit=200)
        return min(1.0, max(0.0, value))

    return np.vectorize(single, otypes=[float])


def _transformed(base: Curve, a: float, b: float) -> Curve:
    """IDS of a*X + b for a variable X with IDS base."""
    if a > 0:
        return lambda x: base((np.asarray(x, dtype=float) - b) / a)
    if a < 0:
        return lambda x: 1.0 - base((np.asarray(x, dtype=float) - b) / a)
    return lambda x: (np.asarray(x, dtype=float) >= b).astype(float)


def reference_curve(name: str, kernel: str = "adjacency") -> Curve:
    """Reference IDS by name: arccos-1d, lattice-2d or kesten-mckay:<d>, adapted to a built-in kernel."""
    if name == "arccos-1d":
        base, degree = arcsine_cdf, 2
    elif name == "lattice-2d":
        base, degree = square_lattice_cdf, 4
    elif name.startswith("kesten-mckay:"):
        try:
            degree = int(name.split(":", 1)[1])
        except ValueError:
            raise UnknownReferenceException(name, "degree must be an integer") from None
        if degree < 2:
            raise UnknownReferenceException(name, "degree must be at least 2")
        base = kesten_mckay_cdf(degree)
    else:
        raise UnknownReferenceException(name)

    form = LATTICE_FORMS.get(kernel)
    if form is None:
        raise UnknownReferenceException(name, f"no lattice form for kernel '{kernel}'")
    a, b = form(degree)
    return _transformed(base, a, b)

"""The theta-deformed symplectic structure of the 2D noncommutative plane.

Coordinates are ordered (x, y, px, py).  The only deformation sits in the
position block, {x, y} = theta; mixed and momentum brackets are canonical.
Derivatives are exact (forward-mode duals), never symbolic and never finite
differences (those live in the test suite as an independent oracle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .duals import Dual
from .params import NCParams

COORD_NAMES = ("x", "y", "px", "py")


class FieldEvaluationError(RuntimeError):
    """A scalar field produced a non-finite value or gradient."""


@dataclass(frozen=True)
class PhasePoint:
    x: float
    y: float
    px: float
    py: float

    def __post_init__(self):
        for name in COORD_NAMES:
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"phase-space coordinate {name} is not finite: {v!r}")

    def as_array(self):
        return np.array([self.x, self.y, self.px, self.py])

    @classmethod
    def from_array(cls, z):
        x, y, px, py = (float(v) for v in z)
        return cls(x, y, px, py)


def _coords(z):
    """Accept PhasePoint, sequence, or ndarray; return 4 scalars."""
    if isinstance(z, PhasePoint):
        return z.x, z.y, z.px, z.py
    x, y, px, py = z
    return x, y, px, py


class ScalarField:
    """A differentiable function f(x, y, px, py, t) on phase space.

    ``fn`` must be generic arithmetic: it is evaluated on floats and on dual
    numbers alike, which is where the exact gradient comes from.  Fields
    compose with +, -, * so products for Leibniz-type identities can be
    built without writing new closures.
    """

    __slots__ = ("fn", "name")

    def __init__(self, fn, name="f"):
        self.fn = fn
        self.name = name

    def __repr__(self):
        return f"ScalarField({self.name})"

    def __call__(self, x, y, px, py, t=0.0):
        return self.fn(x, y, px, py, t)

    def value(self, z, t=0.0):
        x, y, px, py = _coords(z)
        v = self.fn(x, y, px, py, t)
        if isinstance(v, Dual):
            return v
        if not math.isfinite(v):
            raise FieldEvaluationError(f"field {self.name!r} returned {v!r} at {z}")
        return v

    def partials(self, x, y, px, py, t=0.0):
        """The four phase-space partial derivatives at one point.

        When any input already carries a dual (a nested differentiation in
        progress), every other coordinate is lifted as a constant of the new
        level; mixing levels would silently conflate the two seeds.
        """
        c = (x, y, px, py, t)
        lift = any(isinstance(v, Dual) for v in c)
        out = []
        for i in range(4):
            if lift:
                args = [Dual(v, 0.0) for v in c]
            else:
                args = list(c)
            args[i] = Dual(c[i], 1.0)
            r = self.fn(*args)
            out.append(r.eps if isinstance(r, Dual) else 0.0)
        return out

    def gradient(self, z, t=0.0):
        x, y, px, py = _coords(z)
        g = self.partials(x, y, px, py, t)
        arr = np.array([v for v in g], dtype=float)
        if not np.all(np.isfinite(arr)):
            raise FieldEvaluationError(
                f"gradient of field {self.name!r} is not finite at {z}: {arr}"
            )
        return arr

    # algebra on fields, enough to state Leibniz-type identities in tests

    def __add__(self, o):
        o = _as_field(o)
        f, g = self.fn, o.fn
        return ScalarField(lambda x, y, px, py, t: f(x, y, px, py, t) + g(x, y, px, py, t),
                           f"({self.name}+{o.name})")

    def __sub__(self, o):
        o = _as_field(o)
        f, g = self.fn, o.fn
        return ScalarField(lambda x, y, px, py, t: f(x, y, px, py, t) - g(x, y, px, py, t),
                           f"({self.name}-{o.name})")

    def __mul__(self, o):
        o = _as_field(o)
        f, g = self.fn, o.fn
        return ScalarField(lambda x, y, px, py, t: f(x, y, px, py, t) * g(x, y, px, py, t),
                           f"({self.name}*{o.name})")

    __rmul__ = __mul__

    def __neg__(self):
        f = self.fn
        return ScalarField(lambda x, y, px, py, t: -f(x, y, px, py, t), f"(-{self.name})")


def _as_field(o):
    if isinstance(o, ScalarField):
        return o
    if isinstance(o, (int, float)):
        c = float(o)
        return ScalarField(lambda x, y, px, py, t: c, repr(c))
    raise TypeError(f"cannot combine ScalarField with {type(o).__name__}")


def constant_field(c, name=None):
    c = float(c)
    return ScalarField(lambda x, y, px, py, t: c, name or repr(c))


X = ScalarField(lambda x, y, px, py, t: x, "x")
Y = ScalarField(lambda x, y, px, py, t: y, "y")
PX = ScalarField(lambda x, y, px, py, t: px, "px")
PY = ScalarField(lambda x, y, px, py, t: py, "py")


def bracket_terms(df, dg, theta):
    """Combine two gradient 4-tuples into the deformed bracket value."""
    fx, fy, fpx, fpy = df
    gx, gy, gpx, gpy = dg
    canonical = fx * gpx + fy * gpy - fpx * gx - fpy * gy
    return canonical + theta * (fx * gy - fy * gx)


def poisson_bracket(f, g, z, t=0.0, p=None, theta=None):
    """{f, g} at (z, t) for NC parameter theta (or p.theta)."""
    th = p.theta if p is not None else theta
    if th is None:
        raise TypeError("poisson_bracket needs p=NCParams or theta=")
    return bracket_field(f, g, th).value(z, t)


def bracket_field(f, g, theta):
    """{f, g} as a new ScalarField, evaluable at dual points (nestable)."""
    th = float(theta)

    def fn(x, y, px, py, t):
        df = f.partials(x, y, px, py, t)
        dg = g.partials(x, y, px, py, t)
        return bracket_terms(df, dg, th)

    return ScalarField(fn, f"{{{f.name},{g.name}}}")


def jacobi_residual(f, g, h, z, t=0.0, p=None, theta=None):
    """{f,{g,h}} - {{f,g},h} - {g,{f,h}} at (z, t); zero for a Lie bracket."""
    th = p.theta if p is not None else theta
    if th is None:
        raise TypeError("jacobi_residual needs p=NCParams or theta=")
    gh = bracket_field(g, h, th)
    fg = bracket_field(f, g, th)
    fh = bracket_field(f, h, th)
    r = (poisson_bracket(f, gh, z, t, theta=th)
         - poisson_bracket(fg, h, z, t, theta=th)
         - poisson_bracket(g, fh, z, t, theta=th))
    if not math.isfinite(r):
        raise FieldEvaluationError(
            f"Jacobi residual is not finite for ({f.name},{g.name},{h.name}) at {z}")
    return r


def galilei_generators(p: NCParams):
    """The free-particle Galilei generators H, p1, p2, J, k1, k2.

    J carries the theta/2 p.p tail and the boosts the m*theta eps_ij p_j
    tail; k_i depend on time explicitly.
    """
    m, th = p.m, p.theta
    inv2m = 0.5 / m

    H = ScalarField(lambda x, y, px, py, t: (px * px + py * py) * inv2m, "H")
    P1 = ScalarField(lambda x, y, px, py, t: px, "p1")
    P2 = ScalarField(lambda x, y, px, py, t: py, "p2")
    J = ScalarField(
        lambda x, y, px, py, t: x * py - y * px + 0.5 * th * (px * px + py * py), "J")
    K1 = ScalarField(lambda x, y, px, py, t: m * x - px * t + m * th * py, "k1")
    K2 = ScalarField(lambda x, y, px, py, t: m * y - py * t - m * th * px, "k2")
    return H, P1, P2, J, K1, K2


@dataclass(frozen=True)
class AlgebraReport:
    """Max residual per Galilei bracket relation over a set of sample points."""

    residuals: dict
    tol: float
    samples: tuple
    t: float
    params: NCParams

    @property
    def ok(self):
        return all(r < self.tol for r in self.residuals.values())

    def rows(self):
        for name, r in self.residuals.items():
            yield name, r, r < self.tol

    def max_residual(self):
        return max(self.residuals.values())

    def merged_with(self, other):
        """Pointwise max of two reports (e.g. evaluated at different times)."""
        res = {k: max(v, other.residuals[k]) for k, v in self.residuals.items()}
        return AlgebraReport(res, self.tol, self.samples + other.samples,
                             self.t, self.params)


def sample_points(n, seed=42, box=10.0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-box, box, size=(n, 4))
    return [PhasePoint.from_array(row) for row in pts]


def verify_algebra(p: NCParams, t=0.0, samples=None, tol=1e-9):
    """Evaluate all eight Galilei bracket relations at every sample point.

    The expected right-hand sides, including the central extensions m and
    m^2*theta, are evaluated alongside; a failing relation shows up as a
    large residual, never as an exception.
    """
    if samples is None:
        samples = sample_points(100)
    if len(samples) == 0:
        raise ValueError("verify_algebra needs at least one sample point")
    m, th = p.m, p.theta
    H, P1, P2, J, K1, K2 = galilei_generators(p)
    Ps = (P1, P2)
    Ks = (K1, K2)
    eps = ((0.0, 1.0), (-1.0, 0.0))

    zero = lambda z, t: 0.0
    relations = {
        "{p_i,H}=0": [(Pi, H, zero) for Pi in Ps],
        "{p_i,p_j}=0": [(P1, P2, zero)],
        "{J,H}=0": [(J, H, zero)],
        "{J,p_i}=eps_ij p_j": [
            (J, P1, lambda z, t: eps[0][1] * P2.value(z, t)),
            (J, P2, lambda z, t: eps[1][0] * P1.value(z, t)),
        ],
        "{k_j,H}=p_j": [(Kj, H, lambda z, t, Pj=Pj: Pj.value(z, t))
                        for Kj, Pj in zip(Ks, Ps)],
        "{k_j,p_i}=m delta_ji": [
            (Ks[j], Ps[i], lambda z, t, d=(m if i == j else 0.0): d)
            for j in range(2) for i in range(2)
        ],
        "{J,k_i}=eps_ij k_j": [
            (J, K1, lambda z, t: eps[0][1] * K2.value(z, t)),
            (J, K2, lambda z, t: eps[1][0] * K1.value(z, t)),
        ],
        "{k_i,k_j}=-m^2 theta eps_ij": [
            (K1, K2, lambda z, t: -m * m * th),
        ],
    }

    residuals = {}
    for name, cases in relations.items():
        worst = 0.0
        for f, g, rhs in cases:
            bf = bracket_field(f, g, th)
            for z in samples:
                r = abs(bf.value(z, t) - rhs(z, t))
                if r > worst:
                    worst = r
        residuals[name] = worst
    return AlgebraReport(residuals, tol, tuple(samples), t, p)

"""Hermitian linear algebra on C^3 with a signature (2,1) form.

Points of the complex hyperbolic plane and its boundary are carried as
homogeneous 3-vectors together with the Hermitian form that evaluates them.
The sesquilinear convention throughout is

    <u, v> = u^H J v

(conjugate-linear in the first slot, linear in the second).  All derived
formulas in the other modules assume this convention; tests flag any
identity that only holds after a conjugation swap.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9
PROJ_EQ_TOL = 1e-8


def tolerance(tol=None):
    """Resolve a tolerance: explicit argument > CRLAB_TOL env var > default."""
    if tol is not None:
        return float(tol)
    env = os.environ.get("CRLAB_TOL")
    if env:
        return float(env)
    return DEFAULT_TOL


class Model(enum.Enum):
    BALL = "ball"
    SIEGEL = "siegel"
    CUSTOM = "custom"


class Location(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


class GeometryError(ValueError):
    """Raised when an operation's geometric preconditions fail."""


def _signature(J):
    eigs = np.linalg.eigvalsh(J)
    pos = int(np.sum(eigs > 0))
    neg = int(np.sum(eigs < 0))
    return pos, neg


@dataclass(frozen=True)
class HermitianSpace:
    """A Hermitian form of signature (2,1) on C^3."""

    J: np.ndarray
    model_tag: Model = Model.CUSTOM
    J_inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        J = np.asarray(self.J, dtype=complex)
        if J.shape != (3, 3):
            raise GeometryError("form matrix must be 3x3")
        if np.abs(J - J.conj().T).max() > 1e-12:
            raise GeometryError("form matrix must be Hermitian")
        if _signature(J) != (2, 1):
            raise GeometryError("form must have signature (2,1)")
        J.setflags(write=False)
        object.__setattr__(self, "J", J)
        J_inv = np.linalg.inv(J)
        J_inv.setflags(write=False)
        object.__setattr__(self, "J_inv", J_inv)

    def __eq__(self, other):
        if not isinstance(other, HermitianSpace):
            return NotImplemented
        return self.model_tag == other.model_tag and np.array_equal(self.J, other.J)

    def __hash__(self):
        return hash((self.model_tag, self.J.tobytes()))

    def point(self, coords) -> "HVec":
        return HVec(np.asarray(coords, dtype=complex), self)


def ball_model() -> HermitianSpace:
    return HermitianSpace(np.diag([1.0, 1.0, -1.0]).astype(complex), Model.BALL)


def siegel_model() -> HermitianSpace:
    J = np.zeros((3, 3), dtype=complex)
    J[0, 2] = J[1, 1] = J[2, 0] = 1.0
    return HermitianSpace(J, Model.SIEGEL)


def custom_model(J) -> HermitianSpace:
    return HermitianSpace(np.asarray(J, dtype=complex), Model.CUSTOM)


@dataclass(frozen=True)
class HVec:
    """A vector of C^3 interpreted in a fixed Hermitian space.

    A nonzero HVec doubles as a homogeneous representative of a point of
    CP^2; `locate` classifies the point against the null cone.
    """

    v: np.ndarray
    space: HermitianSpace

    def __post_init__(self):
        v = np.asarray(self.v, dtype=complex).reshape(3)
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    def __add__(self, other: "HVec") -> "HVec":
        _check_same_space(self, other)
        return HVec(self.v + other.v, self.space)

    def __sub__(self, other: "HVec") -> "HVec":
        _check_same_space(self, other)
        return HVec(self.v - other.v, self.space)

    def __mul__(self, scalar) -> "HVec":
        return HVec(self.v * complex(scalar), self.space)

    __rmul__ = __mul__

    def is_zero(self, tol=1e-14) -> bool:
        return bool(np.abs(self.v).max() <= tol)

    def norm(self) -> float:
        """Real value of <v, v>."""
        return inner(self, self).real

    def unit(self) -> "HVec":
        """Rescale to Euclidean norm 1 (projective representative)."""
        n = np.linalg.norm(self.v)
        if n == 0:
            raise GeometryError("zero vector has no projective class")
        return HVec(self.v / n, self.space)

    def apply(self, M) -> "HVec":
        return HVec(np.asarray(M, dtype=complex) @ self.v, self.space)


def _check_same_space(u: HVec, v: HVec):
    if u.space != v.space:
        raise GeometryError("operands live in different Hermitian spaces")


def inner(u: HVec, v: HVec) -> complex:
    """<u, v> = u^H J v; conjugate-symmetric: inner(u,v) = conj(inner(v,u))."""
    _check_same_space(u, v)
    return complex(u.v.conj() @ (u.space.J @ v.v))


def box(u: HVec, v: HVec) -> HVec:
    """Hermitian cross product: the unique s with <s, r> = det(u, v, r).

    Computed as J^{-1} conj(u x v); for the ball and Siegel forms this
    reduces to the usual coordinate formulas.  Collinear inputs give the
    zero vector.
    """
    _check_same_space(u, v)
    cross = np.array(
        [
            u.v[1] * v.v[2] - u.v[2] * v.v[1],
            u.v[2] * v.v[0] - u.v[0] * v.v[2],
            u.v[0] * v.v[1] - u.v[1] * v.v[0],
        ]
    )
    return HVec(u.space.J_inv @ cross.conj(), u.space)


def locate(v: HVec, tol=None) -> Location:
    """Classify [v] against the null cone of the form, with a tolerance band.

    The band scales with the squared Euclidean norm of the representative,
    so the answer is invariant under rescaling of v.
    """
    if v.is_zero():
        raise GeometryError("cannot locate the zero vector")
    tol = tolerance(tol)
    scale = float(np.linalg.norm(v.v)) ** 2
    n = v.norm()
    if n < -tol * scale:
        return Location.INSIDE
    if n > tol * scale:
        return Location.OUTSIDE
    return Location.BOUNDARY


@dataclass(frozen=True)
class Line:
    """A complex line of CP^2, stored through its pole for the form."""

    pole_vec: HVec

    def contains(self, q: HVec, tol=None) -> bool:
        tol = tolerance(tol)
        scale = np.linalg.norm(self.pole_vec.v) * np.linalg.norm(q.v)
        return abs(inner(self.pole_vec, q)) <= tol * max(scale, 1e-300)


def polar(p: HVec) -> Line:
    """The polar line of [p]: all [q] with <p, q> = 0."""
    if p.is_zero():
        raise GeometryError("zero vector has no polar line")
    return Line(p)


def pole(line: Line) -> HVec:
    return line.pole_vec


def line_through(p: HVec, q: HVec) -> Line:
    """The line through two distinct points; its pole is [p box q]."""
    bp = box(p, q)
    if bp.is_zero(1e-13 * max(np.linalg.norm(p.v) * np.linalg.norm(q.v), 1e-300)):
        raise GeometryError("points are projectively equal; line is not unique")
    return Line(bp)


def proj_equal(u: HVec, v: HVec, tol=PROJ_EQ_TOL) -> bool:
    """Projective equality after optimal phase/scale alignment."""
    return proj_distance(u, v) <= tol


def proj_distance(u: HVec, v: HVec) -> float:
    """Euclidean distance between unit representatives at optimal phase."""
    a = u.unit().v
    b = v.unit().v
    lam = np.vdot(b, a)  # projection coefficient of a on b
    return float(np.linalg.norm(a - lam * b))


def is_autopolar_triple(p: HVec, q: HVec, r: HVec, tol=None) -> bool:
    """Three mutually orthogonal, non-isotropic points form an auto-polar triple."""
    tol = tolerance(tol)

    def _ok(a, b):
        scale = max(np.linalg.norm(a.v) * np.linalg.norm(b.v), 1e-300)
        return abs(inner(a, b)) <= tol * scale

    def _noniso(a):
        return locate(a, tol) is not Location.BOUNDARY

    return (
        _ok(p, q) and _ok(q, r) and _ok(r, p) and _noniso(p) and _noniso(q) and _noniso(r)
    )

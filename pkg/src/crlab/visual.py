"""The visual sphere of a point: charts, projections and angle bounds.

The visual sphere of [p] is the CP^1 of complex lines through [p].  Two
points p', p'' of the polar line of p give the chart

    psi(q) = <p', q> / <p'', q>,

which depends only on the line through [p] and [q].  Projections of
bisectors based at p are closed disks here; their boundaries are honest
circles in every chart, which the intersection controls below exploit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    GeometryError,
    HVec,
    Location,
    box,
    inner,
    locate,
    tolerance,
)
from .bisector import Bisector, BisectorKind
from .isometry import Isometry

INF = complex(math.inf, 0.0)


def is_inf(z) -> bool:
    return not (math.isfinite(z.real) and math.isfinite(z.imag))


def ext_div(num: complex, den: complex, tol=1e-12) -> complex:
    """Division on the extended complex plane with a single infinity."""
    if abs(den) <= tol * abs(num):
        if num == 0 and den == 0:
            raise GeometryError("0/0 in extended-complex division")
        return INF
    return num / den


@dataclass(frozen=True)
class Mobius:
    """A fractional-linear map (az + b)/(cz + d) with explicit infinity."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex).reshape(2, 2)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def __call__(self, z: complex) -> complex:
        (a, b), (c, d) = self.m
        if is_inf(z):
            return ext_div(a, c)
        return ext_div(a * z + b, c * z + d)

    def compose(self, other: "Mobius") -> "Mobius":
        return Mobius(self.m @ other.m)

    def inv(self) -> "Mobius":
        (a, b), (c, d) = self.m
        return Mobius(np.array([[d, -b], [-c, a]]))

    def fixed_zero_inf_factor(self, tol=1e-9):
        """If the map fixes 0 and infinity, the multiplier z -> kz; else None."""
        (a, b), (c, d) = self.m
        scale = np.abs(self.m).max()
        if abs(b) <= tol * scale and abs(c) <= tol * scale and abs(d) > tol * scale:
            return a / d
        return None


def mobius_to_zero_one_inf(z1: complex, z2: complex, z3: complex) -> Mobius:
    """The unique Mobius map sending (z1, z2, z3) to (0, 1, infinity)."""
    if is_inf(z1):
        return Mobius([[0.0, z2 - z3], [1.0, -z3]])
    if is_inf(z2):
        return Mobius([[1.0, -z1], [1.0, -z3]])
    if is_inf(z3):
        return Mobius([[1.0, -z1], [0.0, z2 - z1]])
    return Mobius([[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]])


def mobius_from_pairs(zs, ws) -> Mobius:
    """The Mobius map with ws[i] = f(zs[i]) for three distinct pairs."""
    return mobius_to_zero_one_inf(*ws).inv().compose(mobius_to_zero_one_inf(*zs))


@dataclass(frozen=True)
class VisualChart:
    """A coordinate on the visual sphere of `base` given by two polar points."""

    base: HVec
    p_prime: HVec
    p_dprime: HVec

    def __post_init__(self):
        scale = np.linalg.norm(self.base.v)
        for w in (self.p_prime, self.p_dprime):
            if abs(inner(w, self.base)) > 1e-8 * scale * np.linalg.norm(w.v):
                raise GeometryError("chart points must lie on the polar line of base")
        if box(self.p_prime, self.p_dprime).is_zero(1e-12):
            raise GeometryError("chart points must be distinct")

    def __call__(self, q: HVec) -> complex:
        return self.value(q)

    def value(self, q: HVec) -> complex:
        """Chart coordinate of the line through base and q (q != base)."""
        num = inner(self.p_prime, q)
        den = inner(self.p_dprime, q)
        if num == 0 and den == 0:
            raise GeometryError("chart undefined at its base point")
        return ext_div(num, den)

    def values(self, V: np.ndarray) -> np.ndarray:
        """Vectorized chart on an array of representatives, shape (..., 3)."""
        J = self.base.space.J
        num = np.einsum("k,kl,...l->...", self.p_prime.v.conj(), J, V)
        den = np.einsum("k,kl,...l->...", self.p_dprime.v.conj(), J, V)
        with np.errstate(divide="ignore", invalid="ignore"):
            return num / den


def induced_action(chart: VisualChart, g: Isometry, samples=None, tol=None) -> Mobius:
    """The Mobius map the chart assigns to an isometry fixing the base point.

    Built from three sample lines and cross-checked on the remaining ones.
    """
    tol = tolerance(tol)
    base = chart.base
    gb = g.apply(base)
    scale = np.linalg.norm(gb.v)
    lam = None
    for k in range(3):
        if abs(base.v[k]) > 1e-6 * np.linalg.norm(base.v):
            lam = gb.v[k] / base.v[k]
            break
    if lam is None or np.abs(gb.v - lam * base.v).max() > 1e-6 * scale:
        raise GeometryError("isometry does not fix the chart's base point")
    if samples is None:
        sp = base.space
        samples = [
            HVec([1.0, 0.3 + 0.1j, -0.2], sp),
            HVec([0.1j, 1.0, 0.7], sp),
            HVec([-0.5, 0.25j, 1.0], sp),
            HVec([0.9, -0.6, 0.33 + 0.75j], sp),
            HVec([0.2, 1.1j, -0.8 + 0.1j], sp),
        ]
    zs = [chart.value(q) for q in samples]
    ws = [chart.value(g.apply(q)) for q in samples]
    mob = mobius_from_pairs(zs[:3], ws[:3])
    for z, w in zip(zs[3:], ws[3:]):
        w2 = mob(z)
        if is_inf(w) != is_inf(w2):
            raise GeometryError("induced action inconsistent at infinity")
        if not is_inf(w) and abs(w - w2) > 1e-6 * max(1.0, abs(w)):
            raise GeometryError("induced action failed cross-check")
    return mob


def tangency_check(p: HVec, q: HVec, r: HVec, tol=None) -> bool:
    """Whether the line through [p] and [r] meets the spinal surface of
    (p, q) only at [r].

    Requires equal nonzero norms, a real nonzero <p, q>, and r on the
    spinal surface; then the test is the existence of a sign eps with
    <p,r> = eps <q,r> while <q,p> != eps <p,p>.
    """
    tol = tolerance(tol)
    npp, nq = p.norm(), q.norm()
    scale = float(np.linalg.norm(p.v) * np.linalg.norm(q.v))
    if abs(npp - nq) > 1e3 * tol * max(scale, 1.0):
        raise GeometryError("tangency criterion needs equal-norm lifts")
    if abs(npp) <= 1e3 * tol * max(scale, 1.0):
        raise GeometryError("tangency criterion needs non-null lifts")
    pq = inner(p, q)
    if abs(pq.imag) > 1e3 * tol * max(scale, 1.0) or abs(pq) <= tol * scale:
        raise GeometryError("tangency criterion needs a real nonzero <p, q>")
    if locate(r, 1e3 * tol) is not Location.BOUNDARY:
        raise GeometryError("r must be a boundary point")
    pr, qr = inner(p, r), inner(q, r)
    rscale = max(abs(pr), abs(qr), 1e-300)
    if abs(abs(pr) - abs(qr)) > 1e3 * tol * rscale:
        raise GeometryError("r must lie on the spinal surface of (p, q)")
    for eps in (1.0, -1.0):
        if abs(pr - eps * qr) <= 1e3 * tol * rscale:
            if abs(pq - eps * npp) > 1e3 * tol * max(scale, 1.0):
                return True
    return False


def line_spinal_crossings(p: HVec, q: HVec, r: HVec, n=4096):
    """Grid oracle: count sign changes of the spinal residual along the
    boundary circle of the line through [p] and [r]."""
    circle = boundary_circle_of_plane(p, r)
    if circle is None:
        raise GeometryError("line misses the boundary sphere")
    ts = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    Z = circle(ts)
    J = p.space.J
    ap = np.abs(np.einsum("k,kl,...l->...", p.v.conj(), J, Z))
    aq = np.abs(np.einsum("k,kl,...l->...", q.v.conj(), J, Z))
    res = ap - aq
    scale = float(np.maximum(ap, aq).max())
    res = np.where(np.abs(res) <= 1e-9 * max(scale, 1e-300), 0.0, res)
    signs = np.sign(res)
    # drop near-zeros so only transversal crossings flip the sign
    nz = signs[signs != 0]
    if len(nz) == 0:
        return 0
    return int(np.count_nonzero(nz != np.roll(nz, 1)))


def _plane_basis(p: HVec, r: HVec):
    return np.stack([p.v, r.v], axis=0)


def boundary_circle_of_plane(p: HVec, r: HVec):
    """Parametrization t -> representatives of (span(p, r) /\\ null cone).

    Returns None when the complex line through [p], [r] misses the closed
    ball.  Uses the eigenbasis of the restricted form: with eigenvalues
    lam+ > 0 > lam-, the null points are e- + rho e^{it} e+.
    """
    J = p.space.J
    B = _plane_basis(p, r)  # rows span the plane
    G = B.conj() @ J @ B.T  # 2x2 restricted Hermitian form
    evals, evecs = np.linalg.eigh(G)
    if evals[0] >= -1e-14 * abs(evals).max():
        return None  # definite or degenerate: no interior circle
    lam_m, lam_p = evals[0], evals[1]
    if lam_p <= 1e-14 * abs(evals).max():
        return None
    em = evecs[:, 0] @ B
    ep = evecs[:, 1] @ B
    rho = math.sqrt(-lam_m / lam_p)

    def circle(ts):
        phase = rho * np.exp(1j * np.atleast_1d(ts))
        return em[None, :] + phase[:, None] * ep[None, :]

    return circle


def slice_boundary_circle(pole_vec: HVec):
    """Boundary circle of the polar line of pole_vec, as t -> vectors."""
    J = pole_vec.space.J
    w = pole_vec.v.conj() @ J  # functional z -> <pole, z>
    # orthonormal basis of ker(w) via SVD
    _, _, vh = np.linalg.svd(w.reshape(1, 3))
    u1, u2 = vh[1].conj(), vh[2].conj()
    sp = pole_vec.space
    return boundary_circle_of_plane(HVec(u1, sp), HVec(u2, sp))


@dataclass(frozen=True)
class CircleFit:
    center: complex
    radius: float
    residual: float


def fit_circle(points: np.ndarray) -> CircleFit:
    """Least-squares circle through complex points."""
    x, y = points.real, points.imag
    A = np.stack([2 * x, 2 * y, np.ones_like(x)], axis=1)
    b = x * x + y * y
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    cx, cy, c = sol
    r2 = c + cx * cx + cy * cy
    radius = math.sqrt(max(r2, 0.0))
    res = float(np.abs(np.hypot(x - cx, y - cy) - radius).max())
    return CircleFit(complex(cx, cy), radius, res)


@dataclass
class DiskProjection:
    """Projection of a bisector based at p onto the visual sphere of [p].

    boundary: sampled boundary polyline in the supplied chart.
    priv_radius: modulus of the boundary in the rotation-invariant chart
    whose 0 and infinity are the lines to [q] and to the focus.
    contains_zero: whether the line to [q] projects inside the disk (true
    exactly when the pair discriminant is negative).
    """

    chart: VisualChart
    boundary: np.ndarray
    boundary_eps: float
    circle: CircleFit
    priv_radius: float | None
    priv_range: tuple
    contains_zero: bool
    is_fan: bool = False
    marked: dict = field(default_factory=dict)


def _spinal_samples(b: Bisector, n_alpha=96, n_t=48):
    """Representatives covering the spinal surface, by extor slices."""
    out = []
    for alpha in np.exp(1j * np.linspace(0, 2 * math.pi, n_alpha, endpoint=False)):
        pole = HVec(b.q.v - alpha * b.p.v, b.p.space)
        circ = slice_boundary_circle(pole)
        if circ is None:
            continue
        out.append(circ(np.linspace(0, 2 * math.pi, n_t, endpoint=False)))
    if not out:
        raise GeometryError("spinal surface sampling found no boundary points")
    return np.concatenate(out, axis=0)


def project_bisector(chart: VisualChart, b: Bisector, n_boundary=1024, tol=None) -> DiskProjection:
    """Silhouette of the bisector from its own base point in a given chart.

    The boundary consists of the lines meeting the spinal surface exactly
    once; these touch along the boundary circle of the slice with pole
    p - eps q for the sign eps passing the tangency criterion, which is the
    sampled polyline returned.
    """
    tol = tolerance(tol)
    if not np.allclose(chart.base.unit().v, b.p.unit().v) and not np.allclose(
        chart.base.unit().v, -b.p.unit().v
    ):
        # base may differ by phase; use projective comparison
        from .core import proj_equal

        if not proj_equal(chart.base, b.p, 1e-8):
            raise GeometryError("chart base must be the bisector's first lift")
    samples = _spinal_samples(b)
    psi_samples = chart.values(samples)

    p, q = b.p, b.q
    npp = p.norm()
    pq = inner(p, q)
    candidates = []
    for eps in (1.0, -1.0):
        pole = HVec(p.v - eps * q.v, p.space)
        if pole.is_zero(1e-13):
            continue
        # condition 2 of the tangency criterion, eps-independent of r
        if abs(pq - eps * npp) <= 1e3 * tol * max(abs(npp), 1.0):
            continue
        circ = slice_boundary_circle(pole)
        if circ is None:
            continue
        ts = np.linspace(0, 2 * math.pi, n_boundary, endpoint=False)
        pts = circ(ts)
        candidates.append((eps, pts))
    if not candidates:
        raise GeometryError("no silhouette circle found")

    priv = None
    if b.kind is not BisectorKind.FAN:
        f = b.focus
        a_vec = f
        b_vec = box(p, f)
        priv = VisualChart(p, a_vec, b_vec)

    def priv_mods(pts):
        if priv is None:
            return None
        vals = priv.values(pts)
        return np.abs(vals)

    chosen = None
    if priv is not None:
        mods_samples = priv_mods(samples)
        finite = mods_samples[np.isfinite(mods_samples)]
        lo, hi = float(finite.min()), float(finite.max())
        contains_zero = b.r_disc < 0
        target = hi if contains_zero else lo
        best = None
        for eps, pts in candidates:
            mods = priv_mods(pts)
            spread = mods.max() - mods.min()
            mean = float(mods.mean())
            if spread > 1e-6 * max(mean, 1.0):
                continue
            score = abs(mean - target)
            if best is None or score < best[0]:
                best = (score, eps, pts, mean)
        if best is None:
            raise GeometryError("no constant-modulus silhouette circle found")
        _, eps, pts, radius = best
        chosen = (eps, pts)
        priv_radius = radius
        priv_range = (lo, hi)
    else:
        contains_zero = False
        priv_radius = None
        priv_range = (math.nan, math.nan)
        eps, pts = candidates[0]
        chosen = (eps, pts)

    eps, pts = chosen
    boundary_vals = chart.values(pts)
    finite_mask = np.isfinite(boundary_vals.real) & np.isfinite(boundary_vals.imag)
    circle = fit_circle(boundary_vals[finite_mask])
    marked = {"centre_q": chart.value(q)}
    if b.kind is not BisectorKind.FAN:
        marked["centre_focus"] = chart.value(b.focus)
    return DiskProjection(
        chart=chart,
        boundary=boundary_vals,
        boundary_eps=eps,
        circle=circle,
        priv_radius=priv_radius,
        priv_range=priv_range,
        contains_zero=contains_zero,
        is_fan=b.kind is BisectorKind.FAN,
        marked=marked,
    )


def angular_diameter(p: HVec, q: HVec, tol=None) -> float:
    """The real angular diameter of the bisector of (p, q) seen from [p].

    With cosh^2(d/2) = <p,q><q,p> / (<p,p><q,q>) for the hyperbolic
    distance d between the two interior points, the angular radius around
    the axis toward [q] is arccos(tanh(d/4)): the angle function
    sinh(r)(cosh r + cos phi) / (1 + 2 cos phi cosh r + cosh^2 r) on the
    boundary circle (r = d/2) is decreasing in cos phi, so the extreme
    directions sit on the midpoint slice (phi = 0), not at the spine ends
    (which realize tanh(d/2), the *largest* cosine).  The diameter is twice
    the radius by rotational symmetry about the axis.
    """
    tol = tolerance(tol)
    if locate(p, tol) is not Location.INSIDE or locate(q, tol) is not Location.INSIDE:
        raise GeometryError("angular diameter needs two interior points")
    c2 = (abs(inner(p, q)) ** 2) / (p.norm() * q.norm())
    if c2 < 1.0:
        raise GeometryError("inconsistent distance data")
    half_d = math.acosh(math.sqrt(c2))
    return 2.0 * math.acos(math.tanh(half_d / 2.0))


def tangent_direction(p: HVec, x: HVec) -> np.ndarray:
    """Initial direction at interior [p] of the geodesic toward [x].

    The lift of x is rephased so <p, x> is real negative; the direction is
    the J-orthogonal projection of x away from p.
    """
    px = inner(p, x)
    if abs(px) == 0:
        raise GeometryError("x on the polar line of p has no geodesic direction")
    phase = -px.conjugate() / abs(px)
    xv = phase * x.v
    px = -abs(px)
    u = xv - p.v * (px / p.norm())
    return u


def angle_between(p: HVec, x: HVec, y: HVec) -> float:
    """Angle at interior [p] between the geodesics toward [x] and [y]."""
    J = p.space.J
    ux, uy = tangent_direction(p, x), tangent_direction(p, y)

    def ip(a, b):
        return (a.conj() @ J @ b)

    na = math.sqrt(max(ip(ux, ux).real, 1e-300))
    nb = math.sqrt(max(ip(uy, uy).real, 1e-300))
    c = ip(ux, uy).real / (na * nb)
    return math.acos(min(1.0, max(-1.0, c)))

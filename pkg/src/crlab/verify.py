"""The verification engine for the deformed Ford/Dirichlet domain.

For a parameter alpha2 on the alpha1 = 0 slice, three conditions are
checked numerically:

  TF  - topology of faces: the triple bisector intersection meets the
        closure of the ball only at the two shared ideal vertices, and the
        two Giraud circles bounding a face are bi-tangent there;
  LC  - local combinatorics: neighbouring faces meet in Giraud disks or in
        the expected vertex pairs, and the face cut is well defined;
  GC  - global combinatorics: non-neighbouring bisectors are disjoint,
        certified by closed-form guard surfaces on the visual sphere of the
        deformation's fixed point (annuli on the loxodromic side, angular
        sectors on the elliptic side) plus exact cone-separation margins,
        with grid sampling as a secondary oracle.

Passing all three yields the Dehn-surgery verdict for the parameter:
slope 1/(n-3) on the elliptic side of order n >= 9, slope -1/3 on the
loxodromic side.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import HVec, box, inner, proj_distance, tolerance
from .isometry import Isometry, elliptic_type
from .family import (
    FamilyParams,
    FamilyRep,
    SideKind,
    involution_matrix,
    param_side,
    remarkable_points,
)
from .bisector import classify_bisector, _row_runs
from .visual import (
    VisualChart,
    angle_between,
    project_bisector,
    tangency_check,
)

SCHEMA_VERSION = "report-v1"
DEFAULT_GRID = 720


# ---------------------------------------------------------------------------
# result containers


@dataclass
class CheckResult:
    name: str
    passed: bool
    margins: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    skipped: bool = False

    def to_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "skipped": bool(self.skipped),
            "margins": {k: float(v) for k, v in sorted(self.margins.items())},
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
            "counts": {k: int(v) for k, v in sorted(self.counts.items())},
            "notes": list(self.notes),
        }


class VerdictKind(enum.Enum):
    SURGERY = "surgery-slope"
    INCONCLUSIVE = "inconclusive"
    NOT_APPLICABLE = "not-applicable"


@dataclass
class Verdict:
    kind: VerdictKind
    p: int | None = None
    q: int | None = None
    reason: str = ""

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "slope": None if self.p is None else [int(self.p), int(self.q)],
            "reason": self.reason,
        }


@dataclass
class VerificationReport:
    alpha2: float
    side: object
    tr_u: float
    tf: CheckResult
    lc: CheckResult
    gc: CheckResult
    incidence: CheckResult
    verdict: Verdict
    notes: list = field(default_factory=list)
    grid_n: int = DEFAULT_GRID
    tol: float = 0.0

    def all_passed(self):
        return all(
            c.passed for c in (self.incidence, self.tf, self.lc, self.gc) if not c.skipped
        )

    def to_dict(self):
        side = {
            "kind": self.side.kind.value,
            "beta": self.side.beta,
            "length": self.side.length,
            "n": self.side.n,
            "delta": [self.side.delta.real, self.side.delta.imag],
        }
        return {
            "schema": SCHEMA_VERSION,
            "alpha2": float(self.alpha2),
            "tr_u": float(self.tr_u),
            "side": side,
            "grid_n": int(self.grid_n),
            "tolerance": float(self.tol),
            "checks": {
                "incidence": self.incidence.to_dict(),
                "tf": self.tf.to_dict(),
                "lc": self.lc.to_dict(),
                "gc": self.gc.to_dict(),
            },
            "verdict": self.verdict.to_dict(),
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# the face family at a parameter


class FaceFamily:
    """All data attached to a parameter: representation, fixed points, the
    oriented chart on the visual sphere of [p_U], and grid settings."""

    def __init__(self, alpha2: float, tol=None, grid_n: int = DEFAULT_GRID):
        self.alpha2 = float(alpha2)
        self.tol = tolerance(tol)
        self.grid_n = int(grid_n)
        self.params = FamilyParams(0.0, self.alpha2)
        self.rep = FamilyRep(self.params)
        self.pts = remarkable_points(self.params, self.rep)
        self.side = param_side(self.alpha2, self.tol)
        self.space = self.rep.space
        self.U = self.rep.U
        self.I = Isometry(involution_matrix(self.alpha2), self.space)
        self.chart = self._oriented_chart()

    def _oriented_chart(self):
        """Chart on the visual sphere of [p_U] in which U acts by
        z -> e^{2l} z (loxodromic) or z -> e^{2 i beta} z (elliptic).

        With the convention <u,v> = u^H J v the usual ordering of the two
        non-unit eigenvectors yields the reciprocal chart on the loxodromic
        side (the eigenvectors are null there, so 0 and infinity swap
        roles); the ordering below restores the expanding orientation.
        """
        pts = self.pts
        if pts.p_U_prime is None:
            return None
        if self.side.kind is SideKind.LOXODROMIC:
            return VisualChart(pts.p_U, pts.p_U_dprime, pts.p_U_prime)
        return VisualChart(pts.p_U, pts.p_U_prime, pts.p_U_dprime)

    def u_power_point(self, k: int, p: HVec) -> HVec:
        return self.U.power(k).apply(p)

    def bisector_plus(self, k: int = 0):
        return classify_bisector(self.pts.p_U, self.u_power_point(k, self.pts.p_V), self.tol)

    def bisector_minus(self, k: int = 0):
        return classify_bisector(self.pts.p_U, self.u_power_point(k, self.pts.p_W), self.tol)


# ---------------------------------------------------------------------------
# small shared helpers


def _unit_rows(V):
    return V / np.linalg.norm(V, axis=-1, keepdims=True)


def _abs_inner_sq(w: HVec, V, J):
    vals = np.einsum("k,kl,...l->...", w.v.conj(), J, V)
    return np.abs(vals) ** 2


def _norms(V, J):
    return np.einsum("...k,kl,...l->...", V.conj(), J, V).real


def _chordal(V, p: HVec):
    """Projective chordal distance of unit rows V to the class of p."""
    pn = p.unit().v
    overlap = np.abs(np.einsum("...k,k->...", V.conj(), pn))
    return np.sqrt(np.maximum(0.0, 1.0 - np.minimum(overlap, 1.0) ** 2))


def _torus_vectors(a, b, c, sigmas, deltas):
    """Vectors a - e^{-i theta} b - e^{-i phi} c on the (sigma, delta) grid
    with theta = sigma + delta, phi = sigma - delta (the expansion of the
    box product (q - e^{i theta} p) box (r - e^{i phi} p))."""
    th = sigmas[:, None] + deltas[None, :]
    ph = sigmas[:, None] - deltas[None, :]
    return (
        a[None, None, :]
        - np.exp(-1j * th)[:, :, None] * b[None, None, :]
        - np.exp(-1j * ph)[:, :, None] * c[None, None, :]
    )


def _two_point_exclusion(V, norms, excess, targets, step_scale, vertex_radius=0.08):
    """Common pattern: on the locus {norms <= 0}, the positive function
    `excess` may vanish only near the target points.

    Returns (passed, margin outside the vertex balls, worst distance of a
    locus point to its nearest target, per-target minimal distances).
    """
    mask = norms <= 0.0
    if not mask.any():
        return False, math.inf, math.inf, [math.inf] * len(targets)
    Vm = _unit_rows(V[mask])
    dists = np.stack([_chordal(Vm, t) for t in targets], axis=0)
    dmin = dists.min(axis=0)
    target_min = [float(d.min()) for d in dists]
    outside = dmin > vertex_radius
    exc = excess[mask]
    margin = float(exc[outside].min()) if outside.any() else math.inf
    present = all(d <= max(4.0 * step_scale, 0.02) for d in target_min)
    passed = present and (not outside.any() or margin > 0.0)
    return passed, margin, float(dmin.max()), target_min


# ---------------------------------------------------------------------------
# incidence check


def incidence_check(ff: FaceFamily) -> CheckResult:
    """Unit-modulus products putting the two ideal vertices on the four
    bisectors around them, plus translation compatibility of the family."""
    pts, U, J = ff.pts, ff.U, ff.space.J
    res = CheckResult("incidence", True)
    pA, pB = pts.p_A, pts.p_B
    Ui = U.inv()
    prods = {
        "pA_pU": inner(pA, pts.p_U),
        "pA_pV": inner(pA, pts.p_V),
        "pA_pW": inner(pA, pts.p_W),
        "pA_Ui_pV": inner(pA, Ui.apply(pts.p_V)),
        "pA_Ui_pW": inner(pA, Ui.apply(pts.p_W)),
        "pB_pU": inner(pB, pts.p_U),
        "pB_pV": inner(pB, pts.p_V),
        "pB_pW": inner(pB, pts.p_W),
        "pB_U_pV": inner(pB, U.apply(pts.p_V)),
        "pB_Ui_pW": inner(pB, Ui.apply(pts.p_W)),
    }
    worst = max(abs(abs(v) - 1.0) for v in prods.values())
    res.residuals["max_modulus_deviation"] = worst
    # corollary translations: both vertices and their U-translates lie on
    # the expected bisectors
    checks = []
    for z in (pA, U.apply(pA), pB, Ui.apply(pB)):
        checks.append(abs(abs(inner(z, pts.p_U)) - abs(inner(z, pts.p_V))))
    for z in (pA, U.apply(pA), pB, U.apply(pB)):
        checks.append(abs(abs(inner(z, pts.p_U)) - abs(inner(z, pts.p_W))))
    res.residuals["max_translation_incidence"] = max(checks)
    # symmetry: the involution carries J_k^+ onto J_{-k}^- and back, checked
    # on real-spine samples of each side
    sym = []
    for k in (0, 1, 2):
        q_plus = ff.u_power_point(k, pts.p_V)
        q_minus = ff.u_power_point(-k, pts.p_W)
        for lam in np.exp(1j * np.linspace(0.3, 5.9, 5)):
            z = HVec(pts.p_U.v + lam * q_plus.v, ff.space)
            iz = ff.I.apply(z)
            sym.append(
                abs(abs(inner(iz, pts.p_U)) - abs(inner(iz, q_minus)))
                / max(1.0, np.linalg.norm(iz.v) ** 2)
            )
            w = HVec(pts.p_U.v + lam * q_minus.v, ff.space)
            iw = ff.I.apply(w)
            sym.append(
                abs(abs(inner(iw, pts.p_U)) - abs(inner(iw, q_plus)))
                / max(1.0, np.linalg.norm(iw.v) ** 2)
            )
    res.residuals["max_involution_symmetry"] = max(sym)
    tol = 1e3 * ff.tol
    res.passed = worst <= tol and res.residuals["max_translation_incidence"] <= tol and max(sym) <= tol
    return res


# ---------------------------------------------------------------------------
# TF: topology of faces


def _tf_torus_data(ff: FaceFamily):
    """The intersection torus of the extors of J_0^- and J_-1^-,
    parametrized by (p_W - e^{i th} p_U) box (U^-1 p_W - e^{i ph} p_U)."""
    pts = ff.pts
    Ui_pW = ff.U.inv().apply(pts.p_W)
    a = box(pts.p_W, Ui_pW).v
    b = box(pts.p_U, Ui_pW).v
    c = box(pts.p_W, pts.p_U).v
    return a, b, c


def tf_check(ff: FaceFamily) -> CheckResult:
    res = CheckResult("tf", True)
    pts, J, a2 = ff.pts, ff.space.J, ff.alpha2
    cos2 = math.cos(a2) ** 2
    sin_a2 = math.sin(a2)
    tol = ff.tol
    n = ff.grid_n

    # --- (a) real-plane part: the two closed-form squared moduli and the
    # resulting exclusion 2s^2 - r >= 3 s^2 on the norm <= 0 half.
    rng = np.random.default_rng(20260810)
    rs = rng.uniform(-5.0, 5.0, size=(64, 2))
    worst_rp = 0.0
    for r, s in rs:
        q = HVec([r, 1j * math.sqrt(2.0) * s, 1.0], ff.space)
        lhs_u = abs(inner(pts.p_U, q)) ** 2
        rhs_u = r * r + s * s + 1.0 + 2.0 * r * (2.0 * cos2 - 1.0) + 2.0 * (r - 1.0) * s * sin_a2
        lhs_w = abs(inner(pts.p_W, q)) ** 2
        rhs_w = (8.0 * cos2 + 1.0) * s * s + r * r + 2.0 * (r - 1.0) * s * sin_a2 - 2.0 * r + 1.0
        worst_rp = max(worst_rp, abs(lhs_u - rhs_u), abs(lhs_w - rhs_w))
        # equality locus is 4 cos^2 (2 s^2 - r)
        diff = lhs_w - lhs_u
        worst_rp = max(worst_rp, abs(diff - 4.0 * cos2 * (2.0 * s * s - r)))
    res.residuals["rplane_identities"] = worst_rp
    # the line with third coordinate 0 never meets the locus
    worst_line = math.inf
    for r in np.linspace(-6, 6, 41):
        q = HVec([r, 1j * math.sqrt(2.0), 0.0], ff.space)
        worst_line = min(
            worst_line, abs(inner(pts.p_W, q)) ** 2 - abs(inner(pts.p_U, q)) ** 2
        )
    res.margins["rplane_ideal_line_gap"] = worst_line  # equals 8 cos^2 alpha2
    rp_ok = worst_rp <= 1e-8 and worst_line > 0

    # --- (b) complex-line part: solutions have positive norm 24 sin^2 a2
    worst_cl = 0.0
    for mu in (0.3 + 0.1j, -1.2j, 2.0 + 1.5j, 0.9 - 2.2j):
        q = HVec([-1.0 + mu, 2j * math.sqrt(2.0) * sin_a2, 1.0 + mu], ff.space)
        worst_cl = max(worst_cl, abs(abs(inner(pts.p_U, q)) ** 2 - 4.0 * cos2 * abs(mu) ** 2))
        worst_cl = max(
            worst_cl,
            abs(abs(inner(pts.p_W, q)) ** 2 - 4.0 * (9.0 - 8.0 * cos2) * cos2),
        )
        worst_cl = max(worst_cl, abs(q.norm() - 2.0 * (abs(mu) ** 2 - 4.0 * cos2 + 3.0)))
    res.residuals["cline_identities"] = worst_cl
    res.margins["cline_norm"] = 24.0 * sin_a2**2
    cl_ok = worst_cl <= 1e-8 and res.margins["cline_norm"] > 0 or abs(a2) < 1e-12

    # --- (c) torus part
    a, b, c = _tf_torus_data(ff)
    if abs(a2) > 1e-12:
        delta0 = math.atan((1.0 - 2.0 * math.cos(2 * a2)) / (2.0 * math.sin(2 * a2)))
    else:
        delta0 = 0.0
    sigmas = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    deltas = delta0 + np.linspace(0.0, math.pi, n // 2, endpoint=False)
    V = _torus_vectors(a, b, c, sigmas, deltas)
    Vu = _unit_rows(V)
    norms = _norms(Vu, J)
    s_plus = _abs_inner_sq(pts.p_U, Vu, J) - _abs_inner_sq(pts.p_V, Vu, J)
    step = 2.0 * math.pi / n
    passed_c, margin_c, _, targets_min = _two_point_exclusion(
        Vu, norms, s_plus, [pts.p_A, pts.p_B], step
    )
    res.margins["torus_exclusion"] = margin_c
    res.residuals["vertex_pA_distance"] = targets_min[0]
    res.residuals["vertex_pB_distance"] = targets_min[1]
    res.counts["torus_ball_points"] = int((norms <= 0).sum())
    # interval structure: in each delta-column the ball locus is one run
    runs_bad = 0
    mask = norms <= 0.0
    for j in range(mask.shape[1]):
        runs = _row_runs(mask[:, j])
        if len(runs) > 1:
            runs_bad += 1
    res.counts["torus_noninterval_columns"] = runs_bad

    # derivative factorization: d h / d sigma = -12 sin(sigma) (2 cos(2 a2 - d) - cos d)
    # for the norm rescaled by the common 2 cos^2 a2 factor of the box products
    worst_d = 0.0
    for dl in np.linspace(delta0 + 0.15, delta0 + math.pi - 0.15, 7):
        for sg in np.linspace(0.1, 2 * math.pi - 0.1, 15):
            th, ph = sg + dl, sg - dl
            v = a - cmath.exp(-1j * th) * b - cmath.exp(-1j * ph) * c
            dv = 1j * (cmath.exp(-1j * th) * b + cmath.exp(-1j * ph) * c)
            dh = 2.0 * (v.conj() @ J @ dv).real / (2.0 * cos2)
            closed = -12.0 * math.sin(sg) * (2.0 * math.cos(2 * a2 - dl) - math.cos(dl))
            worst_d = max(worst_d, abs(dh - closed))
    res.residuals["dh_dsigma_factorization"] = worst_d

    # complex-line locus on the torus sits at delta = delta0 mod pi
    lpole = np.array([sin_a2, -1j * math.sqrt(2.0) / 2.0, -sin_a2])
    on_line = np.abs(np.einsum("k,kl,...l->...", lpole.conj(), J, Vu))
    col_d0 = float(on_line[:, 0].max())
    col_mid = float(on_line[:, len(deltas) // 2].min())
    res.residuals["cline_locus_at_delta0"] = col_d0
    res.margins["cline_locus_off_delta0"] = col_mid

    res.notes.append(
        "torus exclusion is established by per-parameter grid evidence over "
        "the monotone columns (numerical, not a proof)"
    )

    # --- bi-tangency of the two bounding Giraud circles at p_A and p_B
    bt_resid, bt_notes = _bitangency(ff)
    res.residuals["bitangency_pA"] = bt_resid[0]
    res.residuals["bitangency_pB"] = bt_resid[1]
    res.notes.extend(bt_notes)

    crit_ok = True
    if abs(pts.p_U.norm()) > 1e3 * tol:
        UpA = ff.U.apply(pts.p_A)
        UiB = ff.U.inv().apply(pts.p_B)
        crit_ok = tangency_check(pts.p_U, pts.p_V, UpA, tol) and tangency_check(
            pts.p_U, pts.p_V, UiB, tol
        )
        res.counts["criterion_tangencies"] = 2 if crit_ok else 0
    else:
        res.notes.append(
            "criterion tangency skipped: <p_U, p_U> = 0 at the unipotent parameter"
        )

    bt_ok = max(bt_resid) <= 1e-3
    res.passed = bool(
        rp_ok and cl_ok and passed_c and bt_ok and crit_ok
        and worst_d <= 1e-8 and col_d0 <= 1e-9 and runs_bad == 0
        and col_mid > 0
    )
    return res


def _giraud_circle_tangent_at(ff: FaceFamily, q_vec: HVec, r_vec: HVec, target: HVec):
    """Affine-chart velocity of the Giraud circle of E(p_U, q), E(p_U, r)
    at the torus point closest to `target`; returns (velocity, lift, dist)."""
    pts, J = ff.pts, ff.space.J
    A = box(q_vec, r_vec).v
    B = box(pts.p_U, r_vec).v
    C = box(q_vec, pts.p_U).v

    def vec(th, ph):
        return A - cmath.exp(-1j * ph) * C - cmath.exp(-1j * th) * B

    # locate the target on the curve {norm = 0} by nested grid refinement
    best = (math.inf, 0.0, 0.0)
    th0, ph0, span = math.pi, math.pi, math.pi
    for _ in range(24):
        ths = np.linspace(th0 - span, th0 + span, 17)
        phs = np.linspace(ph0 - span, ph0 + span, 17)
        for th in ths:
            for ph in phs:
                v = vec(th, ph)
                d = proj_distance(HVec(v, ff.space), target)
                if d < best[0]:
                    best = (d, th, ph)
        th0, ph0 = best[1], best[2]
        span *= 0.45
    d, th, ph = best
    v = vec(th, ph)
    dvth = 1j * cmath.exp(-1j * th) * B
    dvph = 1j * cmath.exp(-1j * ph) * C
    gth = 2.0 * (v.conj() @ J @ dvth).real
    gph = 2.0 * (v.conj() @ J @ dvph).real
    # curve tangent in parameter space is orthogonal to the norm gradient
    w = dvth * (-gph) + dvph * gth
    # velocity in the affine chart that pins the relative lift scale
    j0 = int(np.argmax(np.abs(target.v)))
    what = (w * v[j0] - v * w[j0]) / (v[j0] ** 2)
    what = np.delete(what, j0)
    return what, v, d


def _bitangency(ff: FaceFamily):
    """Tangent-direction agreement of the circles bounding the first face
    at both shared ideal vertices, compared as real lines in an affine chart."""
    pts = ff.pts
    Ui_pW = ff.U.inv().apply(pts.p_W)
    resids = []
    notes = []
    for target in (pts.p_A, pts.p_B):
        w1, _, d1 = _giraud_circle_tangent_at(ff, pts.p_V, pts.p_W, target)
        w2, _, d2 = _giraud_circle_tangent_at(ff, pts.p_V, Ui_pW, target)
        if max(d1, d2) > 1e-5:
            resids.append(math.inf)
            notes.append(f"vertex location failed (dist {max(d1, d2):.2e})")
            continue
        r1 = np.concatenate([w1.real, w1.imag])
        r2 = np.concatenate([w2.real, w2.imag])
        r1 /= np.linalg.norm(r1)
        r2 /= np.linalg.norm(r2)
        resids.append(float(math.sqrt(max(0.0, 1.0 - (r1 @ r2) ** 2))))
    return resids, notes


# ---------------------------------------------------------------------------
# LC: local combinatorics


def lc_check(ff: FaceFamily, tf: CheckResult) -> CheckResult:
    from .bisector import symmetric_intersection_type, SymmetricKind

    res = CheckResult("lc", True)
    pts, J = ff.pts, ff.space.J
    a2 = ff.alpha2
    n = ff.grid_n
    u = (2.0 / 3.0) * (4.0 * math.cos(a2) ** 2 - 3.0)
    res.margins["u_below_two_thirds"] = 2.0 / 3.0 - u
    ok_u = u < 2.0 / 3.0 - 1e-12 or abs(a2) < 1e-12

    # both face-boundary intersections are Giraud disks of symmetric triples
    si1 = symmetric_intersection_type(pts.p_U, pts.p_V, pts.p_W, ff.tol)
    si2 = symmetric_intersection_type(
        pts.p_U, ff.U.apply(pts.p_V), pts.p_W, ff.tol
    )
    res.residuals["u_plus_pair"] = abs(si1.u - u)
    res.residuals["u_cross_pair"] = abs(si2.u - u)
    disks_ok = si1.kind is SymmetricKind.DISK and si2.kind is SymmetricKind.DISK

    # F_0^- /\ F_-1^- == {p_A, p_B} on the torus grid (common constraint
    # |<z,p_U>| <= |<z,p_V>| must fail off the vertices)
    a, b, c = _tf_torus_data(ff)
    sigmas = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    deltas = np.linspace(0.0, math.pi, n // 2, endpoint=False)
    V = _unit_rows(_torus_vectors(a, b, c, sigmas, deltas))
    norms = _norms(V, J)
    pu2 = _abs_inner_sq(pts.p_U, V, J)
    excess_minus = pu2 - np.minimum.reduce(
        [
            _abs_inner_sq(pts.p_V, V, J),
            _abs_inner_sq(ff.U.apply(pts.p_V), V, J),
            _abs_inner_sq(ff.U.inv().apply(pts.p_V), V, J),
        ]
    )
    step = 2.0 * math.pi / n
    ok_mm, margin_mm, _, tmin = _two_point_exclusion(
        V, norms, excess_minus, [pts.p_A, pts.p_B], step
    )
    res.margins["faces_minus_minus"] = margin_mm

    # F_0^+ /\ F_1^+ == {p_B, U p_A}
    UpV = ff.U.apply(pts.p_V)
    a2v = box(pts.p_V, UpV).v
    b2v = box(pts.p_U, UpV).v
    c2v = box(pts.p_V, pts.p_U).v
    V2 = _unit_rows(_torus_vectors(a2v, b2v, c2v, sigmas, deltas))
    norms2 = _norms(V2, J)
    pu2b = _abs_inner_sq(pts.p_U, V2, J)
    w_pW = _abs_inner_sq(pts.p_W, V2, J)
    w_UipW = _abs_inner_sq(ff.U.inv().apply(pts.p_W), V2, J)
    w_UpW = _abs_inner_sq(ff.U.apply(pts.p_W), V2, J)
    exc_f0 = pu2b - np.minimum(w_pW, w_UipW)  # fails F_0^+
    exc_f1 = pu2b - np.minimum(w_UpW, w_pW)  # fails F_1^+
    excess_pp = np.maximum(exc_f0, exc_f1)
    ok_pp, margin_pp, _, tmin2 = _two_point_exclusion(
        V2, norms2, excess_pp, [pts.p_B, ff.U.apply(pts.p_A)], step
    )
    res.margins["faces_plus_plus"] = margin_pp

    # fan parameter: the singular focus must sit strictly inside the
    # quadrilateral's boundary arc on its slice circle
    fan_ok = True
    if abs(a2 - math.pi / 6.0) < 1e-9:
        fan_ok = _fan_focus_check(ff, res)
    res.passed = bool(ok_u and disks_ok and ok_mm and ok_pp and fan_ok)
    return res


def _fan_focus_check(ff: FaceFamily, res: CheckResult) -> bool:
    """At the fan parameter the focus is a singular point of the boundary
    sphere; it must lie strictly inside the face, located on the slice
    circle through the two neighbouring vertices."""
    pts = ff.pts
    sp = ff.space
    worst = 0.0
    thetas = np.linspace(0.0, 2.0 * math.pi, 1441)
    vals_u, vals_w, vals_uw = [], [], []
    UipW = ff.U.inv().apply(pts.p_W)
    for th in thetas:
        q = HVec([1.0, math.sqrt(2.0) * cmath.exp(1j * th), -1.0], sp)
        mu = abs(inner(pts.p_U, q)) ** 2
        mw = abs(inner(pts.p_W, q)) ** 2
        muw = abs(inner(UipW, q)) ** 2
        worst = max(worst, abs(mu - 2.0 * (1.0 + math.sin(th))))
        worst = max(
            worst, abs(mw - (6.0 * math.sqrt(3.0) * math.cos(th) + 2.0 * math.sin(th) + 11.0))
        )
        worst = max(
            worst, abs(muw - (-6.0 * math.sqrt(3.0) * math.cos(th) + 2.0 * math.sin(th) + 11.0))
        )
        vals_u.append(mu)
        vals_w.append(mw)
        vals_uw.append(muw)
    res.residuals["fan_circle_identities"] = worst
    member = np.array(vals_u) <= np.minimum(vals_w, vals_uw) + 1e-12
    # the arc containing the focus theta = 3 pi / 2
    i_f = int(np.argmin(np.abs(thetas - 1.5 * math.pi)))
    if not member[i_f]:
        return False
    lo = i_f
    while member[lo - 1]:
        lo -= 1
    hi = i_f
    while member[(hi + 1) % len(member)]:
        hi += 1
    arc = (thetas[lo % len(thetas)], thetas[hi % len(thetas)])
    res.residuals["fan_arc_lo_vs_7pi6"] = abs(arc[0] - 7.0 * math.pi / 6.0)
    res.residuals["fan_arc_hi_vs_11pi6"] = abs(arc[1] - 11.0 * math.pi / 6.0)
    res.margins["fan_focus_interior"] = float(
        min(1.5 * math.pi - arc[0], arc[1] - 1.5 * math.pi)
    )
    res.notes.append(
        "fan focus checked on the slice circle through the quadrilateral "
        "vertices at theta = 7pi/6 and 11pi/6"
    )
    return worst <= 1e-8 and res.margins["fan_focus_interior"] > 0


# ---------------------------------------------------------------------------
# GC: global combinatorics


def _sample_spinal_chart(ff: FaceFamily, q: HVec, n_alpha=128, n_t=64):
    """Chart values of a dense sample of the spinal surface of (p_U, q)."""
    from .visual import slice_boundary_circle

    vals = []
    for alpha in np.exp(1j * np.linspace(0, 2 * math.pi, n_alpha, endpoint=False)):
        pole = HVec(q.v - alpha * ff.pts.p_U.v, ff.space)
        circ = slice_boundary_circle(pole)
        if circ is None:
            continue
        pts_ = circ(np.linspace(0, 2 * math.pi, n_t, endpoint=False))
        vals.append(ff.chart.values(pts_))
    return np.concatenate(vals)


def _gc_h_values(ff: FaceFamily):
    pts = ff.pts
    h1 = inner(pts.p_U_prime, pts.p_V)
    h2 = inner(pts.p_U_dprime, pts.p_V)
    return h1, h2


def _cone_radius(ff: FaceFamily) -> float:
    """Angular radius of a face bisector seen from the interior fixed point:
    arccos(tanh(d/4)) for d the distance between the defining points."""
    pts = ff.pts
    c2 = (abs(inner(pts.p_U, pts.p_V)) ** 2) / (pts.p_U.norm() * pts.p_V.norm())
    half_d = math.acosh(math.sqrt(c2))
    return math.acos(math.tanh(half_d / 2.0))


def _tangency_pair_check(ff: FaceFamily, res: CheckResult) -> bool:
    """Single-point contacts of the first face's bisector with its two
    contact neighbours in the other family.

    The projected disks are tangent to D_0^+ at the chart images of U p_A
    (neighbour at k = +1) and of U^-1 p_B (neighbour at k = -2; the second
    contact lives two steps away, matching the vertex incidences)."""
    pts, U, ch = ff.pts, ff.U, ff.chart
    ok = True
    b0p = ff.bisector_plus(0)
    D0p = project_bisector(ch, b0p, n_boundary=512, tol=ff.tol)
    marked = {
        "k_plus_1": (U.apply(pts.p_A), ff.bisector_minus(1)),
        "k_minus_2": (U.inv().apply(pts.p_B), ff.bisector_minus(-2)),
    }
    for name, (point, bis) in marked.items():
        Dk = project_bisector(ch, bis, n_boundary=512, tol=ff.tol)
        c1, c2 = D0p.circle, Dk.circle
        d = abs(c1.center - c2.center)
        resid = min(abs(d - (c1.radius + c2.radius)), abs(d - abs(c1.radius - c2.radius)))
        scale = max(c1.radius, c2.radius, 1.0)
        res.residuals[f"disk_tangency_{name}"] = resid / scale
        zc = ch(point)
        on1 = abs(abs(zc - c1.center) - c1.radius)
        on2 = abs(abs(zc - c2.center) - c2.radius)
        res.residuals[f"contact_point_{name}"] = max(on1, on2) / scale
        crit = tangency_check(pts.p_U, b0p.q, point, ff.tol)
        ok = ok and crit and resid / scale <= 1e-6
    res.notes.append(
        "second cross-family contact certified at offset -2 (the vertex "
        "U^-1 p_B lies on that bisector by the translation incidences)"
    )
    return ok


def _cone_separation(ff: FaceFamily, res: CheckResult, n: int) -> bool:
    """Exact pairwise cone margins on the elliptic side: the direction cones
    of two bisectors are disjoint when their axes are separated by more
    than twice the cone radius."""
    pts, U = ff.pts, ff.U
    rho = _cone_radius(ff)
    res.residuals["value_cone_radius"] = rho
    worst = math.inf
    worst_pair = ""
    for k in range(2, n - 1):
        for nm, target in (("plus", pts.p_V), ("minus", pts.p_W)):
            if nm == "minus" and k == n - 2:
                continue  # vertex-contact pair, handled by the tangency check
            sep = angle_between(pts.p_U, pts.p_V, U.power(k).apply(target))
            m = sep - 2.0 * rho
            if m < worst:
                worst, worst_pair = m, f"k={k},{nm}"
    res.margins["cone_separation"] = worst
    res.notes.append(f"tightest cone pair: {worst_pair}")
    return worst > 0.0


def gc_check_loxodromic(ff: FaceFamily) -> CheckResult:
    res = CheckResult("gc", True)
    if ff.side.kind is not SideKind.LOXODROMIC:
        raise ValueError("loxodromic check on a non-loxodromic parameter")
    length = ff.side.length
    pts = ff.pts
    a2 = ff.alpha2

    # (a) the closed-form exclusion chain for the two guard circles
    lhs = 9.0 * math.cosh(4 * length) + 8.0 * math.cosh(length)
    rhs = 8.0 * math.cosh(3 * length) + 8.0 * math.cosh(2 * length) + 1.0
    res.margins["exclusion_chain"] = lhs - rhs
    res.margins["convexity"] = (
        math.cosh(4 * length) + math.cosh(length) - math.cosh(3 * length) - math.cosh(2 * length)
    )
    res.margins["cosh4l_above_1"] = math.cosh(4 * length) - 1.0

    # (b) the h identities
    h1, h2 = _gc_h_values(ff)
    t = 2.0 * math.cosh(length) + 1.0
    ch_half = math.cosh(length / 2.0)
    r_h1 = abs(abs(h1) ** 2 - 12.0 * math.exp(length / 2.0) * t * ch_half)
    r_h2 = abs(abs(h2) ** 2 - 12.0 * math.exp(-length / 2.0) * t * ch_half)
    r_h12 = abs(abs(h1) * abs(h2) - 12.0 * t * ch_half)
    cross = 2.0 * t * (
        (5.0 - 2.0 * math.cosh(length)) * (math.cosh(length) + 1.0)
        - 4j * math.sin(2.0 * a2) * math.sinh(length)
    )
    r_cross = abs(h1 * h2.conjugate() - cross)
    res.residuals["h1_sq"] = r_h1
    res.residuals["h2_sq"] = r_h2
    res.residuals["h1h2"] = r_h12
    res.residuals["h1_conj_h2"] = r_cross
    h_ok = max(r_h1, r_h2, r_h12, r_cross) <= 1e-8 * max(1.0, abs(h1) ** 2)

    # (c) direct guard check: sampled chart moduli stay inside the annulus
    vals = _sample_spinal_chart(ff, pts.p_V)
    logs = np.log(np.abs(vals[np.isfinite(vals)]))
    res.margins["annulus_upper"] = 1.5 * length - float(logs.max())
    res.margins["annulus_lower"] = float(logs.min()) + 2.5 * length
    annulus_ok = res.margins["annulus_upper"] > 0 and res.margins["annulus_lower"] > 0
    # mirrored family
    vals_m = _sample_spinal_chart(ff, pts.p_W)
    logs_m = np.log(np.abs(vals_m[np.isfinite(vals_m)]))
    res.margins["annulus_minus_upper"] = 2.5 * length - float(logs_m.max())
    res.margins["annulus_minus_lower"] = float(logs_m.min()) + 1.5 * length
    annulus_ok = annulus_ok and res.margins["annulus_minus_upper"] > 0 and res.margins["annulus_minus_lower"] > 0

    # (d) tangencies of the contact pairs
    tang_ok = _tangency_pair_check(ff, res)

    # (e) separation bookkeeping across the window, from the measured
    # log-modulus ranges: translates shift by 2kl, the mirrored family is
    # the reflection of the range
    K = max(3, math.ceil(math.log(1e6) / (2.0 * length) + 2.0))
    res.counts["window"] = K
    m_lo, m_hi = float(logs.min()), float(logs.max())
    worst_sep = math.inf
    for k in range(-K, K + 1):
        if abs(k) >= 2:  # same family
            if k > 0:
                worst_sep = min(worst_sep, (m_lo + 2 * k * length) - m_hi)
            else:
                worst_sep = min(worst_sep, m_lo - (m_hi + 2 * k * length))
        if k not in (-2, -1, 0, 1):  # cross family: range [-m_hi, -m_lo] + 2kl
            if k >= 2:
                worst_sep = min(worst_sep, (-m_hi + 2 * k * length) - m_hi)
            else:
                worst_sep = min(worst_sep, m_lo - (-m_lo + 2 * k * length))
    res.margins["window_annulus_separation"] = worst_sep
    res.passed = bool(
        res.margins["exclusion_chain"] > 0
        and res.margins["cosh4l_above_1"] > 0
        and h_ok
        and annulus_ok
        and tang_ok
        and worst_sep >= 0.0
    )
    return res


def gc_check_elliptic(ff: FaceFamily) -> CheckResult:
    res = CheckResult("gc", True)
    if ff.side.kind is not SideKind.ELLIPTIC:
        raise ValueError("elliptic check on a non-elliptic parameter")
    et = elliptic_type(ff.U, ff.tol)
    if not et.is_finite or {et.p, et.q} != {1, -1}:
        res.passed = False
        res.notes.append("peripheral element is not of finite type (1/n, -1/n)")
        return res
    n = et.n
    res.counts["order"] = n
    if n < 9:
        res.skipped = True
        res.passed = False
        res.notes.append(
            "angular-sector method requires order >= 9; orders 4..8 are "
            "settled in the triangle-group literature by other techniques"
        )
        return res
    beta = 2.0 * math.pi / n
    cb = math.cos(beta)

    # (a) discriminant sign and negativity certificate for the guard rays
    h1, h2 = _gc_h_values(ff)
    a_h1, a_h2 = abs(h1) ** 2, abs(h2) ** 2
    disc_sign = 2.0 + 4.0 * cb - 9.0 * cb * cb
    res.margins["discriminant_sign"] = -disc_sign  # must be positive
    c0 = a_h2 * (1.0 - a_h1 / 18.0)
    c2 = a_h1 * (1.0 - a_h2 / 18.0)
    c1 = 24.0 * math.cos(2.0 * beta) * (2.0 * cb + 1.0) * math.cos(beta / 2.0)
    disc = c1 * c1 - 4.0 * c0 * c2
    res.margins["P_constant_negative"] = -c0
    res.margins["P_leading_negative"] = -c2
    res.margins["P_discriminant_negative"] = -disc
    closed = 4.0 * a_h1 * a_h2 * (4.0 / 9.0) * math.sin(beta) ** 2 * disc_sign
    res.residuals["discriminant_closed_form"] = abs(disc - closed)
    res.notes.append(
        "discriminant sign factor fixed to 2 + 4 cos(beta) - 9 cos^2(beta); "
        "the variant with -4 cos(beta) fails the closed-form residual check"
    )
    ks = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 40)])
    pvals = c0 + c1 * ks + c2 * ks * ks
    res.margins["P_sampled_max"] = -float(pvals.max())
    r_h12 = abs(
        h2 * h1.conjugate()
        - 12.0 * cmath.exp(1j * beta / 2.0) * (2.0 * cb + 1.0) * math.cos(beta / 2.0)
    )
    r_prod = abs(a_h1 * a_h2 - 72.0 * (2.0 * cb + 1.0) ** 2 * (cb + 1.0))
    res.residuals["h2_conj_h1"] = r_h12
    res.residuals["h_product"] = r_prod
    cert_ok = (
        disc_sign < 0 and c0 < 0 and c2 < 0 and disc < 0 and pvals.max() < 0
        and max(r_h12, r_prod) <= 1e-8 * max(1.0, a_h1 * a_h2)
        and res.residuals["discriminant_closed_form"] <= 1e-6 * max(1.0, abs(disc))
    )

    # (b) direct guard check: sampled chart arguments avoid the two rays
    vals = _sample_spinal_chart(ff, ff.pts.p_V)
    args = np.angle(vals[np.isfinite(vals)])
    # wrap into a window centred between the rays -5 beta/2 and 3 beta/2
    centre = -0.5 * beta
    wrapped = np.angle(np.exp(1j * (args - centre))) + centre
    res.margins["sector_upper"] = 1.5 * beta - float(wrapped.max())
    res.margins["sector_lower"] = float(wrapped.min()) + 2.5 * beta
    width = float(wrapped.max() - wrapped.min())
    res.margins["sector_width_below_4beta"] = 4.0 * beta - width
    sector_ok = res.margins["sector_upper"] > 0 and res.margins["sector_lower"] > 0

    # (c) real angular control from the interior fixed point
    ratio = (9.0 / 4.0) / (1.0 - cb) ** 2
    res.margins["distance_ratio_above_4"] = ratio - 4.0
    diam = 2.0 * _cone_radius(ff)
    res.residuals["value_true_angular_diameter"] = diam
    if diam >= math.pi / 3.0:
        res.notes.append(
            "true angular diameter 2 arccos(tanh(d/4)) is not below pi/3 at "
            f"this order (value {diam:.6f}); disjointness is certified by "
            "the pairwise cone margins instead"
        )
    cone_ok = _cone_separation(ff, res, n)

    # (d) tangencies of the contact pairs
    tang_ok = _tangency_pair_check(ff, res)

    # (e) rotated sectors stay disjoint away from the opposite band: the
    # complex-line projection identifies antipodal rays, so rotations with
    # s near n/2 are left to the real cone margins of (c)
    worst_rot = math.inf
    sector_range = [s for s in range(2, n - 1) if s <= n / 2 - 2 or s >= n / 2 + 2]
    for s in sector_range:
        rot = 2.0 * s * beta
        offset = abs(math.remainder(rot, 2.0 * math.pi))
        worst_rot = min(worst_rot, offset - width)
    res.margins["rotated_sector_gap"] = worst_rot
    res.counts["sector_checked_powers"] = len(sector_range)
    res.passed = bool(
        cert_ok and sector_ok and cone_ok and tang_ok
        and ratio > 4.0 and worst_rot > 0.0
    )
    return res


# ---------------------------------------------------------------------------
# top-level verdicts


def surgery_slope_from_type(p: int, q: int, n: int):
    """Integer marking arithmetic: filling curve coefficients for a
    peripheral rotation of type (1/n, -1/n) are (1, n - 3); the loxodromic
    side fills (1, -3)."""
    if {p, q} == {1, -1}:
        return (1, n - 3)
    raise ValueError("no surgery bookkeeping for this type")


def verify(alpha2: float, tol=None, grid_n: int = DEFAULT_GRID) -> VerificationReport:
    """Run the three checks at a parameter and assemble the verdict."""
    ff = FaceFamily(alpha2, tol, grid_n)
    inc = incidence_check(ff)
    tf = tf_check(ff)
    lc = lc_check(ff, tf)
    notes = []

    side = ff.side
    if side.kind is SideKind.UNIPOTENT:
        gc = CheckResult("gc", True, skipped=True)
        gc.notes.append("unipotent boundary parameter: global check not applicable")
        verdict = Verdict(
            VerdictKind.NOT_APPLICABLE,
            reason="peripheral element is unipotent: the parameter carries the "
            "cusped uniformization itself, not a surgery",
        )
    elif side.kind is SideKind.LOXODROMIC:
        gc = gc_check_loxodromic(ff)
        if inc.passed and tf.passed and lc.passed and gc.passed:
            verdict = Verdict(VerdictKind.SURGERY, 1, -3)
        else:
            verdict = Verdict(VerdictKind.INCONCLUSIVE, reason="a check failed")
    else:
        et = elliptic_type(ff.U, ff.tol)
        if not et.is_finite or {et.p, et.q} != {1, -1}:
            gc = CheckResult("gc", False, skipped=True)
            gc.notes.append("peripheral element not of finite type (1/n, -1/n)")
            verdict = Verdict(
                VerdictKind.INCONCLUSIVE,
                reason="peripheral element is not a finite-order rotation of "
                "type (1/n, -1/n); no surgery statement at this parameter",
            )
        elif et.n < 9:
            gc = gc_check_elliptic(ff)
            verdict = Verdict(
                VerdictKind.INCONCLUSIVE,
                reason="angular-sector method requires order >= 9; orders 4..8 "
                "are settled in the triangle-group literature by other techniques",
            )
        else:
            gc = gc_check_elliptic(ff)
            if inc.passed and tf.passed and lc.passed and gc.passed:
                p, q = surgery_slope_from_type(1, -1, et.n)
                verdict = Verdict(VerdictKind.SURGERY, p, q)
            else:
                verdict = Verdict(VerdictKind.INCONCLUSIVE, reason="a check failed")

    return VerificationReport(
        alpha2=alpha2,
        side=side,
        tr_u=8.0 * math.cos(alpha2) ** 2,
        tf=tf,
        lc=lc,
        gc=gc,
        incidence=inc,
        verdict=verdict,
        notes=notes,
        grid_n=grid_n,
        tol=ff.tol,
    )

import json
import math

import numpy as np
import pytest

from crlab.core import HVec, inner
from crlab.family import ALPHA2_LIM, alpha2_for_order
from crlab.verify import (
    FaceFamily,
    VerdictKind,
    gc_check_elliptic,
    gc_check_loxodromic,
    incidence_check,
    lc_check,
    surgery_slope_from_type,
    tf_check,
    verify,
)

from conftest import sample_alpha2

GRID = 240


@pytest.fixture(scope="module")
def ff_lox():
    return FaceFamily(0.7, grid_n=GRID)


@pytest.fixture(scope="module")
def ff_n12():
    return FaceFamily(alpha2_for_order(12), grid_n=GRID)


def test_incidence_many_parameters():
    for a2 in sample_alpha2(10, lo=0.2, hi=1.4, seed=3):
        res = incidence_check(FaceFamily(a2, grid_n=64))
        assert res.passed
        assert res.residuals["max_modulus_deviation"] <= 1e-10


def test_incidence_symmetry_both_ways(ff_lox):
    # the involution carries each bisector family onto the mirrored one
    res = incidence_check(ff_lox)
    assert res.residuals["max_involution_symmetry"] <= 1e-10


def test_tf_structure(ff_lox):
    res = tf_check(ff_lox)
    assert res.passed
    assert res.margins["torus_exclusion"] > 0
    assert res.margins["cline_norm"] == pytest.approx(24 * math.sin(0.7) ** 2, abs=1e-12)
    assert res.residuals["dh_dsigma_factorization"] <= 1e-8
    assert res.residuals["cline_locus_at_delta0"] <= 1e-9
    assert res.counts["torus_noninterval_columns"] == 0
    assert res.residuals["bitangency_pA"] <= 1e-4
    assert res.residuals["bitangency_pB"] <= 1e-4


def test_tf_at_unipotent_wall():
    ff = FaceFamily(ALPHA2_LIM, grid_n=GRID)
    res = tf_check(ff)
    assert res.passed
    assert any("unipotent" in n for n in res.notes)


def test_tf_at_fan_and_cone_parameters():
    for a2 in (math.pi / 6, 0.45):
        res = tf_check(FaceFamily(a2, grid_n=GRID))
        assert res.passed


def test_lc_structure(ff_lox):
    tf = tf_check(ff_lox)
    res = lc_check(ff_lox, tf)
    assert res.passed
    assert res.margins["u_below_two_thirds"] > 0
    assert res.margins["faces_minus_minus"] > 0
    assert res.margins["faces_plus_plus"] > 0


def test_lc_u_value_at_wall():
    ff = FaceFamily(ALPHA2_LIM, grid_n=GRID)
    res = lc_check(ff, tf_check(ff))
    # u = (2/3)(4 cos^2 - 3) = (2/3)(3/2 - 3) = -1 at the wall
    assert res.margins["u_below_two_thirds"] == pytest.approx(2 / 3 + 1.0, abs=1e-12)
    assert res.passed


def test_lc_fan_focus_identities():
    ff = FaceFamily(math.pi / 6, grid_n=GRID)
    res = lc_check(ff, tf_check(ff))
    assert res.passed
    assert res.residuals["fan_circle_identities"] <= 1e-8
    assert res.margins["fan_focus_interior"] > 0
    # the arc endpoints are the corrected vertex labels
    assert res.residuals["fan_arc_lo_vs_7pi6"] < 0.02
    assert res.residuals["fan_arc_hi_vs_11pi6"] < 0.02


def test_gc_loxodromic(ff_lox):
    res = gc_check_loxodromic(ff_lox)
    assert res.passed
    length = ff_lox.side.length
    assert res.margins["exclusion_chain"] > 0
    assert res.margins["annulus_upper"] > 0 and res.margins["annulus_lower"] > 0
    assert max(res.residuals[k] for k in ("h1_sq", "h2_sq", "h1h2", "h1_conj_h2")) <= 1e-8
    assert res.margins["window_annulus_separation"] >= 0
    # the marked contact value sits inside the annulus
    z = math.exp(-2 * length)
    assert math.exp(-2.5 * length) < z < math.exp(1.5 * length)


def test_gc_h_identities_at_05():
    ff = FaceFamily(0.5, grid_n=128)
    res = gc_check_loxodromic(ff)
    assert max(res.residuals[k] for k in ("h1_sq", "h2_sq", "h1h2", "h1_conj_h2")) <= 1e-8
    assert res.passed


def test_gc_elliptic(ff_n12):
    res = gc_check_elliptic(ff_n12)
    assert res.passed
    beta = 2 * math.pi / 12
    assert res.margins["discriminant_sign"] > 0
    assert res.margins["P_constant_negative"] > 0
    assert res.margins["P_leading_negative"] > 0
    assert res.margins["P_discriminant_negative"] > 0
    assert res.margins["sector_width_below_4beta"] > 0
    assert res.margins["cone_separation"] > 0
    assert res.residuals["h2_conj_h1"] <= 1e-8
    # h2 conj(h1) = 12 e^{i beta/2}(2cos b + 1) cos(b/2) checked inside;
    # the product identity too
    assert res.residuals["h_product"] <= 1e-8


def test_gc_elliptic_n9_true_diameter_note():
    ff = FaceFamily(alpha2_for_order(9), grid_n=128)
    res = gc_check_elliptic(ff)
    assert res.passed
    assert res.residuals["value_true_angular_diameter"] > math.pi / 3
    assert any("pairwise cone margins" in n for n in res.notes)


def test_gc_elliptic_n8_inconclusive():
    ff = FaceFamily(alpha2_for_order(8), grid_n=96)
    res = gc_check_elliptic(ff)
    assert res.skipped and not res.passed
    # the discriminant sign test indeed flips below order 9
    beta = 2 * math.pi / 8
    assert 2 + 4 * math.cos(beta) - 9 * math.cos(beta) ** 2 > 0
    beta9 = 2 * math.pi / 9
    assert 2 + 4 * math.cos(beta9) - 9 * math.cos(beta9) ** 2 < 0


def test_marking_arithmetic_integers():
    # with l0 = m1 and m0 = 3 m1 - l1, the filled curve n l0 + p m0 reads
    # -p l1 + (n + 3p) m1 in the original marking
    for n in range(1, 30):
        for p in range(-10, 11):
            l1_coeff = -p
            m1_coeff = n + 3 * p
            # n*(0,1) + p*(-1,3) in (l1, m1)-coordinates
            assert (n * 0 + p * -1, n * 1 + p * 3) == (l1_coeff, m1_coeff)
    assert surgery_slope_from_type(1, -1, 9) == (1, 6)
    assert surgery_slope_from_type(-1, 1, 12) == (1, 9)


def test_verdicts():
    r9 = verify(alpha2_for_order(9), grid_n=GRID)
    assert r9.verdict.kind is VerdictKind.SURGERY and (r9.verdict.p, r9.verdict.q) == (1, 6)
    r05 = verify(0.5, grid_n=GRID)
    assert r05.verdict.kind is VerdictKind.SURGERY and (r05.verdict.p, r05.verdict.q) == (1, -3)
    r4 = verify(alpha2_for_order(4), grid_n=96)
    assert r4.verdict.kind is VerdictKind.INCONCLUSIVE
    assert "order" in r4.verdict.reason or "9" in r4.verdict.reason
    assert r4.tf.passed and r4.lc.passed
    rlim = verify(ALPHA2_LIM, grid_n=GRID)
    assert rlim.verdict.kind is VerdictKind.NOT_APPLICABLE
    assert rlim.tf.passed and rlim.lc.passed
    r_irr = verify(1.25, grid_n=96)
    assert r_irr.verdict.kind is VerdictKind.INCONCLUSIVE


def test_report_schema():
    r = verify(0.7, grid_n=96)
    d = r.to_dict()
    assert d["schema"] == "report-v1"
    payload = json.dumps(d, sort_keys=True)
    back = json.loads(payload)
    assert back["checks"]["tf"]["passed"] is True
    assert back["verdict"]["slope"] == [1, -3]
    assert back["side"]["kind"] == "loxodromic"
    assert back["tr_u"] == pytest.approx(8 * math.cos(0.7) ** 2)


def test_family_translation_compatibility(ff_lox):
    # J_k is the U^k-translate: membership is preserved under the action
    pts, U = ff_lox.pts, ff_lox.U
    rng = np.random.default_rng(0)
    for k in (1, 2, -1):
        q = ff_lox.u_power_point(k, pts.p_V)
        for _ in range(10):
            z = HVec(rng.normal(size=3) + 1j * rng.normal(size=3), ff_lox.space)
            r0 = abs(inner(z, pts.p_U)) - abs(inner(z, pts.p_V))
            zk = U.power(k).apply(z)
            rk = abs(inner(zk, pts.p_U)) - abs(inner(zk, q))
            assert rk == pytest.approx(r0, abs=1e-9 * max(1.0, abs(r0)))


def test_balanced_pair_decomposition_sampling(ff_lox):
    # 200 sampled intersection points of the balanced extor pair lie on the
    # real plane or on the shared complex line
    import cmath

    pts = ff_lox.pts
    a2 = ff_lox.alpha2
    sp = ff_lox.space
    J = sp.J
    pW, UipW = pts.p_W, ff_lox.U.inv().apply(pts.p_W)
    lpole = np.array([math.sin(a2), -1j * math.sqrt(2) / 2, -math.sin(a2)])
    lpole /= np.linalg.norm(lpole)

    def rcirc_points(alpha, count):
        # slice of E(p_U, p_V) at phase alpha, cut by the second extor
        from crlab.visual import slice_boundary_circle

        pole = HVec(pts.p_V.v - alpha * pts.p_U.v, sp)
        w = pole.v.conj() @ J
        _, _, vh = np.linalg.svd(w.reshape(1, 3))
        u1, u2 = vh[1].conj(), vh[2].conj()
        a = complex(pW.v.conj() @ J @ u1)
        b = complex(pW.v.conj() @ J @ u2)
        c = complex(UipW.v.conj() @ J @ u1)
        d = complex(UipW.v.conj() @ J @ u2)
        # |a + b zeta| = |c + d zeta|: A |zeta|^2 + 2 Re(K zeta) + C = 0
        A = abs(b) ** 2 - abs(d) ** 2
        K = a.conjugate() * b - c.conjugate() * d
        C = abs(a) ** 2 - abs(c) ** 2
        out = []
        if abs(A) > 1e-12:
            centre = -K.conjugate() / A
            r2 = (abs(K) ** 2 / A**2) - C / A
            if r2 <= 0:
                return out
            for t in np.linspace(0, 2 * math.pi, count, endpoint=False):
                zeta = centre + math.sqrt(r2) * cmath.exp(1j * t)
                out.append(u1 + zeta * u2)
        elif abs(K) > 1e-12:
            zeta0 = -C * K.conjugate() / (2 * abs(K) ** 2)
            direction = 1j * K.conjugate() / abs(K)
            for s in np.linspace(-4, 4, count):
                out.append(u1 + (zeta0 + s * direction) * u2)
        return out

    samples = []
    rng = np.random.default_rng(31)
    while len(samples) < 200:
        alpha = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        samples.extend(rcirc_points(alpha, 8))
    samples = samples[:200]
    worst = 0.0
    for v in samples:
        v = v / np.linalg.norm(v)
        # membership residuals on both extors (sanity)
        m1 = abs(abs(v.conj() @ J @ pts.p_U.v) - abs(v.conj() @ J @ pts.p_V.v))
        m2 = abs(abs(v.conj() @ J @ pW.v) - abs(v.conj() @ J @ UipW.v))
        assert max(m1, m2) < 1e-9
        d_line = abs(np.conj(lpole) @ J @ v)
        if abs(v[2]) > 1e-6:
            w = v / v[2]
            d_plane = max(abs(w[0].imag), abs(w[1].real)) / max(1.0, np.abs(w).max())
        elif abs(v[0]) > 1e-6:
            w = v / v[0]
            d_plane = max(abs(w[0].imag), abs(w[1].real))
        else:
            d_plane = 0.0
        worst = max(worst, min(d_line, d_plane))
    assert worst <= 1e-7


def test_monotone_exclusion_finite_differences(ff_lox):
    # h(. , delta1) decreases on [0, pi] and increases on [pi, 2 pi] for
    # every delta1 strictly between the two line-locus values
    from crlab.verify import _tf_torus_data, _torus_vectors, _norms

    a, b, c = _tf_torus_data(ff_lox)
    a2 = ff_lox.alpha2
    delta0 = math.atan((1 - 2 * math.cos(2 * a2)) / (2 * math.sin(2 * a2)))
    sigmas = np.linspace(0, 2 * math.pi, 101)
    for d1 in delta0 + np.linspace(0.05, math.pi - 0.05, 9):
        V = _torus_vectors(a, b, c, sigmas, np.array([d1]))
        h = _norms(V, ff_lox.space.J)[:, 0]
        dh = np.diff(h)
        half = len(dh) // 2
        assert (dh[:half] <= 1e-10).all()
        assert (dh[half:] >= -1e-10).all()


def test_h_identities_twenty_parameters_per_side():
    from crlab.verify import _gc_h_values

    rng = np.random.default_rng(77)
    for a2 in rng.uniform(0.05, ALPHA2_LIM - 0.02, 20):
        ff = FaceFamily(float(a2), grid_n=64)
        h1, h2 = _gc_h_values(ff)
        ln = ff.side.length
        t = 2 * math.cosh(ln) + 1
        ch = math.cosh(ln / 2)
        assert abs(abs(h1) ** 2 - 12 * math.exp(ln / 2) * t * ch) <= 1e-8 * abs(h1) ** 2
        assert abs(abs(h2) ** 2 - 12 * math.exp(-ln / 2) * t * ch) <= 1e-8 * max(1, abs(h2) ** 2)
    for a2 in rng.uniform(ALPHA2_LIM + 0.02, math.pi / 2 - 0.05, 20):
        ff = FaceFamily(float(a2), grid_n=64)
        h1, h2 = _gc_h_values(ff)
        beta = ff.side.beta
        cb = math.cos(beta)
        prod = 72 * (2 * cb + 1) ** 2 * (cb + 1)
        assert abs(abs(h1) ** 2 * abs(h2) ** 2 - prod) <= 1e-8 * max(1, prod)
        want = 12 * np.exp(1j * beta / 2) * (2 * cb + 1) * math.cos(beta / 2)
        assert abs(h2 * np.conj(h1) - want) <= 1e-8 * max(1, abs(want))
        # discriminant closed form
        a_h1, a_h2 = abs(h1) ** 2, abs(h2) ** 2
        c0 = a_h2 * (1 - a_h1 / 18)
        c2 = a_h1 * (1 - a_h2 / 18)
        c1 = 24 * math.cos(2 * beta) * (2 * cb + 1) * math.cos(beta / 2)
        disc = c1 * c1 - 4 * c0 * c2
        closed = 4 * a_h1 * a_h2 * (4 / 9) * math.sin(beta) ** 2 * (2 + 4 * cb - 9 * cb * cb)
        assert abs(disc - closed) <= 1e-6 * max(1.0, abs(closed))


def test_incidence_printed_value(ff_lox):
    # <p_B, U p_V> = 1 exactly, one of the vertex products
    pts = ff_lox.pts
    val = inner(pts.p_B, ff_lox.U.apply(pts.p_V))
    assert abs(val - 1.0) < 1e-12

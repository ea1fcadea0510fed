"""The two-parameter family of Z/3 * Z/3 representations into SU(2,1).

Everything is built in the Siegel model.  The family is parametrized by a
pair of angles (alpha1, alpha2); the distinguished one-parameter slice used
by the verification engine fixes alpha1 = 0.  The element U = rho(s)^-1
rho(t) drives the deformation: its trace is 8 cos^2(alpha2), so U is
loxodromic for alpha2 < ALPHA2_LIM, unipotent at ALPHA2_LIM and elliptic
beyond, where 8 cos^2(alpha2) = 2 cos(beta) + 1 ties alpha2 to the rotation
angle beta.
"""

from __future__ import annotations

import cmath
import enum
import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import GeometryError, HVec, siegel_model, tolerance
from .isometry import Isometry, IsometryClass, classify, verify_su21

ALPHA2_LIM = math.acos(math.sqrt(3.0 / 8.0))
ALPHA1_LIM = math.acos(math.sqrt(3.0) / 4.0)

# peripheral words on T1/T2 and the link-group relator, in the letters s, t
WORD_M1 = "ts^-1"
WORD_L1 = "ts^-1ts^-1ts^-1"
WORD_M2 = "st"
WORD_L2 = "ststst"
WORD_L2_LONG = "ststs^-1t^3s^-1t"
WORD_RELATOR = "ts^-1t^-3s^-2t^-1st^3s^2"


@dataclass(frozen=True)
class FamilyParams:
    alpha1: float = 0.0
    alpha2: float = 0.0

    def __post_init__(self):
        if not (-math.pi / 2 < self.alpha1 < math.pi / 2):
            raise GeometryError("alpha1 outside (-pi/2, pi/2)")

    @property
    def x1(self) -> float:
        return math.sqrt(2.0 * math.cos(self.alpha1))


def rho_s(params: FamilyParams) -> np.ndarray:
    a1, a2 = params.alpha1, params.alpha2
    x1 = params.x1
    phase = cmath.exp(-1j * a1 / 3.0)
    return phase * np.array(
        [
            [cmath.exp(1j * a1), x1 * cmath.exp(1j * (a1 - a2)), -1.0],
            [-x1 * cmath.exp(1j * a2), -cmath.exp(1j * a1), 0.0],
            [-1.0, 0.0, 0.0],
        ],
        dtype=complex,
    )


def rho_t(params: FamilyParams) -> np.ndarray:
    a1, a2 = params.alpha1, params.alpha2
    x1 = params.x1
    phase = cmath.exp(1j * a1 / 3.0)
    return phase * np.array(
        [
            [0.0, 0.0, -1.0],
            [0.0, -cmath.exp(-1j * a1), -x1 * cmath.exp(-1j * (a1 + a2))],
            [-1.0, x1 * cmath.exp(1j * a2), cmath.exp(-1j * a1)],
        ],
        dtype=complex,
    )


_WORD_TOKEN = re.compile(r"([st])(?:\^(-?\d+))?", re.IGNORECASE)


def parse_word(word: str):
    """Parse a word in s, t with integer exponents into (letter, power) pairs."""
    word = word.replace(" ", "")
    pos = 0
    out = []
    while pos < len(word):
        m = _WORD_TOKEN.match(word, pos)
        if not m:
            raise GeometryError(f"cannot parse group word at ...{word[pos:]!r}")
        letter = m.group(1).lower()
        power = int(m.group(2)) if m.group(2) else 1
        out.append((letter, power))
        pos = m.end()
    return out


@dataclass(frozen=True)
class FamilyRep:
    """A representation of the family, with its distinguished elements."""

    params: FamilyParams

    @cached_property
    def space(self):
        return siegel_model()

    @cached_property
    def S(self) -> Isometry:
        return Isometry(rho_s(self.params), self.space)

    @cached_property
    def T(self) -> Isometry:
        return Isometry(rho_t(self.params), self.space)

    @cached_property
    def A(self) -> Isometry:  # S T, unipotent throughout the family
        return self.S @ self.T

    @cached_property
    def B(self) -> Isometry:  # T S
        return self.T @ self.S

    @cached_property
    def U(self) -> Isometry:  # S^-1 T
        return self.S.inv() @ self.T

    @cached_property
    def V(self) -> Isometry:  # T S^-1 = S U S^-1
        return self.T @ self.S.inv()

    @cached_property
    def W(self) -> Isometry:  # S T S = S V S^-1
        return self.S @ self.T @ self.S

    def word(self, word: str) -> Isometry:
        """Evaluate a group word such as "ts^-1ts^2" in this representation."""
        M = np.eye(3, dtype=complex)
        gens = {"s": self.S.M, "t": self.T.M}
        inv = {"s": self.S.inv().M, "t": self.T.inv().M}
        for letter, power in parse_word(word):
            base = gens[letter] if power >= 0 else inv[letter]
            for _ in range(abs(power)):
                M = M @ base
        return Isometry(M, self.space)


def build_rep(params: FamilyParams, check=True, tol=None) -> FamilyRep:
    rep = FamilyRep(params)
    if check:
        tol_ = tolerance(tol)
        for g in (rep.S, rep.T):
            ok, u_res, d_res = verify_su21(g.M, rep.space, tol_)
            if not ok:
                raise GeometryError(
                    f"generator fails SU(2,1) residuals ({u_res:.2e}, {d_res:.2e})"
                )
            if np.abs(np.linalg.matrix_power(g.M, 3) - np.eye(3)).max() > 1e3 * tol_:
                raise GeometryError("generator is not of order 3")
    return rep


class SideKind(enum.Enum):
    ELLIPTIC = "elliptic"
    UNIPOTENT = "unipotent"
    LOXODROMIC = "loxodromic"


@dataclass(frozen=True)
class ParamSide:
    """Which side of the unipotent wall alpha2 sits on, and the parameter there.

    delta is the square root of (tr U - 3)(tr U + 1): 2i sin(beta) on the
    elliptic side and 2 sinh(l) on the loxodromic side.
    """

    kind: SideKind
    beta: float | None = None  # rotation angle, elliptic side
    length: float | None = None  # translation length l, loxodromic side
    n: int | None = None  # order when beta = 2 pi / n exactly
    delta: complex = 0.0


def param_side(alpha2: float, tol=None, order_cap=10**6) -> ParamSide:
    tol = tolerance(tol)
    tr = 8.0 * math.cos(alpha2) ** 2
    delta = cmath.sqrt((tr - 3.0) * (tr + 1.0))
    if abs(tr - 3.0) <= 10 * tol:
        return ParamSide(SideKind.UNIPOTENT, delta=0.0)
    if tr < 3.0:
        beta = math.acos((tr - 1.0) / 2.0)
        n = None
        ratio = 2.0 * math.pi / beta
        cand = round(ratio)
        if cand >= 3 and abs(ratio - cand) <= 1e-8 * cand and cand <= order_cap:
            n = int(cand)
        return ParamSide(SideKind.ELLIPTIC, beta=beta, n=n, delta=delta)
    length = math.acosh((tr - 1.0) / 2.0)
    return ParamSide(SideKind.LOXODROMIC, length=length, delta=delta)


def alpha2_for_order(n: int) -> float:
    """The alpha2 > ALPHA2_LIM at which U becomes elliptic of order n >= 4."""
    if n < 4:
        raise GeometryError("order must be at least 4")
    return math.acos(math.sqrt((2.0 * math.cos(2.0 * math.pi / n) + 1.0) / 8.0))


def alpha2_for_length(length: float) -> float:
    """The alpha2 < ALPHA2_LIM at which U is loxodromic of length l > 0."""
    if length <= 0:
        raise GeometryError("length must be positive")
    tr = 2.0 * math.cosh(length) + 1.0
    if tr >= 8.0:
        raise GeometryError("length exceeds the family (needs cosh(l) < 7/2)")
    return math.acos(math.sqrt(tr / 8.0))


@dataclass(frozen=True)
class RemarkablePoints:
    """Fixed points of the distinguished elements on the alpha1 = 0 slice."""

    p_A: HVec
    p_B: HVec
    p_U: HVec
    p_V: HVec
    p_W: HVec
    p_U_prime: HVec | None
    p_U_dprime: HVec | None
    delta: complex


def remarkable_points(params: FamilyParams, rep: FamilyRep | None = None) -> RemarkablePoints:
    """Explicit fixed-point representatives; p_V, p_W are the S-translates of p_U.

    p_U_prime / p_U_dprime are the eigenvectors of U for the eigenvalues
    e^{l}, e^{-l} (loxodromic side) or e^{i beta}, e^{-i beta} (elliptic
    side); they degenerate at the unipotent parameter and are None there.
    """
    if abs(params.alpha1) > 1e-14:
        raise GeometryError("remarkable points are tabulated on the alpha1 = 0 slice")
    rep = rep or FamilyRep(params)
    sp = rep.space
    a2 = params.alpha2
    e = cmath.exp(1j * a2)
    p_A = HVec([1.0, 0.0, 0.0], sp)
    p_B = HVec([0.0, 0.0, 1.0], sp)
    p_U = HVec([1.0, -math.sqrt(2.0) / 2.0 * e, e * e], sp)
    p_V = rep.S.apply(p_U)
    p_W = rep.S.apply(p_V)
    c8 = 8.0 * math.cos(a2) ** 2
    delta = cmath.sqrt((c8 - 3.0) * (c8 + 1.0))
    if abs(c8 - 3.0) <= 1e-12:
        p_p = p_dp = None
    else:
        common = 2.0 * (2.0 * e * e + 1.0)
        p_p = HVec(
            [common, -math.sqrt(2.0) * e * (2.0 * e * e + 1.0 + delta), -(c8 + 1.0) - delta],
            sp,
        )
        p_dp = HVec(
            [common, -math.sqrt(2.0) * e * (2.0 * e * e + 1.0 - delta), -(c8 + 1.0) + delta],
            sp,
        )
    return RemarkablePoints(p_A, p_B, p_U, p_V, p_W, p_p, p_dp, delta)


@dataclass(frozen=True)
class TraceCoords:
    """Trace coordinates (z, w, x) = (tr st, tr st^-1, tr [s,t])."""

    z: complex
    w: complex
    x: complex


def trace_coords(rep: FamilyRep) -> TraceCoords:
    S, T = rep.S.M, rep.T.M
    z = complex(np.trace(S @ T))
    w = complex(np.trace(S @ rep.T.inv().M))
    x = complex(np.trace(S @ T @ rep.S.inv().M @ rep.T.inv().M))
    return TraceCoords(z, w, x)


def char_Q(z: complex, w: complex) -> float:
    return abs(z) ** 2 + abs(w) ** 2 - 3.0


def char_P(z: complex, w: complex) -> float:
    return (
        2.0 * (z**3).real
        + 2.0 * (w**3).real
        + abs(z) ** 2 * abs(w) ** 2
        - 6.0 * abs(z) ** 2
        - 6.0 * abs(w) ** 2
        + 9.0
    )


def char_variety_residuals(tc: TraceCoords):
    """Residuals of x + conj(x) = Q(z,w) and |x|^2 = P(z,w)."""
    r1 = abs(2.0 * tc.x.real - char_Q(tc.z, tc.w))
    r2 = abs(abs(tc.x) ** 2 - char_P(tc.z, tc.w))
    return r1, r2


def discriminant_D(x: float, y: float) -> float:
    """D(x, y) = x^3 y^3 - 9 x^2 y^2 - 27 x y^2 + 81 x y - 27 x - 27."""
    return x**3 * y**3 - 9.0 * x**2 * y**2 - 27.0 * x * y**2 + 81.0 * x * y - 27.0 * x - 27.0


def region_Z(params: FamilyParams):
    """(inside, margin): membership in the discreteness region D(...) > 0."""
    val = discriminant_D(
        4.0 * math.cos(params.alpha1) ** 2, 4.0 * math.cos(params.alpha2) ** 2
    )
    return val > 0.0, val


def peripheral_type(params: FamilyParams, tol=None) -> IsometryClass:
    """Class of rho(t s^-1), the peripheral holonomy being deformed."""
    rep = FamilyRep(params)
    return classify(rep.word(WORD_M1), tol)


def involution_matrix(alpha2: float) -> np.ndarray:
    """The U(2,1) involution fixing p_U and swapping p_V with p_W (alpha1 = 0)."""
    e = cmath.exp(1j * alpha2)
    return np.array(
        [
            [1.0, 0.0, 0.0],
            [-math.sqrt(2.0) * e, -1.0, 0.0],
            [-1.0, -math.sqrt(2.0) / e, 1.0],
        ],
        dtype=complex,
    )


def schwartz_point() -> complex:
    """Trace coordinate w of the real-axis uniformization of the same link."""
    theta = math.acos(-7.0 / 8.0) / 3.0
    return 2.0 * cmath.exp(1j * theta) + cmath.exp(-2j * theta)


def schwartz_peripheral_matrix() -> np.ndarray:
    """An SU(2,1)-conjugate of the ellipto-parabolic peripheral generator."""
    theta = math.acos(-7.0 / 8.0) / 3.0
    return cmath.exp(1j * theta) * np.array(
        [[1.0, 0.0, -0.5j], [0.0, cmath.exp(-3j * theta), 0.0], [0.0, 0.0, 1.0]],
        dtype=complex,
    )

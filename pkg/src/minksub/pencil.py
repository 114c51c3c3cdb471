"""Pencils of real symmetric quadratic forms.

A pencil is the two-parameter family lam1*A1 + lam2*A2 of symmetric N x N
matrices.  This module computes its inertia-based *type* (the minimum
positive index of inertia over members of maximal rank), normalizes
generic pencils to spectral data (real eigendirections plus complex
blocks), recognizes canonical angle configurations, classifies the
topology of {phi1 = phi2 = 0} intersected with the unit sphere, and
searches for common zeros of a quadratic pair together with two cubics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import atan2, cos, pi, sin

import numpy as np

SYM_TOL = 1e-12
EIG_TOL = 1e-9          # scaled by (1 + spectral radius)
CLUSTER_TOL = 1e-6      # eigenvalue clustering, scaled the same way
CANONICAL_ANGLE_TOL = 1e-6
ANTIPODAL_TOL = 1e-9
COND_LIMIT = 1e10
RESIDUAL_SQ = 1e-16     # success threshold for common_zero_search


class ZeroPencil(ValueError):
    """Both matrices of the pencil vanish."""


class SingularA2(ValueError):
    """No well-conditioned member found among A2, A1, A1 + A2."""


class NotSemisimple(ValueError):
    """The pencil's eigenstructure is defective beyond tolerance."""


class UnclassifiedConfiguration(ValueError):
    """Canonical data outside every topology case in scope."""


def _sym_matrix(M, name: str) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    scale = 1.0 + float(np.abs(M).max(initial=0.0))
    if float(np.abs(M - M.T).max(initial=0.0)) > SYM_TOL * scale:
        raise ValueError(f"{name} is not symmetric to {SYM_TOL}")
    return 0.5 * (M + M.T)


def _sym_cubic(T, name: str) -> np.ndarray:
    T = np.asarray(T, dtype=np.float64)
    if T.ndim != 3 or len(set(T.shape)) != 1:
        raise ValueError(f"{name} must be a cubic coefficient array (N,N,N)")
    out = np.zeros_like(T)
    for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1),
                 (2, 1, 0)):
        out += np.transpose(T, perm)
    return out / 6.0


@dataclass(frozen=True)
class SymPencil:
    A1: np.ndarray
    A2: np.ndarray

    @classmethod
    def make(cls, A1, A2) -> "SymPencil":
        A1 = _sym_matrix(A1, "A1")
        A2 = _sym_matrix(A2, "A2")
        if A1.shape != A2.shape:
            raise ValueError("A1 and A2 must have the same dimension")
        A1.setflags(write=False)
        A2.setflags(write=False)
        return cls(A1, A2)

    @property
    def dim(self) -> int:
        return self.A1.shape[0]

    def member(self, lam1: float, lam2: float) -> np.ndarray:
        return lam1 * self.A1 + lam2 * self.A2

    def to_dict(self) -> dict:
        return {"A1": self.A1.tolist(), "A2": self.A2.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "SymPencil":
        return cls.make(np.asarray(data["A1"], dtype=np.float64),
                        np.asarray(data["A2"], dtype=np.float64))


def inertia(M, tol: float | None = None) -> tuple:
    """Counts (pos, neg, zero) of eigenvalues of a symmetric matrix."""
    M = _sym_matrix(M, "matrix")
    evals = np.linalg.eigvalsh(M)
    if tol is None:
        tol = EIG_TOL * (1.0 + float(np.abs(evals).max(initial=0.0)))
    pos = int((evals > tol).sum())
    neg = int((evals < -tol).sum())
    return pos, neg, M.shape[0] - pos - neg


def type_sampled(P: SymPencil, samples: int = 10000) -> int:
    """Minimum positive inertia over sampled maximal-rank members.

    Samples lam on the half-circle lam2 >= 0; the antipodal member -M has
    swapped inertia, so both counts of every sample enter the minimum.
    """
    if samples < 8:
        raise ValueError("samples must be at least 8")
    if np.abs(P.A1).max(initial=0.0) == 0.0 and \
            np.abs(P.A2).max(initial=0.0) == 0.0:
        raise ZeroPencil("both pencil matrices are zero")
    th = np.linspace(0.0, np.pi, samples, endpoint=False)
    members = (np.cos(th)[:, None, None] * P.A1
               + np.sin(th)[:, None, None] * P.A2)
    evals = np.linalg.eigvalsh(members)
    tol = EIG_TOL * (1.0 + np.abs(evals).max(axis=1, keepdims=True))
    pos = (evals > tol).sum(axis=1)
    neg = (evals < -tol).sum(axis=1)
    rank = pos + neg
    at_max = rank == rank.max()
    return int(min(pos[at_max].min(), neg[at_max].min()))


@dataclass(frozen=True)
class SpectralData:
    """Simultaneous normal form of a generic pencil.

    ``real_pairs`` holds r tuples (alpha_i, beta_i): the values of the two
    forms on a common eigendirection, scaled so that beta_i = +-1 (or
    alpha_i = +-1 when the direction is annihilated by A2).
    ``complex_pairs`` holds s tuples (rho_t, nu_t) with nu_t > 0, one per
    two-dimensional complex-eigenvalue block.
    """

    real_pairs: tuple
    complex_pairs: tuple

    def __post_init__(self):
        for a, b in self.real_pairs:
            if a == 0.0 and b == 0.0:
                raise ValueError("real pair (0, 0) is not admissible")
        for rho, nu in self.complex_pairs:
            if nu <= 0.0:
                raise ValueError("complex pairs need nu > 0")

    @property
    def r(self) -> int:
        return len(self.real_pairs)

    @property
    def s(self) -> int:
        return len(self.complex_pairs)

    @property
    def dim(self) -> int:
        return self.r + 2 * self.s


def _pick_invertible(A1: np.ndarray, A2: np.ndarray):
    """First well-conditioned member among A2, A1, A1+A2, with complement."""
    for B, C, name in ((A2, A1, "A2"), (A1, A2, "A1"), (A1 + A2, A1, "A1+A2")):
        sv = np.linalg.svd(B, compute_uv=False)
        if sv[-1] > 0.0 and sv[0] / sv[-1] < COND_LIMIT:
            return B, C, name
    raise SingularA2("no member among A2, A1, A1+A2 is invertible "
                     f"below condition {COND_LIMIT:g}")


def _cluster_1d(values: np.ndarray, tol: float) -> list:
    """Greedy chains of sorted scalars with gaps <= tol: [(center, count)]."""
    out = []
    start = 0
    values = np.sort(values)
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            chunk = values[start:i]
            out.append((float(chunk.mean()), len(chunk)))
            start = i
    return out


def _cluster_2d(points: list, tol: float) -> list:
    """Greedy clusters of 2d points within tol: [((x, y), count)]."""
    out = []
    for pt in sorted(points):
        for k, (center, count) in enumerate(out):
            if np.hypot(pt[0] - center[0], pt[1] - center[1]) <= tol:
                cx = (center[0] * count + pt[0]) / (count + 1)
                cy = (center[1] * count + pt[1]) / (count + 1)
                out[k] = ((cx, cy), count + 1)
                break
        else:
            out.append(((pt[0], pt[1]), 1))
    return out


def _nullspace(M: np.ndarray, tol: float) -> np.ndarray:
    _, sv, vt = np.linalg.svd(M)
    return vt[sv <= tol].T if len(sv) else vt.T


def spectral_split(P: SymPencil) -> SpectralData:
    """Decompose a generic pencil into real directions and complex blocks.

    Works through the eigenstructure of B^-1 C where B is the first
    invertible matrix among A2, A1, A1 + A2 and C the complementary one.
    Root subspaces of that operator are the common invariant subspaces of
    the pencil, so the extracted (alpha, beta) data do not depend on
    which member was inverted.
    """
    A1, A2 = P.A1, P.A2
    N = P.dim
    B, C, _ = _pick_invertible(A1, A2)
    W = np.linalg.solve(B, C)
    evals = np.linalg.eigvals(W)
    specrad = float(np.abs(evals).max(initial=0.0))
    ctol = CLUSTER_TOL * (1.0 + specrad)
    ntol = EIG_TOL * (1.0 + specrad)

    real_evals = np.array([e.real for e in evals if abs(e.imag) <= ctol])
    complex_evals = [(e.real, e.imag) for e in evals if e.imag > ctol]
    if len(real_evals) + 2 * len(complex_evals) != N:
        raise NotSemisimple("unpaired complex eigenvalues")

    real_pairs = []
    for center, mult in _cluster_1d(real_evals, ctol):
        K = _nullspace(C - center * B,
                       ntol * (1.0 + abs(center)) * max(
                           1.0, float(np.abs(B).max(initial=0.0))))
        if K.shape[1] != mult:
            raise NotSemisimple(
                f"eigenvalue {center:.6g} has multiplicity {mult} but "
                f"eigenspace dimension {K.shape[1]}")
        GB = K.T @ B @ K
        d, Q = np.linalg.eigh(GB)
        if np.abs(d).min() <= EIG_TOL * (1.0 + np.abs(d).max()):
            raise NotSemisimple("degenerate restriction on a root subspace")
        for k in range(mult):
            w = K @ Q[:, k]
            a = float(w @ A1 @ w)
            b = float(w @ A2 @ w)
            if abs(b) > EIG_TOL * (1.0 + abs(a)):
                real_pairs.append((a / abs(b), float(np.sign(b))))
            elif abs(a) > 0.0:
                # arises when A2 is singular on this direction; normalize
                # by the first form instead
                real_pairs.append((float(np.sign(a)), b / abs(a)))
            else:
                raise NotSemisimple("direction annihilated by both forms")

    complex_pairs = []
    for (re, im), mult in _cluster_2d(complex_evals, ctol):
        Wsq = W @ W - 2.0 * re * W + (re * re + im * im) * np.eye(N)
        sv0 = np.linalg.svd(Wsq, compute_uv=False)[0]
        K = _nullspace(Wsq, ntol * (1.0 + sv0))
        if K.shape[1] != 2 * mult:
            raise NotSemisimple(
                f"complex eigenvalue {re:.6g}+{im:.6g}i has multiplicity "
                f"{mult} but invariant subspace dimension {K.shape[1]}")
        M1 = K.T @ A1 @ K
        M2 = K.T @ A2 @ K
        ev = np.linalg.eigvals(np.linalg.solve(M2, M1))
        found = sorted((float(e.real), float(e.imag)) for e in ev
                       if e.imag > 0.0)
        if len(found) != mult:
            raise NotSemisimple("complex block restriction did not split")
        complex_pairs.extend(found)

    real_pairs.sort(key=lambda p: (atan2(p[1], p[0]) % (2 * pi), p[0]))
    complex_pairs.sort()
    return SpectralData(tuple(real_pairs), tuple(complex_pairs))


def build_from_spectral(S: SpectralData) -> SymPencil:
    """Direct-sum pencil realizing the spectral data exactly."""
    N = S.dim
    A1 = np.zeros((N, N))
    A2 = np.zeros((N, N))
    idx = 0
    for a, b in S.real_pairs:
        A1[idx, idx] = a
        A2[idx, idx] = b
        idx += 1
    for rho, nu in S.complex_pairs:
        A1[idx, idx] = nu
        A1[idx + 1, idx + 1] = -nu
        A1[idx, idx + 1] = A1[idx + 1, idx] = rho
        A2[idx, idx + 1] = A2[idx + 1, idx] = 1.0
        idx += 2
    return SymPencil.make(A1, A2)


def type_exact(S: SpectralData) -> int:
    """Pencil type from spectral data by an exact circular sweep.

    Complex blocks contribute inertia (1, 1) to every nonzero member, so
    they add s to the positive count and never drop rank.  The remaining
    minimum is taken over open arcs between the angles where some
    lam . (alpha_i, beta_i) changes sign; every member inside an open arc
    has full rank.
    """
    s = S.s
    if S.r == 0:
        return s
    pts = np.asarray(S.real_pairs, dtype=np.float64)
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    crit = np.concatenate([(phi + 0.5 * np.pi) % (2 * np.pi),
                           (phi + 1.5 * np.pi) % (2 * np.pi)])
    crit = np.sort(crit)
    keep = np.concatenate([[True], np.diff(crit) > 1e-12])
    crit = crit[keep]
    mids = (crit + np.diff(np.concatenate([crit, [crit[0] + 2 * np.pi]])) / 2.0)
    counts = [(np.cos(th) * pts[:, 0] + np.sin(th) * pts[:, 1] > 0.0).sum()
              for th in mids]
    return s + int(min(counts))


@dataclass(frozen=True)
class CanonicalData:
    """Angle-block configuration: 2l-1 real blocks plus s hyperbolic pairs.

    ``n`` lists the real block sizes at angles 2*pi*j/(2l-1), j = 1..2l-1
    (empty when l = 0); ``s`` counts the hyperbolic (complex) pairs.
    """

    l: int
    n: tuple
    s: int

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        if self.l < 0 or self.s < 0:
            raise ValueError("l and s must be nonnegative")
        expected = 0 if self.l == 0 else 2 * self.l - 1
        if len(self.n) != expected:
            raise ValueError(f"l={self.l} needs {expected} block sizes, "
                             f"got {len(self.n)}")
        if any(v < 1 for v in self.n):
            raise ValueError("all block sizes must be positive")
        if self.dim < 1:
            raise ValueError("empty configuration")

    @property
    def r(self) -> int:
        return sum(self.n)

    @property
    def dim(self) -> int:
        return self.r + 2 * self.s


def _window_sums(C: CanonicalData) -> list:
    """d_j = n_j + ... + n_{j+l-2}, cyclic windows of length l-1."""
    K = 2 * C.l - 1
    return [sum(C.n[(j + t) % K] for t in range(C.l - 1)) for j in range(K)]


def canonical_type(C: CanonicalData) -> int:
    """Type of the canonical pencil: s + min d_j when l >= 2, else s."""
    if C.l <= 1:
        return C.s
    return C.s + min(_window_sums(C))


def build_canonical(C: CanonicalData) -> SymPencil:
    """Pencil with cos/sin angle blocks and hyperbolic pairs."""
    N = C.dim
    A1 = np.zeros((N, N))
    A2 = np.zeros((N, N))
    idx = 0
    K = 2 * C.l - 1
    for j, size in enumerate(C.n, start=1):
        # j = K closes the circle: take the angle 0 branch exactly, so the
        # l = 1 block writes sin = 0.0 rather than sin(2*pi) rounding dirt
        # (a 1x1 A2 holding only that dirt would pass the conditioning
        # gate and poison the split)
        th = 2.0 * pi * (j % K) / K
        for _ in range(size):
            A1[idx, idx] = cos(th)
            A2[idx, idx] = sin(th)
            idx += 1
    for _ in range(C.s):
        A1[idx, idx] = 1.0
        A1[idx + 1, idx + 1] = -1.0
        A2[idx, idx + 1] = A2[idx + 1, idx] = 1.0
        idx += 2
    return SymPencil.make(A1, A2)


def canonical_from_spectral(S: SpectralData,
                            tol: float = CANONICAL_ANGLE_TOL) -> CanonicalData:
    """Recognize spectral data sitting at canonical angles.

    Positive rescaling of a real pair is a congruence (scale the
    eigenvector), so each pair counts as a ray; its angle must land at
    2*pi*j/K for odd K, each angle occupied.  Complex pairs must be the
    canonical (0, 1).  No general reduction is attempted; data away from
    canonical position is rejected.
    """
    for rho, nu in S.complex_pairs:
        if abs(rho) > tol or abs(nu - 1.0) > tol:
            raise ValueError(f"complex pair ({rho}, {nu}) is not the "
                             "canonical (0, 1)")
    if S.r == 0:
        return CanonicalData(l=0, n=(), s=S.s)
    angles = [atan2(b, a) % (2 * pi) for a, b in S.real_pairs]
    reps = _cluster_2d([(th, 0.0) for th in sorted(angles)], tol)
    # wrap-around: merge a cluster near 2*pi into one near 0
    if len(reps) > 1 and reps[-1][0][0] - reps[0][0][0] > 2 * pi - tol:
        (th0, _), c0 = reps[0]
        (_, _), c1 = reps[-1]
        reps = [((th0, 0.0), c0 + c1)] + reps[1:-1]
    K = len(reps)
    if K % 2 == 0:
        raise ValueError(f"{K} distinct directions: canonical configurations "
                         "have an odd count")
    counts = [0] * K
    for (th, _), count in reps:
        hits = [j for j in range(1, K + 1)
                if min(abs(th - 2 * pi * j / K),
                       2 * pi - abs(th - 2 * pi * j / K)) <= tol]
        if len(hits) != 1:
            raise ValueError(f"direction angle {th:.9f} is not at a "
                             f"canonical position for K={K}")
        counts[hits[0] % K] += count
    # counts index: j mod K, so j=K landed at 0; rotate to order j=1..K
    ordered = counts[1:] + counts[:1]
    if any(c == 0 for c in ordered):
        raise ValueError("not all canonical angles are occupied")
    return CanonicalData(l=(K + 1) // 2, n=tuple(ordered), s=S.s)


@dataclass(frozen=True)
class TopologyLabel:
    """Diffeomorphism type of {phi1 = 0, phi2 = 0} on the unit sphere."""

    case: str
    spheres: tuple = ()
    note: str = ""

    def dimension(self):
        if self.case == "Empty":
            return None
        if self.case == "UnitTangentBundleOfSphere":
            return 2 * self.spheres[0] - 1
        if self.case == "ConnectedSum":
            return self.spheres[0][0] + self.spheres[0][1]
        return int(sum(self.spheres))

    def to_dict(self) -> dict:
        out = {"case": self.case,
               "spheres": [list(p) if isinstance(p, tuple) else p
                           for p in self.spheres],
               "dimension": self.dimension()}
        if self.note:
            out["note"] = self.note
        return out


def classify_topology(C: CanonicalData) -> TopologyLabel:
    r, s, l = C.r, C.s, C.l
    if r == 0:
        if s <= 1:
            return TopologyLabel("Empty")
        return TopologyLabel("UnitTangentBundleOfSphere", (s - 1,))
    if l == 1:
        if s == 0:
            return TopologyLabel("Empty")
        return TopologyLabel("ProductTwoSpheres", (s - 1, r + s - 2))
    if l == 2 and s == 0:
        return TopologyLabel(
            "ProductThreeSpheres", tuple(v - 1 for v in C.n),
            note="configuration also matches the connected-sum reading; "
                 "classified as the three-sphere product")
    if l >= 2 and l + s > 2:
        d = _window_sums(C)
        return TopologyLabel(
            "ConnectedSum",
            tuple((dj + s - 1, r - dj + s - 2) for dj in d))
    raise UnclassifiedConfiguration(f"l={l}, n={C.n}, s={s} matches no case")


@dataclass(frozen=True)
class GenericityReport:
    det_not_identically_zero: bool
    semisimple: bool
    smooth_intersection: bool
    method: str
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {"detNotIdenticallyZero": self.det_not_identically_zero,
                "semisimple": self.semisimple,
                "smoothIntersection": self.smooth_intersection,
                "method": self.method,
                "notes": list(self.notes)}


def genericity_check(P: SymPencil, seed: int = 0) -> GenericityReport:
    """The three genericity conditions, reported rather than enforced."""
    scale = 1.0 + max(float(np.abs(P.A1).max(initial=0.0)),
                      float(np.abs(P.A2).max(initial=0.0)))
    th = np.linspace(0.0, np.pi, 64, endpoint=False)
    members = (np.cos(th)[:, None, None] * P.A1
               + np.sin(th)[:, None, None] * P.A2)
    sv = np.linalg.svd(members, compute_uv=False)
    det_ok = bool(sv[:, -1].max() > EIG_TOL * scale)

    notes = []
    spectral = None
    try:
        spectral = spectral_split(P)
        semisimple = True
    except NotSemisimple as exc:
        semisimple = False
        notes.append(f"spectral split failed: {exc}")
    except SingularA2 as exc:
        semisimple = False
        notes.append(f"semisimplicity untested: {exc}")

    if spectral is not None:
        method = "spectral"
        smooth = True
        angles = [atan2(b, a) % (2 * pi) for a, b in spectral.real_pairs]
        for i in range(len(angles)):
            for j in range(i + 1, len(angles)):
                if abs(abs(angles[i] - angles[j]) - pi) <= ANTIPODAL_TOL:
                    smooth = False
                    notes.append(
                        f"real directions {i} and {j} are antipodal: the "
                        "origin lies in their convex hull")
    else:
        method = "sampled"
        smooth, extra = _smooth_sampled(P, seed)
        notes.extend(extra)
    return GenericityReport(det_ok, semisimple, smooth, method, tuple(notes))


def _smooth_sampled(P: SymPencil, seed: int) -> tuple:
    """Fallback smoothness probe: dependency functional on located C points."""
    N = P.dim
    zeros3 = np.zeros((N, N, N))
    scale = 1.0 + max(float(np.abs(P.A1).max(initial=0.0)),
                      float(np.abs(P.A2).max(initial=0.0)))
    found = []
    for start in range(32):
        x = _single_descent(P.A1, P.A2, zeros3, zeros3, [seed, 7919, start])
        if x is not None:
            found.append(x)
    if not found:
        return True, ("no intersection points located; the common zero set "
                      "may be empty",)
    worst = min(np.linalg.svd(np.stack([P.A1 @ x, P.A2 @ x], axis=1),
                              compute_uv=False)[-1] for x in found)
    return bool(worst > 1e-6 * scale), (
        f"sampled dependency functional minimum {worst:.3e} over "
        f"{len(found)} located points",)


def perturb(P: SymPencil, eps: float, seed: int = 0) -> SymPencil:
    """Symmetric random perturbation of A1 only, for near-defective pencils."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((P.dim, P.dim))
    return SymPencil.make(P.A1 + eps * 0.5 * (noise + noise.T), P.A2)


# -- common zero search -------------------------------------------------------


def _residuals(A1, A2, T1, T2, x):
    return np.array([x @ A1 @ x, x @ A2 @ x,
                     np.einsum("ijk,i,j,k->", T1, x, x, x),
                     np.einsum("ijk,i,j,k->", T2, x, x, x)])


def _jacobian(A1, A2, T1, T2, x):
    return np.stack([2.0 * A1 @ x, 2.0 * A2 @ x,
                     3.0 * np.einsum("ijk,j,k->i", T1, x, x),
                     3.0 * np.einsum("ijk,j,k->i", T2, x, x)])


def _project_to_quadrics(A1, A2, x, iters: int = 60):
    """Newton least squares onto {phi1 = 0, phi2 = 0, |x| = 1}."""
    for _ in range(iters):
        r = np.array([x @ A1 @ x, x @ A2 @ x, x @ x - 1.0])
        val = float(r @ r)
        if val <= 1e-28:
            return x, val
        J = np.stack([2.0 * A1 @ x, 2.0 * A2 @ x, 2.0 * x])
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        scale = 1.0
        for _ in range(25):
            xn = x + scale * step
            rn = np.array([xn @ A1 @ xn, xn @ A2 @ xn, xn @ xn - 1.0])
            if float(rn @ rn) < val:
                x = xn
                break
            scale *= 0.5
        else:
            return x, val
    r = np.array([x @ A1 @ x, x @ A2 @ x, x @ x - 1.0])
    return x, float(r @ r)


def _single_descent(A1, A2, T1, T2, seed_seq):
    """One multistart arm: quadric projection, tangent descent, polish."""
    N = A1.shape[0]
    rng = np.random.default_rng(seed_seq)
    x = rng.standard_normal(N)
    x /= np.linalg.norm(x)

    x, qval = _project_to_quadrics(A1, A2, x)
    if qval > 1e-18:
        return None

    # descend the cubic residuals along the quadric intersection
    for _ in range(150):
        r = _residuals(A1, A2, T1, T2, x)
        h = r[2] ** 2 + r[3] ** 2
        if h <= 1e-20:
            break
        grad = (2.0 * r[2] * 3.0 * np.einsum("ijk,j,k->i", T1, x, x)
                + 2.0 * r[3] * 3.0 * np.einsum("ijk,j,k->i", T2, x, x))
        Jc = np.stack([2.0 * A1 @ x, 2.0 * A2 @ x, 2.0 * x])
        q, _ = np.linalg.qr(Jc.T)
        tangent = grad - q @ (q.T @ grad)
        gn = np.linalg.norm(tangent)
        if gn <= 1e-14:
            break
        eta = min(1.0, 1.0 / gn)
        improved = False
        for _ in range(30):
            xn, _ = _project_to_quadrics(A1, A2, x - eta * tangent, iters=8)
            rn = _residuals(A1, A2, T1, T2, xn)
            if rn[2] ** 2 + rn[3] ** 2 < h:
                x = xn
                improved = True
                break
            eta *= 0.5
        if not improved:
            break

    # damped Gauss-Newton polish on all residuals plus the sphere constraint
    for _ in range(50):
        r = _residuals(A1, A2, T1, T2, x)
        full = np.concatenate([r, [x @ x - 1.0]])
        val = float(full @ full)
        if val <= 1e-30:
            break
        J = np.concatenate([_jacobian(A1, A2, T1, T2, x), [2.0 * x]])
        step, *_ = np.linalg.lstsq(J, -full, rcond=None)
        scale = 1.0
        improved = False
        for _ in range(25):
            xn = x + scale * step
            rn = _residuals(A1, A2, T1, T2, xn)
            fn = np.concatenate([rn, [xn @ xn - 1.0]])
            if float(fn @ fn) < val:
                x = xn
                improved = True
                break
            scale *= 0.5
        if not improved:
            break

    x = x / np.linalg.norm(x)
    r = _residuals(A1, A2, T1, T2, x)
    if float(r @ r) <= RESIDUAL_SQ:
        return x
    return None


def common_zero_search(phi1, phi2, psi1, psi2, budget: int = 64,
                       seed: int = 0):
    """Unit-sphere common zero of two quadratics and two cubics, or None.

    Runs ``budget`` independent descents (quadric projection, tangent-space
    descent of the cubic residuals, damped Gauss-Newton polish), each from
    a deterministically seeded random start.  Success means
    phi1^2 + phi2^2 + psi1^2 + psi2^2 <= 1e-16 at a unit vector.
    """
    A1 = _sym_matrix(phi1, "phi1")
    A2 = _sym_matrix(phi2, "phi2")
    T1 = _sym_cubic(psi1, "psi1")
    T2 = _sym_cubic(psi2, "psi2")
    if budget < 1:
        raise ValueError("budget must be positive")

    e1 = np.zeros(A1.shape[0])
    e1[0] = 1.0
    if float(_residuals(A1, A2, T1, T2, e1) @
             _residuals(A1, A2, T1, T2, e1)) <= RESIDUAL_SQ:
        return e1

    for start in range(budget):
        x = _single_descent(A1, A2, T1, T2, [seed, start])
        if x is not None:
            return x
    return None

"""Pointwise invariants of a germ and auditors for curvature sign claims.

The invariants live entirely in the germ's second jet: the relative
nullity index mu(P) (dimension of the common kernel of all second
fundamental forms), its kernel L(P), and the point type t(P) (minimum
positive inertia over maximal-rank normal combinations).  The auditors
evaluate concrete hypotheses -> conclusion implications on a direction
grid and report CONSISTENT or VIOLATION; a VIOLATION on valid input
means the implementation is wrong, so the auditors double as end-to-end
checks of the curvature pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from . import pencil as pencils
from .curvature import ricci_expanded
from .germ import Germ
from .minkowski import NormModel

RANK_TOL = 1e-9
RIC_NONNEG_TOL = 1e-8       # Ric >= -1e-8 counts as nonnegative
RULED_TOL = 1e-10
NORMAL_SAMPLES = 10000


class NotRuledDirection(ValueError):
    """The supplied direction does not annihilate kappa and the cubic."""


@dataclass(frozen=True)
class Interval:
    """Sampled bounds for the point type in codimension three and higher.

    Only a bound pair, never an exact value: the normal sphere is sampled,
    so the true minimum may lie below ``lower``.
    """

    lower: int
    upper: int


@dataclass(frozen=True)
class PointInvariants:
    mu: int
    type_t: object          # int, or Interval when p >= 3
    null_basis: np.ndarray  # (n, mu), orthonormal columns

    def to_dict(self) -> dict:
        t = self.type_t
        return {"mu": self.mu,
                "type": [t.lower, t.upper] if isinstance(t, Interval)
                else int(t),
                "typeExact": not isinstance(t, Interval),
                "nullBasis": self.null_basis.T.tolist()}


def nullity(germ: Germ, tol: float = RANK_TOL) -> tuple:
    """(mu, orthonormal basis of the common kernel of all d2 blocks)."""
    stacked = germ.d2.reshape(germ.p * germ.n, germ.n)
    _, sv, vt = np.linalg.svd(stacked)
    sv = np.concatenate([sv, np.zeros(germ.n - len(sv))])
    mask = sv <= tol * sv.max(initial=0.0)
    return int(mask.sum()), vt[mask].T


def _complement(basis: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column span."""
    if basis.shape[1] == 0:
        return np.eye(n)
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, basis.shape[1]:]


def point_type(germ: Germ):
    """Point type t(P): exact for p <= 2, sampled Interval bounds for p >= 3.

    For a single normal both orientations are admitted, so the type is
    the smaller of the two inertia counts.  For p = 2 the pencil machinery
    runs on the forms restricted to the complement of L(P); for p >= 3 the
    normal sphere is sampled and only bounds are reported.
    """
    if germ.p == 1:
        pos, neg, _ = pencils.inertia(germ.d2[0])
        return min(pos, neg)
    if germ.p == 2:
        mu, basis = nullity(germ)
        W = _complement(basis, germ.n)
        if W.shape[1] == 0:
            return 0
        pen = pencils.SymPencil.make(W.T @ germ.d2[0] @ W,
                                     W.T @ germ.d2[1] @ W)
        try:
            return pencils.type_exact(pencils.spectral_split(pen))
        except (pencils.SingularA2, pencils.NotSemisimple):
            return pencils.type_sampled(pen, NORMAL_SAMPLES)

    rng = np.random.default_rng(0)
    normals = rng.standard_normal((NORMAL_SAMPLES, germ.p))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    forms = np.einsum("sa,aij->sij", normals, germ.d2)
    evals = np.linalg.eigvalsh(forms)
    tol = RANK_TOL * (1.0 + np.abs(evals).max(axis=1, keepdims=True))
    pos = (evals > tol).sum(axis=1)
    neg = (evals < -tol).sum(axis=1)
    rank = pos + neg
    at_max = rank == rank.max()
    bound = int(pos[at_max].min())
    return Interval(bound, bound)


def point_invariants(germ: Germ) -> PointInvariants:
    mu, basis = nullity(germ)
    return PointInvariants(mu=mu, type_t=point_type(germ), null_basis=basis)


def sphere_grid(n: int, count: int) -> np.ndarray:
    """Deterministic direction grid: uniform angles for n = 2,
    low-discrepancy (Sobol through the normal map) points for n >= 3."""
    if n == 2:
        th = np.arange(count) * (2.0 * np.pi / count)
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    sob = qmc.Sobol(d=n, scramble=False)
    # a power-of-two draw keeps the sequence balanced (and scipy quiet)
    raw = sob.random(1 << int(np.ceil(np.log2(2 * count + 2))))
    # drop cube points that the inverse normal map sends to the origin
    # or to infinity (the unscrambled sequence starts at 0 and 1/2)
    raw = raw[np.all((raw > 0.0) & (raw < 1.0), axis=1)]
    pts = ndtri(raw)
    norms = np.linalg.norm(pts, axis=1)
    pts = pts[norms > 1e-9]
    if pts.shape[0] < count:
        raise ValueError(f"could not build {count} sphere points")
    pts = pts[:count]
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


@dataclass(frozen=True)
class AuditReport:
    min_ric: float
    argmin_direction: np.ndarray
    type_t: object
    mu: int
    verdict: str
    notes: tuple

    def to_dict(self) -> dict:
        t = self.type_t
        return {"minRic": self.min_ric,
                "argminDirection": list(self.argmin_direction),
                "type": [t.lower, t.upper] if isinstance(t, Interval)
                else int(t),
                "mu": self.mu,
                "verdict": self.verdict,
                "notes": list(self.notes)}


def _grid_min_ric(norm: NormModel, germ: Germ, grid: int | None):
    if grid is None:
        grid = 720 if germ.n == 2 else 4096
    dirs = sphere_grid(germ.n, grid)
    best = None
    arg = None
    for u in dirs:
        ric = ricci_expanded(norm, germ, u).Ric
        if best is None or ric < best:
            best, arg = ric, u
    return best, arg


def audit_hypersurface(norm: NormModel, germ: Germ,
                       grid: int | None = None,
                       tol: float = RIC_NONNEG_TOL) -> AuditReport:
    """Hypersurface check: Ric >= 0 on the grid and t(P) != 1 must force a
    semidefinite second fundamental form."""
    if germ.p != 1:
        raise ValueError("hypersurface audit needs codimension 1")
    if germ.n < 2:
        raise ValueError("hypersurface audit needs n >= 2")
    min_ric, arg = _grid_min_ric(norm, germ, grid)
    mu, _ = nullity(germ)
    t = point_type(germ)
    pos, neg, _ = pencils.inertia(germ.d2[0])
    semidefinite = min(pos, neg) == 0

    notes = []
    if min_ric < -tol:
        notes.append(f"hypothesis Ric >= 0 fails: min Ric = {min_ric!r}")
    if t == 1:
        notes.append("hypothesis t != 1 fails: t(P) = 1")
    hypotheses = min_ric >= -tol and t != 1
    verdict = "CONSISTENT" if (not hypotheses or semidefinite) else "VIOLATION"
    if verdict == "VIOLATION":
        notes.append("second fundamental form is indefinite despite "
                     "nonnegative Ricci and t != 1")
    elif hypotheses:
        notes.append("second fundamental form is semidefinite as required")
    return AuditReport(min_ric, arg, t, mu, verdict, tuple(notes))


def audit_codim2(norm: NormModel, germ: Germ,
                 grid: int | None = None,
                 tol: float = RIC_NONNEG_TOL) -> AuditReport:
    """Codimension-2 check: Ric >= 0 on the grid must force t(P) <= 2."""
    if germ.p != 2:
        raise ValueError("codimension-2 audit needs p = 2")
    min_ric, arg = _grid_min_ric(norm, germ, grid)
    mu, _ = nullity(germ)
    t = point_type(germ)

    notes = []
    if min_ric < -tol:
        notes.append(f"hypothesis Ric >= 0 fails: min Ric = {min_ric!r}")
    verdict = ("CONSISTENT" if (min_ric < -tol or t <= 2) else "VIOLATION")
    if verdict == "VIOLATION":
        notes.append(f"t(P) = {t} > 2 despite nonnegative Ricci")
    elif min_ric >= -tol:
        notes.append(f"t(P) = {t} <= 2 as required")
    return AuditReport(min_ric, arg, t, mu, verdict, tuple(notes))


def audit_ruled(norm: NormModel, germ: Germ, ruling_direction,
                grid: int | None = None,
                tol: float = RIC_NONNEG_TOL) -> AuditReport:
    """Ruled-direction check at one direction u with kappa(u) = 0 and
    vanishing cubic: the full Ricci must equal the reduced contraction
    -zeta_ab g^il f^b_jl f^a_ir u^j u^r, and Ric(u) >= 0 must place u in
    L(P).  The grid argument is accepted for signature uniformity with
    the other audits; the hypothesis concerns a single direction.
    """
    del grid
    u = np.asarray(ruling_direction, dtype=np.float64)
    if u.shape != (germ.n,):
        raise ValueError(f"ruling direction must have shape ({germ.n},)")
    scale2 = 1.0 + float(np.abs(germ.d2).max(initial=0.0)) * float(u @ u)
    scale3 = 1.0 + float(np.abs(germ.d3).max(initial=0.0)) * abs(u @ u) ** 1.5
    if np.abs(germ.kappa(u)).max(initial=0.0) > RULED_TOL * scale2:
        raise NotRuledDirection("kappa(u) does not vanish")
    if np.abs(germ.cubic(u)).max(initial=0.0) > RULED_TOL * scale3:
        raise NotRuledDirection("cubic contraction does not vanish")

    rep = ricci_expanded(norm, germ, u)
    gi = np.linalg.inv(rep.g)
    fu = np.einsum("ajl,l->aj", germ.d2, u)
    reduced = -float(np.einsum("il,ab,bl,ai->", gi, rep.zeta, fu, fu))
    agree = abs(rep.Ric - reduced) <= 1e-9 * (1.0 + abs(rep.Ric))

    mu, basis = nullity(germ)
    in_L = np.abs(fu).max(initial=0.0) <= 1e-8 * scale2

    notes = [f"reduced contraction = {reduced!r}"]
    if not agree:
        notes.append(f"full Ricci {rep.Ric!r} disagrees with the reduced "
                     "contraction")
    if rep.Ric < -tol:
        notes.append("hypothesis Ric(u) >= 0 fails at the ruling direction")
        implication = True
    else:
        implication = in_L
        if in_L:
            notes.append("ruling direction lies in L(P) as required")
        else:
            notes.append("ruling direction escapes L(P) despite "
                         "nonnegative Ricci")
    verdict = "CONSISTENT" if (agree and implication) else "VIOLATION"
    t = point_type(germ)
    return AuditReport(rep.Ric, u, t, mu, verdict, tuple(notes))

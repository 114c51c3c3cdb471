"""Submanifold germs in adapted graph coordinates.

A germ of an n-dimensional submanifold through the origin of R^(n+p) is
stored as the 2-jet and 3-jet of its graph representation

    y^alpha = f^alpha(x),   f^alpha(0) = 0,  df^alpha(0) = 0,

i.e. the symmetric arrays d2[alpha, i, j] = f^alpha_ij(0) and
d3[alpha, i, j, k] = f^alpha_ijk(0).  The adapted condition (vanishing
first jet, tangent space = the first n coordinate axes) is what makes the
curvature formulas in :mod:`minksub.curvature` valid literally.

``adapt_germ`` absorbs a nonzero first jet into the ambient frame by the
linear shear y -> y - (df) x, which leaves second and third derivatives
untouched.  ``transform_germ`` pushes a germ through an arbitrary
invertible ambient linear map and re-expresses the image as a graph,
inverting the tangent substitution with jet arithmetic; it is the
workhorse behind the affine-invariance checks of the pointwise
invariants.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .jets import Jet4

SYMMETRY_WARN_TOL = 1e-10


class NonInvertibleFrame(ValueError):
    """Frame basis or coordinate substitution is numerically singular."""


def sym2(arr: np.ndarray) -> np.ndarray:
    return 0.5 * (arr + arr.swapaxes(-1, -2))


def sym3(arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr)
    for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        axes = tuple(range(arr.ndim - 3)) + tuple(arr.ndim - 3 + k for k in perm)
        out += arr.transpose(axes)
    return out / 6.0


@dataclass(frozen=True)
class Germ:
    n: int
    p: int
    d2: np.ndarray  # (p, n, n), symmetric in the trailing pair
    d3: np.ndarray  # (p, n, n, n), fully symmetric in the trailing triple

    @staticmethod
    def make(n: int, p: int, d2, d3) -> "Germ":
        """Validate shapes, symmetrize, and warn if the input was asymmetric."""
        if n < 1 or p < 1:
            raise ValueError("need n >= 1 and p >= 1")
        d2 = np.asarray(d2, dtype=np.float64)
        d3 = np.asarray(d3, dtype=np.float64)
        if d2.shape != (p, n, n):
            raise ValueError(f"d2 must have shape ({p}, {n}, {n})")
        if d3.shape != (p, n, n, n):
            raise ValueError(f"d3 must have shape ({p}, {n}, {n}, {n})")
        s2, s3 = sym2(d2), sym3(d3)
        scale2 = 1.0 + float(np.max(np.abs(d2)))
        scale3 = 1.0 + float(np.max(np.abs(d3)))
        if (np.max(np.abs(d2 - s2)) > SYMMETRY_WARN_TOL * scale2
                or np.max(np.abs(d3 - s3)) > SYMMETRY_WARN_TOL * scale3):
            warnings.warn("germ jets were not symmetric; symmetrized",
                          stacklevel=2)
        s2.setflags(write=False)
        s3.setflags(write=False)
        return Germ(n=n, p=p, d2=s2, d3=s3)

    def kappa(self, u) -> np.ndarray:
        """Second-order normal deviation kappa^alpha(u) = f^alpha_ij u^i u^j."""
        u = np.asarray(u, dtype=np.float64)
        return np.einsum("aij,i,j->a", self.d2, u, u)

    def cubic(self, u) -> np.ndarray:
        """Third-order contraction f^alpha_ijk u^i u^j u^k."""
        u = np.asarray(u, dtype=np.float64)
        return np.einsum("aijk,i,j,k->a", self.d3, u, u, u)

    def to_dict(self) -> dict:
        return {"n": self.n, "p": self.p,
                "d2": self.d2.tolist(), "d3": self.d3.tolist()}

    @staticmethod
    def from_dict(data: dict) -> "Germ":
        return Germ.make(int(data["n"]), int(data["p"]), data["d2"], data["d3"])


@dataclass(frozen=True)
class AmbientFrame:
    """Affine chart of the ambient space: point = origin + basis @ coords."""

    origin: np.ndarray  # (n+p,)
    basis: np.ndarray   # (n+p, n+p) columns are the coordinate directions

    @staticmethod
    def identity(dim: int) -> "AmbientFrame":
        return AmbientFrame(origin=np.zeros(dim), basis=np.eye(dim))

    def check(self) -> None:
        dim = self.origin.shape[0]
        if self.basis.shape != (dim, dim):
            raise ValueError("basis shape does not match origin")
        svals = np.linalg.svd(self.basis, compute_uv=False)
        if svals[-1] == 0.0 or svals[0] / svals[-1] > 1e12:
            raise NonInvertibleFrame("frame basis is numerically singular")

    def sheared(self, d1: np.ndarray) -> "AmbientFrame":
        """Compose with the shear that absorbs the first jet d1 (p, n)."""
        p, n = d1.shape
        shear = np.eye(n + p)
        shear[n:, :n] = d1
        return AmbientFrame(origin=self.origin.copy(), basis=self.basis @ shear)


def adapt_germ(raw_d1, raw_d2, raw_d3, frame: AmbientFrame | None = None):
    """Absorb a nonzero first jet into the frame; return (Germ, AmbientFrame).

    The graph substitution y -> y - (raw_d1) x is linear in x, so the
    second and third jets pass through unchanged while the tangent columns
    of the frame pick up the graph slopes.  Applying the result to an
    already adapted germ (raw_d1 = 0) is the identity.
    """
    raw_d1 = np.asarray(raw_d1, dtype=np.float64)
    p, n = raw_d1.shape
    if frame is None:
        frame = AmbientFrame.identity(n + p)
    frame.check()
    germ = Germ.make(n, p, raw_d2, raw_d3)
    return germ, frame.sheared(raw_d1)


def _eval_poly_jets(d1, d2, d3, xjets):
    """Jets of f^alpha(x) = d1 x + d2 x x / 2 + d3 x x x / 6 at jet arguments."""
    p, n = d2.shape[:2]
    dim = xjets[0].dim
    out = []
    pair = [[xjets[i] * xjets[j] for j in range(n)] for i in range(n)]
    for a in range(p):
        acc = Jet4.constant(dim, 0.0)
        for i in range(n):
            if d1 is not None and d1[a, i] != 0.0:
                acc = acc + xjets[i] * d1[a, i]
            for j in range(n):
                c2 = 0.5 * d2[a, i, j]
                if c2 != 0.0:
                    acc = acc + pair[i][j] * c2
                for k in range(n):
                    c3 = d3[a, i, j, k] / 6.0
                    if c3 != 0.0:
                        acc = acc + pair[i][j] * xjets[k] * c3
        out.append(acc)
    return out


def transform_germ(germ: Germ, transform) -> tuple:
    """Push the germ through an ambient linear map and re-graph the image.

    Returns raw jets (d1, d2, d3) of the image in graph form over the new
    first n coordinates; feed them to :func:`adapt_germ`.  The total linear
    substitution u = T11 x on the tangent block must be invertible.
    """
    T = np.asarray(transform, dtype=np.float64)
    n, p = germ.n, germ.p
    N = n + p
    if T.shape != (N, N):
        raise ValueError(f"transform must have shape ({N}, {N})")
    svals = np.linalg.svd(T, compute_uv=False)
    if svals[-1] == 0.0 or svals[0] / svals[-1] > 1e12:
        raise NonInvertibleFrame("ambient transform is numerically singular")
    T11, T12 = T[:n, :n], T[:n, n:]
    T21, T22 = T[n:, :n], T[n:, n:]
    # df(0) = 0, so the tangent substitution u = T11 x + T12 f(x) has linear
    # part T11; it must be invertible for the image to stay a graph.
    sv11 = np.linalg.svd(T11, compute_uv=False)
    if sv11[-1] == 0.0 or sv11[0] / sv11[-1] > 1e12:
        raise NonInvertibleFrame("image is not a graph over the tangent block")
    M = np.linalg.inv(T11)

    ujets = [Jet4.variable(n, i) for i in range(n)]
    # invert u = T11 x + T12 f(x) by fixed point iteration; each sweep gains
    # one order, three sweeps are exact through order 4
    xjets = [sum((M[i, j] * ujets[j] for j in range(n)),
                 Jet4.constant(n, 0.0)) for i in range(n)]
    for _ in range(3):
        fx = _eval_poly_jets(None, germ.d2, germ.d3, xjets)
        rhs = [ujets[j] - sum((T12[j, a] * fx[a] for a in range(p)),
                              Jet4.constant(n, 0.0)) for j in range(n)]
        xjets = [sum((M[i, j] * rhs[j] for j in range(n)),
                     Jet4.constant(n, 0.0)) for i in range(n)]

    fx = _eval_poly_jets(None, germ.d2, germ.d3, xjets)
    gjets = [sum((T21[a, j] * xjets[j] for j in range(n)),
                 Jet4.constant(n, 0.0))
             + sum((T22[a, b] * fx[b] for b in range(p)),
                   Jet4.constant(n, 0.0))
             for a in range(p)]

    d1 = np.zeros((p, n))
    d2 = np.zeros((p, n, n))
    d3 = np.zeros((p, n, n, n))
    for a, jet in enumerate(gjets):
        _, t1, t2, t3 = jet.partial_tensors(3)
        d1[a] = t1
        d2[a] = t2
        d3[a] = t3
    return d1, d2, d3

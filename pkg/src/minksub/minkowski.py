"""Minkowski norm models on R^dim.

Everything downstream consumes a norm through two entry points: ``value``
(float evaluation of H = F^2/2) and ``jet`` (the order-4 Taylor jet of H
about a base direction).  Four families are provided:

* ``euclidean``:   H(y) = |y|^2 / 2.
* ``randers``:     F(y) = sqrt(y.a.y) + b.y with a symmetric positive
                   definite and the covector b shorter than 1 in the
                   a-inverse norm, H = F^2/2.
* ``example4``:    the bundled four-parameter family on R^3,

                       H = A (y1^2 + y2^2)
                         + e1 y3 (3 y2 y1^2 - y2^3) / (y1^2 + y2^2)
                         + y3^2 (B + e2 (y1^6 - 15 y1^4 y2^2
                                  + 15 y1^2 y2^4 - y2^6) / (y1^2 + y2^2)^3),

                   smooth and positively homogeneous of degree 2 away from
                   the y3-axis, where the rational terms have no limit.
* ``expression``:  any tree accepted by :mod:`minksub.norm_expr`.

Both evaluation paths run the same arithmetic (operator overloading on
jets), so a jet coefficient can never drift from the float value it
truncates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .jets import Jet4
from .norm_expr import evaluate, parse_norm, to_text

AXIS_EXCLUSION = 1e-12  # example4: excluded when y1^2+y2^2 < AXIS_EXCLUSION*|y|^2

EULER_TOL = 1e-9


class SingularDirection(ValueError):
    """The norm is not smooth (or not defined) along the requested direction."""


def _sqrt(x):
    return x.sqrt() if isinstance(x, Jet4) else math.sqrt(x)


@dataclass(frozen=True)
class NormModel:
    kind: str
    dim: int
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    A: float | None = None
    B: float | None = None
    eps1: float | None = None
    eps2: float | None = None
    text: str | None = None
    tree: object = field(default=None, repr=False)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def euclidean(dim: int) -> "NormModel":
        if dim < 1:
            raise ValueError("dimension must be positive")
        return NormModel(kind="euclidean", dim=dim)

    @staticmethod
    def randers(a, b) -> "NormModel":
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        dim = a.shape[0]
        if a.shape != (dim, dim) or b.shape != (dim,):
            raise ValueError("a must be (dim, dim) and b (dim,)")
        if np.max(np.abs(a - a.T)) > 1e-12 * (1.0 + np.max(np.abs(a))):
            raise ValueError("a must be symmetric")
        a = 0.5 * (a + a.T)
        evals = np.linalg.eigvalsh(a)
        if evals[0] <= 0.0:
            raise ValueError("a must be positive definite")
        bnorm = float(np.sqrt(b @ np.linalg.solve(a, b)))
        if bnorm >= 1.0:
            raise ValueError(f"drift covector too long: |b|_a = {bnorm:.6g} >= 1")
        return NormModel(kind="randers", dim=dim, a=a, b=b)

    @staticmethod
    def example4(A: float, B: float, eps1: float, eps2: float) -> "NormModel":
        if A <= 0.0 or B <= 0.0:
            raise ValueError("A and B must be positive")
        return NormModel(kind="example4", dim=3, A=float(A), B=float(B),
                         eps1=float(eps1), eps2=float(eps2))

    @staticmethod
    def expression(text: str, dim: int) -> "NormModel":
        tree = parse_norm(text, dim)
        return NormModel(kind="expression", dim=dim, text=text, tree=tree)

    # -- evaluation --------------------------------------------------------

    def _h(self, ys):
        """H over any ring; ys is a list of dim floats or jets."""
        if self.kind == "euclidean":
            acc = ys[0] * ys[0]
            for y in ys[1:]:
                acc = acc + y * y
            return acc * 0.5
        if self.kind == "randers":
            q = 0.0
            for i in range(self.dim):
                for j in range(self.dim):
                    aij = self.a[i, j]
                    if aij != 0.0:
                        q = q + ys[i] * ys[j] * aij
            f = _sqrt(q)
            for i in range(self.dim):
                if self.b[i] != 0.0:
                    f = f + ys[i] * self.b[i]
            return f * f * 0.5
        if self.kind == "example4":
            y1, y2, y3 = ys
            s1 = y1 * y1
            s2 = y2 * y2
            r2 = s1 + s2
            cubic = (s1 * y2) * 3.0 - s2 * y2
            s1sq = s1 * s1
            s2sq = s2 * s2
            sext = (s1sq * s1 - s2sq * s2) - (s1sq * s2 - s1 * s2sq) * 15.0
            return (r2 * self.A
                    + y3 * cubic / r2 * self.eps1
                    + (y3 * y3) * (self.B + sext / (r2 * r2 * r2) * self.eps2))
        if self.kind == "expression":
            return evaluate(self.tree, ys)
        raise ValueError(f"unknown norm kind {self.kind!r}")

    def value(self, y) -> float:
        y = np.asarray(y, dtype=np.float64)
        self.check_admissible(y)
        return float(self._h(list(y)))

    def jet(self, base) -> Jet4:
        """Order-4 jet of H about ``base`` (must be admissible)."""
        base = np.asarray(base, dtype=np.float64)
        self.check_admissible(base)
        return self._h(Jet4.variables(self.dim, base))

    # -- admissibility -----------------------------------------------------

    def check_admissible(self, y) -> None:
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.dim,):
            raise ValueError(f"direction must have shape ({self.dim},)")
        sq = float(y @ y)
        if sq == 0.0:
            raise SingularDirection("zero direction")
        if self.kind == "example4" and y[0] ** 2 + y[1] ** 2 < AXIS_EXCLUSION * sq:
            raise SingularDirection(
                "direction lies on the excluded y3-axis of the example norm")

    @property
    def excluded_rays(self) -> str | None:
        if self.kind == "example4":
            return ("the y3-axis: directions with y1^2 + y2^2 < "
                    f"{AXIS_EXCLUSION:g} * |y|^2")
        return None

    def to_config(self) -> dict:
        if self.kind == "euclidean":
            return {"kind": "euclidean", "dim": self.dim}
        if self.kind == "randers":
            return {"kind": "randers", "a": self.a.tolist(), "b": self.b.tolist()}
        if self.kind == "example4":
            return {"kind": "example4", "A": self.A, "B": self.B,
                    "eps1": self.eps1, "eps2": self.eps2}
        return {"kind": "expression", "dim": self.dim,
                "text": self.text if self.text is not None else to_text(self.tree)}


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    samples: int
    seed: int
    max_euler_degree_residual: float
    max_euler_gradient_residual: float
    min_hessian_eigenvalue: float
    argmin_direction: np.ndarray
    min_axis_fraction: float
    notes: tuple

    def to_dict(self) -> dict:
        return {
            "valid": bool(self.valid),
            "samples": self.samples,
            "seed": self.seed,
            "maxEulerDegreeResidual": self.max_euler_degree_residual,
            "maxEulerGradientResidual": self.max_euler_gradient_residual,
            "minHessianEigenvalue": self.min_hessian_eigenvalue,
            "argminDirection": [float(v) for v in self.argmin_direction],
            "minAxisFraction": self.min_axis_fraction,
            "eulerTolerance": EULER_TOL,
            "notes": list(self.notes),
        }


def _sample_directions(model: NormModel, samples: int, rng,
                       min_axis_fraction: float) -> np.ndarray:
    out = np.empty((samples, model.dim))
    count = 0
    while count < samples:
        y = rng.standard_normal(model.dim)
        norm = np.linalg.norm(y)
        if norm < 1e-8:
            continue
        y /= norm
        if model.kind == "example4":
            r2 = y[0] ** 2 + y[1] ** 2
            if r2 < max(AXIS_EXCLUSION, min_axis_fraction ** 2):
                continue
        out[count] = y
        count += 1
    return out


def _near_ray_probes(model: NormModel, count: int, rng) -> np.ndarray:
    """Points approaching each excluded ray, log-spaced in angular distance."""
    if model.excluded_rays is None or count == 0:
        return np.zeros((0, model.dim))
    probes = []
    angles = np.logspace(-3, -1, count // 2)
    for sign in (1.0, -1.0):
        for phi in angles:
            theta = rng.uniform(0.0, 2.0 * np.pi)
            w = np.array([np.cos(theta), np.sin(theta), 0.0])
            probes.append(np.array([0.0, 0.0, sign]) * np.cos(phi)
                          + w * np.sin(phi))
    return np.asarray(probes)


def validate_norm(model: NormModel, samples: int = 2000, seed: int = 0,
                  min_axis_fraction: float = 0.0) -> ValidationReport:
    """Sample-based certificate that H behaves like a Minkowski norm.

    Checks the two Euler identities (y.grad H = 2H and Hess(H).y = grad H)
    and strong convexity (positive definite Hessian) on a uniform sphere
    sample.  With ``min_axis_fraction`` zero and an excluded ray declared,
    extra probes approach the ray; a singular model is then honestly
    reported invalid.  Passing a positive fraction restricts the sample to
    directions with y1^2+y2^2 >= fraction^2 * |y|^2, certifying the norm on
    that cone complement only.
    """
    rng = np.random.default_rng(seed)
    dirs = _sample_directions(model, samples, rng, min_axis_fraction)
    notes = []
    if min_axis_fraction == 0.0:
        probes = _near_ray_probes(model, 200, rng)
        if len(probes):
            dirs = np.vstack([dirs, probes])
            notes.append("200 probes approach the excluded ray")
    else:
        notes.append(f"sample restricted to y1^2+y2^2 >= "
                     f"{min_axis_fraction ** 2:g} * |y|^2")

    max_deg = 0.0
    max_grad = 0.0
    min_eig = np.inf
    argmin = dirs[0]
    for y in dirs:
        jet = model.jet(y)
        h0, d1, d2 = jet.partial_tensors(2)
        scale = 1.0 + abs(h0)
        max_deg = max(max_deg, abs(float(y @ d1) - 2.0 * h0) / scale)
        max_grad = max(max_grad, float(np.max(np.abs(d2 @ y - d1))) / scale)
        eig = float(np.linalg.eigvalsh(d2)[0])
        if eig < min_eig:
            min_eig = eig
            argmin = y
    valid = max_deg <= EULER_TOL and max_grad <= EULER_TOL and min_eig > 0.0
    return ValidationReport(valid=valid, samples=len(dirs), seed=seed,
                            max_euler_degree_residual=max_deg,
                            max_euler_gradient_residual=max_grad,
                            min_hessian_eigenvalue=min_eig,
                            argmin_direction=np.asarray(argmin),
                            min_axis_fraction=min_axis_fraction,
                            notes=tuple(notes))

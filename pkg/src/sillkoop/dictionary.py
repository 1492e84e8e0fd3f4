"""State-inclusive logistic lifting (SILL) dictionaries.

A SILL dictionary lifts an m-dimensional measurement vector y to
N = 1 + m + N_L coordinates: a constant, the measurements themselves, and
N_L conjunctive logistic functions (products of per-coordinate sigmoids,
each with its own center mu and steepness alpha).  This module evaluates,
differentiates, orders, and join-completes such dictionaries.

All operations are pure functions of their arguments.  Array arguments
broadcast over leading axes, so a (P, m) batch of points evaluates in one
call with deterministic ordering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScalarLogisticParams",
    "ConjLogistic",
    "SillDictionary",
    "OrderCheckResult",
    "stable_sigmoid",
    "eval_scalar_logistic",
    "eval_conjunctive",
    "conj_values",
    "lift",
    "grad_conjunctive",
    "lift_jacobian",
    "dominates",
    "check_total_order",
    "join_params",
    "join_completion",
    "save_dictionary",
    "load_dictionary",
]


def stable_sigmoid(z):
    """1 / (1 + exp(-z)) without overflow for any finite z.

    Only the non-positive branch is ever exponentiated, so arguments with
    magnitude far beyond 700 saturate cleanly to 0 or 1 instead of
    overflowing.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class ScalarLogisticParams:
    """Center and steepness of one scalar logistic.

    alpha may carry any sign here; dictionary construction (ConjLogistic)
    is where strict positivity is enforced.
    """

    mu: float
    alpha: float


def eval_scalar_logistic(y_i, p: ScalarLogisticParams):
    """Scalar logistic 1 / (1 + exp(-alpha * (y_i - mu)))."""
    return stable_sigmoid(p.alpha * (np.asarray(y_i, dtype=float) - p.mu))


@dataclass(frozen=True, eq=False)
class ConjLogistic:
    """A conjunctive logistic: the product of m scalar logistics.

    mu and alpha are length-m vectors; the function is near 1 on the
    orthant-like region above all centers and near 0 elsewhere.  Steepness
    must be strictly positive in every coordinate.
    """

    mu: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        if mu.ndim != 1 or alpha.ndim != 1:
            raise ValueError("mu and alpha must be 1-D vectors")
        if mu.shape != alpha.shape:
            raise ValueError(
                f"mu has length {mu.size}, alpha has length {alpha.size}"
            )
        if mu.size < 1:
            raise ValueError("conjunctive logistic needs at least one coordinate")
        if not (np.isfinite(mu).all() and np.isfinite(alpha).all()):
            raise ValueError("mu and alpha must be finite")
        if not (alpha > 0).all():
            raise ValueError("all steepness components must be strictly positive")
        mu.setflags(write=False)
        alpha.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "alpha", alpha)

    @property
    def m(self) -> int:
        return self.mu.size

    def scaled(self, s: float) -> "ConjLogistic":
        """Same centers, all steepnesses multiplied by s > 0."""
        return ConjLogistic(self.mu, s * self.alpha)

    def key(self) -> tuple:
        return (tuple(self.mu.tolist()), tuple(self.alpha.tolist()))

    def __eq__(self, other):
        if not isinstance(other, ConjLogistic):
            return NotImplemented
        return np.array_equal(self.mu, other.mu) and np.array_equal(
            self.alpha, other.alpha
        )

    def __hash__(self):
        return hash(self.key())


@dataclass(frozen=True, eq=False)
class SillDictionary:
    """Ordered dictionary [1, y, conjunctive logistics] over R^m.

    Every logistic must share the dictionary's measurement dimension m and
    there must be at least one (the dictionary is a genuine lifting,
    N > m).  The lifted coordinate layout is fixed: index 0 is the
    constant, 1..m are the measurements, m+1.. are the logistics in list
    order.
    """

    m: int
    logistics: tuple

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("measurement dimension m must be a positive integer")
        object.__setattr__(self, "m", int(self.m))
        logistics = tuple(self.logistics)
        if len(logistics) < 1:
            raise ValueError("a SILL dictionary needs at least one logistic")
        for k, f in enumerate(logistics):
            if not isinstance(f, ConjLogistic):
                raise TypeError(f"logistics[{k}] is not a ConjLogistic")
            if f.m != self.m:
                raise ValueError(
                    f"logistics[{k}] has dimension {f.m}, dictionary has m={self.m}"
                )
        object.__setattr__(self, "logistics", logistics)

    @property
    def n_logistic(self) -> int:
        return len(self.logistics)

    @property
    def size(self) -> int:
        """Total number of dictionary functions N = 1 + m + N_L."""
        return 1 + self.m + len(self.logistics)

    def scaled(self, s: float) -> "SillDictionary":
        return SillDictionary(self.m, tuple(f.scaled(s) for f in self.logistics))

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "logistics": [
                {"mu": f.mu.tolist(), "alpha": f.alpha.tolist()}
                for f in self.logistics
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SillDictionary":
        try:
            m = obj["m"]
            entries = obj["logistics"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"dictionary object missing field: {exc}") from exc
        logistics = [ConjLogistic(e["mu"], e["alpha"]) for e in entries]
        return cls(m, tuple(logistics))


@dataclass(frozen=True)
class OrderCheckResult:
    """Outcome of the pairwise dominance scan over a dictionary.

    incomparable_pairs holds 0-based (l, j) logistic index pairs, l < j,
    where neither function dominates the other.
    """

    totally_ordered: bool
    incomparable_pairs: tuple

    def __post_init__(self):
        if self.totally_ordered != (len(self.incomparable_pairs) == 0):
            raise ValueError("totally_ordered must match incomparable_pairs")


def _check_point(y, m: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim < 1 or y.shape[-1] != m:
        raise ValueError(f"expected points with last dimension {m}, got shape {y.shape}")
    return y


def eval_conjunctive(y, f: ConjLogistic):
    """Product of scalar logistics at y; strictly inside (0, 1).

    y may be a single length-m vector or any (..., m) batch.
    """
    y = _check_point(y, f.m)
    lam = stable_sigmoid(f.alpha * (y - f.mu))
    out = np.prod(lam, axis=-1)
    return float(out) if out.ndim == 0 else out


def conj_values(y, d: SillDictionary):
    """All conjunctive logistic values at y, shape (..., N_L)."""
    y = _check_point(y, d.m)
    out = np.empty(y.shape[:-1] + (d.n_logistic,))
    for k, f in enumerate(d.logistics):
        out[..., k] = eval_conjunctive(y, f)
    return out


def lift(y, d: SillDictionary):
    """Lift y to dictionary coordinates [1, y, logistic values].

    Component 0 is exactly 1, components 1..m copy y, the rest are the
    conjunctive logistics in dictionary order.  Shape (..., m) -> (..., N).
    """
    y = _check_point(y, d.m)
    out = np.empty(y.shape[:-1] + (d.size,))
    out[..., 0] = 1.0
    out[..., 1 : 1 + d.m] = y
    out[..., 1 + d.m :] = conj_values(y, d)
    return out


def grad_conjunctive(y, f: ConjLogistic):
    """Gradient of a conjunctive logistic with respect to y.

    Component i is alpha_i * (1 - lambda_i(y_i)) * Lambda(y); saturates to
    zero far from the centers and is finite everywhere.
    """
    y = _check_point(y, f.m)
    lam = stable_sigmoid(f.alpha * (y - f.mu))
    full = np.prod(lam, axis=-1, keepdims=True)
    return f.alpha * (1.0 - lam) * full


def lift_jacobian(y, d: SillDictionary):
    """Jacobian of the lift at a single point, shape (N, m).

    Row 0 is zero (the constant), rows 1..m are the identity, and each
    logistic contributes its gradient row.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size != d.m:
        raise ValueError(f"expected a length-{d.m} point, got shape {y.shape}")
    jac = np.zeros((d.size, d.m))
    jac[1 : 1 + d.m, :] = np.eye(d.m)
    for k, f in enumerate(d.logistics):
        jac[1 + d.m + k, :] = grad_conjunctive(y, f)
    return jac


def dominates(f: ConjLogistic, g: ConjLogistic) -> bool:
    """True when g.mu - f.mu lies in the closed positive orthant.

    Ties count as dominating, so the relation is reflexive; a function
    with smaller centers dominates pointwise (its value is the larger
    logistic everywhere for matched steepness).
    """
    if f.m != g.m:
        raise ValueError(f"dimension mismatch: {f.m} vs {g.m}")
    return bool(np.all(g.mu - f.mu >= 0.0))


def check_total_order(d: SillDictionary) -> OrderCheckResult:
    """List every logistic pair where neither function dominates."""
    bad = []
    funcs = d.logistics
    for a in range(len(funcs)):
        for b in range(a + 1, len(funcs)):
            if not dominates(funcs[a], funcs[b]) and not dominates(funcs[b], funcs[a]):
                bad.append((a, b))
    return OrderCheckResult(totally_ordered=not bad, incomparable_pairs=tuple(bad))


def join_params(f: ConjLogistic, g: ConjLogistic) -> ConjLogistic:
    """Componentwise-max join of two conjunctive logistics.

    Each center is the larger of the two, paired with the steepness of
    whichever function supplied it.  On a center tie the larger steepness
    wins.
    """
    if f.m != g.m:
        raise ValueError(f"dimension mismatch: {f.m} vs {g.m}")
    mu = np.maximum(f.mu, g.mu)
    alpha = np.where(
        g.mu > f.mu,
        g.alpha,
        np.where(f.mu > g.mu, f.alpha, np.maximum(f.alpha, g.alpha)),
    )
    return ConjLogistic(mu, alpha)


def join_completion(d: SillDictionary) -> SillDictionary:
    """Close the logistic set under pairwise join.

    Original functions keep their indices; newly created joins are
    appended, deduplicated by exact (mu, alpha) equality.  The closure of
    a finite set under componentwise max is finite (every join draws its
    coordinates from the original center grid), so this terminates.
    """
    funcs = list(d.logistics)
    seen = set(funcs)
    grew = True
    while grew:
        grew = False
        n = len(funcs)
        for a in range(n):
            for b in range(a + 1, n):
                j = join_params(funcs[a], funcs[b])
                if j not in seen:
                    funcs.append(j)
                    seen.add(j)
                    grew = True
    return SillDictionary(d.m, tuple(funcs))


def save_dictionary(d: SillDictionary, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(d.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_dictionary(path) -> SillDictionary:
    with open(path, "r", encoding="utf-8") as fh:
        return SillDictionary.from_dict(json.load(fh))

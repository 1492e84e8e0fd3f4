"""Koopman generator / operator regression over lifted snapshots.

Fits the N x N matrix K that best maps lifted measurements psi(y) to their
targets: d(psi)/dt in continuous time (assembled from measured derivatives
through the dictionary Jacobian) or psi(y+) in discrete time.  The solver
is ridge-regularized least squares; with ridge = 0 it returns the
minimum-norm solution, so rank-deficient lift Gram matrices are handled
without failure.

Models are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dictionary import SillDictionary, lift, stable_sigmoid

__all__ = [
    "SnapshotSet",
    "KoopmanModel",
    "Trajectory",
    "ResidualReport",
    "lift_derivatives",
    "solve_koopman_ls",
    "fit_generator",
    "fit_edmd",
    "project_state",
    "predict_ct",
    "residual",
    "save_snapshots",
    "load_snapshots",
    "save_model",
    "load_model",
]

CT = "CT"
DT = "DT"


@dataclass(frozen=True)
class SnapshotSet:
    """r paired samples: measurements Y and companions D.

    In CT mode D holds measured time derivatives dy/dt; in DT mode it
    holds the successor measurements y+ and dt records the sampling
    interval.  dt is present exactly when mode is DT.
    """

    Y: np.ndarray
    D: np.ndarray
    mode: str
    dt: float | None = None

    def __post_init__(self):
        Y = np.asarray(self.Y, dtype=float)
        D = np.asarray(self.D, dtype=float)
        if Y.ndim != 2 or D.ndim != 2:
            # a flat vector is ambiguous between one point and an m=1 batch
            raise ValueError("Y and D must be 2-D, one snapshot per row")
        if Y.shape != D.shape:
            raise ValueError(f"Y has shape {Y.shape}, D has shape {D.shape}")
        if Y.shape[0] < 1:
            raise ValueError("snapshot set is empty")
        if not (np.isfinite(Y).all() and np.isfinite(D).all()):
            raise ValueError("snapshot data contains non-finite values")
        if self.mode not in (CT, DT):
            raise ValueError(f"mode must be 'CT' or 'DT', got {self.mode!r}")
        if self.mode == DT:
            if self.dt is None or not self.dt > 0:
                raise ValueError("DT snapshots require a positive dt")
        elif self.dt is not None:
            raise ValueError("dt is only meaningful for DT snapshots")
        Y.setflags(write=False)
        D.setflags(write=False)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "D", D)

    @property
    def r(self) -> int:
        return self.Y.shape[0]

    @property
    def m(self) -> int:
        return self.Y.shape[1]


@dataclass(frozen=True)
class KoopmanModel:
    """A fitted N x N matrix K bound to its dictionary and mode."""

    K: np.ndarray
    dictionary: SillDictionary
    mode: str
    ridge: float = 0.0

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        n = self.dictionary.size
        if K.shape != (n, n):
            raise ValueError(f"K must be {n}x{n}, got {K.shape}")
        if not np.isfinite(K).all():
            raise ValueError("K contains non-finite entries")
        if self.mode not in (CT, DT):
            raise ValueError(f"mode must be 'CT' or 'DT', got {self.mode!r}")
        if not self.ridge >= 0:
            raise ValueError("ridge must be non-negative")
        K.setflags(write=False)
        object.__setattr__(self, "K", K)


@dataclass(frozen=True)
class Trajectory:
    """Integrated measurement trajectory with a divergence flag.

    y has one row per accepted step (row 0 is the initial condition);
    diverged marks a truncation caused by a non-finite state.
    """

    y: np.ndarray
    diverged: bool = False


@dataclass(frozen=True)
class ResidualReport:
    """Residual matrix plus its summary statistics.

    matrix is r x N, one residual row per snapshot; per_function_max holds
    the max absolute residual for each dictionary coordinate.
    """

    matrix: np.ndarray
    max_row_norm: float
    mean_row_norm: float
    per_function_max: np.ndarray


def lift_derivatives(s: SnapshotSet, d: SillDictionary):
    """Time derivative of the lift at each snapshot, shape (r, N).

    Row i is the dictionary Jacobian at y_i applied to the measured
    derivative: column 0 is identically zero, columns 1..m copy D, and
    each logistic column is grad . dy/dt.
    """
    if s.mode != CT:
        raise ValueError("lifted derivatives require CT snapshots")
    if s.m != d.m:
        raise ValueError(f"snapshots have m={s.m}, dictionary has m={d.m}")
    out = np.empty((s.r, d.size))
    out[:, 0] = 0.0
    out[:, 1 : 1 + d.m] = s.D
    for k, f in enumerate(d.logistics):
        lam = stable_sigmoid(f.alpha * (s.Y - f.mu))
        full = np.prod(lam, axis=1)
        out[:, 1 + d.m + k] = full * np.sum(f.alpha * (1.0 - lam) * s.D, axis=1)
    return out


def solve_koopman_ls(G, A, ridge: float):
    """Minimize ||A - K G||_F^2 + ridge ||K||_F^2 over K.

    G and A are N x r with one lifted sample per column.  With ridge > 0
    the normal equations K (G G^T + ridge I) = A G^T are solved directly;
    at ridge = 0 the minimum-norm least-squares solution is returned, so
    rank deficiency (r < N or collinear lifts) is well defined.
    """
    G = np.asarray(G, dtype=float)
    A = np.asarray(A, dtype=float)
    if G.ndim != 2 or A.shape != G.shape:
        raise ValueError(f"G and A must share shape, got {G.shape} and {A.shape}")
    if not (np.isfinite(G).all() and np.isfinite(A).all()):
        raise ValueError("non-finite data in least-squares system")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    if ridge > 0:
        gram = G @ G.T + ridge * np.eye(G.shape[0])
        return np.linalg.solve(gram, G @ A.T).T
    kt, *_ = np.linalg.lstsq(G.T, A.T, rcond=None)
    return kt.T


def fit_generator(s: SnapshotSet, d: SillDictionary, ridge: float = 0.0) -> KoopmanModel:
    """Fit the CT generator approximation from (y, dy/dt) snapshots."""
    if s.mode != CT:
        raise ValueError("fit_generator requires CT snapshots")
    G = lift(s.Y, d).T
    A = lift_derivatives(s, d).T
    return KoopmanModel(solve_koopman_ls(G, A, ridge), d, CT, ridge)


def fit_edmd(s: SnapshotSet, d: SillDictionary, ridge: float = 0.0) -> KoopmanModel:
    """Fit the DT operator approximation from (y, y+) snapshots."""
    if s.mode != DT:
        raise ValueError("fit_edmd requires DT snapshots")
    if s.m != d.m:
        raise ValueError(f"snapshots have m={s.m}, dictionary has m={d.m}")
    G = lift(s.Y, d).T
    A = lift(s.D, d).T
    return KoopmanModel(solve_koopman_ls(G, A, ridge), d, DT, ridge)


def project_state(z, d: SillDictionary):
    """Measurement block of a lifted vector: components 1..m."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != d.size:
        raise ValueError(f"expected lifted vectors of length {d.size}, got {z.shape}")
    return z[..., 1 : 1 + d.m]


def predict_ct(model: KoopmanModel, y0, horizon: float, dt: float) -> Trajectory:
    """Integrate dz/dt = K z from z0 = lift(y0) and project each step.

    Classical fourth-order Runge-Kutta at fixed step dt (global error
    O(dt^4)); the state stays in the lifted space for the whole horizon.
    A non-finite state stops the integration and flags the trajectory.
    """
    if model.mode != CT:
        raise ValueError("predict_ct requires a CT model")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    y0 = np.asarray(y0, dtype=float)
    steps = int(round(horizon / dt))
    K = model.K
    z = lift(y0, model.dictionary)
    rows = [y0.copy()]
    diverged = False
    # overflow on an unstable spectrum is reported via the flag, not a warning
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            k1 = K @ z
            k2 = K @ (z + 0.5 * dt * k1)
            k3 = K @ (z + 0.5 * dt * k2)
            k4 = K @ (z + dt * k3)
            z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.isfinite(z).all():
                diverged = True
                break
            rows.append(project_state(z, model.dictionary))
    return Trajectory(np.vstack(rows), diverged)


def residual(model: KoopmanModel, s: SnapshotSet) -> ResidualReport:
    """Closure residual eps(y) = target - K psi(y) at every snapshot.

    CT targets are the lifted derivatives; DT targets are the lifted
    successors.  The report summarizes row 2-norms and the per-coordinate
    max absolute residual.
    """
    if model.mode != s.mode:
        raise ValueError(f"model mode {model.mode} does not match snapshots {s.mode}")
    d = model.dictionary
    if s.m != d.m:
        raise ValueError(f"snapshots have m={s.m}, dictionary has m={d.m}")
    if s.mode == CT:
        target = lift_derivatives(s, d)
    else:
        target = lift(s.D, d)
    R = target - lift(s.Y, d) @ model.K.T
    norms = np.linalg.norm(R, axis=1)
    return ResidualReport(
        matrix=R,
        max_row_norm=float(norms.max()),
        mean_row_norm=float(norms.mean()),
        per_function_max=np.abs(R).max(axis=0),
    )


# ---------------------------------------------------------------------------
# file formats: snapshot CSV + sidecar manifest, model JSON


def _format(v: float) -> str:
    # 17 significant digits round-trip any float64 exactly
    return format(float(v), ".17g")


def save_snapshots(s: SnapshotSet, csv_path, manifest_path) -> None:
    """Write `y1..ym,d1..dm` rows plus the {"mode", "dt"} sidecar."""
    m = s.m
    header = ",".join([f"y{i + 1}" for i in range(m)] + [f"d{i + 1}" for i in range(m)])
    lines = [header]
    for yi, di in zip(s.Y, s.D):
        lines.append(",".join(_format(v) for v in np.concatenate([yi, di])))
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump({"mode": s.mode, "dt": s.dt}, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_snapshots(csv_path, manifest_path) -> SnapshotSet:
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if "mode" not in manifest:
        raise ValueError(f"{manifest_path}: missing 'mode'")
    with open(csv_path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{csv_path}: line 1: empty snapshot file")
    cols = lines[0].split(",")
    if len(cols) % 2 != 0:
        raise ValueError(f"{csv_path}: line 1: header needs y1..ym,d1..dm columns")
    m = len(cols) // 2
    expected = [f"y{i + 1}" for i in range(m)] + [f"d{i + 1}" for i in range(m)]
    if cols != expected:
        raise ValueError(f"{csv_path}: line 1: header {cols} != {expected}")
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 2 * m:
            raise ValueError(
                f"{csv_path}: line {lineno}: expected {2 * m} fields, got {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ValueError(f"{csv_path}: line {lineno}: {exc}") from exc
    data = np.asarray(rows, dtype=float)
    return SnapshotSet(data[:, :m], data[:, m:], manifest["mode"], manifest.get("dt"))


def save_model(model: KoopmanModel, path) -> None:
    obj = {
        "mode": model.mode,
        "ridge": model.ridge,
        "dictionary": model.dictionary.to_dict(),
        "K": model.K.ravel().tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_model(path) -> KoopmanModel:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    d = SillDictionary.from_dict(obj["dictionary"])
    K = np.asarray(obj["K"], dtype=float).reshape(d.size, d.size)
    return KoopmanModel(K, d, obj["mode"], obj["ridge"])

"""Datasets, activations, losses and gradients.

Covers both objectives of the study: the single-neuron square loss
0.5 * sum_i (sigma(x_i.w) - y_i)^2 and the single-hidden-neuron loss
0.5 * sum_i (v * sigma(x_i.w) - y_i)^2, with the sigma'(0) = 1 convention
for the ReLU kink.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

KINK_TOL = 1e-9


@dataclass(frozen=True)
class Activation:
    """Scalar nonlinearity with one-sided derivative at the origin.

    The negative-side slope encodes the family: 0 for relu, a in (0,1) for
    leaky relu, 1 for identity.  derivative_at_zero is pinned to 1, the
    convention under which the closed-form trajectories are derived.
    """

    kind: str
    slope: float
    derivative_at_zero: float = 1.0

    @staticmethod
    def relu() -> "Activation":
        return Activation("relu", 0.0)

    @staticmethod
    def leaky(slope: float = 0.5) -> "Activation":
        if not 0.0 < slope < 1.0:
            raise ValueError(f"leaky slope must lie in (0,1), got {slope}")
        return Activation("leaky", slope)

    @staticmethod
    def identity() -> "Activation":
        return Activation("identity", 1.0)

    @property
    def invertible(self) -> bool:
        return self.slope > 0.0

    def value(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(z >= 0.0, z, self.slope * z)

    def derivative(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(
            z > 0.0, 1.0, np.where(z < 0.0, self.slope, self.derivative_at_zero)
        )

    def inverse(self, z):
        if not self.invertible:
            raise ValueError(f"{self.kind} activation is not invertible")
        z = np.asarray(z, dtype=float)
        return np.where(z >= 0.0, z, z / self.slope)

    @staticmethod
    def parse(spec: str) -> "Activation":
        """Parse 'relu', 'identity' or 'leaky:<slope>' (CLI syntax)."""
        if spec == "relu":
            return Activation.relu()
        if spec == "identity":
            return Activation.identity()
        if spec.startswith("leaky"):
            _, _, rest = spec.partition(":")
            return Activation.leaky(float(rest) if rest else 0.5)
        raise ValueError(f"unknown activation spec {spec!r}")


@dataclass(frozen=True)
class Dataset:
    """Data matrix X (rows are examples) and target vector y."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(np.atleast_2d(np.asarray(self.X, dtype=float)))
        y = np.ascontiguousarray(np.asarray(self.y, dtype=float).ravel())
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got X shape {x.shape}")
        if y.shape[0] != x.shape[0]:
            raise ValueError(f"y has {y.shape[0]} entries for {x.shape[0]} rows of X")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("dataset entries must be finite")
        object.__setattr__(self, "X", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def to_json(self) -> str:
        return json.dumps({"X": self.X.tolist(), "y": self.y.tolist()})

    @staticmethod
    def from_json(text: str) -> "Dataset":
        obj = json.loads(text)
        return Dataset(np.array(obj["X"]), np.array(obj["y"]))


def x_gamma(gamma: float) -> np.ndarray:
    """The 3x3 family of data matrices parameterized by gamma >= 0."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    return np.array([[3.0, -1.0, 0.0], [4.0, 2.0, 0.0], [0.0, gamma, gamma]])


def y_alpha(alpha: float) -> np.ndarray:
    """Target vector alpha * (16, 18, 0)."""
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    return alpha * np.array([16.0, 18.0, 0.0])


def benchmark_dataset(gamma: float, alpha: float = 1.0) -> Dataset:
    return Dataset(x_gamma(gamma), y_alpha(alpha))


def regime_pattern(ds: Dataset, w: np.ndarray, tol: float = KINK_TOL) -> str:
    """Sign pattern of X w as a string over {+, 0, -}."""
    s = ds.X @ np.asarray(w, dtype=float)
    return "".join("0" if abs(v) <= tol else ("+" if v > 0 else "-") for v in s)


def loss(ds: Dataset, act: Activation, w: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    if w.shape != (ds.d,):
        raise ValueError(f"weight shape {w.shape} does not match d={ds.d}")
    r = act.value(ds.X @ w) - ds.y
    return 0.5 * float(r @ r)


def grad(ds: Dataset, act: Activation, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (ds.d,):
        raise ValueError(f"weight shape {w.shape} does not match d={ds.d}")
    s = ds.X @ w
    r = act.value(s) - ds.y
    return ds.X.T @ (r * act.derivative(s))


@dataclass(frozen=True)
class HiddenParams:
    """Parameters theta = (w, v) of x -> v * relu(<x, w>)."""

    w: np.ndarray
    v: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).ravel()
        if not (np.all(np.isfinite(w)) and np.isfinite(self.v)):
            raise ValueError("hidden parameters must be finite")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "v", float(self.v))

    @property
    def u(self) -> np.ndarray:
        """Product vector v * w, the natural coordinate on balanced states."""
        return self.v * self.w


_RELU = Activation.relu()


def hidden_loss(ds: Dataset, theta: HiddenParams) -> float:
    if theta.w.shape != (ds.d,):
        raise ValueError(f"weight shape {theta.w.shape} does not match d={ds.d}")
    p = theta.v * _RELU.value(ds.X @ theta.w) - ds.y
    return 0.5 * float(p @ p)


def hidden_grad(ds: Dataset, theta: HiddenParams) -> tuple[np.ndarray, float]:
    """Gradient of hidden_loss: (d/dw, d/dv)."""
    if theta.w.shape != (ds.d,):
        raise ValueError(f"weight shape {theta.w.shape} does not match d={ds.d}")
    s = ds.X @ theta.w
    a = _RELU.value(s)
    p = theta.v * a - ds.y
    gw = theta.v * (ds.X.T @ (p * _RELU.derivative(s)))
    gv = float(p @ a)
    return gw, gv

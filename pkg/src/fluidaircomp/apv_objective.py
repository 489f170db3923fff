"""Antenna-position objective: value, analytic derivatives, and the feasible set.

With w_k = alpha_k * conj(b_k) * m, the position-dependent part of the MSE is

    g(x) = sum_k [ P_k(x) - C_k(x) ],
    P_k(x) = |w_k^H a(x, theta_k)|^2
           = sum_{n,l} |w_kn||w_kl| cos(q_k(x_n, x_l)),
    C_k(x) = 2 Re(w_k^H a(x, theta_k))
           = 2 sum_n |w_kn| cos(phi_k x_n - ang_kn),

where q_k(x_n, x_l) = phi_k (x_n - x_l) - (ang_kn - ang_kl) and
phi_k = 2*pi*cos(theta_k). The full residual sum relates to g through
sum_k |w_k^H a - 1|^2 = g(x) + K.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .model import TWO_PI, Scenario


@dataclass(frozen=True)
class EffectiveWeights:
    """Polar form of the per-user weight vectors w_k, plus spatial frequencies.

    magnitudes[k, n] = |w_kn|, phases[k, n] = angle(w_kn), and
    spatial_freqs[k] = 2*pi*cos(theta_k) in wavelength-normalized units.
    """

    magnitudes: np.ndarray
    phases: np.ndarray
    spatial_freqs: np.ndarray

    @property
    def n_users(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.magnitudes.shape[1]


def effective_weights(b: np.ndarray, m: np.ndarray, scenario: Scenario) -> EffectiveWeights:
    """Build w_k = alpha_k * conj(b_k) * m for every user.

    Rebuild after every change of b or m; nothing here caches on mutation.
    """
    w = scenario.alphas[:, None] * np.conj(b)[:, None] * np.asarray(m)[None, :]
    return EffectiveWeights(
        magnitudes=np.abs(w),
        phases=np.angle(w),
        spatial_freqs=TWO_PI * np.cos(scenario.thetas),
    )


@dataclass(frozen=True)
class LinearConstraints:
    """Affine inequalities f_i(x) = matrix[i] @ x + offsets[i] <= 0."""

    matrix: np.ndarray
    offsets: np.ndarray

    @property
    def n_constraints(self) -> int:
        return self.offsets.shape[0]

    @property
    def jacobian(self) -> np.ndarray:
        return self.matrix

    def values(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float) + self.offsets


def position_constraints(n_antennas: int, aperture: float, min_spacing: float) -> LinearConstraints:
    """The N+1 feasibility constraints: -x_1 <= 0, x_N - L <= 0, and the
    spacing rows x_{n-1} - x_n + L0 <= 0 for n = 2..N."""
    n = n_antennas
    mat = np.zeros((n + 1, n))
    off = np.zeros(n + 1)
    mat[0, 0] = -1.0
    mat[1, n - 1] = 1.0
    off[1] = -aperture
    for i in range(2, n + 1):
        mat[i, i - 2] = 1.0
        mat[i, i - 1] = -1.0
        off[i] = min_spacing
    return LinearConstraints(matrix=mat, offsets=off)


@dataclass(frozen=True)
class ApvObjective:
    """Immutable evaluation oracle for g(x) and its derivatives.

    Accepts arbitrary real position vectors, feasible or not; solvers need
    values outside the feasible set while backtracking.
    """

    weights: EffectiveWeights
    aperture: float
    min_spacing: float

    @cached_property
    def constraints(self) -> LinearConstraints:
        return position_constraints(self.weights.n_antennas, self.aperture, self.min_spacing)

    def _phase_args(self, x: np.ndarray) -> np.ndarray:
        # s[k, n] = phi_k * x_n - ang_kn
        return self.weights.spatial_freqs[:, None] * x[None, :] - self.weights.phases

    def power_term(self, k: int, x: np.ndarray) -> float:
        """P_k(x): the double cosine sum equal to |w_k^H a(x, theta_k)|^2."""
        x = np.asarray(x, dtype=float)
        w = self.weights.magnitudes[k]
        s = self.weights.spatial_freqs[k] * x - self.weights.phases[k]
        q = s[:, None] - s[None, :]
        return float(np.sum(np.outer(w, w) * np.cos(q)))

    def cross_term(self, k: int, x: np.ndarray) -> float:
        """C_k(x): the single cosine sum equal to 2*Re(w_k^H a(x, theta_k))."""
        x = np.asarray(x, dtype=float)
        w = self.weights.magnitudes[k]
        s = self.weights.spatial_freqs[k] * x - self.weights.phases[k]
        return float(2.0 * np.sum(w * np.cos(s)))

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        w = self.weights.magnitudes
        s = self._phase_args(x)
        q = s[:, :, None] - s[:, None, :]
        pair = w[:, :, None] * w[:, None, :]
        power = np.einsum("knl,knl->", pair, np.cos(q))
        cross = 2.0 * np.sum(w * np.cos(s))
        return float(power - cross)

    def value_batch(self, points: np.ndarray) -> np.ndarray:
        """g evaluated on each row of points, via the complex inner-product form.

        Same math as value(); used where many evaluations are needed at once.
        """
        points = np.asarray(points, dtype=float)
        w = self.weights.magnitudes
        s = (self.weights.spatial_freqs[:, None, None] * points[None, :, :]
             - self.weights.phases[:, None, :])
        inner = np.sum(w[:, None, :] * np.exp(1j * s), axis=2)  # w_k^H a per row
        return np.sum(np.abs(inner) ** 2 - 2.0 * inner.real, axis=0)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Analytic gradient of g; entry p is
        sum_k -2 phi_k |w_kp| [ sum_l |w_kl| sin(q_k(x_p, x_l)) - sin(s_kp) ]."""
        x = np.asarray(x, dtype=float)
        w = self.weights.magnitudes
        phi = self.weights.spatial_freqs
        s = self._phase_args(x)
        q = s[:, :, None] - s[:, None, :]
        inner = np.einsum("kl,knl->kn", w, np.sin(q))
        grad_power = -2.0 * phi[:, None] * w * inner
        grad_cross = -2.0 * phi[:, None] * w * np.sin(s)
        return np.sum(grad_power - grad_cross, axis=0)

    def hessian(self, x: np.ndarray) -> np.ndarray:
        """Analytic Hessian of g (symmetric N x N)."""
        x = np.asarray(x, dtype=float)
        n = self.weights.n_antennas
        w = self.weights.magnitudes
        phi2 = self.weights.spatial_freqs[:, None] ** 2
        s = self._phase_args(x)
        q = s[:, :, None] - s[:, None, :]
        pair = w[:, :, None] * w[:, None, :]
        cosq = pair * np.cos(q)
        hess = np.sum(2.0 * phi2[:, :, None] * cosq, axis=0)
        # diagonal of the power term: -2 phi^2 |w_p| sum_{l != p} |w_l| cos(q_pl);
        # the cross term only contributes -2 phi^2 |w_p| cos(s_p) on the diagonal
        rows = np.sum(cosq, axis=2) - w**2
        diag = np.sum(-2.0 * phi2 * rows + 2.0 * phi2 * w * np.cos(s), axis=0)
        idx = np.arange(n)
        hess[idx, idx] = diag
        return hess

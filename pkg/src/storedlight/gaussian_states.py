"""Quadrature statistics of released squeezed-coherent inputs.

Each input channel j carries a displaced squeezed state defined as the
eigenstate, with eigenvalue alpha_j, of the Bogoliubov-transformed operator

    A_j = cosh(r_j) X_j + sinh(r_j) X_j^dag,

so that for positive r_j the input q quadrature is squeezed to exp(-2 r_j)/2
and p is stretched accordingly.  Both stored packets are taken identical here
(unit overlap), which makes every released observable a function of the
transfer-matrix row of the observed channel.

Two independent computation routes are provided: closed-form first and second
moments obtained through the eigenvalue property, and a Gaussian oracle that
propagates the 4x4 quadrature covariance matrix through the symplectic image
of the transfer matrix.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, ParameterDomainError
from .mode_transform import TransferMatrix

# Slack on the Heisenberg bound var_q * var_p >= 1/4 before declaring a bug.
HEISENBERG_SLACK = 1e-12

# Symplectic eigenvalues of a pure Gaussian state must equal 1/2 to this
# tolerance after transport through the transfer matrix.
PURITY_TOL = 1e-10

VACUUM_VARIANCE = 0.5


@dataclass(frozen=True)
class SqueezedInput:
    """Displacements and (real) squeezing parameters of the two input channels."""

    alpha1: complex
    alpha2: complex
    r1: float
    r2: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2"):
            value = complex(getattr(self, name))
            if not cmath.isfinite(value):
                raise ParameterDomainError(f"displacement {name} must be finite")
            object.__setattr__(self, name, value)
        for name in ("r1", "r2"):
            value = getattr(self, name)
            if isinstance(value, complex):
                raise ParameterDomainError(
                    f"squeezing parameter {name} must be real; rotated squeezing axes are "
                    "available only through the covariance helpers"
                )
            value = float(value)
            if not math.isfinite(value):
                raise ParameterDomainError(f"squeezing parameter {name} must be finite")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class QuadratureStats:
    """First and second moments of the q and p quadratures of one channel."""

    mean_q: float
    mean_p: float
    var_q: float
    var_p: float

    def __post_init__(self):
        for name in ("mean_q", "mean_p", "var_q", "var_p"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InternalConsistencyError(f"quadrature moment {name} is not finite")
            object.__setattr__(self, name, value)
        if self.var_q <= 0 or self.var_p <= 0:
            raise InternalConsistencyError(
                f"quadrature variances must be positive, got {self.var_q!r}, {self.var_p!r}"
            )
        if self.var_q * self.var_p < 0.25 - HEISENBERG_SLACK:
            raise InternalConsistencyError(
                f"uncertainty product {self.var_q * self.var_p:.15f} violates the Heisenberg bound"
            )


def _released_weights(row: tuple[complex, complex], r1: float, r2: float,
                      quadrature: str) -> tuple[complex, complex]:
    """Coefficients u_j of A_j in the observed released quadrature."""
    factor = 1.0 if quadrature == "q" else -1j
    c1, c2 = factor * row[0], factor * row[1]
    u1 = c1 * math.cosh(r1) - c1.conjugate() * math.sinh(r1)
    u2 = c2 * math.cosh(r2) - c2.conjugate() * math.sinh(r2)
    return u1, u2


def _moments(u1: complex, u2: complex, a1: complex, a2: complex) -> tuple[float, float]:
    """Mean and second moment of (u1 A1 + u2 A2 + h.c.)/sqrt(2) on the
    product of A_j eigenstates with eigenvalues a_j."""
    mean = math.sqrt(2.0) * (u1 * a1 + u2 * a2).real
    second = 0.5 * (abs(u1) ** 2 * (1.0 + 2.0 * abs(a1) ** 2)
                    + abs(u2) ** 2 * (1.0 + 2.0 * abs(a2) ** 2))
    second += (u1 * u1 * a1 * a1 + u2 * u2 * a2 * a2
               + 2.0 * u1 * u2 * a1 * a2
               + 2.0 * u1 * u2.conjugate() * a1 * a2.conjugate()).real
    return mean, second


def released_quadratures(inputs: SqueezedInput, transfer: TransferMatrix,
                         channel: int = 1) -> QuadratureStats:
    """Closed-form quadrature moments of one released channel.

    The variance comes out as second moment minus squared mean; the
    displacement dependence cancels there exactly, which the tests use as a
    numerical guard.
    """
    row = transfer.row(channel)
    uq1, uq2 = _released_weights(row, inputs.r1, inputs.r2, "q")
    up1, up2 = _released_weights(row, inputs.r1, inputs.r2, "p")
    mean_q, second_q = _moments(uq1, uq2, inputs.alpha1, inputs.alpha2)
    mean_p, second_p = _moments(up1, up2, inputs.alpha1, inputs.alpha2)
    return QuadratureStats(
        mean_q=mean_q,
        mean_p=mean_p,
        var_q=second_q - mean_q ** 2,
        var_p=second_p - mean_p ** 2,
    )


def uncertainty_product(stats: QuadratureStats) -> float:
    """var_q times var_p; 1/4 exactly for an unmixed minimal state."""
    return stats.var_q * stats.var_p


# ----------------------------------------------------------------------
# covariance-matrix oracle

def squeezed_covariance_block(zeta: complex) -> np.ndarray:
    """2x2 quadrature covariance of a squeezed state, squeezing parameter
    zeta = r e^{i theta}; theta/2 rotates the squeezed axis away from q."""
    zeta = complex(zeta)
    r, theta = abs(zeta), cmath.phase(zeta)
    core = np.diag([math.exp(-2.0 * r), math.exp(2.0 * r)]) * VACUUM_VARIANCE
    half = 0.5 * theta
    rot = np.array([[math.cos(half), -math.sin(half)], [math.sin(half), math.cos(half)]])
    return rot @ core @ rot.T


def displaced_mean(alpha: complex, zeta: complex) -> np.ndarray:
    """Quadrature mean vector (q, p) of the displaced squeezed state."""
    zeta = complex(zeta)
    r, theta = abs(zeta), cmath.phase(zeta)
    a_mean = math.cosh(r) * alpha - cmath.exp(1j * theta) * math.sinh(r) * alpha.conjugate()
    return np.array([math.sqrt(2.0) * a_mean.real, math.sqrt(2.0) * a_mean.imag])


def transfer_symplectic(transfer: TransferMatrix) -> np.ndarray:
    """4x4 real symplectic matrix acting on (q1, p1, q2, p2) the way the
    transfer matrix acts on the mode operators."""
    out = np.zeros((4, 4))
    s = transfer.matrix
    for j in range(2):
        for k in range(2):
            re, im = s[j, k].real, s[j, k].imag
            out[2 * j:2 * j + 2, 2 * k:2 * k + 2] = [[re, -im], [im, re]]
    return out


def symplectic_eigenvalues(covariance: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a 2n x 2n covariance matrix, ascending."""
    n = covariance.shape[0] // 2
    j_block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    omega = np.kron(np.eye(n), j_block)
    values = np.abs(np.linalg.eigvals(1j * omega @ covariance))
    return np.sort(values)[::2]


def gaussian_oracle(inputs: SqueezedInput, transfer: TransferMatrix,
                    channel: int = 1) -> QuadratureStats:
    """Quadrature moments via covariance-matrix transport, independent of the
    closed forms.  The symplectic spectrum is checked to remain at the pure
    value 1/2 before the channel block is read off."""
    mean = np.concatenate([
        displaced_mean(inputs.alpha1, inputs.r1),
        displaced_mean(inputs.alpha2, inputs.r2),
    ])
    cov = np.zeros((4, 4))
    cov[0:2, 0:2] = squeezed_covariance_block(inputs.r1)
    cov[2:4, 2:4] = squeezed_covariance_block(inputs.r2)
    sym = transfer_symplectic(transfer)
    mean_out = sym @ mean
    cov_out = sym @ cov @ sym.T
    spectrum = symplectic_eigenvalues(cov_out)
    if np.max(np.abs(spectrum - VACUUM_VARIANCE)) > PURITY_TOL:
        raise InternalConsistencyError(
            f"transported state lost purity: symplectic spectrum {spectrum}"
        )
    offset = 2 * (channel - 1)
    if channel not in (1, 2):
        raise ParameterDomainError(f"channel must be 1 or 2, got {channel!r}")
    return QuadratureStats(
        mean_q=float(mean_out[offset]),
        mean_p=float(mean_out[offset + 1]),
        var_q=float(cov_out[offset, offset]),
        var_p=float(cov_out[offset + 1, offset + 1]),
    )

"""Brute-force reference calculations in a truncated four-mode Fock space.

The two stored wave packets span a two-dimensional single-photon subspace.
Choosing an orthonormal (Schmidt) pair e1, e2 with

    f1 = e1,          f2 = s e1 + sqrt(1 - |s|^2) e2,

where s is the packet overlap, every packet operator becomes a fixed linear
combination of four independent bosonic modes: two channels times two Schmidt
components.  On a number-truncated basis all operators are finite matrices,
so distributions and moments can be computed with no interference algebra at
all and serve as an independent check of the closed forms.

Everything that conserves total photon number is exact on the sectors whose
total does not exceed the per-mode cutoff; results are only requested there.
"""

from __future__ import annotations

import itertools
import math
from typing import Optional

import numpy as np
import scipy.sparse as sparse

from .errors import CapacityError, InternalConsistencyError, ParameterDomainError
from .fock_interference import ReleaseDistribution
from .mode_transform import GramMatrix, TransferMatrix

DEFAULT_CUTOFF = 8
MAX_DIMENSION = 2_000_000

# Matrix representations must be Hermitian to this tolerance.
HERMITICITY_TOL = 1e-12

# Constructed states must come out normalized to this tolerance.
STATE_NORM_TOL = 1e-10

# Eigenvalues of a photon-number operator on a closed sector must sit on
# integers; anything farther off than this is a construction failure.
EIGENVALUE_ROUND_TOL = 1e-6

# Above this overlap magnitude the general number-operator combination is
# singular and the exact unit-overlap reduction is used instead.
_UNIT_OVERLAP_SWITCH = 1e-12


class OccupationBasis:
    """Occupation-number basis for a few bosonic modes with a per-mode cutoff
    and an optional cap on the total photon number."""

    def __init__(self, num_modes: int, cutoff: int, total_cutoff: Optional[int] = None,
                 max_dimension: int = MAX_DIMENSION):
        if num_modes < 1 or cutoff < 0:
            raise ParameterDomainError("need num_modes >= 1 and cutoff >= 0")
        bound = (cutoff + 1) ** num_modes
        if bound > max_dimension and total_cutoff is None:
            raise CapacityError(
                f"basis would hold {bound} states, above the budget of {max_dimension}",
                required=bound,
            )
        self.num_modes = num_modes
        self.cutoff = cutoff
        self.total_cutoff = total_cutoff
        occupations = itertools.product(range(cutoff + 1), repeat=num_modes)
        if total_cutoff is not None:
            occupations = (occ for occ in occupations if sum(occ) <= total_cutoff)
        self.states = np.array(list(occupations), dtype=np.int64)
        if self.states.shape[0] > max_dimension:
            raise CapacityError(
                f"basis holds {self.states.shape[0]} states, above the budget of {max_dimension}",
                required=self.states.shape[0],
            )
        self.dim = self.states.shape[0]
        # mixed-radix code of each state, for O(1) neighbor lookup
        self._strides = (cutoff + 1) ** np.arange(num_modes, dtype=np.int64)
        codes = self.states @ self._strides
        self._row_of_code = np.full(bound, -1, dtype=np.int64)
        self._row_of_code[codes] = np.arange(self.dim)
        self._codes = codes
        self._totals = self.states.sum(axis=1)
        self._ann_cache: dict[int, sparse.csr_matrix] = {}

    def index_of(self, occupation) -> int:
        occupation = tuple(int(x) for x in occupation)
        code = int(np.dot(occupation, self._strides))
        row = int(self._row_of_code[code]) if 0 <= code < self._row_of_code.size else -1
        if row < 0 or tuple(self.states[row]) != occupation:
            raise ParameterDomainError(f"occupation {occupation} is not in the basis")
        return row

    @property
    def vacuum_index(self) -> int:
        return self.index_of((0,) * self.num_modes)

    def annihilation_matrix(self, mode: int) -> sparse.csr_matrix:
        """Sparse matrix of the annihilation operator of one mode."""
        if not 0 <= mode < self.num_modes:
            raise ParameterDomainError(f"mode index {mode} out of range")
        cached = self._ann_cache.get(mode)
        if cached is not None:
            return cached
        occ = self.states[:, mode]
        src = np.nonzero(occ > 0)[0]
        # removing a photon lowers the total, so the image state always exists
        dst = self._row_of_code[self._codes[src] - self._strides[mode]]
        data = np.sqrt(occ[src].astype(float))
        mat = sparse.csr_matrix((data, (dst, src)), shape=(self.dim, self.dim), dtype=complex)
        self._ann_cache[mode] = mat
        return mat

    def creation_matrix(self, mode: int) -> sparse.csr_matrix:
        return self.annihilation_matrix(mode).conj().T.tocsr()

    def sector_indices(self, total: int) -> np.ndarray:
        """Rows of all basis states with the given total photon number."""
        return np.nonzero(self._totals == total)[0]


class ModeBasis:
    """Four-mode Schmidt basis for two channels sharing two packet modes.

    Mode order is (channel 1, Schmidt 1), (channel 1, Schmidt 2),
    (channel 2, Schmidt 1), (channel 2, Schmidt 2).  The overlap s fixes the
    packet operators: packet 1 of channel j is the first Schmidt mode, packet
    2 is conj(s) a_{j,1} + sqrt(1 - |s|^2) a_{j,2}.
    """

    def __init__(self, overlap, cutoff: int = DEFAULT_CUTOFF,
                 max_dimension: int = MAX_DIMENSION):
        if not isinstance(overlap, GramMatrix):
            overlap = GramMatrix(complex(overlap))
        self.s = overlap.s_overlap
        self.t = math.sqrt(max(0.0, 1.0 - abs(self.s) ** 2))
        self.cutoff = int(cutoff)
        self.basis = OccupationBasis(4, self.cutoff, max_dimension=max_dimension)

    def _mode(self, channel: int, schmidt: int) -> int:
        if channel not in (1, 2) or schmidt not in (1, 2):
            raise ParameterDomainError(
                f"channel and Schmidt index must each be 1 or 2, got {channel}, {schmidt}"
            )
        return 2 * (channel - 1) + (schmidt - 1)

    def storage_packet_op(self, channel: int, packet: int) -> sparse.csr_matrix:
        """Annihilation operator of the given stored packet mode."""
        if packet == 1:
            return self.basis.annihilation_matrix(self._mode(channel, 1))
        if packet == 2:
            a1 = self.basis.annihilation_matrix(self._mode(channel, 1))
            a2 = self.basis.annihilation_matrix(self._mode(channel, 2))
            return (self.s.conjugate() * a1 + self.t * a2).tocsr()
        raise ParameterDomainError(f"packet must be 1 or 2, got {packet!r}")

    def release_packet_op(self, transfer: TransferMatrix, channel: int, packet: int) -> sparse.csr_matrix:
        """Annihilation operator of a released packet mode: the channel index
        is rotated by the transfer matrix, the packet structure is untouched."""
        row1, row2 = transfer.row(channel)
        return (row1 * self.storage_packet_op(1, packet)
                + row2 * self.storage_packet_op(2, packet)).tocsr()


class TruncatedState:
    """State vector over an OccupationBasis, kept normalized.

    ``total`` records the total photon number when the state lives in a single
    sector, which the oracle exploits for exact restricted eigenproblems.
    """

    def __init__(self, amplitudes, basis: OccupationBasis, total: Optional[int] = None):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (basis.dim,):
            raise ParameterDomainError(
                f"amplitude vector has shape {amplitudes.shape}, expected ({basis.dim},)"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise InternalConsistencyError(
                f"state norm is {norm:.12f}, expected 1 within {STATE_NORM_TOL:.1e}; "
                "amplitude has leaked past the cutoff"
            )
        self.amplitudes = amplitudes
        self.basis = basis
        self.total = total

    def expectation(self, operator: sparse.spmatrix) -> complex:
        return complex(np.vdot(self.amplitudes, operator @ self.amplitudes))


def build_fock_input(n: int, m: int, mode_basis: ModeBasis) -> TruncatedState:
    """Stored input state: n photons in packet 1 of channel 1, m photons in
    packet 2 of channel 2, carved out of the truncated four-mode space."""
    if n < 0 or m < 0:
        raise ParameterDomainError(f"photon numbers must be >= 0, got n={n}, m={m}")
    needed = max(n, m)
    if needed > mode_basis.cutoff:
        raise CapacityError(
            f"photon numbers n={n}, m={m} need a per-mode cutoff of at least {needed}, "
            f"basis has {mode_basis.cutoff}",
            required=needed,
        )
    basis = mode_basis.basis
    vec = np.zeros(basis.dim, dtype=complex)
    vec[basis.vacuum_index] = 1.0
    create2 = mode_basis.storage_packet_op(2, 2).conj().T.tocsr()
    for _ in range(m):
        vec = create2 @ vec
    create1 = basis.creation_matrix(0)
    for _ in range(n):
        vec = create1 @ vec
    vec /= math.sqrt(math.factorial(n) * math.factorial(m))
    return TruncatedState(vec, basis, total=n + m)


def released_number_operator(transfer: TransferMatrix, mode_basis: ModeBasis,
                             channel: int = 1) -> sparse.csr_matrix:
    """Photon-number operator of one released output channel.

    For partial overlap the packet modes are not orthogonal and the counting
    operator is the Gram-weighted combination of the two released packet
    operators divided by 1 - |s|^2; at unit overlap the two packets are one
    mode and the operator reduces to a plain number operator.  Conditioning
    degrades as |s| approaches 1, where the reduction takes over.
    """
    s = mode_basis.s
    x1 = mode_basis.release_packet_op(transfer, channel, 1)
    if abs(abs(s) - 1.0) <= _UNIT_OVERLAP_SWITCH:
        n_op = (x1.conj().T @ x1).tocsr()
    else:
        x2 = mode_basis.release_packet_op(transfer, channel, 2)
        combo = (
            x1.conj().T @ x1
            - s * (x1.conj().T @ x2)
            - s.conjugate() * (x2.conj().T @ x1)
            + x2.conj().T @ x2
        )
        n_op = (combo / (1.0 - abs(s) ** 2)).tocsr()
    defect = abs(n_op - n_op.conj().T)
    if defect.nnz and defect.max() > HERMITICITY_TOL:
        raise InternalConsistencyError(
            f"number operator is not Hermitian: deviation {defect.max():.3e}"
        )
    return n_op


def _require_closed_sector(state: TruncatedState) -> int:
    if state.total is None:
        raise ParameterDomainError(
            "state carries no total photon number; build it with build_fock_input"
        )
    if state.total > state.basis.cutoff:
        raise CapacityError(
            f"total photon number {state.total} exceeds the cutoff {state.basis.cutoff}; "
            "the sector is not closed under the number operator",
            required=state.total,
        )
    return state.total


def oracle_distribution(state: TruncatedState, number_op: sparse.spmatrix) -> ReleaseDistribution:
    """Full count distribution by spectral projection of the number operator.

    The operator conserves total photon number, so only the state's sector is
    eigendecomposed.  With the sector total at or below the cutoff the block
    is exact and every eigenvalue must round cleanly to an integer.
    """
    total = _require_closed_sector(state)
    rows = state.basis.sector_indices(total)
    block = number_op.tocsr()[rows][:, rows].toarray()
    values, vectors = np.linalg.eigh(block)
    rounded = np.rint(values)
    worst = float(np.max(np.abs(values - rounded))) if values.size else 0.0
    if worst > EIGENVALUE_ROUND_TOL:
        raise InternalConsistencyError(
            f"number-operator eigenvalue off an integer by {worst:.3e}; "
            "the truncated representation is inconsistent"
        )
    counts = rounded.astype(int)
    if counts.size and (counts.min() < 0 or counts.max() > total):
        raise InternalConsistencyError(
            f"eigenvalues span {counts.min()}..{counts.max()}, outside 0..{total}"
        )
    weights = np.abs(vectors.conj().T @ state.amplitudes[rows]) ** 2
    probs = np.zeros(total + 1)
    np.add.at(probs, counts, weights)
    return ReleaseDistribution(probs)


def oracle_moments(state: TruncatedState, number_op: sparse.spmatrix) -> tuple[float, float]:
    """Mean and variance of the released count, straight from matrix algebra."""
    _require_closed_sector(state)
    image = number_op @ state.amplitudes
    mean = float(np.real(np.vdot(state.amplitudes, image)))
    second = float(np.real(np.vdot(image, image)))
    return mean, second - mean * mean

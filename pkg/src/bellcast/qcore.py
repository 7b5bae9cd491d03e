"""Exact complex state-vector engine for small multi-qubit systems.

Conventions used throughout the package:

* Qubit 0 is the leftmost tensor factor.  Basis index ``i`` therefore holds
  qubit ``k`` in state ``(i >> (n - 1 - k)) & 1`` for an ``n``-qubit register,
  and ``|up> == (1, 0)`` maps to bit value 0.
* Amplitudes are plain ``complex128`` values; no wrapper type is used.
* Global phase is physically meaningless.  Comparisons that must ignore it go
  through :func:`fidelity` or :func:`phase_canonical`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Tolerance for exact algebraic identities (unitarity, completeness, ...).
ATOL_ALGEBRA = 1e-12
# Tolerance for eigen-decompositions and positive-semidefiniteness floors.
ATOL_EIGEN = 1e-10
# Validation tolerance for projector sets handed to measure_projective.
ATOL_PROJECTOR = 1e-10
# Probabilities below this are treated as exactly zero when sampling.
MIN_PROBABILITY = 1e-15
# States fed to measurement / fidelity must be normalized this tightly.
_NORM_ATOL = 1e-9


def _require_power_of_two(value: int, what: str) -> int:
    if value < 2 or value & (value - 1):
        raise ValueError(f"{what} must be a power of two >= 2, got {value}")
    return value.bit_length() - 1


def _as_complex_array(data, what: str) -> np.ndarray:
    arr = np.array(data, dtype=np.complex128)
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{what} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable complex amplitude vector over ``2**n_qubits`` basis states.

    The constructor accepts any array-like of complex amplitudes.  Norm is
    not enforced here: operations such as projector application legitimately
    produce sub-normalized intermediates.  Use :meth:`normalized` before
    handing a state to measurement or fidelity routines.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_complex_array(self.amplitudes, "state vector")
        if arr.ndim != 1:
            raise ValueError("state vector must be one-dimensional")
        _require_power_of_two(arr.shape[0], "state vector length")
        object.__setattr__(self, "amplitudes", arr)

    @classmethod
    def _trusted(cls, amplitudes: np.ndarray) -> "StateVector":
        """Wrap a freshly computed complex128 array without validation.

        Internal fast path for hot loops: the caller owns ``amplitudes``
        (no other references) and guarantees it is 1-D, complex128, of
        power-of-two length, and finite.
        """
        obj = object.__new__(cls)
        amplitudes.setflags(write=False)
        object.__setattr__(obj, "amplitudes", amplitudes)
        return obj

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        # sqrt(<s|s>); vdot is markedly cheaper than np.linalg.norm here
        return math.sqrt(max(np.vdot(self.amplitudes, self.amplitudes).real, 0.0))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n < 1e-12:
            raise ValueError("cannot normalize a (near-)zero state vector")
        return StateVector._trusted(self.amplitudes / n)

    def tensor_view(self) -> np.ndarray:
        """Read-only view reshaped to one axis per qubit."""
        return self.amplitudes.reshape((2,) * self.n_qubits)


@dataclass(frozen=True, eq=False)
class Operator:
    """Immutable square matrix acting on a register of qubits.

    ``hermitian_hint`` is verified at construction when set, so downstream
    code may rely on it.
    """

    matrix: np.ndarray
    hermitian_hint: bool = False

    def __post_init__(self) -> None:
        mat = _as_complex_array(self.matrix, "operator matrix")
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("operator matrix must be square")
        _require_power_of_two(mat.shape[0], "operator dimension")
        if self.hermitian_hint:
            dev = np.max(np.abs(mat - mat.conj().T))
            if dev > ATOL_ALGEBRA:
                raise ValueError(
                    f"operator marked hermitian deviates from M == M^dagger by {dev:.3e}"
                )
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix.

    All three properties are validated at construction; a violation means a
    bug upstream, so it raises rather than warns.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = _as_complex_array(self.matrix, "density matrix")
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density matrix must be square")
        _require_power_of_two(mat.shape[0], "density matrix dimension")
        herm_dev = np.max(np.abs(mat - mat.conj().T))
        if herm_dev > ATOL_EIGEN:
            raise ValueError(f"density matrix not hermitian (deviation {herm_dev:.3e})")
        trace_dev = abs(np.trace(mat) - 1.0)
        if trace_dev > ATOL_ALGEBRA:
            raise ValueError(f"density matrix trace deviates from 1 by {trace_dev:.3e}")
        min_eig = float(np.min(np.linalg.eigvalsh(mat)))
        if min_eig < -ATOL_EIGEN:
            raise ValueError(f"density matrix has negative eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class MeasurementResult:
    """Outcome of a projective measurement: index, Born probability, post state."""

    outcome_index: int
    probability: float
    post_state: StateVector


def basis_state(n_qubits: int, index: int) -> StateVector:
    """Computational basis ket ``|index>`` on ``n_qubits`` qubits."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    dim = 1 << n_qubits
    if not 0 <= index < dim:
        raise IndexError(f"basis index {index} out of range for {n_qubits} qubit(s)")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def ket(bits: str) -> StateVector:
    """Build a product state from a string of '0'/'1' characters.

    '0' is ``|up>`` and '1' is ``|down>`` in the spin picture.
    """
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"ket label must be a nonempty string of 0/1, got {bits!r}")
    return basis_state(len(bits), int(bits, 2))


UP = basis_state(1, 0)
DOWN = basis_state(1, 1)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product with ``a`` as the leftmost (qubit-0-first) factor."""
    # outer + ravel is kron for vectors, at a fraction of the call overhead
    return StateVector._trusted(
        np.multiply.outer(a.amplitudes, b.amplitudes).ravel()
    )


def _check_targets(targets, n_qubits: int, op_qubits: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(targets) != op_qubits:
        raise ValueError(
            f"operator acts on {op_qubits} qubit(s) but {len(targets)} target(s) given"
        )
    if len(set(targets)) != len(targets):
        raise ValueError(f"target qubits must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < n_qubits:
            raise IndexError(f"target qubit {t} out of range for {n_qubits}-qubit state")
    return targets


def _is_ascending_run(targets: tuple[int, ...]) -> bool:
    return all(b == a + 1 for a, b in zip(targets, targets[1:]))


def apply(op: Operator, s: StateVector, targets) -> StateVector:
    """Apply ``op`` to the given target qubits of ``s``.

    Non-target qubits are acted on by the identity.  The norm is preserved
    exactly when ``op`` is unitary; projectors shrink it.
    """
    n = s.n_qubits
    k = op.n_qubits
    targets = _check_targets(targets, n, k)
    if _is_ascending_run(targets):
        # Contiguous targets reduce to one matmul on a reshaped view,
        # which is much cheaper than tensordot at these sizes.
        pre = 1 << targets[0]
        post = 1 << (n - targets[-1] - 1)
        view = s.amplitudes.reshape(pre, op.dim, post)
        if pre == 1:
            out = (op.matrix @ view.reshape(op.dim, post)).ravel()
        else:
            moved = view.transpose(1, 0, 2).reshape(op.dim, pre * post)
            out = (
                (op.matrix @ moved)
                .reshape(op.dim, pre, post)
                .transpose(1, 0, 2)
                .ravel()
            )
        return StateVector._trusted(out)
    psi = s.tensor_view()
    op_tensor = op.matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op_tensor, psi, axes=(tuple(range(k, 2 * k)), targets))
    # tensordot leaves the contracted target axes first; put them back.
    out = np.moveaxis(out, tuple(range(k)), targets)
    return StateVector(out.reshape(-1))


def contract_with(s: StateVector, qubits, factor: StateVector) -> StateVector:
    """Contract ``<factor|`` against the given qubits of ``s``.

    Returns the (generally unnormalized) state of the remaining qubits; its
    squared norm is the Born probability of finding ``factor`` there.
    """
    n = s.n_qubits
    qubits = _check_targets(qubits, n, factor.n_qubits)
    if len(qubits) >= n:
        raise ValueError("contraction must leave at least one qubit")
    if _is_ascending_run(qubits):
        pre = 1 << qubits[0]
        post = 1 << (n - qubits[-1] - 1)
        view = s.amplitudes.reshape(pre, factor.dim, post)
        bra = factor.amplitudes.conj()
        if pre == 1:
            out = bra @ view.reshape(factor.dim, post)
        else:
            # Result comes out in (pre, post) C-order, matching the
            # remaining-qubit order of the tensordot fallback.
            out = bra @ view.transpose(1, 0, 2).reshape(factor.dim, pre * post)
        return StateVector._trusted(out)
    psi = s.tensor_view()
    bra = factor.tensor_view().conj()
    out = np.tensordot(bra, psi, axes=(tuple(range(factor.n_qubits)), qubits))
    return StateVector(out.reshape(-1))


def _require_normalized(s: StateVector, what: str) -> None:
    if abs(s.norm - 1.0) > _NORM_ATOL:
        raise ValueError(f"{what} must be normalized (norm {s.norm:.12g})")


def measure_projective(
    s: StateVector, projectors, rng_sample: float, validate: bool = True
) -> MeasurementResult:
    """Projective measurement of ``s`` against a complete projector set.

    ``rng_sample`` is a uniform draw from [0, 1).  The outcome is selected by
    cumulative probability; a draw landing exactly on a boundary resolves to
    the higher-indexed outcome.  The returned post state is renormalized.

    ``validate=False`` skips the hermitian/idempotent/completeness audit of
    the projector set; pass it only for sets already verified at
    construction time (they are cached, so the audit would repeat per call).
    """
    if not 0.0 <= rng_sample < 1.0:
        raise ValueError(f"rng_sample must lie in [0, 1), got {rng_sample}")
    _require_normalized(s, "measured state")
    projectors = list(projectors)
    if not projectors:
        raise ValueError("projector set is empty")
    dim = s.dim
    if validate:
        total = np.zeros((dim, dim), dtype=np.complex128)
        for i, proj in enumerate(projectors):
            mat = proj.matrix
            if mat.shape[0] != dim:
                raise ValueError(
                    f"projector {i} has dimension {mat.shape[0]}, state has {dim}"
                )
            if np.max(np.abs(mat - mat.conj().T)) > ATOL_PROJECTOR:
                raise ValueError(f"projector {i} is not hermitian")
            if np.max(np.abs(mat @ mat - mat)) > ATOL_PROJECTOR:
                raise ValueError(f"projector {i} is not idempotent")
            total += mat
        if np.max(np.abs(total - np.eye(dim))) > ATOL_PROJECTOR:
            raise ValueError("projector set incomplete: sum differs from identity")

    amps = s.amplitudes
    projected = [proj.matrix @ amps for proj in projectors]
    probs = np.array([max(float(np.vdot(amps, p).real), 0.0) for p in projected])
    if float(np.max(probs)) < MIN_PROBABILITY:
        raise ValueError("all outcome probabilities are degenerate (below 1e-15)")

    cumulative = np.cumsum(probs)
    chosen = -1
    for i, edge in enumerate(cumulative):
        if rng_sample < edge:
            chosen = i
            break
    if chosen < 0:
        # Numerical slack: the cumulative sum can fall a hair short of 1.
        chosen = int(np.max(np.nonzero(probs > MIN_PROBABILITY)))
    post = StateVector._trusted(projected[chosen] / np.sqrt(probs[chosen]))
    return MeasurementResult(chosen, float(probs[chosen]), post)


def partial_trace(s: StateVector, keep_qubits) -> DensityMatrix:
    """Reduced density matrix of ``keep_qubits``, tracing out the rest."""
    n = s.n_qubits
    keep = tuple(int(q) for q in keep_qubits)
    if not keep:
        raise ValueError("keep_qubits must be nonempty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"keep_qubits must be distinct, got {keep}")
    for q in keep:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n}-qubit state")
    _require_normalized(s, "traced state")
    traced = tuple(q for q in range(n) if q not in keep)
    psi = s.tensor_view()
    reordered = np.transpose(psi, keep + traced)
    mat = reordered.reshape(1 << len(keep), 1 << len(traced))
    return DensityMatrix(mat @ mat.conj().T)


def fidelity(s: StateVector, t: StateVector) -> float:
    """Squared overlap ``|<s|t>|**2``; insensitive to global phase.

    Clamped to 1.0 from above so rounding noise never produces an
    out-of-range probability.
    """
    if s.dim != t.dim:
        raise ValueError(f"dimension mismatch: {s.dim} vs {t.dim}")
    _require_normalized(s, "first state")
    _require_normalized(t, "second state")
    return min(float(abs(np.vdot(s.amplitudes, t.amplitudes)) ** 2), 1.0)


def embed_operator(op: Operator, n_qubits: int, targets) -> Operator:
    """Expand ``op`` to the full ``n_qubits`` register (identity elsewhere)."""
    dim = 1 << n_qubits
    cols = [apply(op, basis_state(n_qubits, j), targets).amplitudes for j in range(dim)]
    return Operator(np.column_stack(cols), hermitian_hint=op.hermitian_hint)


def phase_canonical(s: StateVector, tol: float = 1e-12) -> StateVector:
    """Rotate global phase so the first non-negligible amplitude is real positive."""
    for amp in s.amplitudes:
        mag = abs(amp)
        if mag > tol:
            return StateVector(s.amplitudes * (amp.conjugate() / mag))
    raise ValueError("state has no amplitude above tolerance")


def unitarity_deviation(op: Operator) -> float:
    """Max-abs deviation of ``U^dagger U`` from the identity."""
    u = op.matrix
    return float(np.max(np.abs(u.conj().T @ u - np.eye(op.dim))))

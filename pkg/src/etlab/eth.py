"""Error-transparent Hamiltonian (ETH) construction and verification.

Given a code-space Hamiltonian H0 and a set of correctable errors E_i, the
ETH is H = H0 + sum_i E_i H0 E_i^dag.  On every single-error sector it then
acts exactly as H0 acts on the code space, so evolution and a single error
commute.  The dagger ordering keeps the construction correct even for
non-self-inverse conjugators; for Pauli errors it coincides with the plain
sandwich E_i H0 E_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .codes import ErrorSet, StabilizerCode, _as_errors, error_spaces_orthogonal
from .qcore import (
    PauliString,
    basis_state,
    pauli_decompose,
    spanning_logical_states,
    to_dense,
    weight,
)

__all__ = [
    "LogicalHamiltonian",
    "EthReport",
    "Css7Report",
    "encode_logical",
    "deduplicate_errors",
    "make_eth",
    "verify_et",
    "bodyness",
    "swap_hamiltonian",
    "extend_to_target",
    "controlled_eth",
    "conjugation_sign",
    "css7_counterexample",
    "eth_report",
]

_SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |e><g| with g=|0>, e=|1>
_SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)


@dataclass(frozen=True)
class LogicalHamiltonian:
    """2x2 Hermitian logical generator: diag entries a, b and coupling c."""

    a: float
    b: float
    c: complex = 0j


@dataclass(frozen=True)
class EthReport:
    hamiltonian: np.ndarray
    max_residual: float
    bodyness: int
    term_count: int


@dataclass(frozen=True)
class Css7Report:
    conjugated_sign: int
    naive_sum_is_zero: bool


def encode_logical(code: StabilizerCode, lh: LogicalHamiltonian) -> np.ndarray:
    """Lift a 2x2 logical generator onto the code space (zero elsewhere)."""
    k0 = code.codeword0[:, None]
    k1 = code.codeword1[:, None]
    b0 = k0.conj().T
    b1 = k1.conj().T
    c = complex(lh.c)
    return lh.a * (k0 @ b0) + lh.b * (k1 @ b1) + c * (k1 @ b0) + np.conj(c) * (k0 @ b1)


def deduplicate_errors(
    code: StabilizerCode, errors: "ErrorSet | Iterable[PauliString]"
) -> tuple[list[PauliString], int]:
    """Drop errors whose action on both codewords repeats an earlier one.

    Two errors count as duplicates when E|0_L> and F|0_L>, and E|1_L> and
    F|1_L>, agree up to one shared global phase -- the degenerate-code case
    where distinct physical errors implement the same logical mapping.
    Returns (representatives, number dropped).
    """
    reps: list[PauliString] = []
    images: list[tuple[np.ndarray, np.ndarray]] = []
    dropped = 0
    for e in _as_errors(errors):
        m = to_dense(e)
        v0 = m @ code.codeword0
        v1 = m @ code.codeword1
        duplicate = False
        for w0, w1 in images:
            ph = np.vdot(w0, v0)
            if abs(abs(ph) - 1.0) < 1e-9 and (
                np.allclose(v0, ph * w0, atol=1e-9) and np.allclose(v1, ph * w1, atol=1e-9)
            ):
                duplicate = True
                break
        if duplicate:
            dropped += 1
        else:
            reps.append(e)
            images.append((v0, v1))
    return reps, dropped


_CODE_OVERLAP_TOL = 1e-8


def make_eth(
    code: StabilizerCode,
    h0: np.ndarray,
    errors: "ErrorSet | Iterable[PauliString]",
) -> np.ndarray:
    """H = H0 + sum_i E_i H0 E_i^dag over the deduplicated error set.

    Requires the (deduplicated) error spaces to be mutually orthogonal and
    orthogonal to the code space, and H0 to be supported on the code space.
    """
    h0 = np.asarray(h0, dtype=complex)
    p0 = code.projector()
    if np.max(np.abs(p0 @ h0 @ p0 - h0)) > 1e-10:
        raise ValueError("H0 must be supported on the code space")
    reps, _ = deduplicate_errors(code, errors)
    overlap = error_spaces_orthogonal(code, reps)
    if overlap > _CODE_OVERLAP_TOL:
        raise ValueError(
            f"error spaces are not orthogonal (max overlap {overlap:.3e}); "
            "no exact ETH exists for this error set"
        )
    h = h0.copy()
    for e in reps:
        m = to_dense(e)
        h += m @ h0 @ m.conj().T
    return h


def _spanning_states(code: StabilizerCode, h0_dim: int) -> list[np.ndarray]:
    states = spanning_logical_states(code.codeword0, code.codeword1)
    if h0_dim == code.dim:
        return states
    if h0_dim != 2 * code.dim:
        raise ValueError(
            f"H0 dimension {h0_dim} matches neither the code ({code.dim}) "
            f"nor code-plus-target ({2 * code.dim})"
        )
    g = basis_state(1, 0)
    e = basis_state(1, 1)
    s = 1 / np.sqrt(2)
    target_states = [g, e, s * (g + e), s * (g + 1j * e)]
    return [np.kron(psi, t) for psi in states for t in target_states]


def verify_et(
    h: np.ndarray,
    h0: np.ndarray,
    code: StabilizerCode,
    errors: "ErrorSet | Iterable[PauliString]",
) -> float:
    """Worst-case transparency residual max ||H E psi - E H0 psi||.

    psi runs over six states spanning the code space (both codewords plus
    the four equatorial superpositions, which catch relative-phase errors
    the codewords alone would miss).  When H0 lives on code-plus-target,
    the spanning set is tensored with four target states.
    """
    h = np.asarray(h, dtype=complex)
    h0 = np.asarray(h0, dtype=complex)
    states = _spanning_states(code, h0.shape[0])
    worst = 0.0
    for e in _as_errors(errors):
        m = to_dense(e)
        for psi in states:
            resid = h @ (m @ psi) - m @ (h0 @ psi)
            worst = max(worst, float(np.linalg.norm(resid)))
    return worst


def bodyness(h: np.ndarray, tol: float = 1e-10) -> int:
    """Maximum Pauli weight among terms with |coefficient| above tol."""
    terms = pauli_decompose(np.asarray(h, dtype=complex))
    return max((weight(p) for c, p in terms if abs(c) > tol), default=0)


def swap_hamiltonian(code: StabilizerCode, omega: float) -> np.ndarray:
    """Coupling omega (L- sigma+ + L+ sigma-) on the code (x) target space.

    Exchanges the logical excitation with the target two-level system:
    |1_L>|g> <-> |0_L>|e| at Rabi rate omega, completing a full swap at
    t = pi / (2 omega).
    """
    l_minus = np.outer(code.codeword0, code.codeword1.conj())
    term = np.kron(l_minus, _SIGMA_PLUS)
    return omega * (term + term.conj().T)


def extend_to_target(errors: "ErrorSet | Iterable[PauliString]") -> list[PauliString]:
    """Append an identity target letter to each controller error (E -> E (x) I)."""
    return [PauliString(e.letters + "I", e.phase) for e in _as_errors(errors)]


def controlled_eth(
    code: StabilizerCode,
    errors: "ErrorSet | Iterable[PauliString]",
    omega: float,
) -> np.ndarray:
    """ETH for a logical controller driving a target qubit.

    Builds the swap coupling on the joint space and adds one conjugated copy
    per controller error (acting as identity on the target), yielding an
    (n+1)-body interaction that keeps driving the target through any single
    controller error.
    """
    h0 = swap_hamiltonian(code, omega)
    joint = _JointCode(code)
    return make_eth(joint, h0, extend_to_target(errors))


class _JointCode:
    """Adapter presenting code (x) target as a 4-dimensional 'code space'.

    Only the pieces make_eth needs: a projector and the codeword pair used
    by deduplication / orthogonality checks.  The codeword attributes carry
    the target ground state; the projector spans both target levels.
    """

    def __init__(self, code: StabilizerCode):
        self._code = code
        self.n = code.n + 1
        self.dim = 2 * code.dim
        g = basis_state(1, 0)
        e = basis_state(1, 1)
        self.codeword0 = np.kron(code.codeword0, g)
        self.codeword1 = np.kron(code.codeword1, g)
        self._extra = (
            np.kron(code.codeword0, e),
            np.kron(code.codeword1, e),
        )

    def projector(self) -> np.ndarray:
        p = np.zeros((self.dim, self.dim), dtype=complex)
        for v in (self.codeword0, self.codeword1) + self._extra:
            p += np.outer(v, v.conj())
        return p


def conjugation_sign(conjugator: PauliString, operator: PauliString) -> int:
    """+1 or -1 according to whether C P C^dag equals +P or -P (dense check)."""
    c = to_dense(conjugator)
    p = to_dense(operator)
    conj = c @ p @ c.conj().T
    if np.allclose(conj, p, atol=1e-12):
        return 1
    if np.allclose(conj, -p, atol=1e-12):
        return -1
    raise ValueError(f"{conjugator!r} conjugates {operator!r} to neither +/- itself")


def css7_counterexample() -> Css7Report:
    """Why no 3-body ETH exists on the 7-qubit CSS code.

    Its weight-3 logical X on the last three qubits picks up a sign under
    conjugation by a Z error inside its support, so the conjugated term
    cancels the bare term and the naive two-term sum collapses to zero.
    """
    xbar = PauliString("IIIIXXX")
    zerr = PauliString("IIIIZII")
    sign = conjugation_sign(zerr, xbar)
    z = to_dense(zerr)
    x = to_dense(xbar)
    total = x + z @ x @ z.conj().T
    return Css7Report(
        conjugated_sign=sign,
        naive_sum_is_zero=bool(np.max(np.abs(total)) < 1e-12),
    )


def eth_report(
    code: StabilizerCode,
    lh: LogicalHamiltonian,
    errors: "ErrorSet | Iterable[PauliString]",
) -> EthReport:
    """Build the ETH for a logical generator and summarize it."""
    h0 = encode_logical(code, lh)
    reps, _ = deduplicate_errors(code, errors)
    h = make_eth(code, h0, reps)
    return EthReport(
        hamiltonian=h,
        max_residual=verify_et(h, h0, code, reps),
        bodyness=bodyness(h),
        term_count=1 + len(reps),
    )

"""Stabilizer codes: built-in definitions, syndromes, error-space geometry,
and the ideal recovery channel.

Built-ins cover one logical qubit each:

* ``bitflip3`` -- |0_L> = |000>, |1_L> = |111>; corrects bit flips only.
* ``perfect5`` -- the [[5,1,3]] code, generators XZZXI and its cyclic shifts.
* ``steane7``  -- the [[7,1,3]] CSS code.  The qubit ordering is the standard
  Hamming-parity ordering rotated left by three positions, which makes
  IIIIXXX (and IIIIZZZ) valid weight-3 logical operators on the last three
  qubits.  Any column permutation of the Hamming parity sets yields an
  equivalent code; this one is fixed so tests are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .qcore import (
    PauliString,
    anticommutes,
    basis_state,
    pure_density,
    to_dense,
    weight,
)

__all__ = [
    "StabilizerCode",
    "ErrorSet",
    "build_bitflip3",
    "build_perfect5",
    "build_steane7",
    "build_code",
    "CODE_BUILDERS",
    "codewords_from_stabilizers",
    "error_set",
    "syndrome",
    "error_spaces_orthogonal",
    "recovery_projectors",
    "recover",
    "recover_adjoint",
]


@dataclass(frozen=True, eq=False)
class StabilizerCode:
    """One logical qubit encoded in n physical qubits.

    Arrays are treated as immutable after construction; instances are safe
    to share across workers.
    """

    n: int
    generators: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    codeword0: np.ndarray
    codeword1: np.ndarray
    name: str = ""

    @property
    def dim(self) -> int:
        return 2**self.n

    def projector(self) -> np.ndarray:
        """Projector onto the 2D code space."""
        return pure_density(self.codeword0) + pure_density(self.codeword1)


@dataclass(frozen=True)
class ErrorSet:
    """Deduplicated weight-1 Pauli errors, in qubit-major then X<Y<Z order."""

    errors: tuple[PauliString, ...]
    kinds: tuple[str, ...]

    def __post_init__(self):
        seen = set()
        for e in self.errors:
            if weight(e) != 1:
                raise ValueError(f"error {e!r} does not have weight 1")
            if (e.letters, e.phase) in seen:
                raise ValueError(f"duplicate error {e!r}")
            seen.add((e.letters, e.phase))

    def __len__(self) -> int:
        return len(self.errors)

    def __iter__(self):
        return iter(self.errors)


def _as_errors(errors: "ErrorSet | Iterable[PauliString]") -> tuple[PauliString, ...]:
    if isinstance(errors, ErrorSet):
        return errors.errors
    return tuple(errors)


def _fix_global_phase(psi: np.ndarray) -> np.ndarray:
    """Make the first largest-magnitude amplitude real and positive."""
    k = int(np.argmax(np.abs(psi)))
    ph = psi[k] / abs(psi[k])
    out = psi / ph
    # scrub -0.0 parts so printed amplitudes are tidy
    return out + 0.0


def codewords_from_stabilizers(
    generators: Sequence[PauliString],
    logical_x: PauliString,
    seed_basis_state: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Project a seed basis state onto the +1 eigenspace of all generators.

    codeword0 is the normalized image of the seed under prod_i (I + S_i)/2;
    codeword1 = logical_x applied to codeword0.  Raises if the generators do
    not commute or the projector annihilates the seed.
    """
    gens = tuple(generators)
    for i, g in enumerate(gens):
        for h in gens[i + 1 :]:
            if anticommutes(g, h):
                raise ValueError(f"generators {g!r} and {h!r} do not commute")
    n = gens[0].n
    psi = basis_state(n, seed_basis_state)
    for g in gens:
        psi = (psi + to_dense(g) @ psi) / 2.0
    nrm = np.linalg.norm(psi)
    if nrm < 1e-9:
        raise ValueError(
            f"stabilizer projector annihilates basis state {seed_basis_state}; pick another seed"
        )
    psi0 = _fix_global_phase(psi / nrm)
    psi1 = _fix_global_phase(to_dense(logical_x) @ psi0)
    return psi0, psi1


def _code_from_strings(
    name: str,
    generators: Sequence[str],
    logical_x: str,
    logical_z: str,
    seed: int = 0,
) -> StabilizerCode:
    gens = tuple(PauliString(s) for s in generators)
    lx = PauliString(logical_x)
    lz = PauliString(logical_z)
    n = gens[0].n
    for g in gens:
        if anticommutes(lx, g) or anticommutes(lz, g):
            raise ValueError(f"logical operator clashes with generator {g!r}")
    if not anticommutes(lx, lz):
        raise ValueError("logical X and Z must anticommute")
    cw0, cw1 = codewords_from_stabilizers(gens, lx, seed)
    return StabilizerCode(
        n=n,
        generators=gens,
        logical_x=lx,
        logical_z=lz,
        codeword0=cw0,
        codeword1=cw1,
        name=name,
    )


def build_bitflip3() -> StabilizerCode:
    """3-qubit repetition code: |000> and |111>, protecting against X only."""
    return _code_from_strings("bitflip3", ["ZZI", "IZZ"], "XXX", "ZII")


def build_perfect5() -> StabilizerCode:
    """[[5,1,3]] code with generators XZZXI and its three cyclic shifts."""
    return _code_from_strings(
        "perfect5",
        ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"],
        "XXXXX",
        "ZZZZZ",
    )


def build_steane7() -> StabilizerCode:
    """[[7,1,3]] CSS code ordered so the logical X is IIIIXXX."""
    return _code_from_strings(
        "steane7",
        [
            "XXXXIII",
            "IIXXIXX",
            "IXIXXIX",
            "ZZZZIII",
            "IIZZIZZ",
            "IZIZZIZ",
        ],
        "IIIIXXX",
        "IIIIZZZ",
    )


CODE_BUILDERS = {
    "bitflip3": build_bitflip3,
    "perfect5": build_perfect5,
    "steane7": build_steane7,
}

# the error kinds each built-in code is designed to correct
DESIGNED_KINDS = {"bitflip3": "X", "perfect5": "XYZ", "steane7": "XYZ"}


def build_code(name: str) -> StabilizerCode:
    try:
        return CODE_BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown code {name!r}; choose from {sorted(CODE_BUILDERS)}") from None


def error_set(code: StabilizerCode, kinds: str | Iterable[str]) -> ErrorSet:
    """All weight-1 errors of the given kinds, qubit-major then X < Y < Z."""
    kind_list = sorted(set(kinds), key="XYZ".index)
    if not kind_list:
        raise ValueError("kinds must be nonempty")
    if any(k not in "XYZ" for k in kind_list):
        raise ValueError(f"kinds must be drawn from X, Y, Z, got {kinds!r}")
    errors = []
    for q in range(code.n):
        for k in kind_list:
            letters = "I" * q + k + "I" * (code.n - q - 1)
            errors.append(PauliString(letters))
    return ErrorSet(errors=tuple(errors), kinds=tuple(kind_list))


def syndrome(code: StabilizerCode, e: PauliString) -> tuple[int, ...]:
    """Commutation pattern of an error with the generators (1 = anticommutes)."""
    if e.n != code.n:
        raise ValueError(f"error acts on {e.n} qubits, code has {code.n}")
    return tuple(1 if anticommutes(e, g) else 0 for g in code.generators)


def error_spaces_orthogonal(
    code: StabilizerCode, errors: "ErrorSet | Iterable[PauliString]"
) -> float:
    """Largest overlap magnitude between distinct error spaces.

    The code space itself participates as sector 0, so the result also
    bounds each error space's overlap with the code space.  Zero (to
    rounding) means the recovery channel of :func:`recover` is well posed.
    """
    errs = _as_errors(errors)
    sectors = [np.stack([code.codeword0, code.codeword1])]
    for e in errs:
        m = to_dense(e)
        sectors.append(np.stack([m @ code.codeword0, m @ code.codeword1]))
    worst = 0.0
    for i in range(len(sectors)):
        for j in range(i + 1, len(sectors)):
            overlap = np.abs(sectors[i].conj() @ sectors[j].T)
            worst = max(worst, float(overlap.max()))
    return worst


def recovery_projectors(
    code: StabilizerCode, errors: "ErrorSet | Iterable[PauliString]"
) -> tuple[np.ndarray, list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
    """(code projector, [(E_j dense, error-space projector)], residual projector)."""
    errs = _as_errors(errors)
    p0 = code.projector()
    pairs = []
    total = p0.copy()
    for e in errs:
        m = to_dense(e)
        pj = m @ p0 @ m.conj().T
        pairs.append((m, pj))
        total += pj
    p_rest = np.eye(code.dim, dtype=complex) - total
    return p0, pairs, p_rest


_RECOVER_OVERLAP_TOL = 1e-8


def recover(
    code: StabilizerCode,
    errors: "ErrorSet | Iterable[PauliString]",
    rho: np.ndarray,
) -> np.ndarray:
    """Ideal recovery channel: map each error space back to the code space.

    rho -> sum_j E_j P_j rho P_j E_j^dag + P_0 rho P_0 + P_rest rho P_rest,
    where P_j projects onto error space j.  Components outside the code and
    single-error spaces are left untouched (the channel stays trace
    preserving), so multi-error inputs pass through and may miscorrect.
    """
    overlap = error_spaces_orthogonal(code, errors)
    if overlap > _RECOVER_OVERLAP_TOL:
        raise ValueError(
            f"error spaces overlap (max overlap {overlap:.3e}); recovery is ill-defined"
        )
    p0, pairs, p_rest = recovery_projectors(code, errors)
    out = p0 @ rho @ p0 + p_rest @ rho @ p_rest
    for m, pj in pairs:
        half = pj @ rho @ pj
        out += m @ half @ m.conj().T
    return out


def recover_adjoint(
    code: StabilizerCode,
    errors: "ErrorSet | Iterable[PauliString]",
    observable: np.ndarray,
) -> np.ndarray:
    """Heisenberg picture of :func:`recover`: Tr(R(rho) B) = Tr(rho R*(B)).

    Used to fold ideal recovery into a measured observable, e.g. for
    trajectory simulations that never materialize the recovered state.
    """
    overlap = error_spaces_orthogonal(code, errors)
    if overlap > _RECOVER_OVERLAP_TOL:
        raise ValueError(
            f"error spaces overlap (max overlap {overlap:.3e}); recovery is ill-defined"
        )
    p0, pairs, p_rest = recovery_projectors(code, errors)
    out = p0 @ observable @ p0 + p_rest @ observable @ p_rest
    for m, pj in pairs:
        md = m.conj().T
        out += pj @ (md @ observable @ m) @ pj
    return out

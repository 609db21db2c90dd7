"""Two-mode Gaussian states as first and second moments.

A state is a pair of mean amplitudes plus the 4x4 Hermitian matrix V of
normally-ordered central second moments, with rows and columns ordered
(a_dag, a, b_dag, b):

    V[i, j] = <v_i^dag v_j>,   v = (da, da_dag, db, db_dag).

The bosonic commutators fix V[1,1] = V[0,0] + 1 and V[3,3] = V[2,2] + 1,
and physicality requires V >= 0.  Entanglement is certified by the
positive-partial-transpose test: det V_PT < 0, which is necessary and
sufficient for two-mode Gaussian states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "GaussianState",
    "PtMatrix",
    "tmsv_state",
    "asymmetric_tmsv",
    "thermal_state",
    "displace",
    "partial_transpose",
    "simon_witness_direct",
    "duan_matrix",
    "state_to_dict",
    "state_from_dict",
]

# Tolerance for validating physicality of second-moment matrices: eigenvalue
# floor and Hermiticity/commutator-offset slack.
PSD_FLOOR = 1e-9

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_PT_SANDWICH = np.eye(4, dtype=complex)
_PT_SANDWICH[2:, 2:] = _X
_PT_OFFSET = np.diag([0.0, 0.0, 1.0, -1.0])


def _check_finite_scalar(name: str, z: complex) -> complex:
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean amplitudes <a>, <b> plus the second-moment matrix V.

    V is validated on construction: Hermitian, commutator offsets in place,
    positive semidefinite within the eigenvalue floor.  The stored array is
    read-only; block accessors A (a-a), B (b-b) and C (b-a cross) return
    views in the fixed wire order.
    """

    mean_a: complex
    mean_b: complex
    V: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mean_a", _check_finite_scalar("mean_a", self.mean_a))
        object.__setattr__(self, "mean_b", _check_finite_scalar("mean_b", self.mean_b))

        V = np.array(self.V, dtype=complex)
        if V.shape != (4, 4):
            raise DomainError(f"V must be 4x4, got shape {V.shape}")
        if not np.all(np.isfinite(V.view(float))):
            raise DomainError("V has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(V))))
        if np.max(np.abs(V - V.conj().T)) > PSD_FLOOR * scale:
            raise DomainError("V is not Hermitian")
        for lo in (0, 2):
            gap = V[lo + 1, lo + 1].real - V[lo, lo].real
            if abs(gap - 1.0) > PSD_FLOOR * scale:
                raise DomainError(
                    f"commutator offset violated on mode {'a' if lo == 0 else 'b'}: "
                    f"V[{lo + 1},{lo + 1}] - V[{lo},{lo}] = {gap!r}, expected 1"
                )
        if V[0, 0].real < -PSD_FLOOR or V[2, 2].real < -PSD_FLOOR:
            raise DomainError("negative mean photon number on the diagonal")
        eigmin = float(np.linalg.eigvalsh((V + V.conj().T) / 2.0).min())
        if eigmin < -PSD_FLOOR * scale:
            raise DomainError(f"V is not positive semidefinite (min eigenvalue {eigmin:g})")
        V.flags.writeable = False
        object.__setattr__(self, "V", V)

    @property
    def A(self) -> np.ndarray:
        return self.V[:2, :2]

    @property
    def B(self) -> np.ndarray:
        return self.V[2:, 2:]

    @property
    def C(self) -> np.ndarray:
        """Cross block: rows (b_dag, b), columns (a_dag, a)."""
        return self.V[2:, :2]

    @property
    def photon_a(self) -> float:
        return self.V[0, 0].real

    @property
    def photon_b(self) -> float:
        return self.V[2, 2].real


@dataclass(frozen=True, eq=False)
class PtMatrix:
    """Second-moment matrix after partial transposition of mode b."""

    M: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = np.array(self.M, dtype=complex)
        if M.shape != (4, 4):
            raise DomainError(f"PT matrix must be 4x4, got shape {M.shape}")
        scale = max(1.0, float(np.max(np.abs(M))))
        if np.max(np.abs(M - M.conj().T)) > PSD_FLOOR * scale:
            raise DomainError("PT matrix is not Hermitian")
        M.flags.writeable = False
        object.__setattr__(self, "M", M)

    def det(self) -> float:
        return float(np.linalg.det(self.M).real)


def _assemble(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """V from blocks, with the upper-right block fixed by Hermiticity."""
    return np.block([[A, C.conj().T], [C, B]])


def tmsv_state(xi: float) -> GaussianState:
    """Two-mode squeezed vacuum with squeezing parameter xi >= 0.

    Moments: <a_dag a> = <b_dag b> = sinh^2(xi), <ab> = <a_dag b_dag> =
    sinh(xi)cosh(xi), all other cross moments zero, means zero.
    """
    xi = float(xi)
    if not np.isfinite(xi) or xi < 0:
        raise DomainError(f"squeezing parameter must be finite and >= 0, got {xi!r}")
    s, c = np.sinh(xi), np.cosh(xi)
    n = s * s
    sc = s * c
    A = np.array([[n, 0.0], [0.0, n + 1.0]], dtype=complex)
    C = np.array([[0.0, sc], [sc, 0.0]], dtype=complex)
    return GaussianState(0.0, 0.0, _assemble(A, A.copy(), C))


def asymmetric_tmsv(xi: float, t2: float, alpha: complex = 0.0) -> GaussianState:
    """Two orthogonally squeezed vacua mixed on a beam splitter, then displaced.

    The beam splitter acts as a_out = t a1 + r a2, b_out = -r a1 + t a2 with
    t = sqrt(t2), r = sqrt(1 - t2), on single-mode inputs with
    <a1^2> = -sinh(xi)cosh(xi), <a2^2> = +sinh(xi)cosh(xi) and
    <ai_dag ai> = sinh^2(xi).  t2 = 0.5 reproduces tmsv_state(xi) exactly;
    unbalanced t2 leaves residual single-mode squeezing in each output.  The
    displacement goes on mode a only and does not touch V.
    """
    xi = float(xi)
    t2 = float(t2)
    if not np.isfinite(xi) or xi < 0:
        raise DomainError(f"squeezing parameter must be finite and >= 0, got {xi!r}")
    if not np.isfinite(t2) or not 0.0 <= t2 <= 1.0:
        raise DomainError(f"beam-splitter transmittance t2 must lie in [0,1], got {t2!r}")
    s, c = np.sinh(xi), np.cosh(xi)
    n = s * s
    sc = s * c
    r2 = 1.0 - t2
    tr2 = 2.0 * np.sqrt(t2 * r2)
    A = np.array([[n, (r2 - t2) * sc], [(r2 - t2) * sc, n + 1.0]], dtype=complex)
    B = np.array([[n, (t2 - r2) * sc], [(t2 - r2) * sc, n + 1.0]], dtype=complex)
    C = np.array([[0.0, tr2 * sc], [tr2 * sc, 0.0]], dtype=complex)
    return GaussianState(alpha, 0.0, _assemble(A, B, C))


def thermal_state(n_a: float, n_b: float) -> GaussianState:
    """Product of two thermal modes with mean photon numbers n_a, n_b."""
    n_a, n_b = float(n_a), float(n_b)
    if not (np.isfinite(n_a) and np.isfinite(n_b)) or n_a < 0 or n_b < 0:
        raise DomainError("thermal occupations must be finite and >= 0")
    V = np.diag([n_a, n_a + 1.0, n_b, n_b + 1.0]).astype(complex)
    return GaussianState(0.0, 0.0, V)


def displace(state: GaussianState, alpha: complex, beta: complex) -> GaussianState:
    """Coherent displacement: adds (alpha, beta) to the means, V untouched."""
    alpha = _check_finite_scalar("alpha", alpha)
    beta = _check_finite_scalar("beta", beta)
    return GaussianState(state.mean_a + alpha, state.mean_b + beta, state.V)


def partial_transpose(state: GaussianState) -> PtMatrix:
    """Partial transposition of mode b: (1 + X) sandwich minus the Z offset.

    Equivalently, blockwise: (A, C_dag X; X C, B^T).
    """
    M = _PT_SANDWICH @ state.V @ _PT_SANDWICH - _PT_OFFSET
    return PtMatrix(M)


# Witness magnitudes at or below this are reported as "boundary" rather than
# entangled/separable: sign decisions inside the floor are numerical noise.
SIGN_FLOOR = 1e-12


def verdict(w: float, floor: float = SIGN_FLOOR):
    """True (entangled), False (separable), or "boundary" within the floor."""
    if abs(w) <= floor:
        return "boundary"
    return w < 0.0


class WitnessValue(float):
    """A witness value that also carries its sign decision.

    Behaves as a plain float in arithmetic; ``.entangled`` is True, False,
    or "boundary" per :func:`verdict`.
    """

    __slots__ = ()

    @property
    def entangled(self):
        return verdict(float(self))


def simon_witness_direct(state: GaussianState) -> WitnessValue:
    """det of the partially transposed second-moment matrix.

    Negative values certify entanglement (necessary and sufficient for
    two-mode Gaussian states).  Computed by LAPACK determinant so it serves
    as an independent cross-check of the closed-form witness path.  The
    return value is a float subclass exposing the sign decision as
    ``.entangled``.
    """
    return WitnessValue(partial_transpose(state).det())


def duan_matrix(state: GaussianState) -> np.ndarray:
    """2x2 submatrix [[<da_dag da>, <da_dag db_dag>], [<da db>, <db_dag db>]].

    Its determinant being negative is a sufficient entanglement condition
    (a PT-transformed Duan-type test).
    """
    V = state.V
    return np.array([[V[0, 0], V[0, 3]], [V[1, 2], V[2, 2]]], dtype=complex)


def state_to_dict(state: GaussianState) -> dict:
    """JSON-ready dict: means and V entries as [re, im] pairs."""
    return {
        "mean_a": [state.mean_a.real, state.mean_a.imag],
        "mean_b": [state.mean_b.real, state.mean_b.imag],
        "V": [[[z.real, z.imag] for z in row] for row in state.V],
    }


def _complex_from_pair(name: str, pair) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise DomainError(f"{name} must be a [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def state_from_dict(d: dict) -> GaussianState:
    """Inverse of state_to_dict, with full validation."""
    try:
        mean_a = _complex_from_pair("mean_a", d["mean_a"])
        mean_b = _complex_from_pair("mean_b", d["mean_b"])
        rows = d["V"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"state dict missing field: {exc}") from exc
    if not (isinstance(rows, list) and len(rows) == 4):
        raise DomainError("V must be a 4x4 array of [re, im] pairs")
    V = np.empty((4, 4), dtype=complex)
    for i, row in enumerate(rows):
        if not (isinstance(row, list) and len(row) == 4):
            raise DomainError("V must be a 4x4 array of [re, im] pairs")
        for j, pair in enumerate(row):
            V[i, j] = _complex_from_pair(f"V[{i}][{j}]", pair)
    return GaussianState(mean_a, mean_b, V)

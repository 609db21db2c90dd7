"""Random physical states and channels for property tests and self-checks.

States are built by composing Bogoliubov transformations (two-mode squeezer,
local squeezers, beam splitter) on thermal inputs.  On the symmetrized
moment matrix V + diag(1/2,-1/2,1/2,-1/2) a transformation with matrix M in
the (a, a_dag, b, b_dag)-component convention acts as conj(M) . Vs . M^T,
which keeps the commutator offsets intact by construction, so every sampled
matrix is a valid physical state.
"""

from __future__ import annotations

import numpy as np

from .channels import ChannelMoments
from .states import GaussianState, asymmetric_tmsv, simon_witness_direct

__all__ = [
    "random_state",
    "random_entangled_state",
    "random_noisy_entangled_state",
    "random_channel_moments",
    "random_correlated_moments",
    "bogoliubov",
    "two_mode_squeezer",
    "local_squeezer",
    "beam_splitter",
    "phase_rotation",
]

_OFFSET = np.diag([0.5, -0.5, 0.5, -0.5])


def bogoliubov(V: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Push second moments through a linear Bogoliubov transformation."""
    Vs = V + _OFFSET
    return np.conj(M) @ Vs @ M.T - _OFFSET


def two_mode_squeezer(xi: float, theta: float = 0.0) -> np.ndarray:
    c, s = np.cosh(xi), np.sinh(xi)
    e = np.exp(1j * theta)
    return np.array(
        [
            [c, 0, 0, e * s],
            [0, c, np.conj(e) * s, 0],
            [0, e * s, c, 0],
            [np.conj(e) * s, 0, 0, c],
        ],
        dtype=complex,
    )


def local_squeezer(xi: float, theta: float, mode: int) -> np.ndarray:
    c, s = np.cosh(xi), np.sinh(xi)
    e = np.exp(1j * theta)
    m = np.array([[c, -e * s], [-np.conj(e) * s, c]], dtype=complex)
    out = np.eye(4, dtype=complex)
    out[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = m
    return out


def beam_splitter(t: float) -> np.ndarray:
    r = np.sqrt(max(1.0 - t * t, 0.0))
    return np.array(
        [
            [t, 0, r, 0],
            [0, t, 0, r],
            [-r, 0, t, 0],
            [0, -r, 0, t],
        ],
        dtype=complex,
    )


def phase_rotation(phi_a: float, phi_b: float) -> np.ndarray:
    """Local phase rotations a -> e^{i phi_a} a, b -> e^{i phi_b} b."""
    return np.diag(
        [
            np.exp(1j * phi_a),
            np.exp(-1j * phi_a),
            np.exp(1j * phi_b),
            np.exp(-1j * phi_b),
        ]
    )


def random_state(rng: np.random.Generator, displaced: bool = True) -> GaussianState:
    """A random valid two-mode Gaussian state (generically mixed, rotated)."""
    na, nb = rng.uniform(0.0, 1.5, size=2)
    V = np.diag([na, na + 1.0, nb, nb + 1.0]).astype(complex)
    V = bogoliubov(V, two_mode_squeezer(rng.uniform(0.0, 1.5), rng.uniform(0.0, 2 * np.pi)))
    V = bogoliubov(V, local_squeezer(rng.uniform(0.0, 0.8), rng.uniform(0.0, 2 * np.pi), 0))
    V = bogoliubov(V, local_squeezer(rng.uniform(0.0, 0.8), rng.uniform(0.0, 2 * np.pi), 1))
    V = bogoliubov(V, beam_splitter(rng.uniform(0.2, 1.0)))
    # Exact Hermitization and commutator offsets: the composition above is
    # exact up to rounding; pin the invariants bit-exactly.
    V = 0.5 * (V + V.conj().T)
    V[1, 1] = V[0, 0] + 1.0
    V[3, 3] = V[2, 2] + 1.0
    if displaced:
        mean_a = complex(rng.normal(), rng.normal())
        mean_b = complex(rng.normal(), rng.normal())
    else:
        mean_a = mean_b = 0.0
    return GaussianState(mean_a, mean_b, V)


def random_entangled_state(
    rng: np.random.Generator, displaced: bool = False, margin: float = 1e-3
) -> GaussianState:
    """A random loss-robust entangled state.

    Draws from the beam-splitter family (two equally squeezed single-mode
    inputs mixed with transmission t, then random local phase rotations),
    restricted to the region tanh(xi)^2 < 4 t^2 (1 - t^2) where the
    entanglement survives deterministic attenuation of *any* strength on
    either mode.  Outside that region -- and for generic noisy entangled
    states, see random_noisy_entangled_state -- strong attenuation can
    render the state separable, so preservation-type properties can only
    be asserted for this family.

    Survival for all eta_a, eta_b in (0, 1] is equivalent to
    |<da db>|^2 >= <da^dag da><db^dag db>: separability is absorbing under
    further attenuation, so entanglement can only die on the diagonal
    eta_a = eta_b -> 0 first, where the sign of the witness is governed by
    the 2x2 minor [[<da^dag da>, <da^dag db^dag>], [<da db>, <db^dag db>]]
    of the partially transposed matrix.
    """
    while True:
        t2 = rng.uniform(0.2, 0.8)
        xi_max = np.arctanh(np.sqrt(0.9 * 4.0 * t2 * (1.0 - t2)))
        xi = rng.uniform(0.1, min(2.0, xi_max))
        st = asymmetric_tmsv(xi, t2)
        V = bogoliubov(st.V, phase_rotation(rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)))
        V = 0.5 * (V + V.conj().T)
        V[1, 1] = V[0, 0] + 1.0
        V[3, 3] = V[2, 2] + 1.0
        if displaced:
            mean_a = complex(rng.normal(), rng.normal())
            mean_b = complex(rng.normal(), rng.normal())
        else:
            mean_a = mean_b = 0.0
        st = GaussianState(mean_a, mean_b, V)
        if simon_witness_direct(st) < -margin:
            return st


def random_noisy_entangled_state(
    rng: np.random.Generator, displaced: bool = False, margin: float = 1e-3
) -> GaussianState:
    """A generic mixed entangled state (witness below -margin).

    Rejection-samples random_state, so thermal noise and local squeezing
    are present.  Most of these states lose their entanglement at some
    finite deterministic attenuation (no loss-robustness guarantee); use
    random_entangled_state for preservation properties.
    """
    while True:
        st = random_state(rng, displaced=displaced)
        if simon_witness_direct(st) < -margin:
            return st


def random_channel_moments(rng: np.random.Generator) -> ChannelMoments:
    """Valid random moments: marginal bounds, Cauchy-Schwarz, covariance bound."""
    ta, tb = rng.uniform(0.05, 1.0, size=2)
    ta2 = rng.uniform(ta * ta, ta)
    tb2 = rng.uniform(tb * tb, tb)
    sd = np.sqrt((ta2 - ta * ta) * (tb2 - tb * tb))
    lo = max(ta * tb - sd, 0.0)
    hi = min(ta * tb + sd, np.sqrt(ta2 * tb2))
    tab = rng.uniform(lo, hi)
    return ChannelMoments(ta, tb, ta2, tb2, tab)


def random_correlated_moments(rng: np.random.Generator) -> ChannelMoments:
    """Perfectly correlated symmetric moments: T_a = T_b, Gamma = DeltaGamma = 1."""
    t1 = rng.uniform(0.05, 0.999)
    t2 = rng.uniform(t1 * t1, t1)
    return ChannelMoments(t1, t1, t2, t2, t2)

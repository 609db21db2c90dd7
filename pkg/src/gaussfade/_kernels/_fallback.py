"""Pure-NumPy witness kernel, used when the compiled extension is absent.

Semantics must match gaussfade._kernels._core exactly; the equivalence is
pinned by tests and the benchmark harness.
"""

from __future__ import annotations

import numpy as np

from ..blockdet import adjugate, det2, det4_block, perp

_DIAG01 = np.diag([0.0, 1.0]).astype(complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

NAME = "fallback"


def witness_terms(A, B, C, mu_a, mu_b, eta_a, eta_b, gamma, dgamma):
    """Witness of the channel output, term by term, from input-state blocks.

    A, B, C are the second-moment blocks of the input state (C is the b-a
    cross block), mu_a and mu_b the displacement moment vectors already
    scaled by the transmittance standard deviations, eta_a/eta_b the second
    transmittance moments, and gamma/dgamma the channel correlation
    coefficients.  Returns (w, term_loss, term_N, term_F, term_S).
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    C = np.asarray(C, dtype=complex)
    mu_a = np.asarray(mu_a, dtype=complex)
    mu_b = np.asarray(mu_b, dtype=complex)

    # Partially transposed blocks of the deterministic-loss output.
    At = eta_a * A + (1.0 - eta_a) * _DIAG01
    Bt = (eta_b * B + (1.0 - eta_b) * _DIAG01).T
    Ct = _X @ (np.sqrt(eta_a * eta_b) * C)
    CtH = Ct.conj().T

    g2 = gamma * gamma
    det_a, det_b, det_c = det2(At), det2(Bt), det2(Ct)

    w_loss = det4_block(At, Bt, Ct, CtH).real
    term_loss = g2 * w_loss
    term_n = (1.0 - g2) * (det_a * det_b - g2 * det_c * np.conj(det_c)).real

    map_ = perp(mu_a)
    nu1 = np.conj(perp(mu_b))
    nu2 = -map_

    qa = (map_.conj() @ At @ map_).real
    qb = (nu1.conj() @ Bt @ nu1).real
    x = map_.conj() @ CtH @ nu1
    term_f = (1.0 - dgamma * dgamma) * (qa * qb - g2 * abs(x) ** 2)

    s_aa = det_a * Bt - g2 * Ct @ adjugate(At) @ CtH
    s_bb = det_b * At - g2 * CtH @ adjugate(Bt) @ Ct
    s_ba = At @ adjugate(Ct) @ Bt - g2 * det_c * CtH
    term_s = (
        (nu1.conj() @ s_aa @ nu1).real
        + (nu2.conj() @ s_bb @ nu2).real
        + 2.0 * gamma * dgamma * (nu2.conj() @ s_ba @ nu1).real
    )

    w = term_loss + term_n + term_f + term_s
    return float(w), float(term_loss), float(term_n), float(term_f), float(term_s)

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled witness kernel: fully unrolled 2x2 complex block algebra.

Semantics must match gaussfade._kernels._fallback.witness_terms exactly;
the equivalence is pinned by tests and the benchmark harness.
"""

from libc.math cimport sqrt

NAME = "cython"


def witness_terms(double complex[:, :] A, double complex[:, :] B,
                  double complex[:, :] C, double complex[:] mu_a,
                  double complex[:] mu_b, double eta_a, double eta_b,
                  double gamma, double dgamma):
    """Witness of the channel output, term by term, from input-state blocks.

    Same contract as the fallback kernel: A, B, C are the input second-moment
    blocks (C the b-a cross block), mu_a/mu_b the variance-scaled
    displacement moment vectors, eta the second transmittance moments,
    gamma/dgamma the correlation coefficients.  Returns
    (w, term_loss, term_N, term_F, term_S).
    """
    cdef double complex at00, at01, at10, at11
    cdef double complex bt00, bt01, bt10, bt11
    cdef double complex ct00, ct01, ct10, ct11
    cdef double complex ch00, ch01, ch10, ch11
    cdef double complex det_a, det_b, det_c
    cdef double complex e00, e01, e10, e11, f00, f01, f10, f11
    cdef double complex t00, t01, t10, t11, p00, p01, p10, p11
    cdef double complex u00, u01, u10, u11, q00, q01, q10, q11
    cdef double complex r00, r01, r10, r11
    cdef double complex map0, map1, n10, n11v, n20, n21
    cdef double complex x, acc, gdc
    cdef double s, g2, w_det, term_loss, term_n, term_f, term_s
    cdef double qa, qb, w

    # Partially transposed blocks of the deterministic-loss output.
    at00 = eta_a * A[0, 0]
    at01 = eta_a * A[0, 1]
    at10 = eta_a * A[1, 0]
    at11 = eta_a * A[1, 1] + (1.0 - eta_a)

    # b block is transposed: Bt = (eta_b B + (1-eta_b) diag(0,1))^T
    bt00 = eta_b * B[0, 0]
    bt01 = eta_b * B[1, 0]
    bt10 = eta_b * B[0, 1]
    bt11 = eta_b * B[1, 1] + (1.0 - eta_b)

    # Ct = X @ (sqrt(eta_a eta_b) C): X swaps the rows of C.
    s = sqrt(eta_a * eta_b)
    ct00 = s * C[1, 0]
    ct01 = s * C[1, 1]
    ct10 = s * C[0, 0]
    ct11 = s * C[0, 1]
    ch00 = ct00.conjugate()
    ch01 = ct10.conjugate()
    ch10 = ct01.conjugate()
    ch11 = ct11.conjugate()

    g2 = gamma * gamma
    det_a = at00 * at11 - at01 * at10
    det_b = bt00 * bt11 - bt01 * bt10
    det_c = ct00 * ct11 - ct01 * ct10

    # det(At, CtH; Ct, Bt) = det At det Bt + |det Ct|^2 - tr(At adjCt Bt adjCtH)
    e00 = at00 * ct11 - at01 * ct10
    e01 = -at00 * ct01 + at01 * ct00
    e10 = at10 * ct11 - at11 * ct10
    e11 = -at10 * ct01 + at11 * ct00
    f00 = bt00 * ch11 - bt01 * ch10
    f01 = -bt00 * ch01 + bt01 * ch00
    f10 = bt10 * ch11 - bt11 * ch10
    f11 = -bt10 * ch01 + bt11 * ch00
    acc = det_a * det_b + det_c * det_c.conjugate() \
        - (e00 * f00 + e01 * f10 + e10 * f01 + e11 * f11)
    w_det = acc.real
    term_loss = g2 * w_det

    acc = det_a * det_b - g2 * det_c * det_c.conjugate()
    term_n = (1.0 - g2) * acc.real

    # map = perp(mu_a); nu1 = conj(perp(mu_b)); nu2 = -map
    map0 = mu_a[1].conjugate()
    map1 = -mu_a[0].conjugate()
    n10 = mu_b[1]
    n11v = -mu_b[0]
    n20 = -map0
    n21 = -map1

    acc = map0.conjugate() * (at00 * map0 + at01 * map1) \
        + map1.conjugate() * (at10 * map0 + at11 * map1)
    qa = acc.real
    acc = n10.conjugate() * (bt00 * n10 + bt01 * n11v) \
        + n11v.conjugate() * (bt10 * n10 + bt11 * n11v)
    qb = acc.real
    x = map0.conjugate() * (ch00 * n10 + ch01 * n11v) \
        + map1.conjugate() * (ch10 * n10 + ch11 * n11v)
    term_f = (1.0 - dgamma * dgamma) * (qa * qb - g2 * (x.real * x.real + x.imag * x.imag))

    # S_aa = det At * Bt - g2 * Ct adjAt CtH
    t00 = ct00 * at11 - ct01 * at10
    t01 = -ct00 * at01 + ct01 * at00
    t10 = ct10 * at11 - ct11 * at10
    t11 = -ct10 * at01 + ct11 * at00
    p00 = t00 * ch00 + t01 * ch10
    p01 = t00 * ch01 + t01 * ch11
    p10 = t10 * ch00 + t11 * ch10
    p11 = t10 * ch01 + t11 * ch11
    acc = n10.conjugate() * ((det_a * bt00 - g2 * p00) * n10 + (det_a * bt01 - g2 * p01) * n11v) \
        + n11v.conjugate() * ((det_a * bt10 - g2 * p10) * n10 + (det_a * bt11 - g2 * p11) * n11v)
    term_s = acc.real

    # S_bb = det Bt * At - g2 * CtH adjBt Ct
    u00 = ch00 * bt11 - ch01 * bt10
    u01 = -ch00 * bt01 + ch01 * bt00
    u10 = ch10 * bt11 - ch11 * bt10
    u11 = -ch10 * bt01 + ch11 * bt00
    q00 = u00 * ct00 + u01 * ct10
    q01 = u00 * ct01 + u01 * ct11
    q10 = u10 * ct00 + u11 * ct10
    q11 = u10 * ct01 + u11 * ct11
    acc = n20.conjugate() * ((det_b * at00 - g2 * q00) * n20 + (det_b * at01 - g2 * q01) * n21) \
        + n21.conjugate() * ((det_b * at10 - g2 * q10) * n20 + (det_b * at11 - g2 * q11) * n21)
    term_s += acc.real

    # S_ba = At adjCt Bt - g2 det Ct * CtH  (cross term carries gamma*dgamma)
    r00 = e00 * bt00 + e01 * bt10
    r01 = e00 * bt01 + e01 * bt11
    r10 = e10 * bt00 + e11 * bt10
    r11 = e10 * bt01 + e11 * bt11
    gdc = g2 * det_c
    acc = n20.conjugate() * ((r00 - gdc * ch00) * n10 + (r01 - gdc * ch01) * n11v) \
        + n21.conjugate() * ((r10 - gdc * ch10) * n10 + (r11 - gdc * ch11) * n11v)
    term_s += 2.0 * gamma * dgamma * acc.real

    w = term_loss + term_n + term_f + term_s
    return w, term_loss, term_n, term_f, term_s

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trial loop for the Monte Carlo backend.

Restates the pure-Python backend's draw protocol exactly: the same
splitmix64 stream per (trial, purpose) pair, one uniform per round
inverted over the canonical detector order (H,gL), (H,gR), (V,gL),
(V,gR), and the same detector-loss draw order.  Only the eight live
amplitudes of one round are tracked (photon, register branch, auxiliary
atom); branch weights do not depend on the register size, so the ledger
matches the full-register simulation for every N.

The two backends may differ by an ulp in intermediate weights (the
pure path renormalizes after every gate, this one does not).  A branch
draw only disagrees when the uniform lands inside that gap, which has
probability around 1e-15 per round; the equivalence test budgets for it.
"""

from libc.math cimport sqrt
from libc.stdint cimport int64_t, uint64_t

import numpy as np

cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t MULT_A = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t MULT_B = <uint64_t>0x94D049BB133111EB
cdef double TWO53 = 9007199254740992.0

cdef double INV_SQRT2 = 1.0 / sqrt(2.0)
# photon amplitude after the builder's normalization pass
cdef double _PN2 = INV_SQRT2 * INV_SQRT2 + INV_SQRT2 * INV_SQRT2
cdef double P_AMP = INV_SQRT2 * (1.0 / sqrt(_PN2))

cdef double complex C_M1 = -1.0 + 0.0j
cdef double complex C_I = 1.0j


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MULT_A
    z = (z ^ (z >> 27)) * MULT_B
    return z ^ (z >> 31)


cdef inline uint64_t stream_seed(uint64_t master, uint64_t trial, uint64_t stream) noexcept nogil:
    return mix64(master + GOLDEN * (2 * trial + stream + 1))


cdef inline double next_double(uint64_t *state) noexcept nogil:
    state[0] = state[0] + GOLDEN
    cdef uint64_t z = mix64(state[0])
    return <double>(z >> 11) * (1.0 / TWO53)


cdef inline double n2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef int one_trial(double complex alpha, double complex beta, int max_rounds,
                   uint64_t sa, uint64_t sb, int loss_model,
                   double eta_p, double eta_a) noexcept nogil:
    """Run one trial; return the succeeding round (1-based) or 0."""
    cdef double complex amp[8]
    cdef double complex ga, gb, ca, cb, x0, x1, t0, t1, aa, bb
    cdef double m2a, m2b, s, sx, w_hl, w_hr, w_vl, w_vr, u, cum, w_out, inv_post
    cdef int k, ph, br, ax, i, outcome

    # register branch amplitudes, normalized once like the state builder
    m2a = alpha.real * alpha.real + alpha.imag * alpha.imag
    m2b = beta.real * beta.real + beta.imag * beta.imag
    s = 1.0 / sqrt(m2a + m2b)
    ga = alpha * s
    gb = beta * s
    # coefficient pair driving the auxiliary-atom preparation
    ca = alpha
    cb = beta

    for k in range(1, max_rounds + 1):
        # auxiliary atom (beta on gL, alpha on gR), builder-normalized
        m2b = cb.real * cb.real + cb.imag * cb.imag
        m2a = ca.real * ca.real + ca.imag * ca.imag
        sx = 1.0 / sqrt(m2b + m2a)
        x0 = cb * sx
        x1 = ca * sx

        # joint state: ((photon x register) x aux), then both cavities
        for ph in range(2):
            for br in range(2):
                t0 = P_AMP * (ga if br == 0 else gb)
                for ax in range(2):
                    i = ph * 4 + br * 2 + ax
                    amp[i] = t0 * (x0 if ax == 0 else x1)
                    amp[i] = amp[i] * (C_M1 if ph == ax else C_I)  # aux cavity
                    amp[i] = amp[i] * (C_M1 if ph == br else C_I)  # atom-0 cavity

        # Hadamard on the auxiliary atom
        for ph in range(2):
            for br in range(2):
                i = ph * 4 + br * 2
                t0 = amp[i]
                t1 = amp[i + 1]
                amp[i] = INV_SQRT2 * t0 + INV_SQRT2 * t1
                amp[i + 1] = INV_SQRT2 * t0 - INV_SQRT2 * t1

        # wave plate: slot 0 becomes H, slot 1 becomes V
        for br in range(2):
            for ax in range(2):
                i = br * 2 + ax
                t0 = amp[i]      # L
                t1 = amp[4 + i]  # R
                amp[i] = INV_SQRT2 * t0 + INV_SQRT2 * t1
                amp[4 + i] = INV_SQRT2 * t0 - INV_SQRT2 * t1

        # detector weights in canonical order, branch A before B
        w_hl = n2(amp[0]) + n2(amp[2])
        w_hr = n2(amp[1]) + n2(amp[3])
        w_vl = n2(amp[4]) + n2(amp[6])
        w_vr = n2(amp[5]) + n2(amp[7])

        u = next_double(&sa)
        outcome = 3
        cum = w_hl
        if u < cum:
            outcome = 0
        else:
            cum = cum + w_hr
            if u < cum:
                outcome = 1
            else:
                cum = cum + w_vl
                if u < cum:
                    outcome = 2

        if loss_model == 2:  # cascaded: photon then atom draw, every round
            if next_double(&sb) >= eta_p:
                next_double(&sb)
                return 0
            if next_double(&sb) >= eta_a:
                return 0

        if outcome >= 2:  # vertical photon heralds success
            if loss_model == 1:  # one global survival draw
                if next_double(&sb) < eta_p * eta_a:
                    return k
                return 0
            return k

        # recycle: collapse onto the heralded (H, aux) slice
        ax = outcome & 1
        w_out = w_hl if ax == 0 else w_hr
        inv_post = 1.0 / sqrt(w_out)
        ga = amp[ax] * inv_post
        gb = amp[2 + ax] * inv_post
        # square and renormalize the coefficient pair
        aa = ca * ca
        bb = cb * cb
        m2a = aa.real * aa.real + aa.imag * aa.imag
        m2b = bb.real * bb.real + bb.imag * bb.imag
        s = sqrt(m2a + m2b)
        ca = aa / s
        cb = bb / s

    return 0


def run_trials(alpha, beta, int max_rounds, Py_ssize_t trials, master_seed,
               int loss_model, double eta_p, double eta_a):
    """Success counts by round over ``trials`` independent trials."""
    if max_rounds < 1:
        raise ValueError("need at least one round")
    if trials < 1:
        raise ValueError("need at least one trial")
    if loss_model not in (0, 1, 2):
        raise ValueError(f"unknown loss model code {loss_model}")
    cdef double complex a = alpha
    cdef double complex b = beta
    cdef uint64_t master = <uint64_t>(master_seed & 0xFFFFFFFFFFFFFFFF)
    counts_np = np.zeros(max_rounds, dtype=np.int64)
    cdef int64_t[::1] counts = counts_np
    cdef Py_ssize_t t
    cdef int k
    with nogil:
        for t in range(trials):
            k = one_trial(a, b, max_rounds,
                          stream_seed(master, <uint64_t>t, 0),
                          stream_seed(master, <uint64_t>t, 1),
                          loss_model, eta_p, eta_a)
            if k > 0:
                counts[k - 1] += 1
    return counts_np

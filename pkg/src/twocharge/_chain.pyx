# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Markov-chain stepping core.

Mirror of _chain_py.run_chain, operation for operation: same splitmix64
stream, same Box-Muller transform, same arithmetic order.  Trajectories
and accumulator contents are bit-identical to the pure-Python core for a
given seed (asserted by the test suite).
"""

from libc.math cimport M_PI, cos, fabs, floor, log, sin, sqrt
from libc.stdint cimport int64_t, uint64_t

import numpy as np

cdef double TWO_PI = 2.0 * M_PI
cdef double NEG_INF = float("-inf")
cdef double INV53 = 1.0 / 9007199254740992.0
cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15


cdef inline double _uniform(uint64_t *state) noexcept nogil:
    cdef uint64_t z
    state[0] = state[0] + GOLDEN
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return (z >> 11) * INV53


cdef inline double _wrap(double t) noexcept nogil:
    return t - TWO_PI * floor((t + M_PI) / TWO_PI)


cdef inline double _log_chord(double d) noexcept nogil:
    cdef double s = fabs(sin(0.5 * d))
    if s == 0.0:
        return NEG_INF
    return log(2.0 * s)


cdef double _total_energy(double *xi, Py_ssize_t L, double *zeta, Py_ssize_t M) noexcept nogil:
    cdef double e = 0.0
    cdef Py_ssize_t i, j
    for i in range(L):
        for j in range(i + 1, L):
            e -= _log_chord(xi[i] - xi[j])
        for j in range(M):
            e -= 2.0 * _log_chord(xi[i] - zeta[j])
    for i in range(M):
        for j in range(i + 1, M):
            e -= 4.0 * _log_chord(zeta[i] - zeta[j])
    return e


cdef void _record_spacings(
    double *pts, Py_ssize_t kk, double *scratch,
    int64_t[::1] hist, Py_ssize_t set_index,
    int64_t[::1] spacing_overflow, int64_t[::1] degenerate,
    double spacing_scale, double sp_binscale, Py_ssize_t sp_bins,
) noexcept nogil:
    cdef Py_ssize_t i, j, b
    cdef double v, gap
    if kk < 2:
        degenerate[set_index] += 1
        return
    for i in range(kk):
        scratch[i] = pts[i]
    # insertion sort; sets are small (at most the total charge)
    for i in range(1, kk):
        v = scratch[i]
        j = i - 1
        while j >= 0 and scratch[j] > v:
            scratch[j + 1] = scratch[j]
            j -= 1
        scratch[j + 1] = v
    for i in range(kk):
        if i < kk - 1:
            gap = scratch[i + 1] - scratch[i]
        else:
            gap = scratch[0] + TWO_PI - scratch[kk - 1]
        b = <Py_ssize_t>(gap * spacing_scale * sp_binscale)
        if b >= sp_bins:
            spacing_overflow[set_index] += 1
        else:
            hist[b] += 1


def run_chain(
    n,
    fugacity,
    p_rotate,
    p_split,
    p_merge,
    sigma_rot,
    sigma_split,
    steps,
    burn_in,
    thin,
    check_every,
    seed,
    xi_init,
    zeta_init,
    count_hist,
    density1,
    density2,
    pair11,
    pair22,
    pair12,
    spacing1,
    spacing2,
    spacing_all,
    spacing_overflow,
    degenerate,
    proposed,
    accepted,
    spacing_scale,
    spacing_max,
):
    """Compiled twin of _chain_py.run_chain; see that module for the contract."""
    cdef Py_ssize_t nn = int(n)
    cdef double x = float(fugacity)
    cdef double pr = float(p_rotate)
    cdef double ps = float(p_split)
    cdef double pm = float(p_merge)
    cdef double s_rot = float(sigma_rot)
    cdef double s_split = float(sigma_split)
    cdef long long n_steps = int(steps)
    cdef long long n_burn = int(burn_in)
    cdef long long n_thin = int(thin)
    cdef long long n_check = int(check_every)
    cdef uint64_t state = <uint64_t>(int(seed) & ((1 << 64) - 1))
    cdef double sc_spacing = float(spacing_scale)

    xi_buf = np.zeros(nn + 2, dtype=np.float64)
    zeta_buf = np.zeros(nn // 2 + 2, dtype=np.float64)
    pool_buf = np.zeros(nn + 2, dtype=np.float64)
    scratch_buf = np.zeros(nn + 2, dtype=np.float64)
    cdef double[::1] xi_mv = xi_buf
    cdef double[::1] zeta_mv = zeta_buf
    cdef double[::1] pool_mv = pool_buf
    cdef double[::1] scratch_mv = scratch_buf
    cdef double *xi = &xi_mv[0]
    cdef double *zeta = &zeta_mv[0]
    cdef double *pool = &pool_mv[0]
    cdef double *scratch = &scratch_mv[0]

    cdef Py_ssize_t L = len(xi_init)
    cdef Py_ssize_t M = len(zeta_init)
    cdef Py_ssize_t i, j, k, l2, idx, i2, b, kk, hi, lo
    for i in range(L):
        xi[i] = float(xi_init[i])
    for i in range(M):
        zeta[i] = float(zeta_init[i])

    cdef int64_t[::1] c_hist = count_hist
    cdef int64_t[::1] dens1 = density1
    cdef int64_t[::1] dens2 = density2
    cdef int64_t[::1] p11 = pair11
    cdef int64_t[::1] p22 = pair22
    cdef int64_t[::1] p12 = pair12
    cdef int64_t[::1] sp1 = spacing1
    cdef int64_t[::1] sp2 = spacing2
    cdef int64_t[::1] spa = spacing_all
    cdef int64_t[::1] sp_over = spacing_overflow
    cdef int64_t[::1] degen = degenerate
    cdef int64_t[::1] prop = proposed
    cdef int64_t[::1] acc = accepted

    cdef double log_x = log(x) if x > 0.0 else NEG_INF
    cdef double log_g_const = 0.5 * log(2.0 / M_PI) - log(s_split)
    cdef double inv_2sig2 = 0.5 / (s_split * s_split)
    cdef bint has_jumps = ps > 0.0 and pm > 0.0
    cdef double log_ms = log(pm / ps) if has_jumps else 0.0

    cdef Py_ssize_t dens_bins = dens1.shape[0]
    cdef double dens_scale = dens_bins / TWO_PI
    cdef Py_ssize_t pair_bins = p11.shape[0]
    cdef double pair_scale = pair_bins / M_PI
    cdef Py_ssize_t sp_bins = sp1.shape[0]
    cdef double sp_binscale = sp_bins / float(spacing_max)

    cdef double e = _total_energy(xi, L, zeta, M)
    cdef double max_drift = 0.0
    cdef long long recorded = 0
    cdef double split_gate = pr + ps

    cdef long long step
    cdef double u_move, u, u1, u2, ua, z, old, new, de, delta, phi, a, bb, d
    cdef double log_g, lr, full, drift

    for step in range(n_steps):
        u_move = _uniform(&state)
        if u_move < pr:
            prop[0] += 1
            kk = L + M
            u = _uniform(&state)
            idx = <Py_ssize_t>(u * kk)
            if idx >= kk:
                idx = kk - 1
            u1 = _uniform(&state)
            u2 = _uniform(&state)
            z = sqrt(-2.0 * log(1.0 - u1)) * cos(TWO_PI * u2)
            de = 0.0
            if idx < L:
                old = xi[idx]
                new = _wrap(old + s_rot * z)
                for j in range(L):
                    if j != idx:
                        de += _log_chord(old - xi[j]) - _log_chord(new - xi[j])
                for j in range(M):
                    de += 2.0 * (_log_chord(old - zeta[j]) - _log_chord(new - zeta[j]))
            else:
                i2 = idx - L
                old = zeta[i2]
                new = _wrap(old + s_rot * z)
                for j in range(L):
                    de += 2.0 * (_log_chord(old - xi[j]) - _log_chord(new - xi[j]))
                for j in range(M):
                    if j != i2:
                        de += 4.0 * (
                            _log_chord(old - zeta[j]) - _log_chord(new - zeta[j])
                        )
            ua = _uniform(&state)
            if log(1.0 - ua) < -de:
                if idx < L:
                    xi[idx] = new
                else:
                    zeta[idx - L] = new
                e += de
                acc[0] += 1
        elif u_move < split_gate:
            prop[1] += 1
            if M > 0:
                u = _uniform(&state)
                j = <Py_ssize_t>(u * M)
                if j >= M:
                    j = M - 1
                u1 = _uniform(&state)
                u2 = _uniform(&state)
                z = sqrt(-2.0 * log(1.0 - u1)) * cos(TWO_PI * u2)
                delta = fabs(s_split * z)
                if delta < 0.5 * M_PI:
                    phi = zeta[j]
                    a = _wrap(phi + delta)
                    bb = _wrap(phi - delta)
                    de = -_log_chord(a - bb)
                    for i in range(L):
                        de -= _log_chord(a - xi[i]) + _log_chord(bb - xi[i])
                        de += 2.0 * _log_chord(phi - xi[i])
                    for i in range(M):
                        if i != j:
                            de -= 2.0 * (
                                _log_chord(a - zeta[i]) + _log_chord(bb - zeta[i])
                            )
                            de += 4.0 * _log_chord(phi - zeta[i])
                    log_g = log_g_const - delta * delta * inv_2sig2
                    lr = (
                        2.0 * log_x
                        - de
                        + log_ms
                        + log(4.0 * M / ((L + 2.0) * (L + 1.0)))
                        - log_g
                    )
                    ua = _uniform(&state)
                    if log(1.0 - ua) < lr:
                        zeta[j] = zeta[M - 1]
                        M -= 1
                        xi[L] = a
                        xi[L + 1] = bb
                        L += 2
                        e += de
                        acc[1] += 1
        else:
            prop[2] += 1
            if L >= 2:
                u1 = _uniform(&state)
                k = <Py_ssize_t>(u1 * L)
                if k >= L:
                    k = L - 1
                u2 = _uniform(&state)
                l2 = <Py_ssize_t>(u2 * (L - 1))
                if l2 >= L - 1:
                    l2 = L - 2
                if l2 >= k:
                    l2 += 1
                d = _wrap(xi[l2] - xi[k])
                delta = 0.5 * fabs(d)
                if delta < 0.5 * M_PI:
                    a = xi[k]
                    bb = xi[l2]
                    phi = _wrap(a + 0.5 * d)
                    de = _log_chord(a - bb)
                    for i in range(L):
                        if i != k and i != l2:
                            de += _log_chord(a - xi[i]) + _log_chord(bb - xi[i])
                            de -= 2.0 * _log_chord(phi - xi[i])
                    for i in range(M):
                        de += 2.0 * (_log_chord(a - zeta[i]) + _log_chord(bb - zeta[i]))
                        de -= 4.0 * _log_chord(phi - zeta[i])
                    log_g = log_g_const - delta * delta * inv_2sig2
                    lr = (
                        -2.0 * log_x
                        - de
                        - log_ms
                        + log_g
                        + log(L * (L - 1.0) / (4.0 * (M + 1.0)))
                    )
                    ua = _uniform(&state)
                    if log(1.0 - ua) < lr:
                        if k > l2:
                            hi = k
                            lo = l2
                        else:
                            hi = l2
                            lo = k
                        xi[hi] = xi[L - 1]
                        xi[lo] = xi[L - 2]
                        L -= 2
                        zeta[M] = phi
                        M += 1
                        e += de
                        acc[2] += 1

        if step >= n_burn and (step - n_burn) % n_thin == 0:
            recorded += 1
            c_hist[L] += 1
            for i in range(L):
                b = <Py_ssize_t>((xi[i] + M_PI) * dens_scale)
                if b >= dens_bins:
                    b = dens_bins - 1
                dens1[b] += 1
            for i in range(M):
                b = <Py_ssize_t>((zeta[i] + M_PI) * dens_scale)
                if b >= dens_bins:
                    b = dens_bins - 1
                dens2[b] += 1
            for i in range(L):
                for j in range(i + 1, L):
                    b = <Py_ssize_t>(fabs(_wrap(xi[i] - xi[j])) * pair_scale)
                    if b >= pair_bins:
                        b = pair_bins - 1
                    p11[b] += 1
            for i in range(M):
                for j in range(i + 1, M):
                    b = <Py_ssize_t>(fabs(_wrap(zeta[i] - zeta[j])) * pair_scale)
                    if b >= pair_bins:
                        b = pair_bins - 1
                    p22[b] += 1
            for i in range(L):
                for j in range(M):
                    b = <Py_ssize_t>(fabs(_wrap(xi[i] - zeta[j])) * pair_scale)
                    if b >= pair_bins:
                        b = pair_bins - 1
                    p12[b] += 1
            _record_spacings(
                xi, L, scratch, sp1, 0, sp_over, degen,
                sc_spacing, sp_binscale, sp_bins,
            )
            _record_spacings(
                zeta, M, scratch, sp2, 1, sp_over, degen,
                sc_spacing, sp_binscale, sp_bins,
            )
            for i in range(L):
                pool[i] = xi[i]
            for i in range(M):
                pool[L + i] = zeta[i]
            _record_spacings(
                pool, L + M, scratch, spa, 2, sp_over, degen,
                sc_spacing, sp_binscale, sp_bins,
            )

        if n_check > 0 and (step + 1) % n_check == 0:
            full = _total_energy(xi, L, zeta, M)
            drift = fabs(full - e)
            if drift > max_drift:
                max_drift = drift
            e = full

    xi_out = [xi[i] for i in range(L)]
    zeta_out = [zeta[i] for i in range(M)]
    return xi_out, zeta_out, e, int(recorded), max_drift

"""Pure-Python Markov-chain stepping core.

Reference implementation of the trans-dimensional sampler loop.  The
compiled twin in _chain.pyx mirrors this file operation for operation:
same splitmix64 stream, same Box-Muller transform, same libm calls in the
same order, same bookkeeping.  Given a seed, both backends therefore
produce identical trajectories and identical accumulator contents, which
the test suite asserts.

Everything is in plain Python floats/ints on purpose; numpy arrays only
carry the (rarely touched) histogram counters so the two backends can
share one buffer layout.
"""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi
_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 2.0**-53


def derive_stream(seed: int, index: int) -> int:
    """Decorrelated 64-bit starting state for stream `index` of a base seed."""
    z = (seed + (index + 1) * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _uniform(state: int) -> tuple[int, float]:
    """splitmix64 step; returns (new_state, uniform in [0, 1))."""
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return state, (z >> 11) * _INV53


def _wrap(t: float) -> float:
    return t - TWO_PI * math.floor((t + math.pi) / TWO_PI)


def _log_chord(d: float) -> float:
    s = abs(math.sin(0.5 * d))
    if s == 0.0:
        return -math.inf
    return math.log(2.0 * s)


def total_energy(xi, zeta) -> float:
    """Full log-gas energy; accumulation order fixed for backend parity."""
    e = 0.0
    l, m = len(xi), len(zeta)
    for i in range(l):
        for j in range(i + 1, l):
            e -= _log_chord(xi[i] - xi[j])
        for j in range(m):
            e -= 2.0 * _log_chord(xi[i] - zeta[j])
    for i in range(m):
        for j in range(i + 1, m):
            e -= 4.0 * _log_chord(zeta[i] - zeta[j])
    return e


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
    """Run one chain, filling the integer accumulator arrays in place.

    Returns (xi_final, zeta_final, energy, recorded, max_energy_drift).
    Histogram layouts: density over [-pi, pi), pair separations over
    (0, pi], spacings over [0, spacing_max) in units of spacing_scale
    with an overflow counter per particle set (charge-1 / charge-2 /
    pooled); sets with fewer than two points count as degenerate instead.
    """
    xi = [float(t) for t in xi_init]
    zeta = [float(t) for t in zeta_init]
    state = int(seed) & _MASK
    log_x = math.log(fugacity) if fugacity > 0.0 else -math.inf
    log_g_const = 0.5 * math.log(2.0 / math.pi) - math.log(sigma_split)
    inv_2sig2 = 0.5 / (sigma_split * sigma_split)
    has_jumps = p_split > 0.0 and p_merge > 0.0
    log_ms = math.log(p_merge / p_split) if has_jumps else 0.0

    dens_bins = len(density1)
    dens_scale = dens_bins / TWO_PI
    pair_bins = len(pair11)
    pair_scale = pair_bins / math.pi
    sp_bins = len(spacing1)
    sp_binscale = sp_bins / spacing_max

    e = total_energy(xi, zeta)
    max_drift = 0.0
    recorded = 0
    split_gate = p_rotate + p_split

    for step in range(steps):
        state, u_move = _uniform(state)
        if u_move < p_rotate:
            proposed[0] += 1
            L = len(xi)
            M = len(zeta)
            k = L + M
            state, u = _uniform(state)
            idx = int(u * k)
            if idx >= k:
                idx = k - 1
            state, u1 = _uniform(state)
            state, u2 = _uniform(state)
            z = math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(TWO_PI * u2)
            de = 0.0
            if idx < L:
                old = xi[idx]
                new = _wrap(old + sigma_rot * z)
                for j in range(L):
                    if j != idx:
                        de += _log_chord(old - xi[j]) - _log_chord(new - xi[j])
                for j in range(M):
                    de += 2.0 * (_log_chord(old - zeta[j]) - _log_chord(new - zeta[j]))
            else:
                i2 = idx - L
                old = zeta[i2]
                new = _wrap(old + sigma_rot * z)
                for j in range(L):
                    de += 2.0 * (_log_chord(old - xi[j]) - _log_chord(new - xi[j]))
                for j in range(M):
                    if j != i2:
                        de += 4.0 * (
                            _log_chord(old - zeta[j]) - _log_chord(new - zeta[j])
                        )
            state, ua = _uniform(state)
            if math.log(1.0 - ua) < -de:
                if idx < L:
                    xi[idx] = new
                else:
                    zeta[idx - L] = new
                e += de
                accepted[0] += 1
        elif u_move < split_gate:
            proposed[1] += 1
            M = len(zeta)
            if M > 0:
                L = len(xi)
                state, u = _uniform(state)
                j = int(u * M)
                if j >= M:
                    j = M - 1
                state, u1 = _uniform(state)
                state, u2 = _uniform(state)
                z = math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(TWO_PI * u2)
                delta = abs(sigma_split * z)
                if delta < 0.5 * math.pi:
                    phi = zeta[j]
                    a = _wrap(phi + delta)
                    b = _wrap(phi - delta)
                    de = -_log_chord(a - b)
                    for i in range(L):
                        de -= _log_chord(a - xi[i]) + _log_chord(b - xi[i])
                        de += 2.0 * _log_chord(phi - xi[i])
                    for i in range(M):
                        if i != j:
                            de -= 2.0 * (
                                _log_chord(a - zeta[i]) + _log_chord(b - zeta[i])
                            )
                            de += 4.0 * _log_chord(phi - zeta[i])
                    log_g = log_g_const - delta * delta * inv_2sig2
                    lr = (
                        2.0 * log_x
                        - de
                        + log_ms
                        + math.log(4.0 * M / ((L + 2.0) * (L + 1.0)))
                        - log_g
                    )
                    state, ua = _uniform(state)
                    if math.log(1.0 - ua) < lr:
                        zeta[j] = zeta[M - 1]
                        zeta.pop()
                        xi.append(a)
                        xi.append(b)
                        e += de
                        accepted[1] += 1
        else:
            proposed[2] += 1
            L = len(xi)
            if L >= 2:
                M = len(zeta)
                state, u1 = _uniform(state)
                k = int(u1 * L)
                if k >= L:
                    k = L - 1
                state, u2 = _uniform(state)
                l2 = int(u2 * (L - 1))
                if l2 >= L - 1:
                    l2 = L - 2
                if l2 >= k:
                    l2 += 1
                d = _wrap(xi[l2] - xi[k])
                delta = 0.5 * abs(d)
                if delta < 0.5 * math.pi:
                    a = xi[k]
                    b = xi[l2]
                    phi = _wrap(a + 0.5 * d)
                    de = _log_chord(a - b)
                    for i in range(L):
                        if i != k and i != l2:
                            de += _log_chord(a - xi[i]) + _log_chord(b - xi[i])
                            de -= 2.0 * _log_chord(phi - xi[i])
                    for i in range(M):
                        de += 2.0 * (_log_chord(a - zeta[i]) + _log_chord(b - zeta[i]))
                        de -= 4.0 * _log_chord(phi - zeta[i])
                    log_g = log_g_const - delta * delta * inv_2sig2
                    lr = (
                        -2.0 * log_x
                        - de
                        - log_ms
                        + log_g
                        + math.log(L * (L - 1.0) / (4.0 * (M + 1.0)))
                    )
                    state, ua = _uniform(state)
                    if math.log(1.0 - ua) < lr:
                        hi, lo = (k, l2) if k > l2 else (l2, k)
                        xi[hi] = xi[L - 1]
                        xi.pop()
                        xi[lo] = xi[L - 2]
                        xi.pop()
                        zeta.append(phi)
                        e += de
                        accepted[2] += 1

        if step >= burn_in and (step - burn_in) % thin == 0:
            recorded += 1
            L = len(xi)
            M = len(zeta)
            count_hist[L] += 1
            for i in range(L):
                b = int((xi[i] + math.pi) * dens_scale)
                if b >= dens_bins:
                    b = dens_bins - 1
                density1[b] += 1
            for i in range(M):
                b = int((zeta[i] + math.pi) * dens_scale)
                if b >= dens_bins:
                    b = dens_bins - 1
                density2[b] += 1
            for i in range(L):
                for j in range(i + 1, L):
                    b = int(abs(_wrap(xi[i] - xi[j])) * pair_scale)
                    if b >= pair_bins:
                        b = pair_bins - 1
                    pair11[b] += 1
            for i in range(M):
                for j in range(i + 1, M):
                    b = int(abs(_wrap(zeta[i] - zeta[j])) * pair_scale)
                    if b >= pair_bins:
                        b = pair_bins - 1
                    pair22[b] += 1
            for i in range(L):
                for j in range(M):
                    b = int(abs(_wrap(xi[i] - zeta[j])) * pair_scale)
                    if b >= pair_bins:
                        b = pair_bins - 1
                    pair12[b] += 1
            _record_spacings(
                xi, spacing1, 0, spacing_overflow, degenerate,
                spacing_scale, sp_binscale, sp_bins,
            )
            _record_spacings(
                zeta, spacing2, 1, spacing_overflow, degenerate,
                spacing_scale, sp_binscale, sp_bins,
            )
            _record_spacings(
                sorted(xi + zeta), spacing_all, 2, spacing_overflow, degenerate,
                spacing_scale, sp_binscale, sp_bins,
            )

        if check_every > 0 and (step + 1) % check_every == 0:
            full = total_energy(xi, zeta)
            drift = abs(full - e)
            if drift > max_drift:
                max_drift = drift
            e = full

    return list(xi), list(zeta), e, recorded, max_drift


def _record_spacings(
    pts, hist, set_index, spacing_overflow, degenerate,
    spacing_scale, sp_binscale, sp_bins,
):
    kk = len(pts)
    if kk < 2:
        degenerate[set_index] += 1
        return
    srt = sorted(pts)
    for i in range(kk):
        if i < kk - 1:
            gap = srt[i + 1] - srt[i]
        else:
            gap = srt[0] + TWO_PI - srt[kk - 1]
        b = int(gap * spacing_scale * sp_binscale)
        if b >= sp_bins:
            spacing_overflow[set_index] += 1
        else:
            hist[b] += 1

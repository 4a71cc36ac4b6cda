"""Pure-Python twins of the compiled kernels; results are bit-identical."""

from __future__ import annotations

import math

import numpy as np


def entropy_bits(counts, n: int) -> float:
    h = 0.0
    dn = float(n)
    for c in counts:
        if c > 0:
            p = int(c) / dn
            h -= p * math.log2(p)
    return h


def _code(v, lo, hi, nb) -> int:
    code = 0
    for x, l, h, n in zip(v, lo, hi, nb):
        b = math.floor((x - l) / (h - l) * n)
        if b < 0:
            b = 0
        elif b > n - 1:
            b = n - 1
        code = code * n + b
    return code


def _clamp(x: float, bound: float) -> float:
    if x < -bound:
        return -bound
    if x > bound:
        return bound
    return x


def train_loop(Q, C, u, arand, targets, centers, lo, hi, nb, step_scale, bound, radius,
               max_steps, eps0, eps_end, eps_steps, alpha, amin, gamma, shaping, shape_gamma, shape_offset,
               S, A, SN, D, SUCC):
    steps = len(u)
    d = centers.shape[1]
    lo, hi, nb = [float(x) for x in lo], [float(x) for x in hi], [int(x) for x in nb]
    cen = centers.tolist()
    tg = targets.tolist()
    ul = u.tolist()
    al_ = arand.tolist()
    rng_d = range(d)
    ti = 0
    p = [0.0] * d
    g = tg[ti]
    obs = [g[i] - p[i] for i in rng_d]
    ti += 1
    k_ep = 0
    for t in range(steps):
        if eps_steps > 0:
            eps = eps0 - (eps0 - eps_end) * t / eps_steps
            if eps < eps_end:
                eps = eps_end
        else:
            eps = eps_end
        s = _code(obs, lo, hi, nb)
        if ul[t] < eps:
            a = al_[t]
        else:
            a = int(np.argmax(Q[s]))
        ca = cen[a]
        obs2 = [0.0] * d
        for i in rng_d:
            p[i] = _clamp(p[i] + step_scale * ca[i], bound)
            obs2[i] = g[i] - p[i]
        dist = 0.0
        dist2 = 0.0
        for i in rng_d:
            dist = dist + obs[i] * obs[i]
            dist2 = dist2 + obs2[i] * obs2[i]
        dist = math.sqrt(dist)
        dist2 = math.sqrt(dist2)
        k_ep += 1
        succ = dist2 < radius
        done = succ or k_ep >= max_steps
        r = -1.0
        sn = _code(obs2, lo, hi, nb)
        tgt = r + shaping * (shape_gamma * (shape_offset - dist2) - (shape_offset - dist))
        if not succ:
            tgt = tgt + gamma * float(Q[sn].max())
        C[s, a] += 1
        al = alpha / int(C[s, a])
        if al < amin:
            al = amin
        q = float(Q[s, a])
        Q[s, a] = q + al * (tgt - q)
        S[t] = obs
        SN[t] = obs2
        A[t] = a
        D[t] = done
        SUCC[t] = succ
        if done:
            k_ep = 0
            p = [0.0] * d
            g = tg[ti]
            obs = [g[i] - p[i] for i in rng_d]
            ti += 1
        else:
            obs = obs2
    return ti


def deploy_loop(Q, targets, centers, lo, hi, nb, step_scale, bound, radius, max_steps,
                channel, sd, onset, noise, rnoise, S, A, SN, ST, SNT, D, SUCC):
    steps = S.shape[0]
    d = centers.shape[1]
    lo, hi, nb = [float(x) for x in lo], [float(x) for x in hi], [int(x) for x in nb]
    cen = centers.tolist()
    tg = targets.tolist()
    nz = noise.tolist()
    rnz = rnoise.tolist()
    greedy = np.argmax(Q, axis=1).tolist()
    rng_d = range(d)
    ti = 0
    p = [0.0] * d
    g = tg[ti]
    tru = [g[i] - p[i] for i in rng_d]
    obs = list(tru)
    ti += 1
    k_ep = 0
    for t in range(steps):
        noisy = t >= onset
        s = _code(obs, lo, hi, nb)
        a = greedy[s]
        ca = cen[a]
        tru2 = [0.0] * d
        for i in rng_d:
            act = ca[i]
            if channel == 2 and noisy:
                act = act + sd * nz[t][i]
            p[i] = _clamp(p[i] + step_scale * act, bound)
            tru2[i] = g[i] - p[i]
        dist2 = 0.0
        for i in rng_d:
            dist2 = dist2 + tru2[i] * tru2[i]
        dist2 = math.sqrt(dist2)
        k_ep += 1
        succ = dist2 < radius
        done = succ or k_ep >= max_steps
        obs2 = list(tru2)
        if channel == 1 and noisy:
            obs2 = [obs2[i] + sd * nz[t][i] for i in rng_d]
        S[t] = obs
        SN[t] = obs2
        ST[t] = tru
        SNT[t] = tru2
        A[t] = a
        D[t] = done
        SUCC[t] = succ
        if done:
            k_ep = 0
            p = [0.0] * d
            g = tg[ti]
            tru = [g[i] - p[i] for i in rng_d]
            obs = list(tru)
            if channel == 1 and noisy:
                obs = [obs[i] + sd * rnz[t][i] for i in rng_d]
            ti += 1
        else:
            obs = obs2
            tru = tru2
    return ti

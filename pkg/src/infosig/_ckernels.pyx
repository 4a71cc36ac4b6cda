# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Arithmetic mirrors _pykernels operation for operation."""

from libc.math cimport floor, log2, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def entropy_bits(const cnp.int64_t[::1] counts, cnp.int64_t n):
    cdef double h = 0.0
    cdef double p
    cdef double dn = <double>n
    cdef Py_ssize_t i
    for i in range(counts.shape[0]):
        if counts[i] > 0:
            p = counts[i] / dn
            h -= p * log2(p)
    return h


cdef inline long _code(double* v, const double[::1] lo, const double[::1] hi,
                       const cnp.int64_t[::1] nb, int d) nogil:
    cdef long code = 0
    cdef long b
    cdef int i
    for i in range(d):
        b = <long>floor((v[i] - lo[i]) / (hi[i] - lo[i]) * nb[i])
        if b < 0:
            b = 0
        elif b > nb[i] - 1:
            b = nb[i] - 1
        code = code * nb[i] + b
    return code


cdef inline long _argmax(double[:, ::1] Q, long s) nogil:
    cdef long j, best = 0
    cdef double m = Q[s, 0]
    for j in range(1, Q.shape[1]):
        if Q[s, j] > m:
            m = Q[s, j]
            best = j
    return best


cdef inline double _clamp(double x, double bound) nogil:
    if x < -bound:
        return -bound
    if x > bound:
        return bound
    return x


def train_loop(double[:, ::1] Q, cnp.int64_t[:, ::1] C, const double[::1] u,
               const cnp.int64_t[::1] arand, const double[:, ::1] targets,
               const double[:, ::1] centers, const double[::1] lo, const double[::1] hi,
               const cnp.int64_t[::1] nb, double step_scale, double bound, double radius,
               long max_steps, double eps0, double eps_end, long eps_steps, double alpha,
               double amin, double gamma, double shaping, double shape_gamma, double shape_offset,
               double[:, ::1] S, cnp.int64_t[::1] A, double[:, ::1] SN,
               cnp.uint8_t[::1] D, cnp.uint8_t[::1] SUCC):
    cdef long steps = u.shape[0]
    cdef int d = centers.shape[1]
    cdef long t, s, a, sn, j, k_ep = 0, ti = 0
    cdef int i
    cdef double eps, dist, dist2, r, tgt, al, m
    cdef bint succ, done
    cdef double p[16]
    cdef double g[16]
    cdef double obs[16]
    cdef double obs2[16]
    if d > 16:
        raise ValueError("at most 16 dimensions supported")
    for i in range(d):
        p[i] = 0.0
        g[i] = targets[ti, i]
        obs[i] = g[i] - p[i]
    ti += 1
    with nogil:
        for t in range(steps):
            if eps_steps > 0:
                eps = eps0 - (eps0 - eps_end) * t / eps_steps
                if eps < eps_end:
                    eps = eps_end
            else:
                eps = eps_end
            s = _code(obs, lo, hi, nb, d)
            if u[t] < eps:
                a = arand[t]
            else:
                a = _argmax(Q, s)
            for i in range(d):
                p[i] = _clamp(p[i] + step_scale * centers[a, i], bound)
                obs2[i] = g[i] - p[i]
            dist = 0.0
            dist2 = 0.0
            for i in range(d):
                dist = dist + obs[i] * obs[i]
                dist2 = dist2 + obs2[i] * obs2[i]
            dist = sqrt(dist)
            dist2 = sqrt(dist2)
            k_ep += 1
            succ = dist2 < radius
            done = succ or k_ep >= max_steps
            r = -1.0
            sn = _code(obs2, lo, hi, nb, d)
            tgt = r + shaping * (shape_gamma * (shape_offset - dist2) - (shape_offset - dist))
            if not succ:
                m = Q[sn, 0]
                for j in range(1, Q.shape[1]):
                    if Q[sn, j] > m:
                        m = Q[sn, j]
                tgt = tgt + gamma * m
            C[s, a] += 1
            al = alpha / C[s, a]
            if al < amin:
                al = amin
            Q[s, a] = Q[s, a] + al * (tgt - Q[s, a])
            for i in range(d):
                S[t, i] = obs[i]
                SN[t, i] = obs2[i]
            A[t] = a
            D[t] = done
            SUCC[t] = succ
            if done:
                k_ep = 0
                for i in range(d):
                    p[i] = 0.0
                    g[i] = targets[ti, i]
                    obs[i] = g[i] - p[i]
                ti += 1
            else:
                for i in range(d):
                    obs[i] = obs2[i]
    return ti


def deploy_loop(double[:, ::1] Q, const double[:, ::1] targets, const double[:, ::1] centers,
                const double[::1] lo, const double[::1] hi, const cnp.int64_t[::1] nb,
                double step_scale, double bound, double radius, long max_steps,
                int channel, double sd, long onset, const double[:, ::1] noise,
                const double[:, ::1] rnoise,
                double[:, ::1] S, cnp.int64_t[::1] A, double[:, ::1] SN,
                double[:, ::1] ST, double[:, ::1] SNT,
                cnp.uint8_t[::1] D, cnp.uint8_t[::1] SUCC):
    cdef long steps = S.shape[0]
    cdef int d = centers.shape[1]
    cdef long t, s, a, k_ep = 0, ti = 0
    cdef int i
    cdef double dist2, act
    cdef bint succ, done, noisy
    cdef double p[16]
    cdef double g[16]
    cdef double obs[16]
    cdef double tru[16]
    cdef double obs2[16]
    cdef double tru2[16]
    if d > 16:
        raise ValueError("at most 16 dimensions supported")
    for i in range(d):
        p[i] = 0.0
        g[i] = targets[ti, i]
        tru[i] = g[i] - p[i]
        obs[i] = tru[i]
    ti += 1
    with nogil:
        for t in range(steps):
            noisy = t >= onset
            s = _code(obs, lo, hi, nb, d)
            a = _argmax(Q, s)
            for i in range(d):
                act = centers[a, i]
                if channel == 2 and noisy:
                    act = act + sd * noise[t, i]
                p[i] = _clamp(p[i] + step_scale * act, bound)
                tru2[i] = g[i] - p[i]
            dist2 = 0.0
            for i in range(d):
                dist2 = dist2 + tru2[i] * tru2[i]
            dist2 = sqrt(dist2)
            k_ep += 1
            succ = dist2 < radius
            done = succ or k_ep >= max_steps
            for i in range(d):
                obs2[i] = tru2[i]
                if channel == 1 and noisy:
                    obs2[i] = obs2[i] + sd * noise[t, i]
                S[t, i] = obs[i]
                SN[t, i] = obs2[i]
                ST[t, i] = tru[i]
                SNT[t, i] = tru2[i]
            A[t] = a
            D[t] = done
            SUCC[t] = succ
            if done:
                k_ep = 0
                for i in range(d):
                    p[i] = 0.0
                    g[i] = targets[ti, i]
                    tru[i] = g[i] - p[i]
                    obs[i] = tru[i]
                    if channel == 1 and noisy:
                        obs[i] = obs[i] + sd * rnoise[t, i]
                ti += 1
            else:
                for i in range(d):
                    obs[i] = obs2[i]
                    tru[i] = tru2[i]
    return ti

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Airy evaluation and the bridge-refined path sampler."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, sin, cos, log, fma, fabs, rint, INFINITY
from libc.stdint cimport uint64_t

from . import _tables as T

cnp.import_array()

cdef int NT = T.TABLE_SIZE
cdef int NC = T.N_COEFFS
cdef int TAYLOR = T.TAYLOR_TERMS
cdef double X0 = T.TABLE_START
cdef double STEP = T.TABLE_STEP
cdef double NEG_LIM = T.NEG_ASYMPTOTIC
cdef double POS_LIM = T.POS_ASYMPTOTIC
cdef double INV_ROOT_PI = 1.0 / sqrt(3.141592653589793)
cdef double TWO_PI_HI = T.TWO_PI_HI
cdef double TWO_PI_LO = T.TWO_PI_LO
cdef double QP_HI = T.QUARTER_PI_HI
cdef double QP_LO = T.QUARTER_PI_LO
cdef double TT_HI = T.TWO_THIRDS_HI
cdef double TT_LO = T.TWO_THIRDS_LO

cdef double NODE_AI[128]
cdef double NODE_AIP[128]
cdef double NODE_BI[128]
cdef double NODE_BIP[128]
cdef double UC[64]
cdef double VC[64]

for _j in range(NT):
    NODE_AI[_j] = T.NODE_AI[_j]
    NODE_AIP[_j] = T.NODE_AIP[_j]
    NODE_BI[_j] = T.NODE_BI[_j]
    NODE_BIP[_j] = T.NODE_BIP[_j]
for _j in range(NC):
    UC[_j] = T.U_COEFFS[_j]
    VC[_j] = T.V_COEFFS[_j]

cdef double ZX[129]
cdef double ZRATIO[128]
cdef double ZR = T.ZIG_R
for _j in range(T.ZIG_LAYERS + 1):
    ZX[_j] = T.ZIG_X[_j]
for _j in range(T.ZIG_LAYERS):
    ZRATIO[_j] = T.ZIG_RATIO[_j]


cdef inline void _taylor(double x0, double d, double y, double yp,
                         double* val, double* der) noexcept nogil:
    cdef double c[40]
    cdef int n
    c[0] = y
    c[1] = yp
    for n in range(TAYLOR - 2):
        c[n + 2] = (x0 * c[n] + (c[n - 1] if n >= 1 else 0.0)) / ((n + 2) * (n + 1))
    cdef double v = 0.0, w = 0.0
    for n in range(TAYLOR - 1, 0, -1):
        v = v * d + c[n]
        w = w * d + n * c[n]
    val[0] = v * d + c[0]
    der[0] = w


cdef inline void _two_prod(double a, double b, double* p, double* e) noexcept nogil:
    p[0] = a * b
    e[0] = fma(a, b, -p[0])


cdef inline void _two_sum(double a, double b, double* s, double* e) noexcept nogil:
    s[0] = a + b
    cdef double bb = s[0] - a
    e[0] = (a - (s[0] - bb)) + (b - bb)


cdef inline void _negative(double y, double* ai, double* aip,
                           double* bi, double* bip) noexcept nogil:
    cdef double s = sqrt(y), p, e, s_lo, m_hi, m_lo, z_hi, z_lo, t
    cdef double a_hi, a_lo, n, q_hi, q_lo, r_hi, r_lo, c, sn, ca, sa
    _two_prod(s, s, &p, &e)
    s_lo = ((y - p) - e) / (2.0 * s)
    _two_prod(y, s, &m_hi, &m_lo)
    m_lo = m_lo + y * s_lo
    _two_prod(TT_HI, m_hi, &z_hi, &z_lo)
    z_lo = z_lo + (TT_HI * m_lo + TT_LO * m_hi)
    t = z_hi + z_lo
    z_lo = z_lo - (t - z_hi)
    z_hi = t
    _two_sum(z_hi, -QP_HI, &a_hi, &a_lo)
    a_lo = a_lo + (z_lo - QP_LO)
    n = rint(a_hi / TWO_PI_HI)
    _two_prod(n, TWO_PI_HI, &q_hi, &q_lo)
    q_lo = q_lo + n * TWO_PI_LO
    _two_sum(a_hi, -q_hi, &r_hi, &r_lo)
    r_lo = r_lo + (a_lo - q_lo)
    t = r_hi + r_lo
    r_lo = r_lo - (t - r_hi)
    r_hi = t
    c = cos(r_hi)
    sn = sin(r_hi)
    ca = c - sn * r_lo
    sa = sn + c * r_lo

    cdef double inv = 1.0 / z_hi, inv2 = -inv * inv, pw = 1.0
    cdef double P = 0.0, Q = 0.0, R = 0.0, S = 0.0
    cdef int k
    for k in range(NC // 2 - 1):
        P += UC[2 * k] * pw
        R += VC[2 * k] * pw
        Q += UC[2 * k + 1] * pw * inv
        S += VC[2 * k + 1] * pw * inv
        pw = pw * inv2
        if fabs(pw) * UC[2 * k + 2] < 1e-18:
            break
    cdef double q = sqrt(sqrt(y))
    cdef double A = INV_ROOT_PI / q, B = INV_ROOT_PI * q
    ai[0] = A * (ca * P + sa * Q)
    bi[0] = A * (ca * Q - sa * P)
    aip[0] = B * (sa * R - ca * S)
    bip[0] = B * (ca * R + sa * S)


cdef inline void _positive_scaled(double x, double* ai, double* aip,
                                  double* bi, double* bip, double* zeta) noexcept nogil:
    cdef double z = 2.0 / 3.0 * x * sqrt(x)
    cdef double inv = 1.0 / z, pw = 1.0, prev = INFINITY, t, tv, mag, sign
    cdef double sa = 0.0, sb = 0.0, sap = 0.0, sbp = 0.0
    cdef int k
    for k in range(NC):
        t = UC[k] * pw
        tv = VC[k] * pw
        mag = t if t > fabs(tv) else fabs(tv)
        if mag > prev:
            break
        sign = -1.0 if k % 2 else 1.0
        sa = sa + sign * t
        sb = sb + t
        sap = sap + sign * tv
        sbp = sbp + tv
        if mag < 1e-18:
            break
        prev = mag
        pw = pw * inv
    cdef double q = sqrt(sqrt(x))
    ai[0] = 0.5 * INV_ROOT_PI / q * sa
    aip[0] = -0.5 * INV_ROOT_PI * q * sap
    bi[0] = INV_ROOT_PI / q * sb
    bip[0] = INV_ROOT_PI * q * sbp
    zeta[0] = z


cdef inline void _airy_one(double x, bint scaled, double* ai, double* aip,
                           double* bi, double* bip) noexcept nogil:
    cdef double zeta, up, down, x0, d, r
    cdef int j
    if x <= NEG_LIM:
        _negative(-x, ai, aip, bi, bip)
    elif x >= POS_LIM:
        _positive_scaled(x, ai, aip, bi, bip, &zeta)
        if not scaled:
            down = exp(-zeta)
            up = exp(zeta)
            ai[0] = ai[0] * down
            aip[0] = aip[0] * down
            bi[0] = bi[0] * up
            bip[0] = bip[0] * up
    else:
        r = rint((x - X0) / STEP)
        if r < 0:
            r = 0
        if r > NT - 1:
            r = NT - 1
        j = <int>r
        x0 = X0 + STEP * j
        d = x - x0
        _taylor(x0, d, NODE_AI[j], NODE_AIP[j], ai, aip)
        _taylor(x0, d, NODE_BI[j], NODE_BIP[j], bi, bip)
        if scaled:
            zeta = 2.0 / 3.0 * x * sqrt(x)
            up = exp(zeta)
            down = exp(-zeta)
            ai[0] = ai[0] * up
            aip[0] = aip[0] * up
            bi[0] = bi[0] * down
            bip[0] = bip[0] * down


def airy_kernel(x, bint scaled=False):
    """Return (Ai, Ai', Bi, Bi') at every point of the 1-D float array x."""
    xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] xv = xs
    cdef Py_ssize_t n = xv.shape[0], i
    cdef cnp.ndarray[double, ndim=1] ai = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] aip = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] bi = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] bip = np.empty(n)
    cdef double[::1] a = ai, ap = aip, b = bi, bp = bip
    with nogil:
        for i in range(n):
            _airy_one(xv[i], scaled, &a[i], &ap[i], &b[i], &bp[i])
    return ai, aip, bi, bip


# ---------------------------------------------------------------- sampler

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t counter) noexcept nogil:
    # in (0, 1]
    return (<double>((_mix(key + (counter + 1) * GOLDEN) >> 11) + 1)) * 1.1102230246251565e-16


cdef struct Normals:
    uint64_t key
    uint64_t counter
    double sign


cdef inline double _next_uniform(Normals* g) noexcept nogil:
    cdef double u = _uniform(g.key, g.counter)
    g.counter += 1
    return u


cdef inline double _normal(Normals* g) noexcept nogil:
    # ziggurat: low 7 bits pick the layer, the top 53 bits the abscissa
    cdef uint64_t r
    cdef int i
    cdef double u, x, f0, f1, a, b
    while True:
        r = _mix(g.key + (g.counter + 1) * GOLDEN)
        g.counter += 1
        i = <int>(r & 127)
        u = 2.0 * (<double>(r >> 11)) * 1.1102230246251565e-16 - 1.0
        if fabs(u) < ZRATIO[i]:
            return g.sign * (u * ZX[i])
        if i == 0:
            # base strip beyond R: exponential rejection from the tail
            while True:
                a = -log(_next_uniform(g)) / ZR
                b = -log(_next_uniform(g))
                if b + b > a * a:
                    break
            return g.sign * (ZR + a if u > 0.0 else -ZR - a)
        x = u * ZX[i]
        f0 = exp(-0.5 * (ZX[i] * ZX[i] - x * x))
        f1 = exp(-0.5 * (ZX[i + 1] * ZX[i + 1] - x * x))
        if f1 + _next_uniform(g) * (f0 - f1) < 1.0:
            return g.sign * x


cdef void _one_path(uint64_t key, uint64_t path, long n, double h, double gamma,
                    long coarsen, double prune, bint antithetic, double* out) noexcept nogil:
    cdef Normals g
    g.key = key
    g.counter = path << 32
    g.sign = 1.0
    if antithetic and path & 1:
        # odd paths replay the previous path's normals with the sign flipped
        g.counter = (path - 1) << 32
        g.sign = -1.0
    cdef long si[128]
    cdef long sj[128]
    cdef double swi[128]
    cdef double swj[128]
    cdef int top = 0
    cdef long i, j, m
    cdef double wi, wj, wm, xi, xj, xm, L, slack, A, B, thr, ti, tj, tm, var, mean, cm
    cdef double tot = n * h
    cdef double wn = sqrt(tot) * _normal(&g)
    cdef double xn = wn - gamma * tot * tot
    cdef double best_f = xn if xn > 0.0 else 0.0
    # coarsen is a power of two: index tests use a shift and a mask
    cdef long mask = coarsen - 1
    cdef int shift = 0
    while (1L << shift) < coarsen:
        shift += 1
    cdef double best_c = best_f if (n & mask) == 0 else 0.0
    cdef double best_m = best_f
    si[0] = 0
    sj[0] = n
    swi[0] = 0.0
    swj[0] = wn
    top = 1
    while top > 0:
        top -= 1
        i = si[top]
        j = sj[top]
        wi = swi[top]
        wj = swj[top]
        ti = i * h
        tj = j * h
        xi = wi - gamma * ti * ti
        xj = wj - gamma * tj * tj
        L = tj - ti
        slack = 0.25 * gamma * L * L
        A = xi + slack
        B = xj + slack
        # coarse grid points strictly inside need the smaller threshold
        if (((i >> shift) + 1) << shift) < j:
            thr = best_c
        else:
            thr = best_f
        if thr > A and thr > B and 2.0 * (thr - A) * (thr - B) > prune * L:
            continue
        if j - i == 1:
            cm = 0.5 * (xi + xj + sqrt((xj - xi) * (xj - xi) - 2.0 * L * log(_next_uniform(&g))))
            if cm > best_m:
                best_m = cm
            continue
        m = (i + j) // 2
        tm = m * h
        var = (tm - ti) * (tj - tm) / L
        mean = wi + (wj - wi) * (tm - ti) / L
        wm = mean + sqrt(var) * _normal(&g)
        xm = wm - gamma * tm * tm
        if xm > best_f:
            best_f = xm
        if (m & mask) == 0 and xm > best_c:
            best_c = xm
        if xm > best_m:
            best_m = xm
        # explore the half with the higher endpoint first
        if xi > xj:
            si[top] = m; sj[top] = j; swi[top] = wm; swj[top] = wj
            si[top + 1] = i; sj[top + 1] = m; swi[top + 1] = wi; swj[top + 1] = wm
        else:
            si[top] = i; sj[top] = m; swi[top] = wi; swj[top] = wm
            si[top + 1] = m; sj[top + 1] = j; swi[top + 1] = wm; swj[top + 1] = wj
        top += 2
    out[0] = best_f
    out[1] = best_c
    out[2] = best_m


def sample_paths(uint64_t key, uint64_t first_path, Py_ssize_t count, long steps,
                 double h, double gamma, long coarsen, double prune, bint antithetic=False):
    """Simulate ``count`` paths; returns an array (count, 3) of
    (fine-grid max, coarse-grid max, continuous max)."""
    if coarsen < 1 or coarsen & (coarsen - 1):
        raise ValueError("coarsen must be a power of two")
    if steps < 1:
        raise ValueError("steps must be positive")
    cdef cnp.ndarray[double, ndim=2] res = np.empty((count, 3))
    cdef double[:, ::1] rv = res
    cdef Py_ssize_t p
    with nogil:
        for p in range(count):
            _one_path(key, first_path + p, steps, h, gamma, coarsen, prune, antithetic, &rv[p, 0])
    return res


def uniform_stream(uint64_t key, uint64_t first, Py_ssize_t count):
    """Raw uniforms of the counter generator (used to test backend parity)."""
    cdef cnp.ndarray[double, ndim=1] res = np.empty(count)
    cdef Py_ssize_t i
    for i in range(count):
        res[i] = _uniform(key, first + i)
    return res


def normal_stream(uint64_t key, uint64_t path, Py_ssize_t count):
    """Standard normals exactly as drawn along one path's counter range."""
    cdef cnp.ndarray[double, ndim=1] res = np.empty(count)
    cdef Normals g
    g.key = key
    g.counter = path << 32
    g.sign = 1.0
    cdef Py_ssize_t i
    for i in range(count):
        res[i] = _normal(&g)
    return res

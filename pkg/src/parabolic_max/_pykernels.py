"""Pure numpy implementation of the hot kernels.

Mirrors ``_kernels.pyx`` operation for operation so that both backends agree
to rounding; it is selected automatically when the extension is unavailable.
"""

import math

import numpy as np

from . import _tables as T

_NODES = np.array([T.NODE_AI, T.NODE_AIP, T.NODE_BI, T.NODE_BIP])
_U = np.array(T.U_COEFFS)
_V = np.array(T.V_COEFFS)
_SPLITTER = 134217729.0
_INV_ROOT_PI = 1.0 / math.sqrt(math.pi)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def reduced_phase(y):
    """Return (zeta, cos(zeta - pi/4), sin(zeta - pi/4)) for y > 0.

    zeta = (2/3) y^(3/2) is formed in double-double so the trigonometric
    values stay accurate to rounding even when zeta ~ 1e6.
    """
    y = np.asarray(y, dtype=float)
    s = np.sqrt(y)
    p, e = _two_prod(s, s)
    s_lo = ((y - p) - e) / (2.0 * s)
    m_hi, m_lo = _two_prod(y, s)
    m_lo = m_lo + y * s_lo
    z_hi, z_lo = _two_prod(T.TWO_THIRDS_HI, m_hi)
    z_lo = z_lo + (T.TWO_THIRDS_HI * m_lo + T.TWO_THIRDS_LO * m_hi)
    z_hi, z_lo = _fast_two_sum(z_hi, z_lo)
    a_hi, a_lo = _two_sum(z_hi, -T.QUARTER_PI_HI)
    a_lo = a_lo + (z_lo - T.QUARTER_PI_LO)
    n = np.rint(a_hi / T.TWO_PI_HI)
    q_hi, q_lo = _two_prod(n, T.TWO_PI_HI)
    q_lo = q_lo + n * T.TWO_PI_LO
    r_hi, r_lo = _two_sum(a_hi, -q_hi)
    r_lo = r_lo + (a_lo - q_lo)
    r_hi, r_lo = _fast_two_sum(r_hi, r_lo)
    c = np.cos(r_hi)
    sn = np.sin(r_hi)
    return z_hi, c - sn * r_lo, sn + c * r_lo


def oscillatory_series(zeta):
    """Auxiliary sums (P, Q, R, S) of the negative-axis asymptotics.

    P, Q use the u-coefficients (even/odd orders with alternating signs),
    R, S the v-coefficients; valid for zeta >~ 20 where the terms fall
    below 1e-17 well before the series starts to diverge.
    """
    zeta = np.asarray(zeta, dtype=float)
    inv = 1.0 / zeta
    inv2 = -inv * inv
    P = np.zeros_like(zeta)
    Q = np.zeros_like(zeta)
    R = np.zeros_like(zeta)
    S = np.zeros_like(zeta)
    pw = np.ones_like(zeta)
    active = np.ones(zeta.shape, dtype=bool)
    for k in range(T.N_COEFFS // 2 - 1):
        # per-element stopping keeps each result independent of its batch
        w = np.where(active, pw, 0.0)
        P = P + _U[2 * k] * w
        R = R + _V[2 * k] * w
        Q = Q + _U[2 * k + 1] * w * inv
        S = S + _V[2 * k + 1] * w * inv
        pw = pw * inv2
        active &= np.abs(pw) * _U[2 * k + 2] >= 1e-18
        if not active.any():
            break
    return P, Q, R, S


def _negative(y):
    zeta, ca, sa = reduced_phase(y)
    P, Q, R, S = oscillatory_series(zeta)
    q = np.sqrt(np.sqrt(y))
    A = _INV_ROOT_PI / q
    B = _INV_ROOT_PI * q
    ai = A * (ca * P + sa * Q)
    bi = A * (ca * Q - sa * P)
    aip = B * (sa * R - ca * S)
    bip = B * (ca * R + sa * S)
    return ai, aip, bi, bip


def _positive_scaled(x):
    zeta = 2.0 / 3.0 * x * np.sqrt(x)
    inv = 1.0 / zeta
    sa = np.zeros_like(x)
    sb = np.zeros_like(x)
    sap = np.zeros_like(x)
    sbp = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    prev = np.full(x.shape, np.inf)
    pw = np.ones_like(x)
    for k in range(T.N_COEFFS):
        t = _U[k] * pw
        tv = _V[k] * pw
        mag = np.maximum(t, np.abs(tv))
        active &= mag <= prev
        if not active.any():
            break
        sign = -1.0 if k % 2 else 1.0
        sa = np.where(active, sa + sign * t, sa)
        sb = np.where(active, sb + t, sb)
        sap = np.where(active, sap + sign * tv, sap)
        sbp = np.where(active, sbp + tv, sbp)
        active &= mag >= 1e-18
        prev = mag
        pw = pw * inv
    q = np.sqrt(np.sqrt(x))
    return (
        0.5 * _INV_ROOT_PI / q * sa,
        -0.5 * _INV_ROOT_PI * q * sap,
        _INV_ROOT_PI / q * sb,
        _INV_ROOT_PI * q * sbp,
    ), zeta


def _table(x):
    j = np.clip(np.rint((x - T.TABLE_START) / T.TABLE_STEP), 0, T.TABLE_SIZE - 1).astype(np.intp)
    x0 = T.TABLE_START + T.TABLE_STEP * j
    d = x - x0
    out = []
    for f in (0, 2):
        c = [_NODES[f][j], _NODES[f + 1][j]]
        for n in range(T.TAYLOR_TERMS - 2):
            prev = c[n - 1] if n >= 1 else 0.0
            c.append((x0 * c[n] + prev) / ((n + 2) * (n + 1)))
        val = np.zeros_like(x)
        der = np.zeros_like(x)
        for n in range(len(c) - 1, 0, -1):
            val = val * d + c[n]
            der = der * d + n * c[n]
        out.append(val * d + c[0])
        out.append(der)
    return out


def airy_kernel(x, scaled=False):
    """Return (Ai, Ai', Bi, Bi') at every point of the 1-D float array x.

    With ``scaled`` the caller guarantees x >= 0 and receives Ai, Ai'
    multiplied by exp(zeta) and Bi, Bi' multiplied by exp(-zeta).
    """
    x = np.ascontiguousarray(x, dtype=float)
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    bi = np.empty_like(x)
    bip = np.empty_like(x)
    neg = x <= T.NEG_ASYMPTOTIC
    pos = x >= T.POS_ASYMPTOTIC
    mid = ~(neg | pos)
    if neg.any():
        ai[neg], aip[neg], bi[neg], bip[neg] = _negative(-x[neg])
    if mid.any():
        xm = x[mid]
        vals = _table(xm)
        if scaled:
            zeta = 2.0 / 3.0 * xm * np.sqrt(xm)
            up = np.exp(zeta)
            down = np.exp(-zeta)
            vals = [vals[0] * up, vals[1] * up, vals[2] * down, vals[3] * down]
        ai[mid], aip[mid], bi[mid], bip[mid] = vals
    if pos.any():
        vals, zeta = _positive_scaled(x[pos])
        if not scaled:
            down = np.exp(-zeta)
            up = np.exp(zeta)
            vals = (vals[0] * down, vals[1] * down, vals[2] * up, vals[3] * up)
        ai[pos], aip[pos], bi[pos], bip[pos] = vals
    return ai, aip, bi, bip


# ------------------------------------------------------------ path sampler

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_ULP53 = 1.1102230246251565e-16
_ZX = list(T.ZIG_X)
_ZRATIO = list(T.ZIG_RATIO)
_ZR = T.ZIG_R


def _mix(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def _uniform(key, counter):
    return float((_mix((key + (counter + 1) * _GOLDEN) & _M64) >> 11) + 1) * _ULP53


class _Normals:
    __slots__ = ("key", "counter", "sign")

    def __init__(self, key, path, sign=1.0):
        self.key = key
        self.counter = (path << 32) & _M64
        self.sign = sign

    def uniform(self):
        u = _uniform(self.key, self.counter)
        self.counter += 1
        return u

    def normal(self):
        while True:
            r = _mix((self.key + (self.counter + 1) * _GOLDEN) & _M64)
            self.counter += 1
            i = r & 127
            u = 2.0 * float(r >> 11) * _ULP53 - 1.0
            if abs(u) < _ZRATIO[i]:
                return self.sign * (u * _ZX[i])
            if i == 0:
                while True:
                    a = -math.log(self.uniform()) / _ZR
                    b = -math.log(self.uniform())
                    if b + b > a * a:
                        break
                return self.sign * (_ZR + a if u > 0.0 else -_ZR - a)
            x = u * _ZX[i]
            f0 = math.exp(-0.5 * (_ZX[i] * _ZX[i] - x * x))
            f1 = math.exp(-0.5 * (_ZX[i + 1] * _ZX[i + 1] - x * x))
            if f1 + self.uniform() * (f0 - f1) < 1.0:
                return self.sign * x


def _one_path(key, path, n, h, gamma, coarsen, prune, antithetic=False):
    if antithetic and path & 1:
        g = _Normals(key, path - 1, -1.0)
    else:
        g = _Normals(key, path)
    tot = n * h
    wn = math.sqrt(tot) * g.normal()
    xn = wn - gamma * tot * tot
    best_f = xn if xn > 0.0 else 0.0
    mask = coarsen - 1
    shift = coarsen.bit_length() - 1
    best_c = best_f if (n & mask) == 0 else 0.0
    best_m = best_f
    stack = [(0, n, 0.0, wn)]
    while stack:
        i, j, wi, wj = stack.pop()
        ti = i * h
        tj = j * h
        xi = wi - gamma * ti * ti
        xj = wj - gamma * tj * tj
        L = tj - ti
        slack = 0.25 * gamma * L * L
        A = xi + slack
        B = xj + slack
        thr = best_c if (((i >> shift) + 1) << shift) < j else best_f
        if thr > A and thr > B and 2.0 * (thr - A) * (thr - B) > prune * L:
            continue
        if j - i == 1:
            cm = 0.5 * (xi + xj + math.sqrt((xj - xi) * (xj - xi) - 2.0 * L * math.log(g.uniform())))
            if cm > best_m:
                best_m = cm
            continue
        m = (i + j) // 2
        tm = m * h
        var = (tm - ti) * (tj - tm) / L
        mean = wi + (wj - wi) * (tm - ti) / L
        wm = mean + math.sqrt(var) * g.normal()
        xm = wm - gamma * tm * tm
        if xm > best_f:
            best_f = xm
        if (m & mask) == 0 and xm > best_c:
            best_c = xm
        if xm > best_m:
            best_m = xm
        # the pushed-last half is explored first: the one with the higher endpoint
        if xi > xj:
            stack.append((m, j, wm, wj))
            stack.append((i, m, wi, wm))
        else:
            stack.append((i, m, wi, wm))
            stack.append((m, j, wm, wj))
    return best_f, best_c, best_m


def sample_paths(key, first_path, count, steps, h, gamma, coarsen, prune, antithetic=False):
    """Simulate ``count`` paths; returns an array (count, 3) of
    (fine-grid max, coarse-grid max, continuous max)."""
    if coarsen < 1 or coarsen & (coarsen - 1):
        raise ValueError("coarsen must be a power of two")
    if steps < 1:
        raise ValueError("steps must be positive")
    out = np.empty((count, 3))
    for p in range(count):
        out[p] = _one_path(key, first_path + p, steps, h, gamma, coarsen, prune, antithetic)
    return out


def uniform_stream(key, first, count):
    return np.array([_uniform(key, first + i) for i in range(count)])


def normal_stream(key, path, count):
    g = _Normals(key, path)
    return np.array([g.normal() for _ in range(count)])

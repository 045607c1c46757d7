"""Constants and the Airy node table shared by the compiled and Python kernels.

Values of Ai, Ai', Bi, Bi' are tabulated on an equispaced grid; between
nodes the kernels evaluate a local Taylor expansion driven by y'' = x y.
The table itself is built once at import:

* nodes at x <= 0 are reached by Taylor steps from the closed forms at 0;
* Ai at x > 0 is integrated backwards from x = 12, seeded by the decaying
  asymptotic series (forward integration of the recessive solution loses
  all accuracy);
* Bi at x > 0 comes from the Maclaurin series, which has no cancellation
  for positive argument.
"""

import math

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
BI0 = 3.0 ** (-1.0 / 6.0) / math.gamma(2.0 / 3.0)
BIP0 = 3.0 ** (1.0 / 6.0) / math.gamma(1.0 / 3.0)

TABLE_START = -10.25
TABLE_STEP = 0.25
TABLE_SIZE = 79
# evaluation regimes: x <= NEG_ASYMPTOTIC uses modulus-phase forms,
# x >= POS_ASYMPTOTIC the exponential asymptotic series, table in between
NEG_ASYMPTOTIC = -10.25
POS_ASYMPTOTIC = 9.0
TAYLOR_TERMS = 26
N_COEFFS = 64


def _asymptotic_coefficients(n):
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, n)]
    return u, v


U_COEFFS, V_COEFFS = _asymptotic_coefficients(N_COEFFS)


def _taylor_step(x0, y, yp, d, terms=40):
    c = [y, yp]
    for n in range(terms - 2):
        prev = c[n - 1] if n >= 1 else 0.0
        c.append((x0 * c[n] + prev) / ((n + 2) * (n + 1)))
    val = 0.0
    der = 0.0
    for n in range(len(c) - 1, 0, -1):
        val = val * d + c[n]
        der = der * d + n * c[n]
    return val * d + c[0], der


def _decaying_series(x):
    zeta = 2.0 / 3.0 * x**1.5
    sa = sap = 0.0
    prev = math.inf
    for k in range(N_COEFFS):
        t = U_COEFFS[k] / zeta**k
        tv = abs(V_COEFFS[k]) / zeta**k
        if max(t, tv) > prev:
            break
        sign = -1.0 if k % 2 else 1.0
        sa += sign * t
        sap += sign * V_COEFFS[k] / zeta**k
        prev = max(t, tv)
        if prev < 1e-18:
            break
    q = x**0.25
    root_pi = math.sqrt(math.pi)
    e = math.exp(-zeta)
    return e / (2 * root_pi * q) * sa, -q * e / (2 * root_pi) * sap


def _maclaurin_bi(x):
    # f, g are the standard even/odd-type Airy Maclaurin solutions
    tf, tg = 1.0, x
    f, g, fp, gp = 1.0, x, 0.0, 1.0
    x3 = x**3
    k = 1
    while True:
        fp += tf * x * x / (3 * k - 1)
        gp += tg * x * x / (3 * k)
        tf *= x3 / ((3 * k - 1) * (3 * k))
        tg *= x3 / ((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        if k > 3 and tf < 1e-18 * f and tg < 1e-18 * g:
            break
        k += 1
    c1, c2 = AI0, -AIP0
    r3 = math.sqrt(3.0)
    return r3 * (c1 * f + c2 * g), r3 * (c1 * fp + c2 * gp)


def build_table():
    """Return four lists (Ai, Ai', Bi, Bi') at the grid nodes."""
    xs = [TABLE_START + TABLE_STEP * j for j in range(TABLE_SIZE)]
    zero_index = xs.index(0.0)
    ai = [0.0] * TABLE_SIZE
    aip = [0.0] * TABLE_SIZE
    bi = [0.0] * TABLE_SIZE
    bip = [0.0] * TABLE_SIZE
    ai[zero_index], aip[zero_index] = AI0, AIP0
    bi[zero_index], bip[zero_index] = BI0, BIP0
    ya, yap, yb, ybp = AI0, AIP0, BI0, BIP0
    for j in range(zero_index - 1, -1, -1):
        x0 = xs[j + 1]
        ya, yap = _taylor_step(x0, ya, yap, -TABLE_STEP)
        yb, ybp = _taylor_step(x0, yb, ybp, -TABLE_STEP)
        ai[j], aip[j], bi[j], bip[j] = ya, yap, yb, ybp
    x0 = 12.0
    ya, yap = _decaying_series(x0)
    while x0 > TABLE_STEP / 2:
        ya, yap = _taylor_step(x0, ya, yap, -TABLE_STEP)
        x0 -= TABLE_STEP
        j = round((x0 - TABLE_START) / TABLE_STEP)
        if 0 < x0 and j < TABLE_SIZE:
            ai[j], aip[j] = ya, yap
    for j in range(zero_index + 1, TABLE_SIZE):
        bi[j], bip[j] = _maclaurin_bi(xs[j])
    return ai, aip, bi, bip


NODE_AI, NODE_AIP, NODE_BI, NODE_BIP = build_table()

# double-double constants for phase reduction
TWO_PI_HI = 6.283185307179586
TWO_PI_LO = 2.4492935982947064e-16
QUARTER_PI_HI = 0.7853981633974483
QUARTER_PI_LO = 3.061616997868383e-17
TWO_THIRDS_HI = 0.6666666666666666
TWO_THIRDS_LO = 3.700743415417188e-17

# 128-layer ziggurat for standard normals: layer edges ZIG_X[0..128] with
# ZIG_X[1] = ZIG_R the base-strip edge and ZIG_X[128] = 0
ZIG_LAYERS = 128
ZIG_R = 3.442619855899
ZIG_V = 9.91256303526217e-3


def _ziggurat_edges():
    x = [0.0] * (ZIG_LAYERS + 1)
    x[0] = ZIG_V / math.exp(-0.5 * ZIG_R * ZIG_R)
    x[1] = ZIG_R
    for i in range(2, ZIG_LAYERS):
        x[i] = math.sqrt(-2.0 * math.log(ZIG_V / x[i - 1] + math.exp(-0.5 * x[i - 1] ** 2)))
    x[ZIG_LAYERS] = 0.0
    return x


ZIG_X = _ziggurat_edges()
ZIG_RATIO = [ZIG_X[i + 1] / ZIG_X[i] for i in range(ZIG_LAYERS)]

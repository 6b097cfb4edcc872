"""Pure-Python versions of the compiled kernels in ``_core.pyx``.

Same sweep order and the same floating-point operation order, so both
backends produce identical results. Only practical for small grids.
"""

import numpy as np


def residual_9pt(c, b, p):
    nx, ny = p.shape
    rmax = 0.0
    for i in range(nx):
        for j in range(ny):
            s = b[i, j] - c[4, i, j] * p[i, j]
            if i > 0:
                s -= c[1, i, j] * p[i - 1, j]
                if j > 0:
                    s -= c[0, i, j] * p[i - 1, j - 1]
                if j < ny - 1:
                    s -= c[2, i, j] * p[i - 1, j + 1]
            if j > 0:
                s -= c[3, i, j] * p[i, j - 1]
            if j < ny - 1:
                s -= c[5, i, j] * p[i, j + 1]
            if i < nx - 1:
                s -= c[7, i, j] * p[i + 1, j]
                if j > 0:
                    s -= c[6, i, j] * p[i + 1, j - 1]
                if j < ny - 1:
                    s -= c[8, i, j] * p[i + 1, j + 1]
            if abs(s) > rmax:
                rmax = abs(s)
    return float(rmax)


def gauss_seidel_9pt(c, b, p, omega, tol, max_iter):
    nx, ny = p.shape
    # plain floats/lists: numpy scalar indexing in a double loop is far slower
    cl = c.tolist()
    bl = b.tolist()
    pl = p.tolist()
    res = 0.0
    for it in range(max_iter):
        rmax = 0.0
        for i in range(nx):
            pm = pl[i - 1] if i > 0 else None
            pc = pl[i]
            pp = pl[i + 1] if i < nx - 1 else None
            for j in range(ny):
                s = bl[i][j]
                if i > 0:
                    s -= cl[1][i][j] * pm[j]
                    if j > 0:
                        s -= cl[0][i][j] * pm[j - 1]
                    if j < ny - 1:
                        s -= cl[2][i][j] * pm[j + 1]
                if j > 0:
                    s -= cl[3][i][j] * pc[j - 1]
                if j < ny - 1:
                    s -= cl[5][i][j] * pc[j + 1]
                if i < nx - 1:
                    s -= cl[7][i][j] * pp[j]
                    if j > 0:
                        s -= cl[6][i][j] * pp[j - 1]
                    if j < ny - 1:
                        s -= cl[8][i][j] * pp[j + 1]
                r = s - cl[4][i][j] * pc[j]
                if abs(r) > rmax:
                    rmax = abs(r)
                pc[j] += omega * r / cl[4][i][j]
        if rmax < tol:
            p[...] = pl
            res = residual_9pt(c, b, p)
            if res < tol:
                return it + 1, res
    p[...] = pl
    res = residual_9pt(c, b, p)
    return max_iter + 1, res


def smooth_grid(x, y, max_iter, tol, winslow):
    ni, nj = x.shape
    xl = x.tolist()
    yl = y.tolist()
    history = []
    for _ in range(max_iter):
        upd = 0.0
        for i in range(1, ni - 1):
            xm, xc, xp = xl[i - 1], xl[i], xl[i + 1]
            ym, yc, yp = yl[i - 1], yl[i], yl[i + 1]
            for j in range(1, nj - 1):
                if winslow:
                    xxi = 0.5 * (xp[j] - xm[j])
                    yxi = 0.5 * (yp[j] - ym[j])
                    xeta = 0.5 * (xc[j + 1] - xc[j - 1])
                    yeta = 0.5 * (yc[j + 1] - yc[j - 1])
                    a = xeta * xeta + yeta * yeta
                    bt = xxi * xeta + yxi * yeta
                    g = xxi * xxi + yxi * yxi
                    den = 2.0 * (a + g)
                    xn = (a * (xp[j] + xm[j]) + g * (xc[j + 1] + xc[j - 1])
                          - 0.5 * bt * (xp[j + 1] - xm[j + 1] - xp[j - 1] + xm[j - 1])) / den
                    yn = (a * (yp[j] + ym[j]) + g * (yc[j + 1] + yc[j - 1])
                          - 0.5 * bt * (yp[j + 1] - ym[j + 1] - yp[j - 1] + ym[j - 1])) / den
                else:
                    xn = 0.25 * (xp[j] + xm[j] + xc[j + 1] + xc[j - 1])
                    yn = 0.25 * (yp[j] + ym[j] + yc[j + 1] + yc[j - 1])
                dx = abs(xn - xc[j])
                dy = abs(yn - yc[j])
                if dx > upd:
                    upd = dx
                if dy > upd:
                    upd = dy
                xc[j] = xn
                yc[j] = yn
        history.append(upd)
        if upd < tol:
            break
    x[...] = np.array(xl)
    y[...] = np.array(yl)
    return history

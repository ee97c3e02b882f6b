# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of fallback.py: same tableau, same stepping, same system ids.

Keep the two files in lockstep; the test suite cross-checks them on every
system.  The hot loops here are plain C with no Python object traffic.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, fmin, fmax, pow

from ..errors import BudgetExceeded

cnp.import_array()

cdef double[13] C_NODES
cdef double[13][12] A_TAB
cdef double[13] B8
cdef double ERRW = 41.0 / 840.0

def _fill_tableau():
    c = [0.0, 2/27., 1/9., 1/6., 5/12., 1/2., 5/6., 1/6., 2/3., 1/3., 1.0, 0.0, 1.0]
    a = [
        [],
        [2/27.],
        [1/36., 1/12.],
        [1/24., 0.0, 1/8.],
        [5/12., 0.0, -25/16., 25/16.],
        [1/20., 0.0, 0.0, 1/4., 1/5.],
        [-25/108., 0.0, 0.0, 125/108., -65/27., 125/54.],
        [31/300., 0.0, 0.0, 0.0, 61/225., -2/9., 13/900.],
        [2.0, 0.0, 0.0, -53/6., 704/45., -107/9., 67/90., 3.0],
        [-91/108., 0.0, 0.0, 23/108., -976/135., 311/54., -19/60., 17/6., -1/12.],
        [2383/4100., 0.0, 0.0, -341/164., 4496/1025., -301/82., 2133/4100., 45/82., 45/164., 18/41.],
        [3/205., 0.0, 0.0, 0.0, 0.0, -6/41., -3/205., -3/41., 3/41., 6/41., 0.0],
        [-1777/4100., 0.0, 0.0, -341/164., 4496/1025., -289/82., 2193/4100., 51/82., 33/164., 12/41., 0.0, 1.0],
    ]
    b8 = [0.0, 0.0, 0.0, 0.0, 0.0, 34/105., 9/35., 9/35., 9/280., 9/280., 0.0, 41/840., 41/840.]
    for i in range(13):
        C_NODES[i] = c[i]
        B8[i] = b8[i]
        for j in range(12):
            A_TAB[i][j] = a[i][j] if j < len(a[i]) else 0.0

_fill_tableau()


cdef inline double _sqrtm1(double x2) nogil:
    return x2 / (1.0 + sqrt(1.0 + x2))


cdef void _rhs(int system, double[::1] dpar, long[::1] ipar, double[:, ::1] tab,
               double* y, double* out, int n) nogil:
    cdef int i, j, m, q
    cdef double acc, bend, w, wd, z, zd, l4, k2, a2, sig, cross, wdd, zdd
    cdef double up, um, sp, sm, gam, xi, g2, f, pot, c3, q0, cq, x2, psi, bw
    if system == 1 or system == 2:
        m = n / 2
        acc = 0.0
        if system == 1:
            for i in range(m):
                acc += dpar[i] * y[i] * y[i]
            bend = 1.0 + acc
            for i in range(m):
                out[i] = y[m + i]
                out[m + i] = -bend * dpar[i] * y[i]
        else:
            for i in range(m):
                acc += y[i] * y[i]
            for i in range(m):
                out[i] = y[m + i]
                out[m + i] = -dpar[i] * y[i] - acc * y[i]
        return
    if system == 3:
        m = n / 2
        acc = 0.0
        for i in range(m):
            out[i] = y[m + i]
            out[m + i] = 0.0
        # out[m:] first holds D phi, acc collects phi^T D phi
        for i in range(m):
            bend = 0.0
            for j in range(m):
                bend += tab[i, j] * y[j]
            out[m + i] = bend
            acc += y[i] * bend
        for i in range(m):
            out[m + i] = -dpar[i] * y[i] - acc * out[m + i]
        return
    if system == 4:
        m = <int> ipar[0]
        q = <int> ipar[1]
        for i in range(m):
            out[i] = y[m + i]
            out[m + i] = -dpar[i] * y[i]
        for j in range(q):
            acc = 0.0
            for i in range(m):
                acc += tab[j, i] * y[i]
            acc = acc * acc * acc
            for i in range(m):
                out[m + i] -= tab[q + j, i] * acc
        return
    if system == 5 or system == 6:
        l4 = dpar[0]; k2 = dpar[1]; a2 = dpar[2]
        w = y[0]; wd = y[1]; z = y[2]; zd = y[3]
        cross = 1.0 + 2.0 * a2
        wdd = -l4 * w - cross * z * z * w - w * w * w
        zdd = -k2 * z - cross * w * w * z - z * z * z
        if system == 6:
            sig = dpar[3]
            if sig != 0.0:
                gam = 0.0
                xi = 0.0
                q = tab.shape[1]
                for j in range(q):
                    up = sig * (w * tab[0, j] + z * tab[1, j])
                    um = sig * (w * tab[0, j] - z * tab[1, j])
                    sp = sqrt(1.0 + up * up)
                    sm = sqrt(1.0 + um * um)
                    gam += (_sqrtm1(up * up) + _sqrtm1(um * um)) * tab[0, j] * tab[2, j]
                    xi += sig * sig * 4.0 * w * z * tab[0, j] * tab[1, j] / (sp + sm) * tab[1, j] * tab[2, j]
                wdd += -2.0 * sig * w - gam
                zdd += -2.0 * sig * z - xi
        out[0] = wd; out[1] = wdd; out[2] = zd; out[3] = zdd
        return
    if system == 7:
        g2 = dpar[0]
        f = y[0]
        out[0] = y[1]
        out[1] = -f - f * f * f
        pot = g2 * (1.0 + f * f)
        out[2] = y[3]; out[3] = -pot * y[2]
        out[4] = y[5]; out[5] = -pot * y[4]
        return
    if system == 8:
        l4 = dpar[0]; c3 = dpar[1]; q0 = dpar[2]; cq = dpar[3]
        w = y[0]
        out[0] = y[1]
        out[1] = -l4 * w - c3 * w * w * w
        pot = q0 + cq * w * w
        out[2] = y[3]; out[3] = -pot * y[2]
        out[4] = y[5]; out[5] = -pot * y[4]
        return
    if system == 9:
        l4 = dpar[0]; k2 = dpar[1]; a2 = dpar[2]; sig = dpar[3]
        w = y[0]
        wdd = -(l4 + 2.0 * sig) * w - w * w * w
        pot = k2 + 2.0 * sig + (1.0 + 2.0 * a2) * w * w
        if sig != 0.0:
            psi = 0.0
            bw = 0.0
            q = tab.shape[1]
            for j in range(q):
                x2 = sig * w * tab[0, j]
                x2 = x2 * x2
                psi += 2.0 * _sqrtm1(x2) * tab[0, j] * tab[2, j]
                bw += tab[0, j] * tab[1, j] * tab[1, j] * w / sqrt(1.0 + x2) * tab[2, j]
            wdd -= psi
            pot += 2.0 * sig * sig * bw
        out[0] = y[1]
        out[1] = wdd
        out[2] = y[3]; out[3] = -pot * y[2]
        out[4] = y[5]; out[5] = -pot * y[4]
        return


def integrate(system, dpar, ipar, tab, y0, ts, rtol=1e-10, atol=1e-12):
    """Same contract as fallback.integrate."""
    cdef double[::1] dp = np.ascontiguousarray(dpar, dtype=np.float64)
    cdef long[::1] ip = np.ascontiguousarray(ipar, dtype=np.int64)
    cdef double[:, ::1] tb = np.ascontiguousarray(tab, dtype=np.float64)
    cdef double[::1] y0v = np.ascontiguousarray(y0, dtype=np.float64)
    cdef double[::1] tsv = np.ascontiguousarray(ts, dtype=np.float64)
    cdef int n = y0v.shape[0]
    cdef int nts = tsv.shape[0]
    cdef cnp.ndarray out_arr = np.empty((nts, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] y = np.empty(n)
    cdef double[::1] ynew = np.empty(n)
    cdef double[::1] stage = np.empty(n)
    cdef double[:, ::1] k = np.empty((13, n))
    cdef int sysid = int(system)
    if sysid < 1 or sysid > 9:
        raise ValueError(f"unknown system id {system}")
    cdef double rt = rtol, at = atol
    cdef double t, h, hstep, target, acc, err, sc, fac, av
    cdef int i, j, m_, isamp, underflow = 0
    for i in range(n):
        y[i] = y0v[i]
        out[0, i] = y0v[i]
    t = tsv[0]
    h = 1e-3
    if nts > 1 and tsv[nts - 1] - tsv[0] < h:
        h = tsv[nts - 1] - tsv[0]
    with nogil:
        for isamp in range(1, nts):
            target = tsv[isamp]
            while t < target - 1e-13:
                hstep = fmin(h, target - t)
                _rhs(sysid, dp, ip, tb, &y[0], &k[0, 0], n)
                for i in range(1, 13):
                    for j in range(n):
                        acc = 0.0
                        for m_ in range(i):
                            av = A_TAB[i][m_]
                            if av != 0.0:
                                acc += av * k[m_, j]
                        stage[j] = y[j] + hstep * acc
                    _rhs(sysid, dp, ip, tb, &stage[0], &k[i, 0], n)
                err = 0.0
                for j in range(n):
                    acc = 0.0
                    for i in range(13):
                        if B8[i] != 0.0:
                            acc += B8[i] * k[i, j]
                    ynew[j] = y[j] + hstep * acc
                    acc = ERRW * hstep * (k[0, j] + k[10, j] - k[11, j] - k[12, j])
                    sc = at + rt * fmax(fabs_(y[j]), fabs_(ynew[j]))
                    err += (acc / sc) * (acc / sc)
                err = sqrt(err / n)
                if err <= 1.0:
                    t = t + hstep
                    for j in range(n):
                        y[j] = ynew[j]
                    if err > 0.0:
                        fac = 0.9 * pow(err, -0.125)
                    else:
                        fac = 5.0
                    h = hstep * fmin(5.0, fmax(0.2, fac))
                else:
                    h = hstep * fmax(0.2, 0.9 * pow(err, -0.125))
                    if h < 1e-12:
                        underflow = 1
                        break
            if underflow:
                break
            for j in range(n):
                out[isamp, j] = y[j]
            t = target
    if underflow:
        raise BudgetExceeded("step size underflow in the integrator")
    return out_arr


cdef inline double fabs_(double x) nogil:
    return -x if x < 0.0 else x

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-term y-integral for stacks and perfect reflectors.

Same algorithm as ``_kernel_py.integrate_term``; runs without the GIL.
"""
from libc.math cimport sqrt, exp, expm1, log, log1p, fabs, isinf
from libc.stdlib cimport malloc, free
from libc.string cimport memmove

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
cdef double BREAKS[6]
cdef double EPS = 2.220446049250313e-16

_xgk = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000]
_wgk = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
_wg = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
       0.381830050505118944950369775488975, 0.417959183673469387755102040816327]
_breaks = [0.0, 1.0, 4.0, 12.0, 28.0, 60.0]
for _i in range(8):
    XGK[_i] = _xgk[_i]
    WGK[_i] = _wgk[_i]
for _i in range(4):
    WG[_i] = _wg[_i]
for _i in range(6):
    BREAKS[_i] = _breaks[_i]

FREE_ENERGY = 0
PRESSURE = 1


cdef struct Body:
    int kind
    int n
    const double* m      # n rows of (eps, mu, kappa2, d)
    double* k


cdef inline double interface(double wi, double ki, double wj, double kj) noexcept nogil:
    cdef bint ii = isinf(wi)
    cdef bint ij = isinf(wj)
    if ij and not ii:
        return 1.0
    if ii and not ij:
        return -1.0
    if ii and ij:
        return 0.0
    return (wj * ki - wi * kj) / (wj * ki + wi * kj)


cdef void reflect(Body* b, double q, double kp2, double* rtm, double* rte) noexcept nogil:
    cdef int n = b.n
    cdef int j
    cdef double ea, ma, ka, phase, ttm, tte
    cdef const double* m = b.m
    if b.kind == 1:
        rtm[0] = 1.0
        rte[0] = 1.0
        return
    for j in range(n):
        b.k[j] = sqrt(kp2 + m[4 * j + 2])
    if n == 1:
        ea = 1.0
        ma = 1.0
        ka = q
    else:
        ea = m[4 * (n - 2)]
        ma = m[4 * (n - 2) + 1]
        ka = b.k[n - 2]
    rtm[0] = interface(ea, ka, m[4 * (n - 1)], b.k[n - 1])
    rte[0] = interface(ma, ka, m[4 * (n - 1) + 1], b.k[n - 1])
    for j in range(n - 2, -1, -1):
        if j == 0:
            ea = 1.0
            ma = 1.0
            ka = q
        else:
            ea = m[4 * (j - 1)]
            ma = m[4 * (j - 1) + 1]
            ka = b.k[j - 1]
        phase = exp(-2.0 * b.k[j] * m[4 * j + 3])
        ttm = interface(ea, ka, m[4 * j], b.k[j])
        tte = interface(ma, ka, m[4 * j + 1], b.k[j])
        rtm[0] = (ttm + rtm[0] * phase) / (1.0 + ttm * rtm[0] * phase)
        rte[0] = (tte + rte[0] * phase) / (1.0 + tte * rte[0] * phase)


cdef double noise_floor(int quantity, double y_lo) noexcept nogil:
    # eps^2 times the unit-reflector integral; see _kernel_py.noise_floor
    cdef double scale
    if quantity == 0:
        scale = (1.0 + y_lo) * exp(-y_lo)
    else:
        scale = (2.0 + y_lo * (2.0 + y_lo)) * exp(-y_lo)
    return 100.0 * EPS * EPS * scale


cdef inline double log_term(double R, double y) noexcept nogil:
    # ln(1 - R e^-y); near total reflection at small y use (1 - R) - R expm1(-y)
    cdef double x = R * exp(-y)
    if x <= 0.5:
        return log1p(-x)
    return log((1.0 - R) - R * expm1(-y))


cdef double integrand(int quantity, double y, double y_lo, double two_a,
                      Body* b1, Body* b2) noexcept nogil:
    cdef double q = y / two_a
    cdef double kp2 = (y - y_lo) * (y + y_lo) / (two_a * two_a)
    cdef double tm1, te1, tm2, te2, Rtm, Rte, em1
    reflect(b1, q, kp2, &tm1, &te1)
    reflect(b2, q, kp2, &tm2, &te2)
    Rtm = tm1 * tm2
    Rte = te1 * te2
    em1 = expm1(y)
    if quantity == 0:
        return y * (log_term(Rtm, y) + log_term(Rte, y))
    return y * y * (Rtm / (em1 + (1.0 - Rtm)) + Rte / (em1 + (1.0 - Rte)))


cdef void panel(int quantity, double a, double b, double y_lo, double two_a,
                Body* b1, Body* b2, double* K, double* E, double* A) noexcept nogil:
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double fk = 0.0, fg = 0.0, fa = 0.0
    cdef double f1, f2
    cdef int j
    for j in range(7):
        f1 = integrand(quantity, c - h * XGK[j], y_lo, two_a, b1, b2)
        f2 = integrand(quantity, c + h * XGK[j], y_lo, two_a, b1, b2)
        fk += WGK[j] * (f1 + f2)
        fa += WGK[j] * (fabs(f1) + fabs(f2))
        if j % 2 == 1:
            fg += WG[j // 2] * (f1 + f2)
    f1 = integrand(quantity, c, y_lo, two_a, b1, b2)
    fk += WGK[7] * f1
    fa += WGK[7] * fabs(f1)
    fg += WG[3] * f1
    K[0] = h * fk
    E[0] = fabs(h * fk - h * fg)
    A[0] = h * fa


def integrate_stack(int quantity, double y_lo, double two_a,
                    int kind1, const double[:, ::1] m1,
                    int kind2, const double[:, ::1] m2,
                    double rtol, long max_evals):
    """Return ``(value, abs_error, n_evals, converged)`` for one Matsubara term."""
    cdef Body b1, b2
    cdef long cap = max_evals // 15 + 8
    cdef double* pa = <double*> malloc(cap * sizeof(double))
    cdef double* pb = <double*> malloc(cap * sizeof(double))
    cdef double* pk = <double*> malloc(cap * sizeof(double))
    cdef double* pe = <double*> malloc(cap * sizeof(double))
    cdef double* ps = <double*> malloc(cap * sizeof(double))
    cdef double* kbuf = <double*> malloc((m1.shape[0] + m2.shape[0]) * sizeof(double))
    cdef long n = 5, nevals = 75, i, imax
    cdef double total = 0.0, err = 0.0, absval = 0.0, emax, mid
    cdef bint ok = False
    cdef double floor = noise_floor(quantity, y_lo)
    if not (pa and pb and pk and pe and ps and kbuf):
        free(pa); free(pb); free(pk); free(pe); free(ps); free(kbuf)
        raise MemoryError()
    b1.kind = kind1
    b1.n = m1.shape[0]
    b1.m = &m1[0, 0]
    b1.k = kbuf
    b2.kind = kind2
    b2.n = m2.shape[0]
    b2.m = &m2[0, 0]
    b2.k = kbuf + m1.shape[0]
    with nogil:
        for i in range(5):
            pa[i] = y_lo + BREAKS[i]
            pb[i] = y_lo + BREAKS[i + 1]
            panel(quantity, pa[i], pb[i], y_lo, two_a, &b1, &b2, &pk[i], &pe[i], &ps[i])
        while True:
            total = 0.0
            err = 0.0
            absval = 0.0
            for i in range(n):
                total += pk[i]
                err += pe[i]
                absval += ps[i]
            if err <= max(max(rtol * fabs(total), 50.0 * EPS * absval), floor):
                ok = True
                break
            if nevals + 30 > max_evals or n + 1 >= cap:
                break
            imax = 0
            emax = pe[0]
            for i in range(1, n):
                if pe[i] > emax:
                    emax = pe[i]
                    imax = i
            mid = 0.5 * (pa[imax] + pb[imax])
            memmove(&pa[imax + 1], &pa[imax], (n - imax) * sizeof(double))
            memmove(&pb[imax + 1], &pb[imax], (n - imax) * sizeof(double))
            memmove(&pk[imax + 1], &pk[imax], (n - imax) * sizeof(double))
            memmove(&pe[imax + 1], &pe[imax], (n - imax) * sizeof(double))
            memmove(&ps[imax + 1], &ps[imax], (n - imax) * sizeof(double))
            n += 1
            pb[imax] = mid
            pa[imax + 1] = mid
            panel(quantity, pa[imax], pb[imax], y_lo, two_a, &b1, &b2,
                  &pk[imax], &pe[imax], &ps[imax])
            panel(quantity, pa[imax + 1], pb[imax + 1], y_lo, two_a, &b1, &b2,
                  &pk[imax + 1], &pe[imax + 1], &ps[imax + 1])
            nevals += 30
    free(pa); free(pb); free(pk); free(pe); free(ps); free(kbuf)
    return total, err, nevals, ok

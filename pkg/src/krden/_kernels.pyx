# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled digit-layer search; mirrors krden._dfs.layer_histogram exactly."""

from libc.stdlib cimport malloc, free

from krden.errors import BudgetExceeded

cdef enum:
    MAXM = 24
    MAXN = 4
    MAXVAR = 96
    MAXEQ = 10


cdef struct State:
    int m
    int n
    long long p
    int D
    int primitive
    long long budget
    long long visited
    int over
    long long S[MAXM * MAXM]
    long long T[MAXN * MAXN]
    long long pw[32]
    long long hist[MAXVAR + 1]
    long long nvec
    long long *sv
    long long *qv
    long long *vec


cdef long long inv_mod(long long a, long long p):
    cdef long long r = 1, e = p - 2
    a %= p
    while e > 0:
        if e & 1:
            r = r * a % p
        a = a * a % p
        e >>= 1
    return r


cdef int solve(State *st, long long *A, long long *b, int neq, int nvar,
               long long *part, long long *basis) noexcept:
    """Row reduce over F_p; fill particular solution and nullspace rows. Return -1 if inconsistent."""
    cdef long long p = st.p
    cdef int pivcol[MAXEQ]
    cdef int r = 0, c, i, j, piv, k, nfree = 0
    cdef long long f, inv
    cdef int isfree[MAXVAR]
    for c in range(nvar):
        isfree[c] = 1
        if r == neq:
            continue
        piv = -1
        for i in range(r, neq):
            if A[i * nvar + c] % p != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(nvar):
                f = A[r * nvar + j]; A[r * nvar + j] = A[piv * nvar + j]; A[piv * nvar + j] = f
            f = b[r]; b[r] = b[piv]; b[piv] = f
        inv = inv_mod(A[r * nvar + c], p)
        for j in range(nvar):
            A[r * nvar + j] = A[r * nvar + j] * inv % p
        b[r] = b[r] * inv % p
        for i in range(neq):
            if i != r:
                f = A[i * nvar + c] % p
                if f != 0:
                    for j in range(nvar):
                        A[i * nvar + j] = ((A[i * nvar + j] - f * A[r * nvar + j]) % p + p) % p
                    b[i] = ((b[i] - f * b[r]) % p + p) % p
        pivcol[r] = c
        isfree[c] = 0
        r += 1
    for i in range(r, neq):
        if b[i] % p != 0:
            return -1
    for c in range(nvar):
        part[c] = 0
    for i in range(r):
        part[pivcol[i]] = b[i]
    for c in range(nvar):
        if isfree[c]:
            for j in range(nvar):
                basis[nfree * nvar + j] = 0
            basis[nfree * nvar + c] = 1
            for i in range(r):
                basis[nfree * nvar + pivcol[i]] = (p - A[i * nvar + c] % p) % p
            nfree += 1
    return nfree


cdef void lift(State *st, long long *phi, int t) noexcept:
    cdef int m = st.m, n = st.n, i, j, k, l, row, nvar = m * n, neq = 0, nfree, idx
    cdef long long p = st.p
    cdef long long mod = st.pw[t + 1]
    cdef long long sphi[MAXN * MAXM]
    cdef long long A[MAXEQ * MAXVAR]
    cdef long long b[MAXEQ]
    cdef long long part[MAXVAR]
    cdef long long basis[MAXVAR * MAXVAR]
    cdef long long coeff[MAXVAR]
    cdef long long child[MAXN * MAXM]
    cdef long long acc, val, dlt
    st.visited += 1
    if st.visited > st.budget:
        st.over = 1
        return
    for j in range(n):
        for k in range(m):
            acc = 0
            for l in range(m):
                acc = (acc + st.S[k * m + l] % mod * phi[j * m + l]) % mod
            sphi[j * m + k] = acc
    for i in range(n):
        for j in range(i, n):
            acc = 0
            for k in range(m):
                acc = (acc + phi[i * m + k] * sphi[j * m + k]) % mod
            val = ((acc - st.T[i * n + j]) % mod + mod) % mod
            b[neq] = (p - (val // st.pw[t]) % p) % p
            for k in range(nvar):
                A[neq * nvar + k] = 0
            for k in range(m):
                A[neq * nvar + i * m + k] += sphi[j * m + k] % p
                A[neq * nvar + j * m + k] += sphi[i * m + k] % p
            neq += 1
    nfree = solve(st, A, b, neq, nvar, part, basis)
    if nfree < 0:
        return
    if t == st.D - 1:
        st.hist[nfree] += 1
        return
    for k in range(nfree):
        coeff[k] = 0
    while True:
        for idx in range(nvar):
            dlt = part[idx]
            for k in range(nfree):
                dlt += coeff[k] * basis[k * nvar + idx]
            child[idx] = phi[idx] + st.pw[t] * (dlt % p)
        lift(st, child, t + 1)
        if st.over:
            return
        k = 0
        while k < nfree:
            coeff[k] += 1
            if coeff[k] < p:
                break
            coeff[k] = 0
            k += 1
        if k == nfree:
            break


cdef long long rank_mod_p(State *st, long long *cols, int n) noexcept:
    cdef int m = st.m, i, j, c, r = 0, piv
    cdef long long p = st.p, f, inv, tmp
    cdef long long a[MAXN * MAXM]
    for i in range(n * m):
        a[i] = cols[i] % p
    for c in range(m):
        piv = -1
        for i in range(r, n):
            if a[i * m + c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        for j in range(m):
            tmp = a[r * m + j]; a[r * m + j] = a[piv * m + j]; a[piv * m + j] = tmp
        inv = inv_mod(a[r * m + c], p)
        for i in range(n):
            if i != r and a[i * m + c] != 0:
                f = a[i * m + c] * inv % p
                for j in range(m):
                    a[i * m + j] = ((a[i * m + j] - f * a[r * m + j]) % p + p) % p
        r += 1
        if r == n:
            break
    return r


cdef void layer0(State *st, long long *phi, int j) noexcept:
    cdef int m = st.m, n = st.n, i, k
    cdef long long p = st.p, idx, acc
    cdef long long *s
    cdef int ok
    if j == n:
        if st.primitive and rank_mod_p(st, phi, n) < n:
            return
        if st.D == 1:
            st.hist[0] += 1
        else:
            lift(st, phi, 1)
        return
    for idx in range(st.nvec):
        if st.qv[idx] != st.T[j * n + j] % p:
            continue
        s = st.sv + idx * m
        ok = 1
        for i in range(j):
            acc = 0
            for k in range(m):
                acc += phi[i * m + k] * s[k]
            if acc % p != st.T[i * n + j] % p:
                ok = 0
                break
        if not ok:
            continue
        st.visited += 1
        if st.visited > st.budget:
            st.over = 1
            return
        for k in range(m):
            phi[j * m + k] = st.vec[idx * m + k]
        layer0(st, phi, j + 1)
        if st.over:
            return


def layer_histogram(S, T, long long p, int D, primitive, long long budget):
    cdef int m = len(S), n = len(T), i, j, k
    cdef long long idx, rem, acc
    cdef State *st
    cdef long long phi[MAXN * MAXM]
    if n == 0:
        return {0: 1}, 0
    if m > MAXM or n > MAXN:
        raise ValueError("lattice too large for the compiled kernel")
    cdef long long nvec = 1
    for i in range(m):
        nvec *= p
        if nvec > (1 << 24):
            break
    if nvec > (1 << 24):
        raise BudgetExceeded("layer-0 vector table too large")
    st = <State *> malloc(sizeof(State))
    st.m = m; st.n = n; st.p = p; st.D = D
    st.primitive = 1 if primitive else 0
    st.budget = budget; st.visited = 0; st.over = 0
    st.pw[0] = 1
    for i in range(1, 32):
        st.pw[i] = st.pw[i - 1] * p if i <= D + 1 else st.pw[i - 1]
    for i in range(m):
        for j in range(m):
            st.S[i * m + j] = S[i][j]
    for i in range(n):
        for j in range(n):
            st.T[i * n + j] = T[i][j]
    for i in range(MAXVAR + 1):
        st.hist[i] = 0
    st.nvec = nvec
    st.vec = <long long *> malloc(nvec * m * sizeof(long long))
    st.sv = <long long *> malloc(nvec * m * sizeof(long long))
    st.qv = <long long *> malloc(nvec * sizeof(long long))
    try:
        for idx in range(nvec):
            rem = idx
            for k in range(m):
                st.vec[idx * m + k] = rem % p
                rem //= p
            acc = 0
            for k in range(m):
                st.sv[idx * m + k] = 0
                for j in range(m):
                    st.sv[idx * m + k] += st.S[k * m + j] % p * st.vec[idx * m + j]
                st.sv[idx * m + k] %= p
                acc += st.vec[idx * m + k] * st.sv[idx * m + k]
            st.qv[idx] = acc % p
        layer0(st, phi, 0)
        if st.over:
            raise BudgetExceeded(f"search exceeded {budget} nodes")
        hist = {f: st.hist[f] for f in range(MAXVAR + 1) if st.hist[f]}
        return hist, st.visited
    finally:
        free(st.vec); free(st.sv); free(st.qv); free(st)

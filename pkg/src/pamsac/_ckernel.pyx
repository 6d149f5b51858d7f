# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled greedy removal kernel.

Same algorithm and tie rules as ``_kernel_py.settle``, on C arrays.  State lives
in 64-bit integers and cross-multiplied comparisons in 128-bit integers; the
caller must check ``fits`` first and use the Python kernel otherwise.
"""

from cpython.mem cimport PyMem_Malloc, PyMem_Free

cdef extern from *:
    ctypedef long long i128 "__int128"

ctypedef long long i64

LIMIT = 2 ** 60


def fits(int k, rn, rd, int max_points, a_max):
    """True when every intermediate of a ``settle`` call stays below 2**60."""
    if a_max <= 0:
        return True
    if a_max >= 2 ** 30:
        return False
    bound = (rd + rn + 2 * rd * k * a_max * max_points) * a_max ** (k + 2) * 4
    return bound < LIMIT and rd < LIMIT and rn < LIMIT


cdef struct State:
    int k
    int nfrag
    int cap
    int* ballot
    int* scores
    i64* count
    i64* A
    i64* M
    i64* PA
    i64* G


cdef void products(State* st):
    cdef int k = st.k, i, j
    cdef i64 p
    for i in range(k):
        p = 1
        for j in range(k):
            if j != i:
                p *= st.A[j]
        st.PA[i] = p


cdef int find_slot(State* st, int b, int* s) nogil:
    cdef int f, d, k = st.k, free = -1, same
    for f in range(st.nfrag):
        if st.ballot[f] != b:
            continue
        same = 1
        for d in range(k):
            if st.scores[f * k + d] != s[d]:
                same = 0
                break
        if same:
            return f
    return -1


def settle(int k, rn_obj, rd_obj, unit_obj, frags, int max_points):
    cdef i64 rn = rn_obj, rd = rd_obj
    cdef State st
    cdef int nb = len(unit_obj)
    cdef i64* unit = <i64*> PyMem_Malloc(max(nb, 1) * sizeof(i64))
    cdef i64 total_units = 0
    cdef int i, f, c, d, size, sc, low, t, bf, bc, bsize, slot, better
    cdef i64 u, a, Ac, acc, load, P, N, D, bN = 0, bD = 0, bload = 0, w, v, overlap
    cdef i128 lhs, rhs
    cdef int* tmp = <int*> PyMem_Malloc(max(k, 1) * sizeof(int))
    for i in range(nb):
        unit[i] = unit_obj[i]
    for item in frags:
        total_units += item[2]
    st.k = k
    st.cap = len(frags) + <int> total_units + 1
    st.nfrag = 0
    st.ballot = <int*> PyMem_Malloc(st.cap * sizeof(int))
    st.scores = <int*> PyMem_Malloc(st.cap * max(k, 1) * sizeof(int))
    st.count = <i64*> PyMem_Malloc(st.cap * sizeof(i64))
    st.A = <i64*> PyMem_Malloc(max(k, 1) * sizeof(i64))
    st.M = <i64*> PyMem_Malloc(max(k * k, 1) * sizeof(i64))
    st.PA = <i64*> PyMem_Malloc(max(k, 1) * sizeof(i64))
    st.G = <i64*> PyMem_Malloc(max(k, 1) * sizeof(i64))
    steps = []
    try:
        for item in frags:
            for d in range(k):
                tmp[d] = item[1][d]
            slot = find_slot(&st, item[0], tmp)
            if slot < 0:
                slot = st.nfrag
                st.nfrag += 1
                st.ballot[slot] = item[0]
                st.count[slot] = 0
                for d in range(k):
                    st.scores[slot * k + d] = tmp[d]
            st.count[slot] += item[2]
        for c in range(k):
            st.A[c] = 0
            for d in range(k):
                st.M[c * k + d] = 0
        for f in range(st.nfrag):
            w = st.count[f] * unit[st.ballot[f]]
            for c in range(k):
                sc = st.scores[f * k + c]
                if sc == 0:
                    continue
                st.A[c] += w * sc
                for d in range(c + 1, k):
                    t = st.scores[f * k + d]
                    if t:
                        v = w * (sc if sc < t else t)
                        st.M[c * k + d] += v
                        st.M[d * k + c] += v

        while True:
            bf = -1
            for size in range(1, max_points + 1):
                products(&st)
                P = st.PA[0] * st.A[0] if k else 1
                for c in range(k):
                    acc = 0
                    for d in range(k):
                        if d != c and st.M[c * k + d]:
                            acc += st.M[c * k + d] * st.PA[d]
                    st.G[c] = (rd + rn) * P + 2 * rd * acc
                for f in range(st.nfrag):
                    if st.count[f] == 0:
                        continue
                    u = unit[st.ballot[f]]
                    a = size * u
                    load = 0
                    for d in range(k):
                        load += st.scores[f * k + d] * st.PA[d]
                    for c in range(k):
                        sc = st.scores[f * k + c]
                        if sc < size:
                            continue
                        Ac = st.A[c]
                        if Ac <= a:
                            continue
                        low = sc - size
                        acc = 0
                        for d in range(k):
                            if d != c:
                                t = st.scores[f * k + d]
                                t = (t if t < sc else sc) - low
                                if t > 0:
                                    acc += t * st.PA[d]
                        N = a * st.G[c] - 2 * rd * Ac * u * acc
                        if N >= 0:
                            continue
                        D = Ac * (Ac - a)
                        better = 1
                        if bf >= 0:
                            lhs = <i128> N * bD
                            rhs = <i128> bN * D
                            if lhs > rhs:
                                better = 0
                            elif lhs == rhs:
                                if load < bload:
                                    better = 0
                                elif load == bload:
                                    if c > bc:
                                        better = 0
                                    elif c == bc:
                                        if st.ballot[f] > st.ballot[bf]:
                                            better = 0
                                        elif st.ballot[f] == st.ballot[bf]:
                                            for d in range(k):
                                                if st.scores[f * k + d] != st.scores[bf * k + d]:
                                                    if st.scores[f * k + d] < st.scores[bf * k + d]:
                                                        better = 0
                                                    break
                        if better:
                            bf = f
                            bc = c
                            bN = N
                            bD = D
                            bload = load
                if bf >= 0:
                    bsize = size
                    break
            if bf < 0:
                break
            # apply
            u = unit[st.ballot[bf]]
            sc = st.scores[bf * k + bc]
            low = sc - bsize
            steps.append((st.ballot[bf], bc, bsize))
            for d in range(k):
                tmp[d] = st.scores[bf * k + d]
            tmp[bc] = low
            st.count[bf] -= 1
            slot = find_slot(&st, st.ballot[bf], tmp)
            if slot < 0:
                slot = -1
                for f in range(st.nfrag):
                    if st.count[f] == 0 and f != bf:
                        slot = f
                        break
                if slot < 0:
                    slot = st.nfrag
                    st.nfrag += 1
                st.ballot[slot] = st.ballot[bf]
                st.count[slot] = 0
                for d in range(k):
                    st.scores[slot * k + d] = tmp[d]
            st.count[slot] += 1
            st.A[bc] -= bsize * u
            for d in range(k):
                if d != bc:
                    t = st.scores[bf * k + d]
                    overlap = (t if t < sc else sc) - low
                    if overlap > 0:
                        st.M[bc * k + d] -= overlap * u
                        st.M[d * k + bc] -= overlap * u

        out = []
        for f in range(st.nfrag):
            if st.count[f]:
                out.append((st.ballot[f], tuple(st.scores[f * k + d] for d in range(k)), st.count[f]))
        out.sort()
        A = [st.A[c] for c in range(k)]
        M = [[st.M[c * k + d] for d in range(k)] for c in range(k)]
        return out, steps, A, M
    finally:
        PyMem_Free(unit)
        PyMem_Free(tmp)
        PyMem_Free(st.ballot)
        PyMem_Free(st.scores)
        PyMem_Free(st.count)
        PyMem_Free(st.A)
        PyMem_Free(st.M)
        PyMem_Free(st.PA)
        PyMem_Free(st.G)


def descent_fits(int k, rn, rd, a_max):
    """True when ``descend`` stays inside 128-bit cross products."""
    if a_max <= 0:
        return True
    if k > 24 or a_max >= 2 ** 40:
        return False
    num = ((rd + rn) * k + rd * k * k * a_max) * a_max ** (k - 1) if k else 1
    return num * a_max ** k < 2 ** 125 and rd < 2 ** 40 and rn < 2 ** 40


cdef i128 scaled_num(int k, i128 alpha, i128 two_rd, i64* A2, i64* M, i64* dM, i128* pre, i128* suf, i128* P):
    cdef int c, d
    cdef i128 num = 0, ex
    pre[0] = 1
    for c in range(k):
        pre[c + 1] = pre[c] * A2[c]
    suf[k] = 1
    for c in range(k - 1, -1, -1):
        suf[c] = suf[c + 1] * A2[c]
    P[0] = pre[k]
    for c in range(k):
        ex = pre[c] * suf[c + 1]
        num += alpha * ex
        for d in range(c + 1, k):
            if M[c * k + d] + dM[c * k + d]:
                num += two_rd * (M[c * k + d] + dM[c * k + d]) * (ex / A2[d])
    return num


def descend(int k, rn_obj, rd_obj, unit_obj, frags, int policy, full_obj):
    """Compiled twin of ``_kernel_py.descend``; caller checks ``descent_fits``."""
    cdef i128 alpha = <i64> (rn_obj + rd_obj)
    cdef i128 two_rd = <i64> (2 * rd_obj)
    cdef int nb = len(unit_obj)
    cdef int i, f, c, d, src, dst, gone, come, pair, ok, sign, nopt, j, slot
    cdef int bb, bsrc, bdst, had, has, found
    cdef i64 u, total, t2, btot = 0
    cdef i128 num, P, n2, p2, bnum = 0, bP = 1, lhs, rhs
    cdef i64* unit = <i64*> PyMem_Malloc(max(nb, 1) * sizeof(i64))
    cdef int* fullm = <int*> PyMem_Malloc(max(nb, 1) * sizeof(int))
    cdef i64* A = <i64*> PyMem_Malloc(max(k, 1) * sizeof(i64))
    cdef i64* A2 = <i64*> PyMem_Malloc(max(k, 1) * sizeof(i64))
    cdef i64* M = <i64*> PyMem_Malloc(max(k * k, 1) * sizeof(i64))
    cdef i64* dM = <i64*> PyMem_Malloc(max(k * k, 1) * sizeof(i64))
    cdef i128* pre = <i128*> PyMem_Malloc((k + 1) * sizeof(i128))
    cdef i128* suf = <i128*> PyMem_Malloc((k + 1) * sizeof(i128))
    cdef int nfrag = 0, cap
    cdef i64 total_units = 0
    for item in frags:
        total_units += item[2]
    cap = len(frags) + <int> total_units + 1
    cdef int* fb = <int*> PyMem_Malloc(cap * sizeof(int))
    cdef int* fm = <int*> PyMem_Malloc(cap * sizeof(int))
    cdef i64* fc = <i64*> PyMem_Malloc(cap * sizeof(i64))
    sign = 1 if policy == 0 else -1
    try:
        for i in range(nb):
            unit[i] = unit_obj[i]
            fullm[i] = 0
        for item in frags:
            src = 0
            for c in range(k):
                if item[1][c]:
                    src |= 1 << c
            bb = item[0]
            fullm[bb] |= src
            found = -1
            for f in range(nfrag):
                if fb[f] == bb and fm[f] == src:
                    found = f
                    break
            if found < 0:
                found = nfrag
                nfrag += 1
                fb[found] = bb
                fm[found] = src
                fc[found] = 0
            fc[found] += item[2]
        if full_obj is not None:
            for bb, s in full_obj.items():
                src = 0
                for c in range(k):
                    if s[c]:
                        src |= 1 << c
                fullm[bb] = src
        for c in range(k):
            A[c] = 0
            for d in range(k):
                M[c * k + d] = 0
                dM[c * k + d] = 0
        for f in range(nfrag):
            u = fc[f] * unit[fb[f]]
            for c in range(k):
                if fm[f] >> c & 1:
                    A[c] += u
                    for d in range(c + 1, k):
                        if fm[f] >> d & 1:
                            M[c * k + d] += u
                            M[d * k + c] += u
        num = scaled_num(k, alpha, two_rd, A, M, dM, pre, suf, &P)
        total = 0
        for c in range(k):
            total += A[c]
        while True:
            bb = -1
            for f in range(nfrag):
                if fc[f] == 0:
                    continue
                src = fm[f]
                u = unit[fb[f]]
                dst = fullm[fb[f]]
                while True:
                    if dst != src:
                        gone = src & ~dst
                        come = dst & ~src
                        ok = 1
                        t2 = total
                        for c in range(k):
                            A2[c] = A[c]
                            if gone >> c & 1:
                                A2[c] -= u
                                t2 -= u
                                if A2[c] <= 0:
                                    ok = 0
                            elif come >> c & 1:
                                A2[c] += u
                                t2 += u
                        if ok:
                            for c in range(k):
                                for d in range(c + 1, k):
                                    had = (src >> c & 1) and (src >> d & 1)
                                    has = (dst >> c & 1) and (dst >> d & 1)
                                    if had != has:
                                        dM[c * k + d] = u if has else -u
                                    else:
                                        dM[c * k + d] = 0
                            n2 = scaled_num(k, alpha, two_rd, A2, M, dM, pre, suf, &p2)
                            lhs = n2 * P
                            rhs = num * p2
                            if lhs < rhs or (lhs == rhs and policy == 0 and t2 > total):
                                ok = 1
                                if bb >= 0:
                                    lhs = n2 * bP
                                    rhs = bnum * p2
                                    if lhs > rhs:
                                        ok = 0
                                    elif lhs == rhs:
                                        if sign * t2 < sign * btot:
                                            ok = 0
                                        elif t2 == btot:
                                            if fb[f] > bb:
                                                ok = 0
                                            elif fb[f] == bb:
                                                if src < bsrc or (src == bsrc and dst < bdst):
                                                    ok = 0
                                if ok:
                                    bb = fb[f]
                                    bsrc = src
                                    bdst = dst
                                    bnum = n2
                                    bP = p2
                                    btot = t2
                    if dst == 0:
                        break
                    dst = (dst - 1) & fullm[fb[f]]
            if bb < 0:
                break
            u = unit[bb]
            for f in range(nfrag):
                if fb[f] == bb and fm[f] == bsrc:
                    fc[f] -= 1
                    break
            slot = -1
            for f in range(nfrag):
                if fb[f] == bb and fm[f] == bdst:
                    slot = f
                    break
            if slot < 0:
                for f in range(nfrag):
                    if fc[f] == 0:
                        slot = f
                        break
                if slot < 0:
                    slot = nfrag
                    nfrag += 1
                fb[slot] = bb
                fm[slot] = bdst
                fc[slot] = 0
            fc[slot] += 1
            for c in range(k):
                if (bsrc >> c & 1) and not (bdst >> c & 1):
                    A[c] -= u
                elif (bdst >> c & 1) and not (bsrc >> c & 1):
                    A[c] += u
                for d in range(c + 1, k):
                    had = (bsrc >> c & 1) and (bsrc >> d & 1)
                    has = (bdst >> c & 1) and (bdst >> d & 1)
                    if had != has:
                        M[c * k + d] += u if has else -u
                        M[d * k + c] = M[c * k + d]
            num = bnum
            P = bP
            total = btot
        out = []
        for f in range(nfrag):
            if fc[f]:
                out.append((fb[f], tuple((fm[f] >> c) & 1 for c in range(k)), fc[f]))
        out.sort()
        return out, [A[c] for c in range(k)], [[M[c * k + d] for d in range(k)] for c in range(k)]
    finally:
        PyMem_Free(unit)
        PyMem_Free(fullm)
        PyMem_Free(A)
        PyMem_Free(A2)
        PyMem_Free(M)
        PyMem_Free(dM)
        PyMem_Free(pre)
        PyMem_Free(suf)
        PyMem_Free(fb)
        PyMem_Free(fm)
        PyMem_Free(fc)

"""Pure-Python greedy removal kernel (reference and fallback).

State is integer-scaled: every ballot fragment (a unit of a ballot, further cut
into ``max_points`` score parts) has an integer part weight ``unit[b]``.  A
fragment is ``(ballot, scores)`` where ``scores`` holds one integer per
committee member; approval ballots are the ``max_points == 1`` case.

With ``A_c`` the approving weight of member c and ``M_cd`` the co-approving
weight, the objective is ``(1 + r) sum 1/A_c + 2 sum_{c<d} M_cd/(A_c A_d)``
where ``r = rn/rd``.  Lowering c on a fragment by ``size`` points changes
``A_c`` by ``a`` and ``M_cd`` by ``m_d``; the exact change is

    (a * G_c - 2 A_c * sum_d m_d / A_d) / (A_c (A_c - a)),
    G_c = 1 + r + 2 sum_{d != c} M_cd / A_d,

which is evaluated over the common denominator ``P * rd`` with ``P = prod A``.
"""

from __future__ import annotations

from itertools import product


def coapproval(k, unit, frags):
    """Approval vector ``A`` and co-approval matrix ``M`` of a fragment list."""
    A = [0] * k
    M = [[0] * k for _ in range(k)]
    for b, s, cnt in frags:
        w = cnt * unit[b]
        for c in range(k):
            sc = s[c]
            if not sc:
                continue
            A[c] += w * sc
            row = M[c]
            for d in range(c + 1, k):
                sd = s[d]
                if sd:
                    v = w * (sc if sc < sd else sd)
                    row[d] += v
                    M[d][c] += v
    return A, M


def _products(A):
    k = len(A)
    prefix = [1] * (k + 1)
    for i in range(k):
        prefix[i + 1] = prefix[i] * A[i]
    suffix = [1] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix[i] = suffix[i + 1] * A[i]
    return [prefix[i] * suffix[i + 1] for i in range(k)], prefix[k]


def _best_move(k, rn, rd, unit, table, A, M, size):
    PA, P = _products(A)
    G = []
    for c in range(k):
        row = M[c]
        acc = 0
        for d in range(k):
            if d != c and row[d]:
                acc += row[d] * PA[d]
        G.append((rd + rn) * P + 2 * rd * acc)
    best = None
    bN = bD = bload = 0
    for (b, s), cnt in table.items():
        if not cnt:
            continue
        u = unit[b]
        a = size * u
        load = 0
        for d in range(k):
            if s[d]:
                load += s[d] * PA[d]
        for c in range(k):
            sc = s[c]
            if sc < size:
                continue
            Ac = A[c]
            if Ac <= a:
                continue
            low = sc - size
            acc = 0
            for d in range(k):
                if d != c:
                    t = (s[d] if s[d] < sc else sc) - low
                    if t > 0:
                        acc += t * PA[d]
            N = a * G[c] - 2 * rd * Ac * u * acc
            if N >= 0:
                continue
            D = Ac * (Ac - a)
            if best is not None:
                lhs = N * bD
                rhs = bN * D
                if lhs > rhs:
                    continue
                if lhs == rhs:
                    if load < bload:
                        continue
                    if load == bload and (c, b, tuple(-x for x in s)) > (best[1], best[0], tuple(-x for x in best[2])):
                        continue
            best = (b, c, s)
            bN, bD, bload = N, D, load
    return best


def settle(k, rn, rd, unit, frags, max_points):
    """Apply beneficial reductions until none is left.

    At every step the smallest reduction size with a beneficial move is used,
    so one-point reductions are exhausted before two-point ones are tried, and
    after any larger reduction the smaller sizes are re-checked first.  Among
    moves of that size the largest exact decrease wins; ties go to the
    fragment with the larger load, then the earlier member, then the lower
    ballot index.

    Returns ``(frags, steps, A, M)`` with ``steps`` as ``(ballot, member, size)``.
    """
    table = {}
    for b, s, cnt in frags:
        key = (b, tuple(s))
        table[key] = table.get(key, 0) + cnt
    A, M = coapproval(k, unit, [(b, s, c) for (b, s), c in table.items()])
    steps = []
    while True:
        move = None
        for size in range(1, max_points + 1):
            move = _best_move(k, rn, rd, unit, table, A, M, size)
            if move is not None:
                break
        if move is None:
            break
        b, c, s = move
        u = unit[b]
        sc = s[c]
        low = sc - size
        table[(b, s)] -= 1
        t = list(s)
        t[c] = low
        t = tuple(t)
        table[(b, t)] = table.get((b, t), 0) + 1
        A[c] -= size * u
        for d in range(k):
            if d != c:
                overlap = (s[d] if s[d] < sc else sc) - low
                if overlap > 0:
                    M[c][d] -= overlap * u
                    M[d][c] -= overlap * u
        steps.append((b, c, size))
    out = sorted((b, s, cnt) for (b, s), cnt in table.items() if cnt)
    return out, steps, A, M


def _submask_list(full):
    out = []
    s = full
    while True:
        out.append(s)
        if s == 0:
            return out
        s = (s - 1) & full


def _scaled_objective(k, alpha, two_rd, A, M):
    """``(numerator, denominator)`` of ``rd`` times the objective."""
    P = 1
    for a in A:
        P *= a
    PA, _ = _products(A)
    num = 0
    for c in range(k):
        num += alpha * PA[c]
        row = M[c]
        for d in range(c + 1, k):
            if row[d]:
                num += two_rd * row[d] * (PA[c] // A[d])
    return num, P


def descend(k, rn, rd, unit, frags, policy=0, full=None):
    """Unit-reassignment descent.

    Each ballot holds integer units, each approving some subset of the
    ballot's in-set approvals.  A move sends one unit of ballot ``b`` from kept
    subset ``src`` to another subset ``dst`` of the ballot's original in-set
    approvals (masks read bit c for member c).  The best improving move is
    applied until none is left.

    ``policy`` 0 accepts a move when it lowers the objective, or keeps it equal
    while raising total approval weight, and prefers higher totals among equal
    objectives.  ``policy`` 1 accepts only objective decreases and prefers lower
    totals, so ties resolve towards dropping more approvals.  Remaining ties go
    to the lower ballot, then the larger ``src``, then the larger ``dst``.

    ``frags`` is ``(ballot, 0/1 tuple, count)``.  ``full`` maps a ballot to its
    original 0/1 tuple; by default the union of its fragments is used.
    Returns ``(frags, A, M)``.
    """
    alpha = rd + rn
    two_rd = 2 * rd
    given = full
    full = {}
    table = {}
    for b, s, cnt in frags:
        mask = _mask(s, k)
        full[b] = full.get(b, 0) | mask
        table[(b, mask)] = table.get((b, mask), 0) + cnt
    if given is not None:
        full = {b: _mask(s, k) for b, s in given.items()}
    options = {b: _submask_list(m) for b, m in full.items()}
    A, M = coapproval(k, unit, [(b, _bits(m, k), c) for (b, m), c in table.items()])
    num, P = _scaled_objective(k, alpha, two_rd, A, M)
    total = sum(A)
    sign = 1 if policy == 0 else -1
    while True:
        best = None
        for (b, src), cnt in table.items():
            if not cnt:
                continue
            u = unit[b]
            for dst in options[b]:
                if dst == src:
                    continue
                gone = src & ~dst
                come = dst & ~src
                A2 = list(A)
                ok = True
                for c in range(k):
                    bit = 1 << c
                    if gone & bit:
                        A2[c] -= u
                        if A2[c] <= 0:
                            ok = False
                            break
                    elif come & bit:
                        A2[c] += u
                if not ok:
                    continue
                M2 = [list(row) for row in M]
                for c in range(k):
                    for d in range(c + 1, k):
                        pair = (1 << c) | (1 << d)
                        had = src & pair == pair
                        has = dst & pair == pair
                        if had != has:
                            v = u if has else -u
                            M2[c][d] += v
                            M2[d][c] += v
                n2, p2 = _scaled_objective(k, alpha, two_rd, A2, M2)
                t2 = sum(A2)
                lhs = n2 * P
                rhs = num * p2
                if lhs > rhs:
                    continue
                if lhs == rhs and (policy != 0 or t2 <= total):
                    continue
                if best is not None:
                    lhs = n2 * best[4]
                    rhs = best[3] * p2
                    if lhs > rhs:
                        continue
                    if lhs == rhs:
                        if sign * t2 < sign * best[5]:
                            continue
                        if t2 == best[5] and (b, -src, -dst) > (best[0], -best[1], -best[2]):
                            continue
                best = (b, src, dst, n2, p2, t2, A2, M2)
        if best is None:
            break
        b, src, dst, num, P, total, A, M = best
        table[(b, src)] -= 1
        table[(b, dst)] = table.get((b, dst), 0) + 1
    out = sorted((b, _bits(m, k), c) for (b, m), c in table.items() if c)
    return out, A, M


def _mask(s, k):
    mask = 0
    for c in range(k):
        if s[c]:
            mask |= 1 << c
    return mask


def _bits(mask, k):
    return tuple((mask >> c) & 1 for c in range(k))


def descend_scores(k, rn, rd, unit, frags, policy, full):
    """Score-ballot twin of :func:`descend`.

    A move lowers or restores any of one unit's scores, keeping each between 0
    and the ballot's original score ``full[b]``.  Acceptance and preference
    follow ``policy`` as in :func:`descend`; remaining ties go to the lower
    ballot, then the larger source tuple, then the larger target tuple.
    """
    alpha = rd + rn
    two_rd = 2 * rd
    table = {}
    for b, s, cnt in frags:
        key = (b, tuple(s))
        table[key] = table.get(key, 0) + cnt
    options = {b: sorted(product(*(range(v, -1, -1) for v in s)), reverse=True) for b, s in full.items()}
    A, M = coapproval(k, unit, [(b, s, c) for (b, s), c in table.items()])
    num, P = _scaled_objective(k, alpha, two_rd, A, M)
    total = sum(A)
    sign = 1 if policy == 0 else -1
    while True:
        best = None
        for (b, src), cnt in table.items():
            if not cnt:
                continue
            u = unit[b]
            for dst in options[b]:
                if dst == src:
                    continue
                A2 = [a + u * (y - x) for a, x, y in zip(A, src, dst)]
                if min(A2) <= 0:
                    continue
                M2 = [list(row) for row in M]
                for c in range(k):
                    for d in range(c + 1, k):
                        v = u * (min(dst[c], dst[d]) - min(src[c], src[d]))
                        if v:
                            M2[c][d] += v
                            M2[d][c] += v
                n2, p2 = _scaled_objective(k, alpha, two_rd, A2, M2)
                t2 = sum(A2)
                lhs = n2 * P
                rhs = num * p2
                if lhs > rhs:
                    continue
                if lhs == rhs and (policy != 0 or t2 <= total):
                    continue
                if best is not None:
                    lhs = n2 * best[4]
                    rhs = best[3] * p2
                    if lhs > rhs:
                        continue
                    if lhs == rhs:
                        if sign * t2 < sign * best[5]:
                            continue
                        if t2 == best[5] and (b, best[1], best[2]) > (best[0], src, dst):
                            continue
                best = (b, src, dst, n2, p2, t2, A2, M2)
        if best is None:
            break
        b, src, dst, num, P, total, A, M = best
        table[(b, src)] -= 1
        table[(b, dst)] = table.get((b, dst), 0) + 1
    out = sorted((b, s, c) for (b, s), c in table.items() if c)
    return out, A, M

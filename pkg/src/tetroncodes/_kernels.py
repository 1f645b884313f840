"""numba kernels for belief propagation and ordered-statistics decoding.

Binary vectors over rows are packed little-endian into uint64 words.
"""

import numpy as np
from numba import njit

LLR_CAP = 60.0


@njit(cache=True)
def bp_decode(chk_ptr, edge_var, var_ptr, var_edges, prior_llr, syndrome, max_iter, alpha, product_sum):
    n_chk = chk_ptr.shape[0] - 1
    n_var = prior_llr.shape[0]
    n_edge = edge_var.shape[0]
    q = np.empty(n_edge)
    r = np.zeros(n_edge)
    post = prior_llr.copy()
    hard = np.zeros(n_var, dtype=np.uint8)
    for v in range(n_var):
        hard[v] = 1 if post[v] < 0 else 0
    if _matches(chk_ptr, edge_var, hard, syndrome):
        return post, hard, True, 0
    for e in range(n_edge):
        q[e] = prior_llr[edge_var[e]]
    for it in range(1, max_iter + 1):
        for c in range(n_chk):
            lo, hi = chk_ptr[c], chk_ptr[c + 1]
            if product_sum:
                prod = 1.0
                for e in range(lo, hi):
                    prod *= np.tanh(0.5 * q[e])
                for e in range(lo, hi):
                    t = np.tanh(0.5 * q[e])
                    if t == 0.0:
                        # recompute the leave-one-out product directly
                        ex = 1.0
                        for f in range(lo, hi):
                            if f != e:
                                ex *= np.tanh(0.5 * q[f])
                    else:
                        ex = prod / t
                    if ex > 0.999999999999:
                        ex = 0.999999999999
                    elif ex < -0.999999999999:
                        ex = -0.999999999999
                    val = 2.0 * np.arctanh(ex)
                    r[e] = -val if syndrome[c] else val
            else:
                sgn = 1.0
                m1 = np.inf
                m2 = np.inf
                arg = -1
                for e in range(lo, hi):
                    a = q[e]
                    if a < 0:
                        sgn = -sgn
                        a = -a
                    if a < m1:
                        m2 = m1
                        m1 = a
                        arg = e
                    elif a < m2:
                        m2 = a
                if syndrome[c]:
                    sgn = -sgn
                for e in range(lo, hi):
                    mag = m2 if e == arg else m1
                    if mag > LLR_CAP:  # degree-1 check: the bit is fixed by the syndrome
                        mag = LLR_CAP / alpha
                    s = sgn if q[e] >= 0 else -sgn
                    r[e] = alpha * s * mag
        for v in range(n_var):
            tot = prior_llr[v]
            for k in range(var_ptr[v], var_ptr[v + 1]):
                tot += r[var_edges[k]]
            if tot > LLR_CAP * 10:
                tot = LLR_CAP * 10
            elif tot < -LLR_CAP * 10:
                tot = -LLR_CAP * 10
            post[v] = tot
            hard[v] = 1 if tot < 0 else 0
            for k in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edges[k]
                q[e] = tot - r[e]
        if _matches(chk_ptr, edge_var, hard, syndrome):
            return post, hard, True, it
    return post, hard, False, max_iter


@njit(cache=True)
def _matches(chk_ptr, edge_var, hard, syndrome):
    for c in range(chk_ptr.shape[0] - 1):
        par = 0
        for e in range(chk_ptr[c], chk_ptr[c + 1]):
            par ^= hard[edge_var[e]]
        if par != syndrome[c]:
            return False
    return True


@njit(cache=True)
def _lowest_bit(v):
    for w in range(v.shape[0]):
        if v[w] != 0:
            x = v[w]
            b = 0
            while (x >> np.uint64(b)) & np.uint64(1) == 0:
                b += 1
            return w * 64 + b
    return -1


@njit(cache=True)
def _bit(v, i):
    return (v[i >> 6] >> np.uint64(i & 63)) & np.uint64(1)


@njit(cache=True)
def osd(colbits, order, syn, rank, osd_order, cost, sweep=False):
    """Ordered-statistics decoding.

    colbits: (n, W) packed columns; order: column processing order; syn: (W,)
    packed syndrome; rank: rank of the column space. Returns a uint8 solution
    vector, or an all-0xFF length-1 array when the syndrome is unreachable.

    osd_order > 0 re-encodes over non-pivot columns and keeps the cheapest
    candidate: exhaustively over the first osd_order of them, or with
    ``sweep`` every single non-pivot flip plus all pairs among the first
    osd_order (combination sweep).
    """
    n, W = colbits.shape
    CW = (rank + 63) // 64 if rank > 0 else 1
    bvec = np.zeros((max(rank, 1), W), dtype=np.uint64)
    bcomb = np.zeros((max(rank, 1), CW), dtype=np.uint64)
    bpiv = np.zeros(max(rank, 1), dtype=np.int64)
    pivcol = np.zeros(max(rank, 1), dtype=np.int64)
    is_piv = np.zeros(n, dtype=np.uint8)
    nb = 0
    v = np.empty(W, dtype=np.uint64)
    cm = np.empty(CW, dtype=np.uint64)
    for oi in range(n):
        if nb == rank:
            break
        col = order[oi]
        for w in range(W):
            v[w] = colbits[col, w]
        for w in range(CW):
            cm[w] = 0
        for b in range(nb):
            if _bit(v, bpiv[b]):
                for w in range(W):
                    v[w] ^= bvec[b, w]
                for w in range(CW):
                    cm[w] ^= bcomb[b, w]
        p = _lowest_bit(v)
        if p < 0:
            continue
        cm[nb >> 6] ^= np.uint64(1) << np.uint64(nb & 63)
        for w in range(W):
            bvec[nb, w] = v[w]
        for w in range(CW):
            bcomb[nb, w] = cm[w]
        bpiv[nb] = p
        pivcol[nb] = col
        is_piv[col] = 1
        nb += 1

    base = _solve(bvec, bcomb, bpiv, nb, syn)
    if not _solvable(bvec, bpiv, nb, syn):
        bad = np.empty(1, dtype=np.uint8)
        bad[0] = 255
        return bad

    out = np.zeros(n, dtype=np.uint8)
    if osd_order <= 0:
        for j in range(nb):
            if _bit(base, j):
                out[pivcol[j]] = 1
        return out

    if sweep:
        return _sweep(colbits, order, cost, bvec, bcomb, bpiv, pivcol, is_piv, nb, base, osd_order, out)

    # OSD-E over the first osd_order non-pivot columns in reliability order
    extra = np.empty(osd_order, dtype=np.int64)
    ne = 0
    for oi in range(n):
        if ne == osd_order:
            break
        col = order[oi]
        if not is_piv[col]:
            extra[ne] = col
            ne += 1
    ecomb = np.zeros((max(ne, 1), CW), dtype=np.uint64)
    for t in range(ne):
        r = _solve(bvec, bcomb, bpiv, nb, colbits[extra[t]])
        for w in range(CW):
            ecomb[t, w] = r[w]
    best_cost = np.inf
    best_mask = 0
    best_comb = base.copy()
    cur = np.empty(CW, dtype=np.uint64)
    for mask in range(1 << ne):
        for w in range(CW):
            cur[w] = base[w]
        c = 0.0
        for t in range(ne):
            if (mask >> t) & 1:
                c += cost[extra[t]]
                for w in range(CW):
                    cur[w] ^= ecomb[t, w]
        c += _pivot_cost(cur, pivcol, nb, cost)
        if c < best_cost:
            best_cost = c
            best_mask = mask
            for w in range(CW):
                best_comb[w] = cur[w]
    for j in range(nb):
        if _bit(best_comb, j):
            out[pivcol[j]] = 1
    for t in range(ne):
        if (best_mask >> t) & 1:
            out[extra[t]] = 1
    return out


@njit(cache=True)
def _pivot_cost(comb, pivcol, nb, cost):
    c = 0.0
    for j in range(nb):
        if _bit(comb, j):
            c += cost[pivcol[j]]
    return c


@njit(cache=True)
def _sweep(colbits, order, cost, bvec, bcomb, bpiv, pivcol, is_piv, nb, base, lam, out):
    n = colbits.shape[0]
    CW = bcomb.shape[1]
    extra = np.empty(n - nb, dtype=np.int64)
    ne = 0
    for oi in range(n):
        col = order[oi]
        if not is_piv[col]:
            extra[ne] = col
            ne += 1
    ecomb = np.zeros((max(ne, 1), CW), dtype=np.uint64)
    for t in range(ne):
        r = _solve(bvec, bcomb, bpiv, nb, colbits[extra[t]])
        for w in range(CW):
            ecomb[t, w] = r[w]
    cur = np.empty(CW, dtype=np.uint64)
    best_cost = _pivot_cost(base, pivcol, nb, cost)
    bt, bu = -1, -1
    for t in range(ne):
        for w in range(CW):
            cur[w] = base[w] ^ ecomb[t, w]
        c = cost[extra[t]] + _pivot_cost(cur, pivcol, nb, cost)
        if c < best_cost:
            best_cost, bt, bu = c, t, -1
    m = min(lam, ne)
    # pairs in ascending own cost; with nonnegative costs the pivot part can
    # only add, so a pair whose own cost already reaches the best is skipped
    byc = np.argsort(np.array([cost[extra[t]] for t in range(m)]), kind="mergesort")
    prune = True
    for j in range(n):
        if cost[j] < 0.0:
            prune = False
    for a in range(m):
        t = byc[a]
        ct = cost[extra[t]]
        if prune and 2.0 * ct >= best_cost:
            break
        for b in range(a + 1, m):
            u = byc[b]
            cu = ct + cost[extra[u]]
            if prune and cu >= best_cost:
                break
            for w in range(CW):
                cur[w] = base[w] ^ ecomb[t, w] ^ ecomb[u, w]
            c = cu + _pivot_cost(cur, pivcol, nb, cost)
            if c < best_cost:
                best_cost, bt, bu = c, t, u
    for w in range(CW):
        cur[w] = base[w]
        if bt >= 0:
            cur[w] ^= ecomb[bt, w]
        if bu >= 0:
            cur[w] ^= ecomb[bu, w]
    for j in range(nb):
        if _bit(cur, j):
            out[pivcol[j]] = 1
    if bt >= 0:
        out[extra[bt]] = 1
    if bu >= 0:
        out[extra[bu]] = 1
    return out


@njit(cache=True)
def _solve(bvec, bcomb, bpiv, nb, target):
    W = bvec.shape[1]
    CW = bcomb.shape[1]
    v = target.copy()
    cm = np.zeros(CW, dtype=np.uint64)
    for b in range(nb):
        if _bit(v, bpiv[b]):
            for w in range(W):
                v[w] ^= bvec[b, w]
            for w in range(CW):
                cm[w] ^= bcomb[b, w]
    return cm


@njit(cache=True)
def _solvable(bvec, bpiv, nb, target):
    W = bvec.shape[1]
    v = target.copy()
    for b in range(nb):
        if _bit(v, bpiv[b]):
            for w in range(W):
                v[w] ^= bvec[b, w]
    for w in range(W):
        if v[w] != 0:
            return False
    return True


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    W = max(1, (n + 63) // 64)
    padded = np.zeros(bits.shape[:-1] + (W * 64,), dtype=np.uint8)
    padded[..., :n] = bits
    by = np.packbits(padded.reshape(bits.shape[:-1] + (W * 8, 8))[..., ::-1], axis=-1)
    return by.reshape(bits.shape[:-1] + (W * 8,)).view("<u8").reshape(bits.shape[:-1] + (W,)).copy()


@njit(cache=True)
def _lse2(excl, pat, ns):
    """log-sum-exp of excl[s] over states with pattern bit 0 and bit 1."""
    m0 = -np.inf
    m1 = -np.inf
    for s in range(ns):
        if (pat >> s) & 1:
            if excl[s] > m1:
                m1 = excl[s]
        else:
            if excl[s] > m0:
                m0 = excl[s]
    a0 = 0.0
    a1 = 0.0
    for s in range(ns):
        if (pat >> s) & 1:
            if m1 > -np.inf:
                a1 += np.exp(excl[s] - m1)
        else:
            if m0 > -np.inf:
                a0 += np.exp(excl[s] - m0)
    l0 = m0 + np.log(a0) if a0 > 0 else -np.inf
    l1 = m1 + np.log(a1) if a1 > 0 else -np.inf
    return l0, l1


@njit(cache=True)
def _max2(excl, pat, ns):
    """max-log counterpart of _lse2."""
    m0 = -np.inf
    m1 = -np.inf
    for s in range(ns):
        if (pat >> s) & 1:
            if excl[s] > m1:
                m1 = excl[s]
        elif excl[s] > m0:
            m0 = excl[s]
    return m0, m1


@njit(cache=True)
def group_bp(chk_ptr, edge_grp, edge_pat, grp_ptr, grp_edges, n_states, log_prior,
             syndrome, max_iter, alpha, product_sum):
    """BP with one multi-state variable per group of mutually exclusive
    columns; state 0 is 'no error'. Check messages are binary LLRs of the
    bit each group contributes to the check. Min-sum uses max-log
    marginals at the groups as well as at the checks."""
    G = log_prior.shape[0]
    S = log_prior.shape[1]
    n_chk = chk_ptr.shape[0] - 1
    n_edge = edge_grp.shape[0]
    cap = LLR_CAP
    lin = np.zeros(n_edge)  # check -> group
    mu = np.zeros(n_edge)  # group -> check
    total = log_prior.copy()
    hard = np.zeros(G, dtype=np.int64)
    excl = np.empty(S)

    for it in range(0, max_iter + 1):
        if it > 0:
            for c in range(n_chk):
                lo, hi = chk_ptr[c], chk_ptr[c + 1]
                if product_sum:
                    for e in range(lo, hi):
                        prod = 1.0
                        for f in range(lo, hi):
                            if f != e:
                                prod *= np.tanh(0.5 * mu[f])
                        if prod > 0.999999999999:
                            prod = 0.999999999999
                        elif prod < -0.999999999999:
                            prod = -0.999999999999
                        val = 2.0 * np.arctanh(prod)
                        lin[e] = -val if syndrome[c] else val
                else:
                    sgn = 1.0
                    m1 = np.inf
                    m2 = np.inf
                    arg = -1
                    for e in range(lo, hi):
                        a = mu[e]
                        if a < 0:
                            sgn = -sgn
                            a = -a
                        if a < m1:
                            m2 = m1
                            m1 = a
                            arg = e
                        elif a < m2:
                            m2 = a
                    if syndrome[c]:
                        sgn = -sgn
                    for e in range(lo, hi):
                        mag = m2 if e == arg else m1
                        if mag > cap:  # degree-1 check
                            mag = cap / alpha
                        s = sgn if mu[e] >= 0 else -sgn
                        lin[e] = alpha * s * mag
        # group update
        for g in range(G):
            ns = n_states[g]
            for s in range(ns):
                total[g, s] = log_prior[g, s]
            for k in range(grp_ptr[g], grp_ptr[g + 1]):
                e = grp_edges[k]
                pat = edge_pat[e]
                for s in range(ns):
                    if (pat >> s) & 1:
                        total[g, s] -= lin[e]
            best = 0
            for s in range(1, ns):
                if total[g, s] > total[g, best]:
                    best = s
            hard[g] = best
            for k in range(grp_ptr[g], grp_ptr[g + 1]):
                e = grp_edges[k]
                pat = edge_pat[e]
                for s in range(ns):
                    excl[s] = total[g, s] + (lin[e] if (pat >> s) & 1 else 0.0)
                if product_sum:
                    l0, l1 = _lse2(excl, pat, ns)
                else:
                    l0, l1 = _max2(excl, pat, ns)
                v = l0 - l1
                if v > cap:
                    v = cap
                elif v < -cap:
                    v = -cap
                mu[e] = v
        ok = True
        for c in range(n_chk):
            par = 0
            for e in range(chk_ptr[c], chk_ptr[c + 1]):
                par ^= (edge_pat[e] >> hard[edge_grp[e]]) & 1
            if par != syndrome[c]:
                ok = False
                break
        if ok:
            return total, hard, True, it
    return total, hard, False, max_iter

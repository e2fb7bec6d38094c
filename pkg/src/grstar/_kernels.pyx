# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_kernels_py``; same signatures, same results."""


cpdef int contraction_depth(tuple u, tuple v):
    cdef Py_ssize_t n = len(u), m = len(v)
    cdef Py_ssize_t kmax = n if n < m else m
    cdef Py_ssize_t k = 0
    while k < kmax and u[n - 1 - k] == v[k]:
        k += 1
    return k


cpdef list star_words(tuple u, tuple v):
    cdef Py_ssize_t n = len(u)
    cdef int depth = contraction_depth(u, v)
    cdef int k
    return [u[: n - k] + v[k:] for k in range(depth + 1)]


cpdef dict star_accumulate(list a_items, list b_items, dict acc):
    cdef tuple u, v, w
    cdef object ca, cb, c, prev
    cdef Py_ssize_t n, m, kmax, k
    for u, ca in a_items:
        n = len(u)
        for v, cb in b_items:
            c = ca * cb
            m = len(v)
            kmax = n if n < m else m
            k = 0
            while True:
                w = u[: n - k] + v[k:]
                prev = acc.get(w)
                if prev is None:
                    acc[w] = c
                else:
                    acc[w] = prev + c
                if k == kmax or u[n - 1 - k] != v[k]:
                    break
                k += 1
    return acc


cpdef dict bullet_accumulate(list a_items, list b_items, dict acc):
    cdef tuple u, v, w
    cdef object ca, cb, c, prev
    for u, ca in a_items:
        for v, cb in b_items:
            w = u + v
            c = ca * cb
            prev = acc.get(w)
            if prev is None:
                acc[w] = c
            else:
                acc[w] = prev + c
    return acc


cpdef dict wedge_accumulate(list a_items, list b_items, int k, dict acc):
    cdef tuple u, v, w, ra, lead, mid_a, mid_b, tail
    cdef object ca, cb, c, prev
    cdef Py_ssize_t nu, nv, na, nb, kmax, j
    for u, ca in a_items:
        nu = len(u)
        ra = u[nu - k:]
        lead = u[:k]
        mid_a = u[k: nu - k]
        na = len(mid_a)
        for v, cb in b_items:
            nv = len(v)
            if ra[::-1] != v[:k]:
                continue
            mid_b = v[k: nv - k]
            tail = v[nv - k:]
            nb = len(mid_b)
            c = ca * cb
            kmax = na if na < nb else nb
            j = 0
            while True:
                w = lead + mid_a[: na - j] + mid_b[j:] + tail
                prev = acc.get(w)
                if prev is None:
                    acc[w] = c
                else:
                    acc[w] = prev + c
                if j == kmax or mid_a[na - 1 - j] != mid_b[j]:
                    break
                j += 1
    return acc


cpdef list contract_words(tuple flat, list pairs, tuple outer_src, int nfree, int letters):
    cdef Py_ssize_t i, j, q, nout = len(outer_src)
    cdef int pos
    cdef list out, free, word
    cdef object s
    for i, j in pairs:
        if flat[i] != flat[j]:
            return []
    if nfree == 0:
        return [tuple([flat[s] for s in outer_src])]
    out = []
    free = [1] * nfree
    while True:
        word = [None] * nout
        for q in range(nout):
            s = outer_src[q]
            word[q] = flat[s] if s >= 0 else free[-s - 1]
        out.append(tuple(word))
        pos = 0
        while pos < nfree:
            if free[pos] < letters:
                free[pos] += 1
                break
            free[pos] = 1
            pos += 1
        if pos == nfree:
            return out

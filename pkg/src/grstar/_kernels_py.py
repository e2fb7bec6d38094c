"""Pure-Python word kernels.

These are the inner loops of the star / bullet / tower products and of tangle
contraction.  ``_kernels.pyx`` is a line-for-line Cython twin; ``kernels``
picks whichever is importable.  Words are tuples of 1-based letters and
coefficients are any objects supporting ``+`` and ``*``.
"""


def contraction_depth(u, v):
    """Largest k such that the last k letters of u, read backwards, open v."""
    n = len(u)
    kmax = min(n, len(v))
    k = 0
    while k < kmax and u[n - 1 - k] == v[k]:
        k += 1
    return k


def star_words(u, v):
    n = len(u)
    depth = contraction_depth(u, v)
    return [u[: n - k] + v[k:] for k in range(depth + 1)]


def star_accumulate(a_items, b_items, acc):
    """acc[w] += ca*cb for every contraction term w of u*v."""
    for u, ca in a_items:
        n = len(u)
        for v, cb in b_items:
            c = ca * cb
            kmax = min(n, len(v))
            k = 0
            while True:
                w = u[: n - k] + v[k:]
                if w in acc:
                    acc[w] = acc[w] + c
                else:
                    acc[w] = c
                if k == kmax or u[n - 1 - k] != v[k]:
                    break
                k += 1
    return acc


def bullet_accumulate(a_items, b_items, acc):
    for u, ca in a_items:
        for v, cb in b_items:
            w = u + v
            c = ca * cb
            if w in acc:
                acc[w] = acc[w] + c
            else:
                acc[w] = c
    return acc


def wedge_accumulate(a_items, b_items, k, acc):
    """Tower product on words segmented (left k | middle | right k)."""
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
            c = ca * cb
            kmax = min(na, len(mid_b))
            j = 0
            while True:
                w = lead + mid_a[: na - j] + mid_b[j:] + tail
                if w in acc:
                    acc[w] = acc[w] + c
                else:
                    acc[w] = c
                if j == kmax or mid_a[na - 1 - j] != mid_b[j]:
                    break
                j += 1
    return acc


def contract_words(flat, pairs, outer_src, nfree, letters):
    """Glue one tuple of inner-disk words along the strands of a tangle.

    ``flat`` is the concatenation of the input words, ``pairs`` lists the flat
    positions joined by inner-to-inner strands, ``outer_src[q]`` gives the
    source of outer letter q: a flat position (>= 0) or ``-(f+1)`` for free
    outer-to-outer strand f.  Returns the list of output words (empty if the
    letters disagree along some strand).
    """
    for i, j in pairs:
        if flat[i] != flat[j]:
            return []
    if nfree == 0:
        return [tuple(flat[s] for s in outer_src)]
    out = []
    free = [1] * nfree
    while True:
        out.append(tuple(flat[s] if s >= 0 else free[-s - 1] for s in outer_src))
        pos = 0
        while pos < nfree:
            if free[pos] < letters:
                free[pos] += 1
                break
            free[pos] = 1
            pos += 1
        if pos == nfree:
            return out

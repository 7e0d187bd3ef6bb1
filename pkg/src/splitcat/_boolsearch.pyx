# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel for the exhaustive boolean splitting search.

Same contract and visiting order as the pure-Python kernel; matrices are
row bitmasks with column 0 as the most significant bit.
"""

cdef enum:
    MAXB = 16


def search_fixed_b(list p_rows, int n, int b):
    cdef long long code, ncodes
    cdef long long imask
    cdef unsigned int m_rows[MAXB]
    cdef unsigned int cols[MAXB]
    cdef unsigned int e_rows[MAXB]
    cdef unsigned int p_arr[MAXB]
    cdef int idx[MAXB]
    cdef int counts[MAXB]
    cdef int x, r, s, j, good
    cdef unsigned int mask, bit, acc, mx, row_mask
    cdef unsigned int full_n

    if b == 0:
        for v in p_rows:
            if v != 0:
                return None
        return ([0] * n, [])
    if n > MAXB or b > MAXB or n * b > 62:
        raise ValueError("search size exceeds the compiled kernel limits")
    for x in range(n):
        p_arr[x] = p_rows[x]
    full_n = 1u << n
    row_mask = (1u << b) - 1
    ncodes = 1LL << (n * b)
    choices = [None] * b
    code = ncodes - 1
    while code >= 0:
        for x in range(n):
            m_rows[x] = <unsigned int>((code >> (b * (n - 1 - x))) & row_mask)
        for j in range(b):
            bit = 1u << (b - 1 - j)
            mask = 0
            for x in range(n):
                if m_rows[x] & bit:
                    mask |= 1u << (n - 1 - x)
            cols[j] = mask
        good = 1
        for r in range(b):
            ok = []
            for imask in range(full_n - 1, -1, -1):
                mask = <unsigned int>imask
                s = 0
                while s < b:
                    if ((mask & cols[s]) != 0) != (r == s):
                        break
                    s += 1
                if s == b:
                    ok.append(mask)
            if not ok:
                good = 0
                break
            choices[r] = ok
            counts[r] = len(ok)
        if good:
            for r in range(b):
                idx[r] = 0
            while True:
                for r in range(b):
                    e_rows[r] = choices[r][idx[r]]
                good = 1
                for x in range(n):
                    acc = 0
                    mx = m_rows[x]
                    for r in range(b):
                        if mx & (1u << (b - 1 - r)):
                            acc |= e_rows[r]
                    if acc != p_arr[x]:
                        good = 0
                        break
                if good:
                    return [m_rows[x] for x in range(n)], [e_rows[r] for r in range(b)]
                r = b - 1
                while r >= 0:
                    idx[r] += 1
                    if idx[r] < counts[r]:
                        break
                    idx[r] = 0
                    r -= 1
                if r < 0:
                    break
        code -= 1
    return None

"""Pure-Python kernel for the exhaustive boolean splitting search.

Matrices are lists of row bitmasks; column 0 is the most significant bit.
"""
from __future__ import annotations


def _columns(rows: list[int], ncols: int) -> list[int]:
    """Column bitmasks of a row-bitmask matrix (row 0 is the most significant bit)."""
    n = len(rows)
    cols = []
    for j in range(ncols):
        bit = 1 << (ncols - 1 - j)
        mask = 0
        for x in range(n):
            if rows[x] & bit:
                mask |= 1 << (n - 1 - x)
        cols.append(mask)
    return cols


def search_fixed_b(p_rows: list[int], n: int, b: int):
    """First ``(m_rows, e_rows)`` with ``e m = id_b`` and ``m e = p``, or None.

    ``m`` is ``n x b`` and ``e`` is ``b x n``; candidates are visited in
    decreasing row-major code order of ``m``, then of ``e``, so that true
    entries come before false ones.
    """
    if b == 0:
        return ([0] * n, []) if all(r == 0 for r in p_rows) else None
    full_n = 1 << n
    nb = n * b
    row_mask = (1 << b) - 1
    for code in range((1 << nb) - 1, -1, -1):
        m_rows = [(code >> (b * (n - 1 - x))) & row_mask for x in range(n)]
        cols = _columns(m_rows, b)
        # rows of e compatible with e m = id
        choices = []
        for r in range(b):
            ok = [mask for mask in range(full_n - 1, -1, -1)
                  if all(((mask & cols[s]) != 0) == (r == s) for s in range(b))]
            if not ok:
                break
            choices.append(ok)
        if len(choices) < b:
            continue
        idx = [0] * b
        while True:
            e_rows = [choices[r][idx[r]] for r in range(b)]
            good = True
            for x in range(n):
                acc = 0
                mx = m_rows[x]
                for r in range(b):
                    if mx & (1 << (b - 1 - r)):
                        acc |= e_rows[r]
                if acc != p_rows[x]:
                    good = False
                    break
            if good:
                return m_rows, e_rows
            # odometer, last row fastest
            r = b - 1
            while r >= 0:
                idx[r] += 1
                if idx[r] < len(choices[r]):
                    break
                idx[r] = 0
                r -= 1
            if r < 0:
                break
    return None

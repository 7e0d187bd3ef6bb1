"""Independent reference implementations used to cross-check the package.

Nothing here imports the code under test except for payload access.
"""
import itertools

import numpy as np


def bool_matmul(a, b):
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=bool)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            out[i, j] = any(a[i, k] and b[k, j] for k in range(a.shape[1]))
    return out


def naive_bool_split(p, b_max):
    """Brute force over all boolean pairs, ``b`` ascending, ones before zeros."""
    p = np.asarray(p, dtype=bool)
    n = p.shape[0]
    for b in range(b_max + 1):
        for mbits in itertools.product((1, 0), repeat=n * b):
            m = np.array(mbits, dtype=bool).reshape(n, b)
            for ebits in itertools.product((1, 0), repeat=b * n):
                e = np.array(ebits, dtype=bool).reshape(b, n)
                if np.array_equal(bool_matmul(e, m), np.eye(b, dtype=bool)) and \
                        np.array_equal(bool_matmul(m, e), p):
                    return m, e
    return None


def apply_kraus(ks, x):
    return sum(k @ x @ k.conj().T for k in ks)


def choi_by_loops(apply, din, dout):
    """``J = sum_ij E_ij (x) Phi(E_ij)`` with input index major."""
    j = np.zeros((din * dout, din * dout), dtype=complex)
    for a in range(din):
        for b in range(din):
            e = np.zeros((din, din))
            e[a, b] = 1
            j[a * dout:(a + 1) * dout, b * dout:(b + 1) * dout] = apply(e)
    return j


def superop_by_loops(apply, din, dout):
    """Columns are images of matrix units, row-major vectorization."""
    s = np.zeros((dout * dout, din * din), dtype=complex)
    for a in range(din):
        for b in range(din):
            e = np.zeros((din, din))
            e[a, b] = 1
            s[:, a * din + b] = np.asarray(apply(e)).reshape(-1)
    return s


def partial_trace_first(x, d1, d2):
    out = np.zeros((d2, d2), dtype=complex)
    for i in range(d1):
        out += x[i * d2:(i + 1) * d2, i * d2:(i + 1) * d2]
    return out


def fixed_dim(superop):
    n = superop.shape[0]
    return n - np.linalg.matrix_rank(superop - np.eye(n), tol=1e-8)


def random_cptp_kraus(d, r, rng):
    g = rng.normal(size=(r * d, d)) + 1j * rng.normal(size=(r * d, d))
    q, _ = np.linalg.qr(g)
    return [q[i * d:(i + 1) * d, :] for i in range(r)]

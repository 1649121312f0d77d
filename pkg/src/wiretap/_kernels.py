"""Compiled inner loops.

Everything here works on plain numpy arrays so the callers own the data
layout.  Bit-packed matrices are ``uint64`` arrays of shape
``(n_rows, n_words)`` with column ``c`` stored in word ``c >> 6``, bit
``c & 63``.
"""

import numpy as np
from numba import njit

ONE = np.uint64(1)


@njit(cache=True, nogil=True)
def echelon(a, n_cols, from_right, reduced):
    """Gaussian elimination in place.

    Pivots are searched column by column (left to right, or right to left
    when ``from_right``), taking the first row at or below the current pivot
    row that has a one.  Returns ``(rank, pivot_cols)`` where pivot row ``i``
    holds pivot column ``pivot_cols[i]``.
    """
    n_rows, n_words = a.shape
    limit = min(n_rows, n_cols)
    pivots = np.empty(limit, np.int64)
    r = 0
    for step in range(n_cols):
        if r == n_rows:
            break
        col = n_cols - 1 - step if from_right else step
        w = col >> 6
        bit = ONE << np.uint64(col & 63)
        p = -1
        for i in range(r, n_rows):
            if a[i, w] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(n_words):
                tmp = a[r, j]
                a[r, j] = a[p, j]
                a[p, j] = tmp
        # The pivot row is zero on the already-scanned side of ``col``.
        lo = 0 if from_right else w
        hi = w + 1 if from_right else n_words
        start = 0 if reduced else r + 1
        for i in range(start, n_rows):
            if i != r and a[i, w] & bit:
                for j in range(lo, hi):
                    a[i, j] ^= a[r, j]
        pivots[r] = col
        r += 1
    return r, pivots[:r]


@njit(cache=True, nogil=True)
def peel(check_ptr, check_vars, var_ptr, var_checks, values, erased):
    """Iterative erasure decoding on a Tanner graph, in place.

    ``values`` and ``erased`` are ``uint8`` arrays over the variables.
    Returns ``(status, resolved)`` with status 0 = all erasures resolved,
    1 = stuck on a stopping set, 2 = a fully known check has odd parity.
    """
    n_checks = check_ptr.shape[0] - 1
    unknown = np.zeros(n_checks, np.int64)
    parity = np.zeros(n_checks, np.uint8)
    for c in range(n_checks):
        u = 0
        s = np.uint8(0)
        for e in range(check_ptr[c], check_ptr[c + 1]):
            v = check_vars[e]
            if erased[v]:
                u += 1
            else:
                s ^= values[v]
        unknown[c] = u
        parity[c] = s
    # unknown counts only decrease, so each check is queued at most once
    queue = np.empty(n_checks, np.int64)
    head = 0
    tail = 0
    for c in range(n_checks):
        if unknown[c] == 1:
            queue[tail] = c
            tail += 1
    resolved = 0
    while head < tail:
        c = queue[head]
        head += 1
        if unknown[c] != 1:
            continue
        target = -1
        for e in range(check_ptr[c], check_ptr[c + 1]):
            if erased[check_vars[e]]:
                target = check_vars[e]
                break
        val = parity[c]
        values[target] = val
        erased[target] = 0
        resolved += 1
        for e in range(var_ptr[target], var_ptr[target + 1]):
            d = var_checks[e]
            unknown[d] -= 1
            parity[d] ^= val
            if unknown[d] == 1:
                queue[tail] = d
                tail += 1
    remaining = 0
    for v in range(erased.shape[0]):
        remaining += erased[v]
    for c in range(n_checks):
        if unknown[c] == 0 and parity[c] != 0:
            return 2, resolved
    if remaining > 0:
        return 1, resolved
    return 0, resolved


@njit(cache=True, nogil=True)
def lower_solve(ptr, idx, y):
    """Solve ``T u = y`` for unit-lower-triangular CSR ``T`` (diagonal kept)."""
    n = y.shape[0]
    u = np.zeros(n, np.uint8)
    for i in range(n):
        acc = y[i]
        for e in range(ptr[i], ptr[i + 1]):
            j = idx[e]
            if j != i:
                acc ^= u[j]
        u[i] = acc
    return u


@njit(cache=True, nogil=True)
def lower_solve_packed(ptr, idx, b):
    """Row-wise ``T Z = B`` where ``B`` and ``Z`` are bit-packed rows."""
    n, n_words = b.shape
    z = b.copy()
    for i in range(n):
        for e in range(ptr[i], ptr[i + 1]):
            j = idx[e]
            if j != i:
                for k in range(n_words):
                    z[i, k] ^= z[j, k]
    return z


@njit(cache=True, nogil=True)
def gather_xor_rows(ptr, idx, z):
    """Row ``i`` of the result is the XOR of ``z[idx[ptr[i]:ptr[i+1]]]``."""
    m = ptr.shape[0] - 1
    out = np.zeros((m, z.shape[1]), np.uint64)
    for i in range(m):
        for e in range(ptr[i], ptr[i + 1]):
            j = idx[e]
            for k in range(z.shape[1]):
                out[i, k] ^= z[j, k]
    return out


@njit(cache=True, nogil=True, inline="always")
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True, nogil=True)
def span_weights(rows):
    """Hamming weight of every codeword ``u @ rows``, indexed by the integer ``u``.

    Bit ``j`` of ``u`` selects row ``j``.  Codewords are visited in Gray-code
    order so each step costs one row XOR.
    """
    d, n_words = rows.shape
    size = 1 << d
    out = np.zeros(size, np.int32)
    cur = np.zeros(n_words, np.uint64)
    for i in range(1, size):
        j = 0
        while not (i >> j) & 1:
            j += 1
        w = 0
        for k in range(n_words):
            cur[k] ^= rows[j, k]
            w += popcount64(cur[k])
        out[i ^ (i >> 1)] = w
    return out


@njit(cache=True, nogil=True)
def walsh_hadamard(a):
    """In-place unnormalized Walsh-Hadamard transform of a length ``2^d`` array."""
    n = a.shape[0]
    h = 1
    while h < n:
        for i in range(0, n, 2 * h):
            for j in range(i, i + h):
                x = a[j]
                y = a[j + h]
                a[j] = x + y
                a[j + h] = x - y
        h *= 2
    return a

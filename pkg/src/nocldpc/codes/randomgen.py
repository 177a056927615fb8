"""Random LDPC construction by socket permutation.

Builds an m x n matrix with constant row degree; column degrees are balanced
automatically (total sockets spread as evenly as possible over columns).
Duplicate edges left by the random permutation are repaired by re-drawing
swap partners.  No girth optimization is attempted.
"""

from __future__ import annotations

import numpy as np

from .matrix import CodeError, ParityCheckMatrix


def random_code(n: int, m: int, row_degree: int, seed: int, label: str = "") -> ParityCheckMatrix:
    """Sample a random parity-check matrix, deterministic under seed."""
    if n < 1 or m < 1:
        raise CodeError("n and m must be positive")
    if row_degree < 1 or row_degree > n:
        raise CodeError(f"row degree {row_degree} infeasible for {n} columns")
    sockets = m * row_degree
    if sockets < n:
        raise CodeError(f"{sockets} sockets cannot cover {n} columns")

    base, extra = divmod(sockets, n)
    col_degree = np.full(n, base, dtype=np.int64)
    col_degree[:extra] += 1

    row_of_socket = np.repeat(np.arange(m, dtype=np.int64), row_degree)
    col_of_socket = np.repeat(np.arange(n, dtype=np.int64), col_degree)

    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(200):
        perm = rng.permutation(sockets)
        cols = col_of_socket[perm]
        if _repair_duplicates(row_of_socket, cols, rng):
            rows = [
                np.sort(cols[r * row_degree : (r + 1) * row_degree]).astype(np.int32)
                for r in range(m)
            ]
            h = ParityCheckMatrix(n_cols=n, n_rows=m, rows=rows, label=label)
            h.validate()
            return h
    raise CodeError("could not remove duplicate edges; degree combination too dense")


def _repair_duplicates(row_of_socket: np.ndarray, cols: np.ndarray, rng) -> bool:
    """Swap socket targets until no row sees the same column twice."""
    m = int(row_of_socket[-1]) + 1
    sockets = len(cols)
    for _ in range(100):
        dup_positions = []
        for r in range(m):
            lo = np.searchsorted(row_of_socket, r)
            hi = np.searchsorted(row_of_socket, r, side="right")
            seen: set[int] = set()
            for i in range(lo, hi):
                c = int(cols[i])
                if c in seen:
                    dup_positions.append(i)
                else:
                    seen.add(c)
        if not dup_positions:
            return True
        for i in dup_positions:
            j = int(rng.integers(sockets))
            cols[i], cols[j] = cols[j], cols[i]
    return False

"""The weighted graph Laplacian, its iterates, and the one-ring sup bounds.

Everything here is exact in the sense of the ambient arithmetic: graphs with
rational weights and rational function values propagate `Fraction` results,
float inputs propagate binary64.  Support handling is structural: applying
the operator can only grow the support by one ring.
"""

from __future__ import annotations

import threading

from .graphs import LocalFunction, exact_div


def laplacian_at(graph, f, x):
    """Value of the Laplacian of `f` at a single vertex.

    `f` may be a LocalFunction or any callable on vertices.  The sum over
    neighbors is divided by the vertex measure once, keeping rational inputs
    rational.
    """
    fx = f(x)
    acc = 0
    for y, w in graph.neighbors(x):
        acc += w * (f(y) - fx)
    return exact_div(acc, graph.measure(x))


def apply_laplacian(graph, f):
    """One application of the Laplacian to a finitely supported function.

    The result is supported inside the one-neighborhood of support(f); each
    output value follows the defining sum exactly.
    """
    out = {}
    for x in graph.one_neighborhood(f.support):
        out[x] = laplacian_at(graph, f, x)
    result = LocalFunction(out)
    # structural locality: can only fail if a subclass misreports neighbors
    assert result.support <= graph.one_neighborhood(f.support)
    return result


class IteratedLaplacianTable:
    """Memoized sequence base, L(base), L^2(base), ... for one graph.

    Entries are appended monotonically under a lock (single logical writer);
    readers may consume any already-published entry concurrently.
    """

    def __init__(self, graph, base):
        self.graph = graph
        self.base = base
        self._entries = [base]
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._entries)

    def entry(self, k):
        if k < 0:
            raise ValueError("iteration order must be nonnegative")
        if k >= len(self._entries):
            with self._lock:
                while k >= len(self._entries):
                    self._entries.append(
                        apply_laplacian(self.graph, self._entries[-1])
                    )
        return self._entries[k]


def iterated_laplacian(graph, a, k):
    """k-fold Laplacian of `a`, computed by successive one-ring applications."""
    return IteratedLaplacianTable(graph, a).entry(k)


def key_estimate_bound(graph, f, x):
    """One-step sup bound: 2 Deg(x) max over the unit ball of |f|.

    Always dominates |L f(x)|.
    """
    return 2 * graph.deg(x) * f.max_abs_on(graph.ball(x, 1))


def iterate_sup_bound(graph, a, x, j):
    """Chained sup bound on the j-th iterate at `x`.

    2^j (max Deg over ball(x, j-1))^j (max |a| over ball(x, j)); dominates
    |L^j a(x)| by iterating the one-step estimate.
    """
    if j < 1:
        raise ValueError("iteration order must be >= 1")
    deg_max = max(graph.deg(y) for y in graph.ball(x, j - 1))
    amp = a.max_abs_on(graph.ball(x, j))
    return (2 ** j) * (deg_max ** j) * amp

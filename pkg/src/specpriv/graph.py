"""Graphs, Laplacians and exact Laplacian spectra."""

from dataclasses import dataclass, field
import math

import numpy as np

from specpriv import _kernels
from specpriv._config import DEFAULTS


class GraphError(ValueError):
    pass


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class Graph:
    """Undirected, unweighted simple graph on nodes ``0..n-1``.

    ``edges`` holds normalised pairs ``(i, j)`` with ``i < j``, sorted.
    Build instances through :meth:`from_edges`, which rejects self-loops and
    duplicates instead of silently dropping them.
    """

    n: int
    edges: tuple

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise GraphError(f"need n >= 3 nodes, got {self.n}")
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise GraphError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphError(f"edge ({i}, {j}) has endpoint outside [0, {self.n})")
            if i > j:
                raise GraphError(f"edge ({i}, {j}) not normalised; use Graph.from_edges")
            if (i, j) in seen:
                raise GraphError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @classmethod
    def from_edges(cls, n, edges):
        norm = []
        for e in edges:
            i, j = int(e[0]), int(e[1])
            norm.append((i, j) if i <= j else (j, i))
        if len(set(norm)) != len(norm):
            dup = next(e for e in norm if norm.count(e) > 1)
            raise GraphError(f"duplicate edge {dup}")
        return cls(int(n), tuple(sorted(norm)))

    @property
    def m(self):
        return len(self.edges)

    def degrees(self):
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def max_degree(self):
        return int(self.degrees().max())

    def csr(self):
        """Adjacency in CSR form ``(indptr, indices)``."""
        nbrs = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(v) for v in nbrs])
        indices = np.array([w for v in nbrs for w in sorted(v)], dtype=np.int64)
        return indptr, indices

    def to_edge_list(self, header=True):
        lines = [f"n={self.n}"] if header else []
        lines += [f"{i} {j}" for i, j in self.edges]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Spectrum:
    """Ascending Laplacian eigenvalues, clamped into ``[0, n]``."""

    values: np.ndarray = field(repr=False)
    n: int

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def lambda2(self):
        return float(self.values[1])

    @property
    def lambda_n(self):
        return float(self.values[-1])

    def trace(self):
        return float(np.sum(self.values))


def parse_edge_list(text, require_connected=True):
    """Parse the edge-list text format.

    An optional first line ``n=<int>`` fixes the node count; otherwise it is
    ``max index + 1``. Blank lines and ``#`` comments are skipped. Graphs
    that are disconnected (for instance because the header declares
    isolated trailing nodes) are rejected unless ``require_connected`` is
    false.
    """
    n = None
    pairs = []
    first = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if first and line.replace(" ", "").startswith("n="):
            try:
                n = int(line.replace(" ", "")[2:])
            except ValueError:
                raise GraphError(f"line {lineno}: bad header {raw!r}") from None
            first = False
            continue
        first = False
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected '<u> <v>', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer endpoint in {raw!r}") from None
        if u < 0 or v < 0:
            raise GraphError(f"line {lineno}: negative node index")
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at node {u}")
        pairs.append((u, v))
    if n is None:
        n = 1 + max((max(p) for p in pairs), default=-1)
    g = Graph.from_edges(n, pairs)
    if require_connected and not is_connected(g):
        raise GraphError("graph is disconnected")
    return g


def read_edge_list(path, require_connected=True):
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), require_connected=require_connected)


def laplacian(g):
    """Dense ``L = D - H``."""
    L = np.zeros((g.n, g.n))
    for i, j in g.edges:
        L[i, j] -= 1.0
        L[j, i] -= 1.0
        L[i, i] += 1.0
        L[j, j] += 1.0
    return L


def eigvalsh(a, tol=DEFAULTS):
    """Ascending eigenvalues of a dense symmetric matrix (cyclic Jacobi)."""
    vals, sweeps = _kernels.jacobi_eigvalsh(a, tol.jacobi_offdiag, tol.jacobi_max_sweeps)
    if sweeps < 0:
        raise EigensolverError(f"Jacobi did not converge within {tol.jacobi_max_sweeps} sweeps")
    return vals


def spectrum(g, tol=DEFAULTS):
    vals = eigvalsh(laplacian(g), tol)
    return Spectrum(np.clip(vals, 0.0, float(g.n)), g.n)


def algebraic_connectivity(g, tol=DEFAULTS):
    return spectrum(g, tol).lambda2


def distances(g):
    indptr, indices = g.csr()
    return _kernels.bfs_distances(g.n, indptr, indices)


def is_connected(g):
    indptr, indices = g.csr()
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        v = stack.pop()
        for w in indices[indptr[v] : indptr[v + 1]]:
            if not seen[w]:
                seen[w] = True
                stack.append(int(w))
    return bool(seen.all())


def diameter(g):
    d = distances(g)
    if (d < 0).any():
        raise GraphError("diameter undefined for a disconnected graph")
    return int(d.max())


def mean_distance(g):
    """Average hop distance over ordered pairs of distinct nodes."""
    d = distances(g)
    if (d < 0).any():
        raise GraphError("mean distance undefined for a disconnected graph")
    return float(d.sum()) / (g.n * (g.n - 1))


def generate(kind, n, p=None, seed=None, tol=DEFAULTS):
    """Reference graphs: ``cycle``, ``complete``, ``path``, ``erdos_renyi``.

    Erdos-Renyi draws are repeated from the same seeded stream until the
    graph is connected.
    """
    if n < 3:
        raise GraphError(f"need n >= 3 nodes, got {n}")
    if kind == "cycle":
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "path":
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "complete":
        return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    if kind in ("erdos_renyi", "er"):
        if p is None or not 0 < p < 1:
            raise GraphError("erdos_renyi needs 0 < p < 1")
        if seed is None:
            raise GraphError("erdos_renyi needs an explicit seed")
        rng = np.random.default_rng(seed)
        iu, ju = np.triu_indices(n, 1)
        for _ in range(tol.er_max_retries):
            keep = rng.random(iu.size) < p
            g = Graph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist())))
            if is_connected(g):
                return g
        raise GraphError(f"no connected G({n}, {p}) after {tol.er_max_retries} draws")
    raise GraphError(f"unknown graph kind {kind!r}")


def cycle_spectrum(n):
    """Closed form ``2 - 2 cos(2 pi k / n)``, sorted."""
    k = np.arange(n)
    return np.sort(2.0 - 2.0 * np.cos(2.0 * math.pi * k / n))

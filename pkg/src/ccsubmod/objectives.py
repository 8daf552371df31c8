"""Monotone submodular objectives and their input formats.

Both concrete objectives are weighted coverage functions over Python-int
bitsets: max coverage directly, and influence spread as the average number
of nodes reachable from the seeds over a fixed ensemble of live-edge
graphs.  Marginal gains are computed from integer counts, so monotonicity
and submodularity hold exactly in floating point.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np


class FormatError(ValueError):
    """Malformed input file; the message names the file and line."""


class SubmodularObjective:
    """Set function ``f`` over the ground set ``{0, ..., n-1}``.

    Subclasses implement :meth:`value`; :meth:`gain` defaults to the
    difference of two evaluations.
    """

    n: int = 0

    def value(self, X: Iterable[int]) -> float:
        raise NotImplementedError

    def gain(self, X: Iterable[int], v: int) -> float:
        X = list(X)
        return self.value(X + [v]) - self.value(X)

    def __call__(self, X: Iterable[int]) -> float:
        return self.value(X)


class FunctionObjective(SubmodularObjective):
    """Wrap a plain callable ``f(frozenset) -> float``."""

    def __init__(self, n: int, f: Callable[[frozenset], float]):
        self.n = n
        self._f = f

    def value(self, X):
        return float(self._f(frozenset(X)))


class BitsetCoverage(SubmodularObjective):
    """``f(X) = |union of covers(x)| / scale`` with covers stored as int bitsets."""

    scale: int = 1

    def cover(self, v: int) -> int:
        raise NotImplementedError

    def covered(self, X: Iterable[int]) -> int:
        bits = 0
        for x in X:
            bits |= self.cover(x)
        return bits

    def count(self, X: Iterable[int]) -> int:
        return self.covered(X).bit_count()

    def value(self, X):
        return self.count(X) / self.scale

    def gain(self, X, v):
        return (self.cover(v) & ~self.covered(X)).bit_count() / self.scale

    def gain_given(self, covered: int, v: int) -> float:
        """Marginal gain of ``v`` when ``covered`` is the current union."""
        return (self.cover(v) & ~covered).bit_count() / self.scale


@dataclass(frozen=True)
class CoverageInstance:
    universe_size: int
    covers: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for s, cov in enumerate(self.covers):
            for u in cov:
                if not 0 <= u < self.universe_size:
                    raise ValueError(
                        f"element {s} covers index {u} outside universe of size {self.universe_size}"
                    )

    @property
    def n(self) -> int:
        return len(self.covers)


class CoverageObjective(BitsetCoverage):
    """Max coverage ``f(X) = |union of covers(s)|``."""

    def __init__(self, inst: CoverageInstance):
        self.instance = inst
        self.n = inst.n
        self._bits = []
        for cov in inst.covers:
            b = 0
            for u in cov:
                b |= 1 << u
            self._bits.append(b)

    def cover(self, v):
        return self._bits[v]


def coverage_value(inst: CoverageInstance, X: Iterable[int]) -> float:
    seen = set()
    for x in X:
        seen.update(inst.covers[x])
    return float(len(seen))


@dataclass(frozen=True)
class InfluenceGraph:
    """Directed graph with independent-cascade edge probabilities."""

    n: int
    src: np.ndarray
    dst: np.ndarray
    prob: np.ndarray

    def __post_init__(self):
        for name in ("src", "dst", "prob"):
            arr = np.ascontiguousarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.src.shape == self.dst.shape == self.prob.shape):
            raise ValueError("edge arrays must have equal length")
        if self.m and (self.src.max() >= self.n or self.dst.max() >= self.n or min(self.src.min(), self.dst.min()) < 0):
            raise ValueError("edge endpoint outside 0..n-1")

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[tuple[int, int, float]]) -> "InfluenceGraph":
        if edges:
            u, v, p = zip(*edges)
        else:
            u, v, p = (), (), ()
        prob = np.array(p, dtype=float)
        if prob.size and not np.all((prob >= 0) & (prob <= 1)):
            raise ValueError("edge probabilities must lie in [0, 1]")
        return cls(n, np.array(u, dtype=np.int64), np.array(v, dtype=np.int64), prob)

    @property
    def m(self) -> int:
        return int(self.src.size)

    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n)

    def degrees(self) -> np.ndarray:
        return self.out_degree()


@dataclass(frozen=True)
class LiveEdgeEnsemble:
    """``R`` pre-sampled live-edge subgraphs; ``live[r, e]`` marks edge ``e`` present."""

    live: np.ndarray
    seed: int

    @property
    def R(self) -> int:
        return int(self.live.shape[0])


def sample_live_edges(g: InfluenceGraph, R: int, seed: int) -> LiveEdgeEnsemble:
    """Keep every edge independently with probability ``p_e`` in each of ``R`` rounds.

    Realisation ``r`` draws from its own generator seeded with ``(seed, r)``,
    so realisations can be produced in any order with identical results.
    """
    if R < 1:
        raise ValueError("need at least one realisation")
    live = np.empty((R, g.m), dtype=bool)
    for r in range(R):
        rng = np.random.default_rng([int(seed), r])
        live[r] = rng.random(g.m) < g.prob
    live.setflags(write=False)
    return LiveEdgeEnsemble(live, int(seed))


class InfluenceObjective(BitsetCoverage):
    """Expected number of activated nodes, averaged over a live-edge ensemble.

    ``cover(v)`` concatenates the per-realisation reachable sets of ``v``
    (realisation ``r`` occupies bits ``r*n .. r*n + n - 1``), so the spread
    is a coverage function over ``R * n`` (realisation, node) pairs divided
    by ``R``.  Reachable sets are computed on first use and memoised.
    """

    def __init__(self, g: InfluenceGraph, ens: LiveEdgeEnsemble):
        if ens.live.shape[1] != g.m:
            raise ValueError("ensemble was sampled for a different graph")
        self.graph = g
        self.ensemble = ens
        self.n = g.n
        self.scale = ens.R
        self._cover: list[int | None] = [None] * g.n
        self._adj = [self._adjacency(ens.live[r]) for r in range(ens.R)]
        self._mark = [0] * g.n
        self._epoch = 0
        self._lock = threading.Lock()

    def _adjacency(self, mask):
        src = self.graph.src[mask]
        dst = self.graph.dst[mask]
        order = np.argsort(src, kind="stable")
        src, dst = src[order], dst[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return indptr.tolist(), dst.tolist()

    def _reach_bits(self, r: int, v: int) -> int:
        indptr, nbrs = self._adj[r]
        self._epoch += 1
        mark, epoch = self._mark, self._epoch
        mark[v] = epoch
        stack = [v]
        bits = 0
        while stack:
            u = stack.pop()
            bits |= 1 << u
            for w in nbrs[indptr[u]:indptr[u + 1]]:
                if mark[w] != epoch:
                    mark[w] = epoch
                    stack.append(w)
        return bits

    def cover(self, v):
        c = self._cover[v]
        if c is None:
            with self._lock:
                c = 0
                for r in range(self.ensemble.R):
                    c |= self._reach_bits(r, v) << (r * self.n)
                self._cover[v] = c
        return c


def influence_spread(ens: LiveEdgeEnsemble, g: InfluenceGraph, X: Iterable[int]) -> float:
    return InfluenceObjective(g, ens).value(X)


def degree_cost_model(g: InfluenceGraph, mode: str = "out") -> np.ndarray:
    """Expected costs ``a(v) = deg(v) + 1``; ``mode`` is ``out``, ``in`` or ``total``."""
    if mode == "out":
        deg = g.out_degree()
    elif mode == "in":
        deg = g.in_degree()
    elif mode == "total":
        deg = g.out_degree() + g.in_degree()
    else:
        raise ValueError(f"unknown degree mode {mode!r}")
    return deg.astype(float) + 1.0


def uniform_cost_model(n: int) -> np.ndarray:
    return np.ones(n, dtype=float)


def _data_lines(path):
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def load_graph(path: str | os.PathLike) -> InfluenceGraph:
    """Read ``u v p`` edge lines, with an optional leading ``n <count>`` header."""
    n_header = None
    edges = []
    seen = set()
    for lineno, line in _data_lines(path):
        parts = line.split()
        if parts[0] == "n":
            if edges or n_header is not None or len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: 'n <count>' must be a single leading header")
            try:
                n_header = int(parts[1])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad node count {parts[1]!r}") from None
            if n_header < 0:
                raise FormatError(f"{path}:{lineno}: node count must be non-negative")
            continue
        if len(parts) != 3:
            raise FormatError(f"{path}:{lineno}: expected '<u> <v> <p>', got {line!r}")
        try:
            u, v, p = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: cannot parse {line!r}") from None
        if u < 0 or v < 0:
            raise FormatError(f"{path}:{lineno}: node ids must be non-negative")
        if not 0 < p <= 1:
            raise FormatError(f"{path}:{lineno}: probability {p} outside the range (0, 1]")
        if (u, v) in seen:
            raise FormatError(f"{path}:{lineno}: duplicate edge ({u}, {v})")
        seen.add((u, v))
        edges.append((u, v, p))
    n = max((max(u, v) for u, v, _ in edges), default=-1) + 1
    if n_header is not None:
        if n_header < n:
            raise FormatError(f"{path}: header declares n={n_header} but ids reach {n - 1}")
        n = n_header
    return InfluenceGraph.from_edges(n, edges)


def load_coverage(path: str | os.PathLike) -> CoverageInstance:
    """Read a ``universe <m>`` header followed by one element per line.

    Each element line lists the universe indices it covers; a lone ``-``
    denotes an element covering nothing.  Blank lines and ``#`` comments
    are ignored.
    """
    universe = None
    covers = []
    for lineno, line in _data_lines(path):
        parts = line.split()
        if universe is None:
            if parts[0] != "universe" or len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected header 'universe <m>'")
            try:
                universe = int(parts[1])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad universe size {parts[1]!r}") from None
            continue
        if parts == ["-"]:
            covers.append(())
            continue
        try:
            idx = tuple(sorted({int(p) for p in parts}))
        except ValueError:
            raise FormatError(f"{path}:{lineno}: cannot parse indices in {line!r}") from None
        if idx and (idx[0] < 0 or idx[-1] >= universe):
            raise FormatError(f"{path}:{lineno}: index outside universe 0..{universe - 1}")
        covers.append(idx)
    if universe is None:
        raise FormatError(f"{path}: missing 'universe <m>' header")
    return CoverageInstance(universe, tuple(covers))


def write_graph(g: InfluenceGraph, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(f"n {g.n}\n")
        for u, v, p in zip(g.src.tolist(), g.dst.tolist(), g.prob.tolist()):
            fh.write(f"{u} {v} {p!r}\n")


def write_coverage(inst: CoverageInstance, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(f"universe {inst.universe_size}\n")
        for cov in inst.covers:
            fh.write((" ".join(map(str, cov)) or "-") + "\n")


def random_coverage(n: int, universe: int, rng: np.random.Generator, density: float = 0.3) -> CoverageInstance:
    """Random instance where each element covers each index with prob ``density``."""
    mask = rng.random((n, universe)) < density
    return CoverageInstance(universe, tuple(tuple(np.flatnonzero(row).tolist()) for row in mask))


def random_graph(n: int, m: int, rng: np.random.Generator, p_range=(0.05, 0.5)) -> InfluenceGraph:
    """Random directed graph with ``m`` distinct non-loop edges and uniform probabilities."""
    m = min(m, n * (n - 1))
    edges = set()
    while len(edges) < m:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u != v:
            edges.add((u, v))
    edges = sorted(edges)
    probs = rng.uniform(*p_range, size=len(edges))
    return InfluenceGraph.from_edges(n, [(u, v, float(p)) for (u, v), p in zip(edges, probs)])

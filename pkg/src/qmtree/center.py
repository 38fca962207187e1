"""Centers and spanned subtrees of finite vertex sets."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Tuple

from .errors import InvariantError, PreconditionError
from .tree import TreeVertex, distance, geodesic


@dataclass(frozen=True)
class Center:
    """Either one vertex (kind "vertex") or a closest pair (kind "edge")."""

    kind: str
    vertices: Tuple[TreeVertex, ...]

    def is_edge(self) -> bool:
        return self.kind == "edge"


def _center_of_pair(u: TreeVertex, v: TreeVertex) -> Center:
    g = geodesic(u, v)
    d = len(g) - 1
    if d % 2 == 0:
        return Center("vertex", (g[d // 2],))
    lo, hi = g[(d - 1) // 2], g[(d + 1) // 2]
    if hi < lo:
        lo, hi = hi, lo
    return Center("edge", (lo, hi))


def tree_center(vertices: Iterable[TreeVertex]) -> Center:
    """Midpoint of a diametral pair of the set.

    All diametral pairs of a tree metric share their midpoint; that is
    re-derived here pair by pair and checked, as a guard on the distance
    and geodesic code underneath.
    """
    vs = sorted(set(vertices))
    if not vs:
        raise PreconditionError("center of an empty set")
    if len(vs) == 1:
        return Center("vertex", (vs[0],))
    pairs = {}
    diam = 0
    for u, v in combinations(vs, 2):
        d = distance(u, v)
        pairs.setdefault(d, []).append((u, v))
        diam = max(diam, d)
    if diam == 0:
        return Center("vertex", (vs[0],))
    centers = {_center_of_pair(u, v) for u, v in pairs[diam]}
    if len(centers) != 1:
        raise InvariantError("diametral pairs disagree about the center")
    return centers.pop()


@dataclass(frozen=True)
class Subtree:
    vertices: Tuple[TreeVertex, ...]
    edges: Tuple[Tuple[TreeVertex, TreeVertex], ...]

    def neighbors_in(self, v: TreeVertex) -> List[TreeVertex]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return out


def spanned_subtree(vertices: Iterable[TreeVertex]) -> Subtree:
    """Smallest connected subtree containing the set: the union of all
    pairwise geodesics."""
    vs = sorted(set(vertices))
    if not vs:
        raise PreconditionError("span of an empty set")
    nodes = set(vs)
    for u, v in combinations(vs, 2):
        nodes.update(geodesic(u, v))
    nodes = sorted(nodes)
    edges = []
    for u, v in combinations(nodes, 2):
        if distance(u, v) == 1:
            edges.append((u, v))
    return Subtree(tuple(nodes), tuple(edges))


def eccentricity_table(sub: Subtree) -> Dict[TreeVertex, int]:
    return {v: max(distance(v, w) for w in sub.vertices)
            for v in sub.vertices}

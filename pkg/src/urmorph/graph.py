"""Small digraph helpers: strongly connected components and reachability."""
from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Mapping


def scc(nodes: Iterable[Hashable], succ: Mapping[Hashable, Iterable[Hashable]]) -> list[list]:
    """Tarjan's algorithm, iterative.  Components come out in reverse topological
    order (sinks first); node order inside a component follows ``nodes``."""
    nodes = list(nodes)
    order = {v: i for i, v in enumerate(nodes)}
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    comps: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(sorted(succ.get(root, ()), key=order.__getitem__)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(succ.get(w, ()), key=order.__getitem__))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp, key=order.__getitem__))
    return comps


def reachable(start: Iterable[Hashable], succ: Mapping[Hashable, Iterable[Hashable]]) -> set:
    seen = set(start)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in succ.get(v, ()):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def shortest_cycle_length(v: Hashable, succ: Mapping[Hashable, Iterable[Hashable]]) -> int | None:
    """Length of the shortest directed cycle through ``v``."""
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in succ.get(u, ()):
            if w == v:
                return dist[u] + 1
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return None


def shortest_path(src: Hashable, dst: Hashable, succ) -> list | None:
    """Node list of a BFS-shortest path ``src -> ... -> dst`` (``[src]`` if equal)."""
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            path = [u]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for w in succ.get(u, ()):
            if w not in prev:
                prev[w] = u
                queue.append(w)
    return None

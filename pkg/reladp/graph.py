"""Dependency graphs of ADP problems, SCCs, minimal lassos and the
dependency graph processor.

Edges are estimated with CAP/REN: an annotated subterm t of A1's rhs may reach
the lhs of A2 if REN(CAP(t#)) unifies with a renamed copy of lhs(A2)#.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

from graphviz import Digraph

from reladp.adp import Adp, AdpProblem, annotated_subterms, flatten
from reladp.terms import App, FreshVars, Symbol, Term, Var, rename, sharp_root, symbols, unify_terms

log = logging.getLogger(__name__)

Node = int


def cap(t: Term, defined: Iterable[Symbol], fresh: FreshVars) -> Term:
    """Replace every proper subterm with a defined root by a fresh variable."""
    defined = frozenset(defined)

    def walk(u: Term, top: bool) -> Term:
        if isinstance(u, Var):
            return u
        if not top and u.symbol in defined:
            return fresh()
        return App(u.symbol, tuple(walk(a, False) for a in u.args))

    return walk(t, True)


def ren(t: Term, fresh: FreshVars) -> Term:
    """Linearize: a fresh variable for every variable occurrence."""
    if isinstance(t, Var):
        return fresh()
    return App(t.symbol, tuple(ren(a, fresh) for a in t.args))


def may_reach(t: Term, lhs: Term, defined: Iterable[Symbol]) -> bool:
    """Whether instances of t may rewrite below the root to instances of lhs."""
    fresh = FreshVars("?c")
    return unify_terms(ren(cap(t, defined, fresh), fresh), rename(lhs, FreshVars("?l"))) is not None


@dataclass(frozen=True)
class DependencyGraph:
    nodes: Tuple[Adp, ...]
    main_count: int
    edges: FrozenSet[Tuple[Node, Node]]

    def is_main(self, n: Node) -> bool:
        return n < self.main_count

    def successors(self, n: Node) -> List[Node]:
        return sorted(b for a, b in self.edges if a == n)

    def adjacency(self) -> Dict[Node, List[Node]]:
        adj: Dict[Node, List[Node]] = {n: [] for n in range(len(self.nodes))}
        for a, b in sorted(self.edges):
            adj[a].append(b)
        return adj

    def label(self, n: Node, taken: Iterable[str] = ()) -> str:
        return self.nodes[n].show(taken)


def _build(nodes, main_count, defined):
    edges = set()
    for i, source in enumerate(nodes):
        for _, sub in annotated_subterms(source.rhs):
            target_term = sharp_root(sub)
            for j, target in enumerate(nodes):
                if (i, j) in edges or target.lhs.symbol != sub.symbol:
                    continue
                if may_reach(target_term, sharp_root(target.lhs), defined):
                    edges.add((i, j))
    return DependencyGraph(tuple(nodes), main_count, frozenset(edges))


def estimate_dependency_graph(problem: AdpProblem) -> DependencyGraph:
    """Nodes are main ADPs (indices below main_count) followed by base ADPs."""
    return _build(problem.main + problem.base, len(problem.main), problem.defined)


def strongly_connected_components(graph: Mapping[Node, Sequence[Node]]) -> List[Tuple[Node, ...]]:
    """Tarjan's algorithm; components come out in reverse topological order."""
    counter = [0]
    stack: List[Node] = []
    on_stack = set()
    lowlinks: Dict[Node, int] = {}
    index: Dict[Node, int] = {}
    result: List[Tuple[Node, ...]] = []

    def strongconnect(node: Node) -> None:
        index[node] = lowlinks[node] = counter[0]
        counter[0] += 1
        stack.append(node)
        on_stack.add(node)
        for successor in graph.get(node, ()):
            if successor not in lowlinks:
                strongconnect(successor)
                lowlinks[node] = min(lowlinks[node], lowlinks[successor])
            elif successor in on_stack:
                lowlinks[node] = min(lowlinks[node], index[successor])
        if lowlinks[node] == index[node]:
            component = []
            while True:
                successor = stack.pop()
                on_stack.discard(successor)
                component.append(successor)
                if successor == node:
                    break
            result.append(tuple(sorted(component)))

    for node in graph:
        if node not in lowlinks:
            strongconnect(node)
    return result


def sccs(graph: DependencyGraph) -> List[FrozenSet[Node]]:
    """Non-trivial SCCs (a singleton needs a self-edge), ordered by smallest node."""
    out = []
    for component in strongly_connected_components(graph.adjacency()):
        if len(component) > 1 or (component[0], component[0]) in graph.edges:
            out.append(frozenset(component))
    return sorted(out, key=min)


def lasso_graph(problem: AdpProblem) -> DependencyGraph:
    """The graph of (♭(P), P=), keeping the node numbering of the full graph."""
    nodes = [flatten(a) for a in problem.main] + list(problem.base)
    return _build(nodes, len(problem.main), problem.defined)


def minimal_lassos(problem: AdpProblem) -> List[FrozenSet[Node]]:
    """SCC ∪ path nodes ∪ main node, for every base SCC holding a doubly
    annotated ADP and every main ADP reachable from it through base ADPs."""
    graph = lasso_graph(problem)
    adj = graph.adjacency()
    lassos: List[FrozenSet[Node]] = []
    for component in sccs(graph):
        if not any(len(graph.nodes[n].annotations) > 1 for n in component if not graph.is_main(n)):
            continue
        # Base nodes reachable from the SCC without passing a main node.
        reach = set(component)
        todo = list(component)
        while todo:
            for m in adj[todo.pop()]:
                if not graph.is_main(m) and m not in reach:
                    reach.add(m)
                    todo.append(m)
        targets = sorted({m for n in reach for m in adj[n] if graph.is_main(m)})
        for target in targets:
            # Nodes of `reach` lying on some base-only path into the target.
            onpath = {n for n in reach if target in adj[n]}
            changed = True
            while changed:
                changed = False
                for n in reach - onpath:
                    if any(m in onpath for m in adj[n]):
                        onpath.add(n)
                        changed = True
            lasso = frozenset(component) | onpath | {target}
            if lasso not in lassos:
                lassos.append(lasso)
    return lassos


@dataclass(frozen=True)
class Decomposition:
    graph: DependencyGraph
    components: Tuple[FrozenSet[Node], ...]
    lassos: Tuple[FrozenSet[Node], ...]
    problems: Tuple[AdpProblem, ...]


def restrict(problem: AdpProblem, keep: FrozenSet[Node]) -> AdpProblem:
    """(P ∩ Q, (P= ∩ Q) ∪ ♭((P ∪ P=) \\ Q)) for node set Q."""
    m = len(problem.main)
    main = tuple(a for i, a in enumerate(problem.main) if i in keep)
    outside = tuple(flatten(a) for i, a in enumerate(problem.main) if i not in keep)
    base = tuple(a if m + j in keep else flatten(a) for j, a in enumerate(problem.base))
    return AdpProblem(main, outside + base)


def decompose(problem: AdpProblem) -> Decomposition:
    graph = estimate_dependency_graph(problem)
    components = [c for c in sccs(graph) if any(graph.is_main(n) for n in c)]
    lassos = [q for q in minimal_lassos(problem) if q not in components]
    problems = tuple(restrict(problem, q) for q in components + lassos)
    log.info("dependency graph: %d nodes, %d edges, %d SCCs, %d lassos", len(graph.nodes), len(graph.edges), len(components), len(lassos))
    return Decomposition(graph, tuple(components), tuple(lassos), problems)


def dg_processor(problem: AdpProblem) -> List[AdpProblem]:
    return list(decompose(problem).problems)


def graph_params(graph: DependencyGraph, selected: Iterable[Iterable[Node]] = ()) -> dict:
    """JSON-native description of a graph, as stored in proof nodes."""
    taken = {f.name for a in graph.nodes for f in symbols(a.lhs) | symbols(a.rhs.plain)}
    return {
        "nodes": [graph.label(n, taken) for n in range(len(graph.nodes))],
        "main": [graph.is_main(n) for n in range(len(graph.nodes))],
        "edges": [[a, b] for a, b in sorted(graph.edges)],
        "selected": [sorted(q) for q in selected],
    }


def draw_graph(dot: Digraph, params: Mapping, prefix: str = "n") -> None:
    """Main ADPs boxed, base ADPs oval, nodes of selected sets filled."""
    chosen = {n for q in params.get("selected", ()) for n in q}
    for n, (label, main) in enumerate(zip(params["nodes"], params["main"])):
        attrs = {"shape": "box" if main else "ellipse"}
        if n in chosen:
            attrs.update(style="filled", fillcolor="lightgrey")
        dot.node(f"{prefix}{n}", label, **attrs)
    for a, b in params["edges"]:
        dot.edge(f"{prefix}{a}", f"{prefix}{b}")


def graph_dot(graph: DependencyGraph, selected: Iterable[Iterable[Node]] = (), name: str = "dependency graph") -> Digraph:
    dot = Digraph(comment=name)
    draw_graph(dot, graph_params(graph, selected))
    return dot


def dependency_graph_dot(problem: AdpProblem) -> str:
    return graph_dot(estimate_dependency_graph(problem)).source

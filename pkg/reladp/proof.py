"""Proof trees and their text, JSON and DOT renderings."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterator, List

from graphviz import Digraph

from reladp.graph import draw_graph

SN = "SN"
NOT_SN = "NOT-SN"
UNKNOWN = "UNKNOWN"
FORMATS = ("text", "json", "dot")


@dataclass
class ProofNode:
    """One processor application (or a leaf) of a proof.

    `params` holds JSON-native values only, so a node survives a JSON
    round-trip unchanged.
    """

    label: str
    problem: str
    params: Dict[str, Any] = field(default_factory=dict)
    children: List["ProofNode"] = field(default_factory=list)
    verdict: str = UNKNOWN

    @classmethod
    def leaf(cls, label: str, problem: str, verdict: str, **params) -> "ProofNode":
        return cls(label, problem, params, [], verdict)

    @classmethod
    def inner(cls, label: str, problem: str, children: List["ProofNode"], **params) -> "ProofNode":
        return cls(label, problem, params, list(children), combine(children))

    def walk(self) -> Iterator["ProofNode"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def find(self, label: str) -> List["ProofNode"]:
        return [n for n in self.walk() if n.label == label]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProofNode":
        return cls(
            label=data["label"],
            problem=data["problem"],
            params=dict(data.get("params", {})),
            children=[cls.from_dict(c) for c in data.get("children", [])],
            verdict=data.get("verdict", UNKNOWN),
        )


def combine(children: List[ProofNode]) -> str:
    """SN iff every child is SN; a NOT-SN child makes the parent NOT-SN."""
    verdicts = {c.verdict for c in children}
    if NOT_SN in verdicts:
        return NOT_SN
    if verdicts <= {SN}:
        return SN
    return UNKNOWN


def _text(node, depth, out):
    pad = "  " * depth
    reason = node.params.get("reason")
    if reason:
        out.append(f"{pad}problem {node.problem} is {node.verdict}: {reason}")
    else:
        out.append(f"{pad}{node.label} on {node.problem}: {node.verdict}")
    for key, value in node.params.items():
        if key in ("reason", "graph"):
            continue
        if isinstance(value, list):
            if not value:
                continue
            out.append(f"{pad}  {key}:")
            out.extend(f"{pad}    {item}" for item in value)
        else:
            out.append(f"{pad}  {key}: {value}")
    if "graph" in node.params:
        g = node.params["graph"]
        out.append(f"{pad}  dependency graph: {len(g['nodes'])} nodes, {len(g['edges'])} edges")
    for child in node.children:
        _text(child, depth + 1, out)


def _dot(node) -> str:
    dot = Digraph(comment="proof")
    for k, n in enumerate(x for x in node.walk() if "graph" in x.params):
        with dot.subgraph(name=f"cluster_{k}") as sub:
            sub.attr(label=f"{n.label}: {n.problem}")
            draw_graph(sub, n.params["graph"], prefix=f"g{k}n")
    return dot.source


def render_proof(node: ProofNode, fmt: str = "text") -> str:
    if fmt == "text":
        out: List[str] = []
        _text(node, 0, out)
        return "\n".join(out)
    if fmt == "json":
        return json.dumps(node.to_dict(), indent=2, ensure_ascii=False)
    if fmt == "dot":
        return _dot(node)
    raise ValueError(f"unknown proof format {fmt!r}; choose from {', '.join(FORMATS)}")


def parse_proof(text: str) -> ProofNode:
    return ProofNode.from_dict(json.loads(text))

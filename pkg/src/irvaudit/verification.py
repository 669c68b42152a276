"""Trust-free check that an assertion set excludes every alternative winner.

Enumerates elimination orders ending in each candidate other than the
reported winner, pruning a subtree as soon as one assertion contradicts its
suffix. The contradiction test is re-derived from assertion semantics alone;
nothing here depends on how the assertions were generated.

A suffix (c_r, ..., c_k, w') stands for every elimination order that ends
with those eliminations, all candidates outside the suffix having been
eliminated earlier in some order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .assertions import NEB, Assertion, AssertionSet
from .ballots import Contest

# 9! * 9 suffix checks is the practical exhaustive ceiling; larger rosters
# need the caller to opt in explicitly.
DEFAULT_MAX_FACTORIAL = 9


class RosterTooLargeError(ValueError):
    pass


def contradicts(assertion: Assertion, suffix: Sequence[int], roster: frozenset[int]) -> bool:
    """True when no elimination order ending with `suffix` is consistent with
    the assertion being true."""
    if assertion.kind == NEB:
        # winner eliminated (or outside the suffix) while loser is still standing
        try:
            loser_pos = suffix.index(assertion.loser)
        except ValueError:
            return False
        if assertion.winner not in suffix:
            return True  # winner eliminated in the unknown prefix, before loser
        return suffix.index(assertion.winner) < loser_pos
    # NEN: the suffix fixes the eliminated-before set for each of its steps.
    try:
        pos = suffix.index(assertion.winner)
    except ValueError:
        return False
    if pos == len(suffix) - 1:
        return False  # suffix has the winner surviving, not eliminated
    if assertion.loser not in suffix[pos + 1:]:
        return False
    eliminated_before = roster - frozenset(suffix[pos:])
    return eliminated_before == assertion.context


@dataclass
class TreeNode:
    candidate: int
    depth: int
    annotation: str  # "pruned=<idx>", "expanded", or "unpruned"
    children: list["TreeNode"] = field(default_factory=list)


@dataclass
class PrunedTree:
    alt_winner: int
    root: TreeNode


@dataclass
class VerificationResult:
    certified: bool
    failures: list[tuple[int, ...]]
    trees: list[PrunedTree]
    nodes_checked: int


def _first_contradicting(assertions: Sequence[Assertion], suffix: tuple[int, ...],
                         roster: frozenset[int]) -> int | None:
    for idx, a in enumerate(assertions):
        if contradicts(a, suffix, roster):
            return idx
    return None


def _explore(suffix: tuple[int, ...], roster: frozenset[int],
             assertions: Sequence[Assertion], failures: list[tuple[int, ...]],
             counter: list[int]) -> TreeNode:
    counter[0] += 1
    node = TreeNode(candidate=suffix[0], depth=len(suffix) - 1, annotation="expanded")
    idx = _first_contradicting(assertions, suffix, roster)
    if idx is not None:
        node.annotation = f"pruned={idx}"
        return node
    remaining = sorted(roster - set(suffix))
    if not remaining:
        failures.append(suffix)
        node.annotation = "unpruned"
        return node
    any_unpruned = False
    for cand in remaining:
        child = _explore((cand,) + suffix, roster, assertions, failures, counter)
        node.children.append(child)
        if child.annotation == "unpruned":
            any_unpruned = True
    if any_unpruned:
        node.annotation = "unpruned"  # flag the whole open path, root included
    return node


def verify_assertion_set(contest: Contest, assertions: Sequence[Assertion] | AssertionSet,
                         max_factorial: int | None = None) -> VerificationResult:
    """Certify that every elimination order with a winner other than the
    reported one is contradicted by at least one assertion."""
    if isinstance(assertions, AssertionSet):
        assertions = assertions.plain()
    if not assertions:
        assertions = []
    roster = frozenset(contest.roster)
    if contest.reported_winner is None:
        raise ValueError("contest has no reported winner to certify")
    limit = DEFAULT_MAX_FACTORIAL if max_factorial is None else max_factorial
    if len(roster) > limit:
        raise RosterTooLargeError(
            f"roster of {len(roster)} exceeds exhaustive limit {limit}; "
            "pass an explicit max_factorial override to proceed"
        )
    failures: list[tuple[int, ...]] = []
    trees: list[PrunedTree] = []
    counter = [0]
    for alt in sorted(roster - {contest.reported_winner}):
        root = _explore((alt,), roster, assertions, failures, counter)
        trees.append(PrunedTree(alt_winner=alt, root=root))
    return VerificationResult(certified=not failures, failures=failures,
                              trees=trees, nodes_checked=counter[0])


TREEDOC_HEADER = "TREEDOC,1"


def export_treedoc(contest: Contest, aset: AssertionSet,
                   result: VerificationResult,
                   assertion_status: Sequence[str] | None = None) -> str:
    """Serialize the pruned trees for UI consumption.

    One `TREE` block per alternative winner; `NODE,<depth>,<candidate>,<annotation>`
    lines in preorder. `assertion_status` entries (e.g. "confirmed"/"unconfirmed")
    line up with the assertion indices used in `pruned=` annotations.
    """
    lines = [TREEDOC_HEADER, f"CONTEST,{contest.contest_id}", f"WINNER,{contest.reported_winner}"]
    for cid in contest.candidates():
        name = contest.names.get(cid, "")
        lines.append(f"CANDIDATE,{cid},{name}")
    for idx, sa in enumerate(aset.assertions):
        status = assertion_status[idx] if assertion_status else "untested"
        lines.append(f"ASSERTION,{idx},{status},{sa.assertion.token()}")
        lines.append(f"EXPLAIN,{idx},{sa.assertion.explanation()}")
    for tree in result.trees:
        lines.append(f"TREE,{tree.alt_winner}")
        stack = [tree.root]
        while stack:
            node = stack.pop()
            lines.append(f"NODE,{node.depth},{node.candidate},{node.annotation}")
            stack.extend(reversed(node.children))
    return "\n".join(lines) + "\n"


def export_dot(contest: Contest, aset: AssertionSet, result: VerificationResult) -> str:
    """Graphviz rendering of the pruned trees, one cluster per alternative winner."""
    out = ["digraph elimination_trees {", "  rankdir=BT;", "  node [shape=ellipse];"]
    for tree in result.trees:
        out.append(f"  subgraph cluster_{tree.alt_winner} {{")
        out.append(f'    label="alternative winner {contest.label(tree.alt_winner)}";')
        counter = [0]

        def emit(node: TreeNode, parent_id: str | None) -> None:
            node_id = f"t{tree.alt_winner}_n{counter[0]}"
            counter[0] += 1
            label = contest.label(node.candidate)
            style = ""
            if node.annotation.startswith("pruned="):
                idx = node.annotation.split("=", 1)[1]
                label += f"\\npruned by [{idx}]"
                style = ' shape=box style=filled fillcolor="lightgrey"'
            elif node.annotation == "unpruned":
                style = ' color=red fontcolor=red'
            out.append(f'    {node_id} [label="{label}"{style}];')
            if parent_id is not None:
                edge_style = " [color=red]" if node.annotation == "unpruned" else ""
                out.append(f"    {node_id} -> {parent_id}{edge_style};")
            for child in node.children:
                emit(child, node_id)

        emit(tree.root, None)
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"


def parse_treedoc(text: str) -> dict:
    """Minimal reader for the tree document, used for validation and tests."""
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != TREEDOC_HEADER:
        raise ValueError("not a TREEDOC,1 document")
    doc: dict = {"contest": None, "winner": None, "candidates": {}, "assertions": [],
                 "trees": []}
    current_tree: dict | None = None
    for line in lines[1:]:
        key, rest = line.split(",", 1)
        if key == "CONTEST":
            doc["contest"] = rest
        elif key == "WINNER":
            doc["winner"] = int(rest)
        elif key == "CANDIDATE":
            cid, name = rest.split(",", 1)
            doc["candidates"][int(cid)] = name
        elif key == "ASSERTION":
            idx, status, token = rest.split(",", 2)
            doc["assertions"].append({"index": int(idx), "status": status, "token": token})
        elif key == "EXPLAIN":
            idx, text_part = rest.split(",", 1)
            doc["assertions"][int(idx)]["explanation"] = text_part
        elif key == "TREE":
            current_tree = {"alt_winner": int(rest), "nodes": []}
            doc["trees"].append(current_tree)
        elif key == "NODE":
            if current_tree is None:
                raise ValueError("NODE line before any TREE line")
            depth, cand, annotation = rest.split(",", 2)
            current_tree["nodes"].append(
                {"depth": int(depth), "candidate": int(cand), "annotation": annotation}
            )
        else:
            raise ValueError(f"unknown TREEDOC record {key!r}")
    return doc

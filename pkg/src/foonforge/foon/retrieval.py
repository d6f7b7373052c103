"""Goal-directed task-tree retrieval.

Searches a graph for the smallest set of units that produces a goal
object from a pantry of available raw items. ``available`` holds object
names; a name provisions exactly those object variants that no unit in
the graph produces, so cooked or otherwise derived intermediates must
always come from a selected unit even when their base name is on hand.

The selected set must admit an execution order (every input either comes
from the pantry or from another selected unit), must not consume the
goal, and must be acyclic at the unit level. Among all feasible sets the
smallest wins, with ties broken by the lexicographically lowest tuple of
unit indices. The search enumerates candidate subsets of the goal's
backward cone in that order, which is exact and fine at recipe scale but
exponential in the worst case.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from ..errors import RetrievalError
from .model import FoonGraph, NodeKey, ObjectNode, TaskTree
from .validation import find_cycle


@dataclass(frozen=True)
class RetrievalFailure:
    """Why no task tree could be assembled for the goal."""

    missing: str
    message: str


def retrieve_task_tree(
    graph: FoonGraph,
    goal: ObjectNode,
    available: Iterable[str],
) -> TaskTree | RetrievalFailure:
    """Find a minimal task tree for ``goal``, or explain the failure.

    Raises :class:`RetrievalError` when the goal identity is not a node
    of the graph at all; an unreachable goal that exists in the graph is
    a :class:`RetrievalFailure`, not an error.
    """
    if goal.key not in graph.node_index:
        raise RetrievalError(f"goal {goal.describe()!r} is not a node of the graph")
    goal = graph.node_index[goal.key]
    pantry_names = {name.strip().lower() for name in available}

    def pantry(key: NodeKey) -> bool:
        return key[0] in pantry_names and key not in graph.produced_keys

    if not graph.producers(goal.key):
        return RetrievalFailure(goal.describe(), f"goal {goal.describe()!r} is not producible")

    satisfiable = _saturate(graph, pantry)
    if goal.key not in satisfiable:
        missing = _first_unsatisfiable(graph, goal.key, satisfiable)
        node = graph.node_index[missing]
        return RetrievalFailure(
            node.describe(), f"no way to obtain {node.describe()!r}"
        )

    relevant = _backward_cone(graph, goal.key)
    for size in range(1, len(relevant) + 1):
        for combo in combinations(relevant, size):
            if _feasible(graph, combo, goal.key, pantry):
                units = tuple(graph.units[i] for i in combo)
                return TaskTree(FoonGraph(units), goal)

    return RetrievalFailure(
        goal.describe(), f"no acyclic unit selection produces {goal.describe()!r}"
    )


def _saturate(graph: FoonGraph, pantry) -> set[NodeKey]:
    """Forward closure: every identity obtainable using any units at all."""
    have = {key for key in graph.node_index if pantry(key)}
    done: set[int] = set()
    progress = True
    while progress:
        progress = False
        for i, unit in enumerate(graph.units):
            if i in done:
                continue
            if unit.input_keys <= have:
                done.add(i)
                have |= unit.output_keys
                progress = True
    return have


def _first_unsatisfiable(
    graph: FoonGraph, goal_key: NodeKey, satisfiable: set[NodeKey]
) -> NodeKey:
    """Deterministic backward walk to the first root-cause object.

    Follows producers in unit-index order and their inputs in listed
    order; an unsatisfiable object with no producers is blamed directly,
    otherwise the walk descends into its unsatisfiable inputs.
    """
    visited: set[NodeKey] = set()

    def walk(key: NodeKey) -> NodeKey | None:
        if key in visited:
            return None
        visited.add(key)
        producers = graph.producers(key)
        if not producers:
            return key
        for i in producers:
            for node in graph.units[i].inputs:
                if node.key not in satisfiable:
                    found = walk(node.key)
                    if found is not None:
                        return found
        return key

    found = walk(goal_key)
    return found if found is not None else goal_key


def _backward_cone(graph: FoonGraph, goal_key: NodeKey) -> list[int]:
    """Units that could transitively contribute to the goal, ascending.

    Every minimal feasible selection lives inside this cone: a unit whose
    outputs feed nothing toward the goal could be dropped from any
    selection without breaking it.
    """
    needed = {goal_key}
    units: set[int] = set()
    frontier = [goal_key]
    while frontier:
        key = frontier.pop()
        for i in graph.producers(key):
            if i in units:
                continue
            units.add(i)
            for node in graph.units[i].inputs:
                if node.key not in needed:
                    needed.add(node.key)
                    frontier.append(node.key)
    return sorted(units)


def _feasible(graph: FoonGraph, combo: tuple[int, ...], goal_key: NodeKey, pantry) -> bool:
    produced: set[NodeKey] = set()
    for i in combo:
        produced |= graph.units[i].output_keys
    if goal_key not in produced:
        return False
    for i in combo:
        if goal_key in graph.units[i].input_keys:
            return False
        for key in graph.units[i].input_keys:
            if not pantry(key) and key not in produced:
                return False
    subgraph = FoonGraph(tuple(graph.units[i] for i in combo))
    return find_cycle(subgraph) is None

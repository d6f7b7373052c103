"""Line-oriented text format for object-motion graphs.

Within a unit every record is one tab-separated line::

    O<TAB>name      open an object node
    I<TAB>a,b,c     contained ingredients of the object opened above
    S<TAB>state     one state of the object opened above
    M<TAB>verb      the unit's single motion

Input objects come first, then exactly one ``M`` line, then output
objects. Units are separated by a line containing exactly ``//``. Blank
lines are ignored on input and never emitted; the canonical serialized
form lists ``O``, then ``I``, then ``S`` lines per object, with states in
sorted order, and ends with a trailing newline.
"""

from __future__ import annotations

from ..errors import FoonSyntaxError, InvalidNodeError
from .model import FoonGraph, FunctionalUnit, MotionNode, ObjectNode

_SEPARATOR = "//"


class _OpenObject:
    """Accumulates one object's lines until the next record closes it."""

    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.states: list[str] = []
        self.ingredients: list[str] | None = None

    def build(self) -> ObjectNode:
        try:
            return ObjectNode(self.name, tuple(self.states), tuple(self.ingredients or ()))
        except InvalidNodeError as exc:
            raise FoonSyntaxError(str(exc), line=self.line) from exc


def parse_foon_text(source: str) -> FoonGraph:
    """Parse the text format into a graph, preserving unit order.

    Raises :class:`FoonSyntaxError` with a line number for malformed
    records, units without inputs or outputs, and duplicate motion lines.
    """
    chunks: list[list[tuple[int, str]]] = []
    current: list[tuple[int, str]] = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line == _SEPARATOR:
            if current:
                chunks.append(current)
                current = []
            continue
        current.append((lineno, line))
    if current:
        chunks.append(current)
    if not chunks:
        raise FoonSyntaxError("no functional units found")
    return FoonGraph(tuple(_parse_unit(chunk) for chunk in chunks))


def _parse_unit(chunk: list[tuple[int, str]]) -> FunctionalUnit:
    inputs: list[ObjectNode] = []
    outputs: list[ObjectNode] = []
    motion: MotionNode | None = None
    motion_line = 0
    pending: _OpenObject | None = None
    # objects opened before the motion line are inputs, after it outputs
    section = inputs

    def flush():
        nonlocal pending
        if pending is not None:
            section.append(pending.build())
            pending = None

    for lineno, line in chunk:
        tag, sep, value = line.partition("\t")
        if not sep or not value:
            raise FoonSyntaxError(
                f"expected '<tag>\\t<value>', got {line!r}", line=lineno
            )
        if tag == "O":
            flush()
            pending = _OpenObject(value, lineno)
        elif tag == "S":
            if pending is None:
                raise FoonSyntaxError("state line without a preceding object line", line=lineno)
            pending.states.append(value)
        elif tag == "I":
            if pending is None:
                raise FoonSyntaxError(
                    "ingredients line without a preceding object line", line=lineno
                )
            if pending.ingredients is not None:
                raise FoonSyntaxError("duplicate ingredients line for one object", line=lineno)
            pending.ingredients = [part for part in value.split(",")]
        elif tag == "M":
            if motion is not None:
                raise FoonSyntaxError("duplicate motion line in unit", line=lineno)
            flush()
            section = outputs
            try:
                motion = MotionNode(value)
            except InvalidNodeError as exc:
                raise FoonSyntaxError(str(exc), line=lineno) from exc
            motion_line = lineno
        else:
            raise FoonSyntaxError(
                f"unknown record tag {tag!r}, expected O, S, I, or M", line=lineno
            )
    flush()

    first_line = chunk[0][0]
    if motion is None:
        raise FoonSyntaxError("unit has no motion line", line=first_line)
    if not inputs:
        raise FoonSyntaxError("unit has no input objects", line=motion_line)
    if not outputs:
        raise FoonSyntaxError("unit has no output objects", line=motion_line)
    return FunctionalUnit(tuple(inputs), motion, tuple(outputs))


def serialize_foon_text(graph: FoonGraph) -> str:
    """Canonical text rendering; an empty graph serializes to "".

    ``parse_foon_text(serialize_foon_text(g)) == g`` for every graph built
    from this module's types.
    """
    if not graph.units:
        return ""
    blocks = []
    for unit in graph.units:
        lines: list[str] = []
        for node in unit.inputs:
            _emit(node, lines)
        lines.append(f"M\t{unit.motion.name}")
        for node in unit.outputs:
            _emit(node, lines)
        blocks.append("\n".join(lines))
    return ("\n" + _SEPARATOR + "\n").join(blocks) + "\n"


def _emit(node: ObjectNode, lines: list[str]) -> None:
    lines.append(f"O\t{node.name}")
    if node.ingredients:
        lines.append("I\t" + ",".join(node.ingredients))
    for state in node.states:
        lines.append(f"S\t{state}")

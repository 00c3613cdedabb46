"""Independent oracle: composites as rooted ordered trees.

Here a composite really is a tree.  Internal nodes carry operad
labels, leaves are anonymous slots, and slot numbers are derived by
left-to-right traversal on demand, never stored.  Grafting is plain
subtree substitution, with no relabelling bookkeeping at all.  The
flat machine's relations are then recomputed from the tree shape, so
agreement between the two is meaningful evidence: they share no code
and no state representation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import BoundsError, OperadError, OperadId, Position
from .flat_machine import FlatState, foliage_of, in_map_of, hat_map_of, hook_map_of, component_of


class DuplicateLabels(OperadError):
    """Grafting would put the same operad label in a tree twice."""


@dataclass(frozen=True)
class Leaf:
    """An open slot; all leaves are interchangeable."""


LEAF = Leaf()


@dataclass(frozen=True)
class TreeOperad:
    label: OperadId
    children: tuple  # Leaf or TreeOperad, left to right

    def __post_init__(self) -> None:
        if not self.children:
            raise BoundsError(f"node {self.label!r} needs at least one child")
        for child in self.children:
            if not isinstance(child, (Leaf, TreeOperad)):
                raise BoundsError(f"bad child {child!r} under {self.label!r}")


def elementary(label: OperadId, arity: int) -> TreeOperad:
    if arity < 1:
        raise BoundsError(f"arity must be positive, got {arity}")
    return TreeOperad(label, (LEAF,) * arity)


def leaf_count(tree: TreeOperad) -> int:
    return sum(leaf_count(c) if isinstance(c, TreeOperad) else 1 for c in tree.children)


def labels(tree: TreeOperad) -> frozenset[OperadId]:
    out = {tree.label}
    for child in tree.children:
        if isinstance(child, TreeOperad):
            out |= labels(child)
    return frozenset(out)


def graft(tree1: TreeOperad, ii: Position, tree2: TreeOperad) -> TreeOperad:
    """Replace the ii-th leaf of tree1 (counting from 1) with tree2."""
    total = leaf_count(tree1)
    if not 1 <= ii <= total:
        raise BoundsError(f"leaf {ii} does not exist, tree has {total} leaves")
    shared = labels(tree1) & labels(tree2)
    if shared:
        raise DuplicateLabels(f"labels on both sides: {', '.join(sorted(shared))}")

    seen = 0

    def rebuild(node: TreeOperad) -> TreeOperad:
        nonlocal seen
        kids = []
        for child in node.children:
            if isinstance(child, TreeOperad):
                kids.append(rebuild(child))
            else:
                seen += 1
                kids.append(tree2 if seen == ii else child)
        return TreeOperad(node.label, tuple(kids))

    return rebuild(tree1)


def format_tree(tree: TreeOperad) -> str:
    """Parenthesized form with leaves shown as traversal numbers."""
    counter = 0

    def walk(node: TreeOperad) -> str:
        nonlocal counter
        parts = []
        for child in node.children:
            if isinstance(child, TreeOperad):
                parts.append(walk(child))
            else:
                counter += 1
                parts.append(str(counter))
        return f"{node.label}({','.join(parts)})"

    return walk(tree)


@dataclass(frozen=True)
class FlatView:
    """The flat relations of one composite, recomputed from a tree."""

    foliage: tuple[Position, ...]
    in_map: dict[OperadId, frozenset[Position]]
    hat_map: dict[Position, OperadId]
    hook_map: dict[OperadId, OperadId]


def derive_flat_view(tree: TreeOperad) -> FlatView:
    in_map: dict[OperadId, set[int]] = {}
    hat_map: dict[int, OperadId] = {}
    hook_map: dict[OperadId, OperadId] = {}
    counter = 0

    def walk(node: TreeOperad) -> None:
        nonlocal counter
        in_map.setdefault(node.label, set())
        for child in node.children:
            if isinstance(child, TreeOperad):
                hook_map[child.label] = node.label
                walk(child)
            else:
                counter += 1
                in_map[node.label].add(counter)
                hat_map[counter] = node.label

    walk(tree)
    return FlatView(
        foliage=tuple(range(1, counter + 1)),
        in_map={k: frozenset(v) for k, v in in_map.items()},
        hat_map=hat_map,
        hook_map=hook_map,
    )


def ancestor_map(tree: TreeOperad) -> dict[OperadId, frozenset[OperadId]]:
    """For each label, the labels strictly above it; the root maps to {}."""
    out: dict[OperadId, frozenset[OperadId]] = {}

    def walk(node: TreeOperad, above: frozenset[OperadId]) -> None:
        out[node.label] = above
        for child in node.children:
            if isinstance(child, TreeOperad):
                walk(child, above | {node.label})

    walk(tree, frozenset())
    return out


def compare_with_flat(state: FlatState, root: OperadId, tree: TreeOperad) -> list[str]:
    """Mismatches between a machine composite and its mirror tree.

    Empty result means the flat relations restricted to root's
    component agree exactly with the relations recomputed from the
    tree.  The grafting closure is also checked: every non-root member
    must map to the root, and the root must be a genuine tree ancestor
    of it.
    """
    problems: list[str] = []
    view = derive_flat_view(tree)

    if tree.label != root:
        problems.append(f"root: machine says {root!r}, tree says {tree.label!r}")
        return problems

    fol = foliage_of(state, root)
    if fol != view.foliage:
        problems.append(f"foliage: machine {fol} != tree {view.foliage}")

    members = component_of(state, root)
    if members != labels(tree):
        problems.append(
            f"members: machine {sorted(members)} != tree {sorted(labels(tree))}"
        )
        return problems

    flat_in = in_map_of(state, root)
    if flat_in != view.in_map:
        problems.append(f"in: machine {flat_in} != tree {view.in_map}")

    flat_hat = hat_map_of(state, root)
    if flat_hat != view.hat_map:
        problems.append(f"hat: machine {flat_hat} != tree {view.hat_map}")

    flat_hook = hook_map_of(state, root)
    if flat_hook != view.hook_map:
        problems.append(f"hook: machine {flat_hook} != tree {view.hook_map}")

    for member, arity in ((m, state.arity_op[m]) for m in sorted(members)):
        node_arities = _node_arities(tree)
        if node_arities[member] != arity:
            problems.append(
                f"arity: machine says {member!r} has {arity}, tree says {node_arities[member]}"
            )

    ancestors = ancestor_map(tree)
    for member in sorted(members - {root}):
        target = state.g_hook_op.get(member)
        if target != root:
            problems.append(f"ghook: {member!r} maps to {target!r}, expected root {root!r}")
        elif root not in ancestors[member]:
            problems.append(f"ghook: root {root!r} is not an ancestor of {member!r}")
    if root in state.g_hook_op:
        problems.append(f"ghook: root {root!r} must not be grafted anywhere")

    out = state.out_op.get(root)
    if out != frozenset({1}):
        problems.append(f"out: root {root!r} has outputs {out}, expected {{1}}")
    for member in sorted(members - {root}):
        if member in state.out_op:
            problems.append(f"out: grafted member {member!r} still has outputs")

    return problems


def _node_arities(tree: TreeOperad) -> dict[OperadId, int]:
    out = {tree.label: len(tree.children)}
    for child in tree.children:
        if isinstance(child, TreeOperad):
            out.update(_node_arities(child))
    return out

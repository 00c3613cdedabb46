"""Grafting machine over a flat relational state.

A composite operad is not stored as a tree.  The state keeps flat
relations indexed by operad identifiers and 1-based positions, and the
two events (create, compose) rewrite those relations wholesale.  The
open slots of a composite always carry the contiguous labels 1..n where
n is its arity; grafting renumbers every affected label.

Vocabulary, with ``op2`` grafted into slot ``ii`` of the composite
rooted at ``op1``:

  my_operads   every operad created so far, grafted or not
  arity_op     arity at creation time; composition never changes it
  foliage      (position, root) pairs: the open slots of each composite
  out_op       output positions, always {1}; its domain is the roots
  in_op        per member, the slot labels that belong to that member
  g_hat_op     (position, root) -> the member owning that slot
  hook_op      member -> the member it was directly grafted into
  g_hook_op    member -> the root of its composite

Events are pure: they validate guards against the old state and return
a fresh state.  A rejected event raises GuardFailed carrying the
guard's label and leaves the old state untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .core import (
    BoundsError,
    Config,
    GuardFailed,
    OperadId,
    OverflowFoliage,
    Position,
    is_operad_id,
    seq_n,
)


@dataclass(frozen=True)
class NewOperad:
    """Create an elementary operad with the given arity."""

    op_id: OperadId
    arity: int
    outs: int = 1


@dataclass(frozen=True)
class ComposeSeq:
    """Graft the root op2 into slot pos of the composite rooted at op1."""

    op1: OperadId
    pos: Position
    op2: OperadId


Event = NewOperad | ComposeSeq


@dataclass(frozen=True)
class FlatState:
    config: Config
    my_operads: frozenset[OperadId]
    arity_op: dict[OperadId, int]
    foliage: frozenset[tuple[Position, OperadId]]
    out_op: dict[OperadId, frozenset[Position]]
    in_op: dict[OperadId, frozenset[Position]]
    g_hat_op: dict[tuple[Position, OperadId], OperadId]
    hook_op: dict[OperadId, OperadId]
    g_hook_op: dict[OperadId, OperadId]


def empty_state(config: Config | None = None) -> FlatState:
    return FlatState(
        config=config or Config(),
        my_operads=frozenset(),
        arity_op={},
        foliage=frozenset(),
        out_op={},
        in_op={},
        g_hat_op={},
        hook_op={},
        g_hook_op={},
    )


def new_operad(state: FlatState, op_id: OperadId, arity: int, outs: int = 1) -> FlatState:
    """Add an elementary operad with slots 1..arity, all open.

    The outs argument is bounds-checked, but every operad gets the
    single output {1} regardless: multiple outputs are out of scope.
    """
    cfg = state.config
    if not is_operad_id(op_id):
        raise GuardFailed("id-token", f"operad id must be letters, digits or underscores, got {op_id!r}")
    if len(state.my_operads) >= cfg.max_oprd:
        raise GuardFailed("g1", f"operad count is at the max_oprd bound {cfg.max_oprd}")
    if op_id in state.my_operads:
        raise GuardFailed("g3", f"operad {op_id!r} already exists")
    if not 1 <= arity <= cfg.max_fol:
        raise GuardFailed("g4", f"arity must be in 1..{cfg.max_fol}, got {arity}")
    if not 1 <= outs <= cfg.max_args:
        raise GuardFailed("g6", f"output count must be in 1..{cfg.max_args}, got {outs}")
    if len(state.foliage) + arity > cfg.max_fol:
        raise GuardFailed(
            "g28",
            f"foliage would grow to {len(state.foliage) + arity}, past max_fol = {cfg.max_fol}",
        )
    positions = seq_n(arity)
    return replace(
        state,
        my_operads=state.my_operads | {op_id},
        arity_op={**state.arity_op, op_id: arity},
        foliage=state.foliage | {(p, op_id) for p in positions},
        out_op={**state.out_op, op_id: frozenset({1})},
        in_op={**state.in_op, op_id: frozenset(positions)},
        g_hat_op={**state.g_hat_op, **{(p, op_id): op_id for p in positions}},
    )


@dataclass(frozen=True)
class ComposeWitness:
    """Every intermediate of one grafting step, for audit and transport.

    The relabelling rule: positions of op1's composite below ii keep
    their labels, ii itself disappears, positions above ii shift up by
    cardfol2 - 1, and op2's positions land on ii..ii+cardfol2-1.
    """

    op1: OperadId
    op2: OperadId
    ii: Position
    hat_op_ii: OperadId
    foliage1: frozenset[Position]
    foliage2: frozenset[Position]
    cardfol1: int
    cardfol2: int
    hooked_in_op1: frozenset[OperadId]
    hooked_in_op2: frozenset[OperadId]
    low_hats: dict[Position, OperadId]
    shifted_high_hats: dict[Position, OperadId]
    shifted_op2_hats: dict[Position, OperadId]
    rebuilt_hats: dict[tuple[Position, OperadId], OperadId]
    low_inputs: dict[OperadId, frozenset[Position]]
    shifted_high_inputs: dict[OperadId, frozenset[Position]]
    merged_inputs: dict[OperadId, frozenset[Position]]
    shifted_op2_inputs: dict[OperadId, frozenset[Position]]


def compose_seq_with_witness(
    state: FlatState, op1: OperadId, ii: Position, op2: OperadId
) -> tuple[FlatState, ComposeWitness]:
    """Graft op2 into slot ii of op1's composite; also return the witness."""
    if op1 == op2:
        raise GuardFailed("op-distinct", f"cannot compose {op1!r} with itself")
    if op1 not in state.in_op:
        raise GuardFailed("rg20", f"unknown operad {op1!r}")
    if op2 not in state.in_op:
        raise GuardFailed("rg22", f"unknown operad {op2!r}")
    if op1 in state.g_hook_op:
        raise GuardFailed("rg26", f"{op1!r} is grafted inside a composite and cannot be a target")
    if op2 in state.g_hook_op:
        raise GuardFailed("rg24", f"{op2!r} is grafted inside a composite and cannot be grafted again")

    hooked1 = frozenset({op1} | {oo for oo, root in state.g_hook_op.items() if root == op1})
    hooked2 = frozenset({op2} | {oo for oo, root in state.g_hook_op.items() if root == op2})
    foliage1 = frozenset(p for p, oo in state.foliage if oo == op1)
    foliage2 = frozenset(p for p, oo in state.foliage if oo == op2)
    hat1 = {
        p: member
        for (p, oo), member in state.g_hat_op.items()
        if oo == op1 and p in foliage1
    }
    hat2 = {
        p: member
        for (p, oo), member in state.g_hat_op.items()
        if oo == op2 and p in foliage2
    }
    if ii not in hat1:
        raise GuardFailed("rg72", f"position {ii} is not an open slot of the composite rooted at {op1!r}")
    hat_op_ii = hat1[ii]
    if hat_op_ii not in hooked1:
        raise GuardFailed("rg62", f"slot owner {hat_op_ii!r} is outside the composite rooted at {op1!r}")
    if hat_op_ii not in state.in_op:
        raise GuardFailed("rg64", f"slot owner {hat_op_ii!r} has no input map")
    if not state.in_op[hat_op_ii]:
        raise GuardFailed("rg70", f"slot owner {hat_op_ii!r} has no open inputs")

    cardfol1 = len(foliage1)
    cardfol2 = len(foliage2)
    if cardfol1 + cardfol2 - 1 > state.config.max_fol:
        raise OverflowFoliage(
            f"composite would need {cardfol1 + cardfol2 - 1} positions, max_fol is {state.config.max_fol}"
        )

    shift = cardfol2 - 1
    low_hats = {p: m for p, m in hat1.items() if p < ii}
    shifted_high_hats = {p + shift: m for p, m in hat1.items() if p > ii}
    shifted_op2_hats = {p + ii - 1: m for p, m in hat2.items()}
    rebuilt_hats = {
        (p, op1): m
        for p, m in {**low_hats, **shifted_op2_hats, **shifted_high_hats}.items()
    }

    low_inputs = {oo: frozenset(p for p in state.in_op[oo] if p < ii) for oo in hooked1}
    shifted_high_inputs = {
        oo: frozenset(p + shift for p in state.in_op[oo] if p > ii) for oo in hooked1
    }
    merged_inputs = {oo: low_inputs[oo] | shifted_high_inputs[oo] for oo in hooked1}
    shifted_op2_inputs = {oo: frozenset(p + ii - 1 for p in state.in_op[oo]) for oo in hooked2}

    witness = ComposeWitness(
        op1=op1,
        op2=op2,
        ii=ii,
        hat_op_ii=hat_op_ii,
        foliage1=foliage1,
        foliage2=foliage2,
        cardfol1=cardfol1,
        cardfol2=cardfol2,
        hooked_in_op1=hooked1,
        hooked_in_op2=hooked2,
        low_hats=low_hats,
        shifted_high_hats=shifted_high_hats,
        shifted_op2_hats=shifted_op2_hats,
        rebuilt_hats=rebuilt_hats,
        low_inputs=low_inputs,
        shifted_high_inputs=shifted_high_inputs,
        merged_inputs=merged_inputs,
        shifted_op2_inputs=shifted_op2_inputs,
    )

    # Hat entries whose value is op1 or op2 are purged before the rebuilt
    # component is merged back in under op1's key.
    new_g_hat = {key: m for key, m in state.g_hat_op.items() if m not in (op1, op2)}
    new_g_hat.update(rebuilt_hats)

    new_state = replace(
        state,
        foliage=frozenset((p, oo) for p, oo in state.foliage if oo not in (op1, op2))
        | frozenset((p, op1) for p in range(1, cardfol1 + cardfol2)),
        out_op={oo: outs for oo, outs in state.out_op.items() if oo != op2},
        in_op={**state.in_op, **merged_inputs, **shifted_op2_inputs},
        g_hat_op=new_g_hat,
        hook_op={**state.hook_op, op2: hat_op_ii},
        g_hook_op={**state.g_hook_op, **{oo: op1 for oo in hooked2}},
    )
    return new_state, witness


def compose_seq(state: FlatState, op1: OperadId, ii: Position, op2: OperadId) -> FlatState:
    new_state, _ = compose_seq_with_witness(state, op1, ii, op2)
    return new_state


def apply_event(state: FlatState, event: Event) -> FlatState:
    if isinstance(event, NewOperad):
        return new_operad(state, event.op_id, event.arity, event.outs)
    if isinstance(event, ComposeSeq):
        return compose_seq(state, event.op1, event.pos, event.op2)
    raise BoundsError(f"unknown event {event!r}")


def roots(state: FlatState) -> tuple[OperadId, ...]:
    """Operads not grafted anywhere, sorted; each roots one composite."""
    return tuple(sorted(state.my_operads - set(state.g_hook_op)))


def _require_root(state: FlatState, root: OperadId) -> None:
    if root not in state.my_operads:
        raise BoundsError(f"unknown operad {root!r}")
    if root in state.g_hook_op:
        raise BoundsError(f"{root!r} is grafted inside a composite, not a root")


def component_of(state: FlatState, root: OperadId) -> frozenset[OperadId]:
    """The root together with every member grafted below it."""
    _require_root(state, root)
    return frozenset({root} | {oo for oo, rr in state.g_hook_op.items() if rr == root})


def foliage_of(state: FlatState, root: OperadId) -> tuple[Position, ...]:
    _require_root(state, root)
    return tuple(sorted(p for p, oo in state.foliage if oo == root))


def result_arity(n: int, m: int) -> int:
    """Arity of a composite: grafting m-ary into n-ary gives n + m - 1.

    m = 0 is the constant case: the slot is consumed and nothing
    replaces it.
    """
    if n < 1:
        raise BoundsError(f"the outer arity must be positive, got {n}")
    if m < 0:
        raise BoundsError(f"the grafted arity must be non-negative, got {m}")
    return n + m - 1


def hat_map_of(state: FlatState, root: OperadId) -> dict[Position, OperadId]:
    _require_root(state, root)
    return {p: m for (p, oo), m in state.g_hat_op.items() if oo == root}


def in_map_of(state: FlatState, root: OperadId) -> dict[OperadId, frozenset[Position]]:
    return {oo: state.in_op[oo] for oo in sorted(component_of(state, root))}


def hook_map_of(state: FlatState, root: OperadId) -> dict[OperadId, OperadId]:
    members = component_of(state, root)
    return {oo: state.hook_op[oo] for oo in sorted(members) if oo in state.hook_op}


INVARIANT_LABELS = (
    "inv10",
    "inv30",
    "inv40",
    "inv60",
    "invr10",
    "invr20",
    "invr30",
    "invr34",
    "invr40",
    "invr50",
    "SP1",
    "SP2",
    "SP3",
)


def check_invariants(state: FlatState) -> list[str]:
    """Labels of the violated invariants, in canonical order.

    Typing invariants (inv*, invr*) bound every relation by the config
    and by my_operads.  The structural ones tie the relations together:

      SP1  per root, slots with a hat plus the root's own inputs cover
           the whole foliage of that root
      SP2  per root, the foliage is exactly the union of the input sets
           of the root and of every member grafted below it
      SP3  a member with children has one input lost per direct child:
           card(in_op) = arity - number of direct children
    """
    cfg = state.config
    bad: list[str] = []
    ops = state.my_operads

    def positions_ok(ps) -> bool:
        return all(1 <= p <= cfg.max_fol for p in ps)

    if not all(is_operad_id(op) for op in ops):
        bad.append("inv10")
    if not (
        set(state.arity_op) <= ops
        and all(1 <= rr <= cfg.max_fol for rr in state.arity_op.values())
    ):
        bad.append("inv30")
    if not all(1 <= p <= cfg.max_fol and oo in ops for p, oo in state.foliage):
        bad.append("inv40")
    if not (
        set(state.out_op) <= ops
        and all(all(1 <= p <= cfg.max_args for p in outs) for outs in state.out_op.values())
    ):
        bad.append("inv60")
    if not (set(state.in_op) <= ops and all(positions_ok(ps) for ps in state.in_op.values())):
        bad.append("invr10")
    if not all(
        1 <= p <= cfg.max_fol and oo in ops and m in ops
        for (p, oo), m in state.g_hat_op.items()
    ):
        bad.append("invr20")
    if not (set(state.hook_op) <= ops and set(state.hook_op.values()) <= ops):
        bad.append("invr30")
    if set(state.hook_op) & set(state.out_op):
        bad.append("invr34")
    if not (set(state.g_hook_op) <= ops and set(state.g_hook_op.values()) <= ops):
        bad.append("invr40")
    if not all(
        len(state.in_op[op]) <= state.arity_op[op]
        for op in ops
        if op in state.arity_op and op in state.in_op
    ):
        bad.append("invr50")

    hat_values = set(state.g_hat_op.values())
    ghook_values = set(state.g_hook_op.values())
    foliage_ops = {oo for _, oo in state.foliage}
    hook_children: dict[OperadId, int] = {}
    for parent in state.hook_op.values():
        hook_children[parent] = hook_children.get(parent, 0) + 1

    def sp1_holds(op: OperadId) -> bool:
        keyed = {p for (p, oo) in state.g_hat_op if oo == op}
        fol = {p for p, oo in state.foliage if oo == op}
        return keyed | state.in_op[op] == fol

    if state.g_hook_op and state.g_hat_op:
        for op in ops:
            if (
                op in hat_values
                and op in state.in_op
                and op not in state.g_hook_op
                and op in ghook_values
                and op in foliage_ops
                and not sp1_holds(op)
            ):
                bad.append("SP1")
                break

    if state.foliage and state.g_hook_op:
        for op in ops:
            if op in foliage_ops and op in ghook_values and op in state.in_op:
                fol = {p for p, oo in state.foliage if oo == op}
                covered = set(state.in_op[op])
                for oo, root in state.g_hook_op.items():
                    if root == op and oo in state.in_op and positions_ok(state.in_op[oo]):
                        covered |= state.in_op[oo]
                if fol != covered:
                    bad.append("SP2")
                    break

    if state.in_op and state.arity_op and state.hook_op:
        for op in ops:
            if op in state.in_op and op in state.arity_op and op in hook_children:
                if len(state.in_op[op]) != state.arity_op[op] - hook_children[op]:
                    bad.append("SP3")
                    break

    return sorted(bad, key=INVARIANT_LABELS.index)


def composition_law_violations(state: FlatState, witness: ComposeWitness) -> list[str]:
    """Cheap structural laws checked right after one grafting step.

    law-size       the new composite has cardfol1 + cardfol2 - 1 slots,
                   contiguously labelled from 1
    law-arity-sum  member arities minus internal grafts equals the slot
                   count of the composite
    """
    labels: list[str] = []
    fol = sorted(p for p, oo in state.foliage if oo == witness.op1)
    if fol != list(range(1, witness.cardfol1 + witness.cardfol2)):
        labels.append("law-size")
    members = {witness.op1} | {oo for oo, root in state.g_hook_op.items() if root == witness.op1}
    arity_sum = sum(state.arity_op[m] for m in members)
    if arity_sum - (len(members) - 1) != len(fol):
        labels.append("law-arity-sum")
    return labels

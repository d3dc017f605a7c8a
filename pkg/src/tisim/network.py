"""Optical networks: a DAG of elements with pseudotime ranks.

A network declares its subsystems (one photon-path subsystem plus spin/level
pairs for any boxed atoms) and a rank-ordered set of elements.  Offer waves
propagate forward through the elements in rank order; confirmation waves
propagate backward through the conjugate-transposed maps in reverse rank
order.  Atom boxes split off the absorbed component (photon on their path,
atom in the blocking spin state) into a separate bucket, flipping the atom's
level marker from ground to excited, so total probability is conserved
between the continuing and absorbed sectors.

Conventions, fixed once for the whole package:

* beam splitters are balanced: reflection carries a factor ``i/sqrt(2)``,
  transmission ``1/sqrt(2)``; the first input reflects into the first output,
  the second input reflects into the second output;
* mirrors default to phase ``1``;
* absorption re-labels the photon slot with the absorbing box's id (the
  "marker" symbol) rather than deleting the term, which keeps the full
  element sequence unitary and lets confirmation waves anchored at a box
  propagate back out of it.
"""

from __future__ import annotations

import graphlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .amplitudes import (
    Bra,
    Ket,
    Label,
    Space,
    SubsystemSpec,
    add,
    dual,
    inner,
    norm_sq,
    subsystem_index,
    tensor,
    unit,
)
from .errors import ContractError, StructuralError, ValidationError

_R = 1j / math.sqrt(2.0)  # reflection
_T = 1.0 / math.sqrt(2.0)  # transmission


@dataclass(frozen=True)
class Emitter:
    """A source.  ``state`` is the emitted ket over this emitter's subsystems.

    ``cw_filter`` is the confirmation-wave filter applied when a CW reaches
    the source; a CW can only complete a transaction through the component
    matching what the source emitted, so the filter defaults to the dual of
    the emitted state.
    """

    id: str
    rank: int
    state: Ket
    cw_filter: Bra | None = None

    @property
    def filter_bra(self) -> Bra:
        return self.cw_filter if self.cw_filter is not None else dual(self.state)


@dataclass(frozen=True)
class BeamSplitter:
    """Balanced splitter; ``inputs`` has one entry (vacuum second port) or two."""

    id: str
    rank: int
    inputs: tuple[str, ...]
    outputs: tuple[str, str]

    def forward_map(self) -> dict[str, list[tuple[str, complex]]]:
        out0, out1 = self.outputs
        mapping = {self.inputs[0]: [(out0, _R), (out1, _T)]}
        if len(self.inputs) == 2:
            mapping[self.inputs[1]] = [(out0, _T), (out1, _R)]
        return mapping


@dataclass(frozen=True)
class Mirror:
    id: str
    rank: int
    input: str
    output: str
    phase: complex = 1.0

    def forward_map(self) -> dict[str, list[tuple[str, complex]]]:
        return {self.input: [(self.output, complex(self.phase))]}


@dataclass(frozen=True)
class AtomBox:
    """A box intersecting one photon path, holding one spin component of an atom.

    If the photon is on ``path`` and the atom's spin is ``blocking``, the
    component is absorbed: the photon slot becomes this box's marker symbol
    and the atom's level flips ground -> excited.  Re-emission is not modeled.
    """

    id: str
    rank: int
    atom: str
    blocking: str
    path: str
    level: str

    @property
    def marker(self) -> str:
        return self.id


@dataclass(frozen=True)
class Detector:
    id: str
    rank: int
    input: str


Element = Emitter | BeamSplitter | Mirror | AtomBox | Detector


@dataclass(frozen=True)
class Diagnostic:
    element: str | None
    rule: str
    message: str

    def __str__(self) -> str:
        where = f" [{self.element}]" if self.element else ""
        return f"{self.rule}{where}: {self.message}"


@dataclass(frozen=True)
class Network:
    """Immutable experiment description; validate before propagating."""

    name: str
    subsystems: Space
    elements: tuple[Element, ...]
    two_source: bool = False

    # -- structural accessors -------------------------------------------------

    @property
    def photon(self) -> SubsystemSpec:
        for spec in self.subsystems:
            if spec.kind == "photon-path":
                return spec
        raise StructuralError("network declares no photon-path subsystem")

    @property
    def photon_index(self) -> int:
        return subsystem_index(self.subsystems, self.photon.id)

    def atoms(self) -> tuple[SubsystemSpec, ...]:
        return tuple(s for s in self.subsystems if s.kind == "atom-spin")

    def emitters(self) -> tuple[Emitter, ...]:
        return tuple(e for e in self.elements if isinstance(e, Emitter))

    def photon_emitters(self) -> tuple[Emitter, ...]:
        pid = self.photon.id
        return tuple(e for e in self.emitters() if any(s.id == pid for s in e.state.space))

    def boxes(self) -> tuple[AtomBox, ...]:
        return tuple(e for e in self.elements if isinstance(e, AtomBox))

    def detectors(self) -> tuple[Detector, ...]:
        return tuple(e for e in self.elements if isinstance(e, Detector))

    def element(self, element_id: str) -> Element:
        for e in self.elements:
            if e.id == element_id:
                return e
        raise StructuralError(f"no element with id {element_id!r}")

    def ordered(self) -> tuple[Element, ...]:
        return tuple(sorted(self.elements, key=lambda e: (e.rank, e.id)))

    def terminal_symbols(self) -> dict[str, str]:
        """Map terminal photon symbol -> element id (detectors and box markers)."""
        out = {d.input: d.id for d in self.detectors()}
        out.update({b.marker: b.id for b in self.boxes()})
        return out


@dataclass(frozen=True)
class PropagationTrace:
    """Result of a forward pass: the in-flight ket, the absorbed components
    (one per box, excited level set), and a snapshot after each rank."""

    continuing: Ket
    absorbed: tuple[tuple[str, Ket], ...]
    snapshots: tuple[tuple[int, Ket], ...]

    def absorbed_total(self) -> float:
        return float(sum(norm_sq(k) for _, k in self.absorbed))

    def absorbed_ket(self, box_id: str) -> Ket:
        for bid, k in self.absorbed:
            if bid == box_id:
                return k
        raise StructuralError(f"no absorption recorded for box {box_id!r}")


@dataclass(frozen=True)
class EchoReport:
    """Result of a backward (confirmation-wave) pass.

    ``amplitude`` is the joint amplitude surviving at the sources, computed
    entirely through the reverse-order conjugate maps; ``weight`` is its
    squared modulus, the Born weight of the anchoring outcome.

    ``sector_amplitudes`` splits the same amplitude per emitter (photon path
    factor at the photon source, spin overlap at each atom source); the split
    is exact whenever the atom confirmation waves are basis states of the box
    orientation.  ``emitter_amplitudes`` is the source-matching bookkeeping
    view: each emitter reports (offer-wave amplitude seen by its absorber) x
    (modulus of the returning confirmation amplitude).

    In a two-source network the photon sources have no separate identity:
    their confirmation amplitudes add coherently as one source group
    (``photon_group``), and ``product`` multiplies the group's bookkeeping
    value with the atom emitters', reproducing the Born weight.
    """

    emitter_amplitudes: dict[str, float]
    sector_amplitudes: dict[str, complex]
    photon_group: tuple[str, ...]
    photon_group_ow: float
    amplitude: complex
    weight: float

    @property
    def photon_group_amplitude(self) -> complex:
        return sum(self.sector_amplitudes[eid] for eid in self.photon_group)

    def product(self) -> float:
        group = self.photon_group_ow * abs(self.photon_group_amplitude)
        atoms = math.prod(
            v for eid, v in self.emitter_amplitudes.items() if eid not in self.photon_group
        )
        return float(group * atoms)


# -- validation ---------------------------------------------------------------


def validate(network: Network) -> list[Diagnostic]:
    """Return a list of invariant violations; empty means well-formed."""
    diags: list[Diagnostic] = []
    add_diag = lambda element, rule, message: diags.append(Diagnostic(element, rule, message))

    photon_specs = [s for s in network.subsystems if s.kind == "photon-path"]
    if len(photon_specs) != 1:
        add_diag(None, "photon-subsystem", f"expected exactly one photon-path subsystem, found {len(photon_specs)}")
        return diags
    photon = photon_specs[0]
    if network.subsystems[0].id != photon.id:
        add_diag(None, "subsystem-order", "photon-path subsystem must be declared first")

    ids = [e.id for e in network.elements]
    if len(set(ids)) != len(ids):
        add_diag(None, "element-ids", "element ids are not unique")

    # level subsystems must be two-symbol (ground, excited)
    for spec in network.subsystems:
        if spec.kind == "atom-level" and len(spec.basis) != 2:
            add_diag(None, "level-basis", f"level subsystem {spec.id!r} must have exactly two symbols")

    # emitters: coverage of subsystems, one photon source (two for two-source nets)
    covered: dict[str, str] = {}
    for e in network.emitters():
        for spec in e.state.space:
            if spec.id in covered and spec.kind != "photon-path":
                add_diag(e.id, "emitter-coverage", f"subsystem {spec.id!r} emitted twice")
            covered[spec.id] = e.id
    for spec in network.subsystems:
        if spec.id not in covered:
            add_diag(None, "emitter-coverage", f"subsystem {spec.id!r} has no emitter")
    n_photon_src = len(network.photon_emitters())
    allowed = 2 if network.two_source else 1
    if n_photon_src != allowed:
        add_diag(None, "photon-sources", f"expected {allowed} photon emitter(s), found {n_photon_src}")

    # symbol production/consumption bookkeeping
    produced: dict[str, list[str]] = {}
    consumed: dict[str, list[str]] = {}
    intersected: dict[str, list[str]] = {}

    def note(table, sym, eid):
        table.setdefault(sym, []).append(eid)

    for e in network.photon_emitters():
        for label, _ in e.state.items():
            note(produced, label[0], e.id)
    for e in network.elements:
        if isinstance(e, BeamSplitter):
            for s in e.inputs:
                note(consumed, s, e.id)
            for s in e.outputs:
                note(produced, s, e.id)
        elif isinstance(e, Mirror):
            note(consumed, e.input, e.id)
            note(produced, e.output, e.id)
        elif isinstance(e, Detector):
            note(consumed, e.input, e.id)
        elif isinstance(e, AtomBox):
            note(intersected, e.path, e.id)

    basis = set(photon.basis)
    for table in (produced, consumed, intersected):
        for sym, eids in table.items():
            if sym not in basis:
                add_diag(eids[0], "unknown-symbol", f"photon symbol {sym!r} not declared in the photon basis")

    for sym, eids in consumed.items():
        if len(eids) > 1:
            add_diag(eids[1], "consumed-twice", f"photon-path symbol {sym!r} consumed twice ({', '.join(eids)})")
        if sym not in produced:
            add_diag(eids[0], "unproduced-symbol", f"photon symbol {sym!r} consumed but never produced")
    for sym, eids in intersected.items():
        if len(eids) > 1:
            add_diag(eids[1], "consumed-twice", f"photon-path symbol {sym!r} consumed twice (boxes {', '.join(eids)})")
        if sym not in produced:
            add_diag(eids[0], "unproduced-symbol", f"photon symbol {sym!r} intersected but never produced")
    for sym, eids in produced.items():
        dupes = [e for e in eids if not isinstance(network.element(e), Emitter)]
        if len(dupes) > 1 or (len(eids) > 1 and dupes and len(dupes) != len(eids)):
            add_diag(eids[1], "produced-twice", f"photon symbol {sym!r} produced by more than one element")

    # detectors consume distinct symbols
    det_syms = [d.input for d in network.detectors()]
    if len(set(det_syms)) != len(det_syms):
        add_diag(None, "detector-symbols", "two detectors consume the same photon symbol")

    # boxes reference real subsystems and carry unique markers
    sub_by_id = {s.id: s for s in network.subsystems}
    for b in network.boxes():
        atom = sub_by_id.get(b.atom)
        level = sub_by_id.get(b.level)
        if atom is None or atom.kind != "atom-spin":
            add_diag(b.id, "box-atom", f"box references unknown atom-spin subsystem {b.atom!r}")
        elif b.blocking not in atom.basis:
            add_diag(b.id, "box-blocking", f"blocking symbol {b.blocking!r} not in atom basis")
        if level is None or level.kind != "atom-level":
            add_diag(b.id, "box-level", f"box references unknown atom-level subsystem {b.level!r}")
        if b.marker not in basis:
            add_diag(b.id, "box-marker", f"marker symbol {b.marker!r} not declared in the photon basis")
        elif b.marker in produced or b.marker in consumed:
            add_diag(b.id, "box-marker", f"marker symbol {b.marker!r} collides with a routed photon symbol")

    # rank monotonicity along every edge, boxes strictly between producer and consumer
    def rank_of(eid: str) -> int:
        return network.element(eid).rank

    for sym, eids in consumed.items():
        if sym in produced:
            for p in produced[sym]:
                for c in eids:
                    if rank_of(p) >= rank_of(c):
                        add_diag(c, "rank-order", f"symbol {sym!r}: consumer rank must exceed producer rank")
    for sym, eids in intersected.items():
        if sym in produced:
            for p in produced[sym]:
                for b in eids:
                    if rank_of(p) >= rank_of(b):
                        add_diag(b, "rank-order", f"symbol {sym!r}: box rank must exceed producer rank")
        for c in consumed.get(sym, []):
            for b in eids:
                if rank_of(b) >= rank_of(c):
                    add_diag(b, "rank-order", f"symbol {sym!r}: box rank must precede consumer rank")

    # acyclicity, independent of ranks
    graph: dict[str, set[str]] = {e.id: set() for e in network.elements}
    for sym, cons in consumed.items():
        chain = produced.get(sym, []) + sorted(intersected.get(sym, []), key=rank_of) + cons
        for a, b in zip(chain, chain[1:]):
            graph[b].add(a)
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as err:
        cycle = err.args[1]
        add_diag(None, "acyclic", f"element cycle detected: {' -> '.join(cycle)}")

    return diags


def _require_valid(network: Network) -> None:
    diags = validate(network)
    if diags:
        raise ValidationError("invalid network: " + "; ".join(str(d) for d in diags))


# -- forward propagation ------------------------------------------------------


def emitted_state(network: Network) -> Ket:
    """Tensor product of all emitted states (photon emitters add coherently)."""
    photon_states = [e.state for e in network.photon_emitters()]
    state = photon_states[0]
    for extra in photon_states[1:]:
        state = add(state, extra)
    rest = sorted(
        (e for e in network.emitters() if e not in network.photon_emitters()),
        key=lambda e: subsystem_index(network.subsystems, e.state.space[0].id),
    )
    for e in rest:
        state = tensor(state, e.state)
    if state.space != network.subsystems:
        raise StructuralError("emitter coverage does not match the declared subsystem order")
    return state


def _apply_symbol_map(state, photon_i: int, mapping) -> Ket:
    terms: dict[Label, complex] = {}
    for label, amp in state.terms.items():
        branches = mapping.get(label[photon_i])
        if branches is None:
            terms[label] = terms.get(label, 0j) + amp
            continue
        for out_sym, factor in branches:
            new_label = label[:photon_i] + (out_sym,) + label[photon_i + 1 :]
            terms[new_label] = terms.get(new_label, 0j) + factor * amp
    return type(state)(state.space, terms)


def _transpose_map(mapping) -> dict[str, list[tuple[str, complex]]]:
    out: dict[str, list[tuple[str, complex]]] = {}
    for in_sym, branches in mapping.items():
        for out_sym, factor in branches:
            out.setdefault(out_sym, []).append((in_sym, factor))
    return out


def _box_swaps(network: Network, box: AtomBox) -> tuple[int, int, int, str, str]:
    photon_i = network.photon_index
    atom_i = subsystem_index(network.subsystems, box.atom)
    level_i = subsystem_index(network.subsystems, box.level)
    level_spec = network.subsystems[level_i]
    ground, excited = level_spec.basis
    return photon_i, atom_i, level_i, ground, excited


def _apply_box_forward(network: Network, box: AtomBox, state: Ket) -> tuple[Ket, Ket]:
    photon_i, atom_i, level_i, ground, excited = _box_swaps(network, box)
    keep: dict[Label, complex] = {}
    taken: dict[Label, complex] = {}
    for label, amp in state.terms.items():
        if label[photon_i] == box.path and label[atom_i] == box.blocking and label[level_i] == ground:
            new_label = list(label)
            new_label[photon_i] = box.marker
            new_label[level_i] = excited
            taken[tuple(new_label)] = amp
        else:
            keep[label] = amp
    return Ket(state.space, keep), Ket(state.space, taken)


def _apply_box_backward(network: Network, box: AtomBox, state: Bra) -> Bra:
    photon_i, atom_i, level_i, ground, excited = _box_swaps(network, box)
    terms: dict[Label, complex] = {}
    for label, amp in state.terms.items():
        new_label = label
        if label[atom_i] == box.blocking:
            if label[photon_i] == box.path and label[level_i] == ground:
                l = list(label)
                l[photon_i], l[level_i] = box.marker, excited
                new_label = tuple(l)
            elif label[photon_i] == box.marker and label[level_i] == excited:
                l = list(label)
                l[photon_i], l[level_i] = box.path, ground
                new_label = tuple(l)
        terms[new_label] = terms.get(new_label, 0j) + amp
    return Bra(state.space, terms)


def forward_propagate(network: Network, initial: Ket | None = None) -> PropagationTrace:
    """Propagate an offer wave source -> detectors in rank order.

    ``initial`` defaults to the tensor product of everything the emitters
    emit; a caller-supplied ket must be supported on emitted photon symbols.
    """
    _require_valid(network)
    if initial is None:
        state = emitted_state(network)
    else:
        state = initial
        emitted_syms = {label[0] for e in network.photon_emitters() for label, _ in e.state.items()}
        photon_i = subsystem_index(state.space, network.photon.id)
        for label, _ in state.items():
            if label[photon_i] not in emitted_syms:
                raise ContractError(
                    f"initial ket is supported on non-emitter symbol {label[photon_i]!r}"
                )
    photon_i = subsystem_index(state.space, network.photon.id)
    absorbed: list[tuple[str, Ket]] = []
    snapshots: list[tuple[int, Ket]] = []
    current_rank: int | None = None
    for element in network.ordered():
        if current_rank is not None and element.rank != current_rank:
            snapshots.append((current_rank, state))
        current_rank = element.rank
        if isinstance(element, (BeamSplitter, Mirror)):
            state = _apply_symbol_map(state, photon_i, element.forward_map())
        elif isinstance(element, AtomBox):
            state, taken = _apply_box_forward(network, element, state)
            absorbed.append((element.id, taken))
        # emitters and detectors do not transform the in-flight state
    if current_rank is not None:
        snapshots.append((current_rank, state))
    return PropagationTrace(continuing=state, absorbed=tuple(absorbed), snapshots=tuple(snapshots))


# -- backward propagation -----------------------------------------------------


def backward_propagate(
    network: Network,
    confirmation: Bra,
    atom_bras: Mapping[str, Bra] | None = None,
    ow_amplitudes: Mapping[str, float] | None = None,
) -> EchoReport:
    """Propagate a confirmation wave terminal -> sources and filter at each emitter.

    ``confirmation`` must be a photon-sector bra supported on exactly one
    terminal symbol (a detector's input or a box marker).  ``atom_bras`` maps
    each atom-spin subsystem to the spin component of the confirmation wave
    (defaults to the blocking spin for the atom of an anchoring box).  Level
    coefficients are supplied internally: excited for the anchoring box's
    atom, ground otherwise.

    ``ow_amplitudes`` optionally overrides, per emitter id, the offer-wave
    amplitude the anchoring absorber saw, used only for the bookkeeping view
    in ``emitter_amplitudes``; it defaults to the modulus of the backward
    sector amplitude, which equals the arriving offer-wave modulus.
    """
    _require_valid(network)
    atom_bras = dict(atom_bras or {})
    ow_amplitudes = dict(ow_amplitudes or {})

    photon = network.photon
    if confirmation.space != (photon,):
        raise ContractError("confirmation bra must live on the photon subsystem alone")
    support = [label[0] for label, _ in confirmation.items()]
    if len(support) != 1:
        raise ContractError("confirmation bra must be anchored at exactly one symbol")
    anchor_symbol = support[0]
    terminals = network.terminal_symbols()
    if anchor_symbol not in terminals:
        raise ContractError(f"confirmation anchored at non-terminal symbol {anchor_symbol!r}")
    anchor_box = next((b for b in network.boxes() if b.marker == anchor_symbol), None)

    # assemble the joint anchor bra in declaration order
    sub_by_id = {s.id: s for s in network.subsystems}
    joint = confirmation
    source_side_atom_bras: dict[str, Bra] = {}
    for spec in network.subsystems[1:]:
        if spec.kind == "atom-spin":
            spin = atom_bras.get(spec.id)
            if spin is None:
                if anchor_box is not None and anchor_box.atom == spec.id:
                    spin = unit((spec,), (anchor_box.blocking,), bra=True)
                else:
                    raise ContractError(f"no confirmation bra supplied for atom {spec.id!r}")
            if spin.space != (spec,):
                raise StructuralError(f"confirmation bra for {spec.id!r} is on the wrong space")
            joint = tensor(joint, spin)
            source_side_atom_bras[spec.id] = spin
        elif spec.kind == "atom-level":
            ground, excited = spec.basis
            sym = excited if (anchor_box is not None and anchor_box.level == spec.id) else ground
            joint = tensor(joint, unit((spec,), (sym,), bra=True))
    if joint.space != network.subsystems:
        raise StructuralError("anchor does not cover the declared subsystem order")

    photon_i = network.photon_index
    for element in reversed(network.ordered()):
        if isinstance(element, (BeamSplitter, Mirror)):
            joint = _apply_symbol_map(joint, photon_i, _transpose_map(element.forward_map()))
        elif isinstance(element, AtomBox):
            joint = _apply_box_backward(network, element, joint)

    # per-sector amplitudes at the sources
    sector: dict[str, complex] = {}
    atom_product = 1.0 + 0j
    photon_emitters = network.photon_emitters()
    for e in network.emitters():
        if e in photon_emitters:
            continue
        spin_spec = e.state.space[0]
        level_spec = e.state.space[1] if len(e.state.space) > 1 else None
        bra = source_side_atom_bras[spin_spec.id]
        if level_spec is not None:
            # the box backward map restores ground level before the source
            bra = tensor(bra, unit((level_spec,), (level_spec.basis[0],), bra=True))
        a_k = inner(bra, e.state)
        sector[e.id] = a_k
        atom_product *= a_k

    full_emitted = emitted_state(network)
    a_total = inner(joint, full_emitted)
    atom_states = sorted(
        (e.state for e in network.emitters() if e not in photon_emitters),
        key=lambda s: subsystem_index(network.subsystems, s.space[0].id),
    )
    for e in photon_emitters:
        own = e.state
        for extra in atom_states:
            own = tensor(own, extra)
        s_e = inner(joint, own)
        sector[e.id] = s_e / atom_product if abs(atom_product) > 0 else 0j

    emitter_amplitudes = {
        eid: ow_amplitudes.get(eid, abs(a)) * abs(a) for eid, a in sector.items()
    }
    group = tuple(e.id for e in photon_emitters)
    group_sum = sum(sector[eid] for eid in group)
    if len(group) == 1 and group[0] in ow_amplitudes:
        group_ow = float(ow_amplitudes[group[0]])
    else:
        group_ow = abs(group_sum)
    return EchoReport(
        emitter_amplitudes=emitter_amplitudes,
        sector_amplitudes=sector,
        photon_group=group,
        photon_group_ow=group_ow,
        amplitude=a_total,
        weight=abs(a_total) ** 2,
    )


# -- the two-source (Hanbury-Twiss style) variant -----------------------------


def two_laser_variant(network: Network) -> Network:
    """Replace (photon emitter + first beam splitter) by two sources feeding
    the splitter's outputs directly with the same amplitudes.

    The photon subsystem is shared: the transferred quantum has no identity
    beyond the boundary conditions it satisfies, so the two sources emit into
    one path space and each source's confirmation filter accepts only its own
    component.
    """
    emitters = network.photon_emitters()
    if len(emitters) != 1:
        raise ContractError("two-source variant needs a single-photon-emitter network")
    emitter = emitters[0]
    support = [(label[0], amp) for label, amp in emitter.state.items()]
    if len(support) != 1:
        raise ContractError("photon emitter must emit a single symbol")
    src_symbol, src_amp = support[0]
    splitter = next(
        (
            e
            for e in network.elements
            if isinstance(e, BeamSplitter) and e.inputs == (src_symbol,)
        ),
        None,
    )
    if splitter is None:
        raise ContractError("no beam splitter fed exclusively by the photon emitter")

    photon = network.photon
    out0, out1 = splitter.outputs
    new_emitters = []
    for sym, factor in ((out0, _R), (out1, _T)):
        state = unit((photon,), (sym,), src_amp * factor)
        new_emitters.append(
            Emitter(id=f"{emitter.id}-{sym}", rank=emitter.rank, state=state, cw_filter=dual(state))
        )
    elements = tuple(
        e for e in network.elements if e.id not in (emitter.id, splitter.id)
    ) + tuple(new_emitters)
    return Network(
        name=f"{network.name}-two-laser",
        subsystems=network.subsystems,
        elements=elements,
        two_source=True,
    )


# -- description-file (de)serialization ---------------------------------------

_SCHEMA = 1


def _ket_to_json(state: Ket | Bra) -> list[dict]:
    out = []
    for label, amp in state.items():
        out.append(
            {
                "label": {spec.id: sym for spec, sym in zip(state.space, label)},
                "re": amp.real,
                "im": amp.imag,
            }
        )
    return out


def _ket_from_json(space: Space, entries: Iterable[Mapping], bra: bool = False) -> Ket | Bra:
    terms: dict[Label, complex] = {}
    for entry in entries:
        label = tuple(entry["label"][spec.id] for spec in space)
        terms[label] = complex(entry["re"], entry.get("im", 0.0))
    return (Bra if bra else Ket)(space, terms)


def network_to_dict(network: Network) -> dict:
    elements = []
    for e in network.ordered():
        item: dict = {"id": e.id, "rank": e.rank}
        if isinstance(e, Emitter):
            item["variant"] = "emitter"
            item["params"] = {
                "subsystems": [s.id for s in e.state.space],
                "state": _ket_to_json(e.state),
            }
            if e.cw_filter is not None:
                item["params"]["filter"] = _ket_to_json(e.cw_filter)
        elif isinstance(e, BeamSplitter):
            item["variant"] = "beam-splitter"
            item["params"] = {"inputs": list(e.inputs), "outputs": list(e.outputs)}
        elif isinstance(e, Mirror):
            item["variant"] = "mirror"
            item["params"] = {
                "input": e.input,
                "output": e.output,
                "phase": {"re": complex(e.phase).real, "im": complex(e.phase).imag},
            }
        elif isinstance(e, AtomBox):
            item["variant"] = "atom-box"
            item["params"] = {"atom": e.atom, "blocking": e.blocking, "path": e.path, "level": e.level}
        elif isinstance(e, Detector):
            item["variant"] = "detector"
            item["params"] = {"input": e.input}
        elements.append(item)

    edges = []
    produced: dict[str, str] = {}
    for e in network.ordered():
        if isinstance(e, Emitter):
            for label, _ in e.state.items():
                if any(s.kind == "photon-path" for s in e.state.space):
                    produced[label[0]] = e.id
        elif isinstance(e, BeamSplitter):
            for s in e.outputs:
                produced[s] = e.id
        elif isinstance(e, Mirror):
            produced[e.output] = e.id
    for e in network.ordered():
        targets = []
        if isinstance(e, BeamSplitter):
            targets = list(e.inputs)
        elif isinstance(e, Mirror):
            targets = [e.input]
        elif isinstance(e, Detector):
            targets = [e.input]
        elif isinstance(e, AtomBox):
            targets = [e.path]
        for sym in targets:
            if sym in produced:
                edges.append({"symbol": sym, "from": produced[sym], "to": e.id})

    return {
        "schema": _SCHEMA,
        "name": network.name,
        "two_source": network.two_source,
        "subsystems": [
            {"id": s.id, "kind": s.kind, "basis": list(s.basis)} for s in network.subsystems
        ],
        "elements": elements,
        "edges": edges,
    }


def network_from_dict(data: Mapping) -> Network:
    if data.get("schema", _SCHEMA) != _SCHEMA:
        raise ValidationError(f"unsupported network schema {data.get('schema')!r}")
    subsystems = tuple(
        SubsystemSpec(s["id"], s["kind"], tuple(s["basis"])) for s in data["subsystems"]
    )
    by_id = {s.id: s for s in subsystems}
    elements: list[Element] = []
    for item in data["elements"]:
        variant = item["variant"]
        params = item.get("params", {})
        eid, rank = item["id"], int(item["rank"])
        if variant == "emitter":
            space = tuple(by_id[sid] for sid in params["subsystems"])
            state = _ket_from_json(space, params["state"])
            cw = _ket_from_json(space, params["filter"], bra=True) if "filter" in params else None
            elements.append(Emitter(eid, rank, state, cw))
        elif variant == "beam-splitter":
            elements.append(BeamSplitter(eid, rank, tuple(params["inputs"]), tuple(params["outputs"])))
        elif variant == "mirror":
            phase = params.get("phase", {"re": 1.0, "im": 0.0})
            elements.append(Mirror(eid, rank, params["input"], params["output"], complex(phase["re"], phase["im"])))
        elif variant == "atom-box":
            elements.append(AtomBox(eid, rank, params["atom"], params["blocking"], params["path"], params["level"]))
        elif variant == "detector":
            elements.append(Detector(eid, rank, params["input"]))
        else:
            raise ValidationError(f"unknown element variant {variant!r}")
    network = Network(
        name=data.get("name", "unnamed"),
        subsystems=subsystems,
        elements=tuple(elements),
        two_source=bool(data.get("two_source", False)),
    )
    diags = validate(network)
    if diags:
        raise ValidationError("network description failed validation: " + "; ".join(map(str, diags)))
    return network


def save_network(network: Network, path: str | Path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(network), indent=2, sort_keys=True))


def load_network(path: str | Path) -> Network:
    return network_from_dict(json.loads(Path(path).read_text()))

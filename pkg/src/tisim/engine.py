"""Transaction enumeration, weighing, resolution, and post-selection.

A measurement context fixes one spin basis per atom (open the box for z;
recombine and rotate for y or an arbitrary Bloch direction) and says whether
photon absorption inside a box counts as a terminal outcome.  The engine then

* enumerates every candidate transaction with its Born weight, flat over the
  joint outcome space (``enumerate_transactions``),
* independently recomputes any candidate's weight through the backward
  confirmation-wave route (``echo_weight``),
* resolves one actualized transaction per trial, either flat or walking the
  absorption hierarchy rank by rank with renormalization on failure,
* and conditions distributions on a photon outcome (``post_select``),
  returning the surviving normalized state for further basis changes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import rng
from .amplitudes import (
    Bra,
    Ket,
    Space,
    SubsystemSpec,
    dual,
    norm_sq,
    rebase,
    subsystem_index,
    unit,
)
from .errors import ContractError, StructuralError, UsageError, ValidationError
from .network import (
    AtomBox,
    Network,
    backward_propagate,
    emitted_state,
    forward_propagate,
    validate,
    _apply_box_forward,
    _apply_symbol_map,
)

LANE_OUTCOME = 0  # final outcome draw; hierarchy stage k draws on lane 1 + k

TOL = 1e-12


# -- measurement contexts -----------------------------------------------------


@dataclass(frozen=True)
class AtomBasis:
    """Spin measurement basis for one atom: z, y, or a Bloch direction."""

    kind: str
    theta: float = 0.0
    phi: float = 0.0

    @classmethod
    def z(cls) -> "AtomBasis":
        return cls("z")

    @classmethod
    def y(cls) -> "AtomBasis":
        return cls("y")

    @classmethod
    def bloch(cls, theta: float, phi: float = 0.0) -> "AtomBasis":
        return cls("bloch", float(theta), float(phi))

    def matrix(self) -> np.ndarray | None:
        """Rows express the measurement eigenstates in the z basis."""
        if self.kind == "z":
            return None
        if self.kind == "y":
            theta, phi = math.pi / 2, math.pi / 2
        elif self.kind == "bloch":
            theta, phi = self.theta, self.phi
        else:
            raise ValidationError(f"unknown atom basis {self.kind!r}")
        c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
        e = complex(math.cos(phi), math.sin(phi))
        return np.array([[c, e * s], [s, -e * c]], dtype=complex)

    def symbols(self, spec: SubsystemSpec) -> tuple[str, ...]:
        if self.kind == "z":
            return spec.basis
        if self.kind == "y":
            return ("y+", "y-")
        return ("n+", "n-")


@dataclass
class MeasurementContext:
    """One basis per atom plus whether absorption outcomes are terminal."""

    atom_bases: dict[str, AtomBasis] = field(default_factory=dict)
    include_absorption: bool = True

    def basis_for(self, atom_id: str) -> AtomBasis:
        return self.atom_bases.get(atom_id, AtomBasis.z())


def z_context(network: Network) -> MeasurementContext:
    return MeasurementContext({a.id: AtomBasis.z() for a in network.atoms()})


def y_context(network: Network) -> MeasurementContext:
    return MeasurementContext({a.id: AtomBasis.y() for a in network.atoms()})


# -- outcomes and distributions -----------------------------------------------


@dataclass(frozen=True)
class Outcome:
    """A terminal transaction label.

    ``photon`` names the detector (for detections) or the box (for
    absorptions); ``atoms`` lists one measured symbol per atom in network
    declaration order; ``excited`` names the atom left in its excited level
    when the photon was absorbed.
    """

    photon: str
    atoms: tuple[tuple[str, str], ...] = ()
    excited: str | None = None

    @property
    def label(self) -> str:
        # semicolon-joined so labels stay comma-free for the CSV report
        if not self.atoms:
            return self.photon
        syms = ";".join(
            sym + ("*" if atom == self.excited else "") for atom, sym in self.atoms
        )
        return f"{self.photon}|{syms}"

    def sort_key(self):
        return (self.photon, tuple(sym for _, sym in self.atoms))


@dataclass(frozen=True)
class TransactionCandidate:
    outcome: Outcome
    weight: float
    amplitude: complex


@dataclass(frozen=True)
class OutcomeDistribution:
    """Candidates in canonical order, with optional sampled counts.

    ``atom_space`` records the (possibly rebased) atom-spin specs the outcome
    symbols refer to, so post-selected states can be rebuilt.
    """

    candidates: tuple[TransactionCandidate, ...]
    provenance: str
    atom_space: Space = ()
    seed: int | None = None
    trials: int | None = None
    counts: tuple[int, ...] | None = None

    def total_weight(self) -> float:
        return float(sum(c.weight for c in self.candidates))

    def weight_of(self, label: str) -> float:
        return sum(c.weight for c in self.candidates if c.outcome.label == label)

    def as_dict(self) -> dict[str, float]:
        return {c.outcome.label: c.weight for c in self.candidates}

    def photon_marginal(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for c in self.candidates:
            out[c.outcome.photon] = out.get(c.outcome.photon, 0.0) + c.weight
        return out

    def absorbed_probability(self) -> float:
        return float(sum(c.weight for c in self.candidates if c.outcome.excited is not None))


def _canonical(candidates: Iterable[TransactionCandidate]) -> tuple[TransactionCandidate, ...]:
    return tuple(sorted(candidates, key=lambda c: c.outcome.sort_key()))


def _rebase_atoms(
    state: Ket,
    network: Network,
    context: MeasurementContext,
    skip: str | None = None,
) -> Ket:
    for atom in network.atoms():
        if atom.id == skip:
            continue
        basis = context.basis_for(atom.id)
        m = basis.matrix()
        if m is not None:
            state = rebase(state, atom.id, m, basis.symbols(atom))
    return state


def _context_atom_space(network: Network, context: MeasurementContext) -> Space:
    specs = []
    for atom in network.atoms():
        basis = context.basis_for(atom.id)
        specs.append(SubsystemSpec(atom.id, atom.kind, basis.symbols(atom)))
    return tuple(specs)


def _check_context(network: Network, context: MeasurementContext) -> None:
    atom_ids = {a.id for a in network.atoms()}
    extra = set(context.atom_bases) - atom_ids
    if extra:
        raise StructuralError(f"context assigns bases to unknown atoms {sorted(extra)}")


def _candidates_from_ket(
    state: Ket, network: Network, scale: float = 1.0, excited_box: AtomBox | None = None
) -> list[TransactionCandidate]:
    photon_i = subsystem_index(state.space, network.photon.id)
    atom_ids = [a.id for a in network.atoms()]
    atom_is = [subsystem_index(state.space, a) for a in atom_ids]
    terminals = network.terminal_symbols()
    out = []
    for label, amp in state.items():
        photon = terminals.get(label[photon_i], label[photon_i])
        atoms = tuple((aid, label[i]) for aid, i in zip(atom_ids, atom_is))
        outcome = Outcome(
            photon=photon,
            atoms=atoms,
            excited=excited_box.atom if excited_box is not None else None,
        )
        out.append(TransactionCandidate(outcome, scale * abs(amp) ** 2, amp))
    return out


def enumerate_transactions(network: Network, context: MeasurementContext) -> OutcomeDistribution:
    """Flat enumeration over the joint outcome space with Born weights."""
    _check_context(network, context)
    trace = forward_propagate(network)
    boxes = {b.id: b for b in network.boxes()}
    candidates = _candidates_from_ket(_rebase_atoms(trace.continuing, network, context), network)
    if context.include_absorption:
        for box_id, component in trace.absorbed:
            box = boxes[box_id]
            rebased = _rebase_atoms(component, network, context, skip=box.atom)
            candidates.extend(_candidates_from_ket(rebased, network, excited_box=box))
    return OutcomeDistribution(
        candidates=_canonical(candidates),
        provenance="flat",
        atom_space=_context_atom_space(network, context),
    )


def hierarchical_distribution(network: Network, context: MeasurementContext) -> OutcomeDistribution:
    """Chain-rule enumeration: earlier absorbers get first refusal.

    At each box the local absorption probability is the absorbed mass over
    the remaining mass; on failure the continuing wave is renormalized and
    propagation resumes.  The resulting distribution matches the flat one.
    """
    _check_context(network, context)
    diags = validate(network)
    if diags:
        raise ValidationError("invalid network: " + "; ".join(map(str, diags)))
    state = emitted_state(network)
    photon_i = network.photon_index
    survival = 1.0
    candidates: list[TransactionCandidate] = []
    for element in network.ordered():
        if isinstance(element, AtomBox):
            before = norm_sq(state)
            state, taken = _apply_box_forward(network, element, state)
            p_here = norm_sq(taken) / before if before > 0 else 0.0
            if p_here > 0.0:
                rebased = _rebase_atoms(taken, network, context, skip=element.atom)
                mass = norm_sq(rebased)
                if context.include_absorption:
                    for cand in _candidates_from_ket(rebased, network, excited_box=element):
                        candidates.append(
                            replace(cand, weight=survival * p_here * (cand.weight / mass))
                        )
                survival *= 1.0 - p_here
                if survival <= 0.0:
                    state = Ket(state.space, {})
                else:
                    state = type(state)(
                        state.space,
                        {l: v / math.sqrt(1.0 - p_here) for l, v in state.terms.items()},
                    )
        elif hasattr(element, "forward_map"):
            state = _apply_symbol_map(state, photon_i, element.forward_map())
    final_mass = norm_sq(state)
    if final_mass > 0.0:
        rebased = _rebase_atoms(state, network, context)
        for cand in _candidates_from_ket(rebased, network):
            candidates.append(replace(cand, weight=survival * (cand.weight / final_mass)))
    return OutcomeDistribution(
        candidates=_canonical(candidates),
        provenance="hierarchical",
        atom_space=_context_atom_space(network, context),
    )


# -- confirmation-wave (echo) weights ------------------------------------------


def _anchor_for(network: Network, outcome: Outcome, context: MeasurementContext):
    """Build the sector confirmation bras matching an enumerated outcome."""
    terminals = {eid: sym for sym, eid in network.terminal_symbols().items()}
    if outcome.photon not in terminals:
        raise ContractError(f"outcome {outcome.label!r} is not terminal")
    photon_bra = unit((network.photon,), (terminals[outcome.photon],), bra=True)
    atom_bras: dict[str, Bra] = {}
    for atom_id, symbol in outcome.atoms:
        spec = next(a for a in network.atoms() if a.id == atom_id)
        if outcome.excited == atom_id:
            atom_bras[atom_id] = unit((spec,), (symbol,), bra=True)
            continue
        basis = context.basis_for(atom_id)
        m = basis.matrix()
        if m is None:
            atom_bras[atom_id] = unit((spec,), (symbol,), bra=True)
        else:
            row = basis.symbols(spec).index(symbol)
            state = Ket((spec,), {(spec.basis[0],): m[row, 0], (spec.basis[1],): m[row, 1]})
            atom_bras[atom_id] = dual(state)
    return photon_bra, atom_bras


def echo_weight(network: Network, outcome: Outcome, context: MeasurementContext) -> float:
    """Born weight of an outcome computed through the backward CW route only.

    The confirmation wave is anchored at the outcome, propagated source-ward
    through the conjugate element maps, and filtered at every emitter; the
    squared modulus of the surviving joint amplitude is the weight.  No
    forward inner product is taken.
    """
    photon_bra, atom_bras = _anchor_for(network, outcome, context)
    report = backward_propagate(network, photon_bra, atom_bras)
    return report.weight


# -- resolution (sampling) -----------------------------------------------------


def _cumulative(weights: Sequence[float]) -> np.ndarray:
    cum = np.cumsum(np.asarray(weights, dtype=float))
    if cum.size == 0 or cum[-1] <= 0:
        raise ContractError("cannot sample from an empty distribution")
    return cum / cum[-1]


def resolve_flat(dist: OutcomeDistribution, seed: int, trial: int) -> Outcome:
    """Sample one outcome; deterministic in (seed, trial index)."""
    if not dist.candidates:
        raise ContractError("cannot resolve an empty distribution")
    cum = _cumulative([c.weight for c in dist.candidates])
    u = rng.uniform(seed, LANE_OUTCOME, trial)
    return dist.candidates[int(np.searchsorted(cum, u, side="right"))].outcome


def sample_flat(
    dist: OutcomeDistribution, trials: int, seed: int, start: int = 0
) -> np.ndarray:
    """Counts per candidate for trial indices ``start .. start+trials-1``."""
    if trials < 1:
        raise UsageError("trials must be >= 1")
    cum = _cumulative([c.weight for c in dist.candidates])
    u = rng.uniforms(seed, LANE_OUTCOME, start, trials)
    idx = np.searchsorted(cum, u, side="right")
    return np.bincount(idx, minlength=len(dist.candidates)).astype(np.int64)


def _hierarchy_stages(network: Network, context: MeasurementContext):
    """Precompute the per-stage conditional tables the hierarchical walk uses."""
    state = emitted_state(network)
    photon_i = network.photon_index
    stages = []
    for element in network.ordered():
        if isinstance(element, AtomBox):
            before = norm_sq(state)
            state, taken = _apply_box_forward(network, element, state)
            p_here = norm_sq(taken) / before if before > 0 else 0.0
            rebased = _rebase_atoms(taken, network, context, skip=element.atom)
            inner_cands = _candidates_from_ket(rebased, network, excited_box=element)
            stages.append((p_here, _canonical(inner_cands)))
        elif hasattr(element, "forward_map"):
            state = _apply_symbol_map(state, photon_i, element.forward_map())
    final = _canonical(_candidates_from_ket(_rebase_atoms(state, network, context), network))
    return stages, final


def resolve_hierarchical(
    network: Network, context: MeasurementContext, seed: int, trial: int
) -> Outcome:
    """Walk boxes in rank order; each may fire with its conditional probability.

    A trial that survives every box draws its detector outcome from lane 0,
    the same stream the flat resolver uses, so absorber-free networks resolve
    identically to ``resolve_flat`` trial by trial.
    """
    _check_context(network, context)
    stages, final = _hierarchy_stages(network, context)
    remaining = 1.0
    for k, (p_here, inner_cands) in enumerate(stages):
        if p_here <= 0.0:
            continue
        u = rng.uniform(seed, 1 + k, trial)
        if u < p_here:
            # reuse the conditional remainder of u for the within-component pick
            v = u / p_here
            cum = _cumulative([c.weight for c in inner_cands])
            return inner_cands[int(np.searchsorted(cum, v, side="right"))].outcome
        remaining *= 1.0 - p_here
    if not final:
        raise ContractError("no surviving outcomes to resolve")
    cum = _cumulative([c.weight for c in final])
    u = rng.uniform(seed, LANE_OUTCOME, trial)
    return final[int(np.searchsorted(cum, u, side="right"))].outcome


def sample_hierarchical(
    network: Network, context: MeasurementContext, trials: int, seed: int
) -> OutcomeDistribution:
    """Vectorized hierarchical sampling; counts align with the flat candidates."""
    _check_context(network, context)
    flat = enumerate_transactions(network, context)
    index_of = {c.outcome: i for i, c in enumerate(flat.candidates)}
    stages, final = _hierarchy_stages(network, context)
    counts = np.zeros(len(flat.candidates), dtype=np.int64)
    alive = np.arange(trials, dtype=np.int64)
    for k, (p_here, inner_cands) in enumerate(stages):
        if p_here <= 0.0 or alive.size == 0:
            continue
        u = rng.uniforms(seed, 1 + k, 0, trials)[alive]
        fired = u < p_here
        hit = alive[fired]
        if hit.size and context.include_absorption:
            cum = _cumulative([c.weight for c in inner_cands])
            picks = np.searchsorted(cum, u[fired] / p_here, side="right")
            for p, n in zip(*np.unique(picks, return_counts=True)):
                counts[index_of[inner_cands[int(p)].outcome]] += int(n)
        alive = alive[~fired]
    if alive.size:
        cum = _cumulative([c.weight for c in final])
        u = rng.uniforms(seed, LANE_OUTCOME, 0, trials)[alive]
        picks = np.searchsorted(cum, u, side="right")
        for p, n in zip(*np.unique(picks, return_counts=True)):
            counts[index_of[final[int(p)].outcome]] += int(n)
    return replace(
        flat, provenance="hierarchical", seed=seed, trials=trials, counts=tuple(int(c) for c in counts)
    )


# -- post-selection -------------------------------------------------------------


def post_select(
    dist: OutcomeDistribution, predicate: str | Callable[[str], bool]
) -> tuple[OutcomeDistribution, Ket | None]:
    """Condition on a photon outcome.

    Returns the renormalized conditional distribution plus, when the selected
    candidates share a single un-absorbed photon outcome, the normalized
    post-selected atom state (in the context's measurement basis) for
    downstream basis changes.
    """
    if isinstance(predicate, str):
        wanted = predicate
        pred = lambda photon: photon == wanted
    else:
        pred = predicate
    selected = [c for c in dist.candidates if pred(c.outcome.photon)]
    total = sum(c.weight for c in selected)
    if not selected or total <= 0.0:
        raise ContractError("post-selection matched no outcome with nonzero weight")
    scale = math.sqrt(total)
    conditional = OutcomeDistribution(
        candidates=tuple(
            replace(c, weight=c.weight / total, amplitude=c.amplitude / scale) for c in selected
        ),
        provenance=dist.provenance,
        atom_space=dist.atom_space,
    )
    photons = {c.outcome.photon for c in selected}
    ket: Ket | None = None
    if len(photons) == 1 and all(c.outcome.excited is None for c in selected) and dist.atom_space:
        terms = {
            tuple(sym for _, sym in c.outcome.atoms): c.amplitude / scale for c in selected
        }
        ket = Ket(dist.atom_space, terms)
    return conditional, ket


# -- CHSH ------------------------------------------------------------------------


@dataclass(frozen=True)
class ChshSettings:
    """Two Bloch directions per atom, as (theta, phi) in radians."""

    a: tuple[float, float]
    a_prime: tuple[float, float]
    b: tuple[float, float]
    b_prime: tuple[float, float]


@dataclass(frozen=True)
class ChshResult:
    s: float
    correlations: dict[str, float]
    settings: ChshSettings
    counts: dict[str, tuple[int, int]] | None = None  # (same, different) per pair


def pair_contexts(network: Network, settings: ChshSettings):
    atoms = network.atoms()
    if len(atoms) != 2:
        raise ContractError("CHSH needs a network with exactly two atoms")
    first, second = atoms[0].id, atoms[1].id
    pairs = {
        "ab": (settings.a, settings.b),
        "ab'": (settings.a, settings.b_prime),
        "a'b": (settings.a_prime, settings.b),
        "a'b'": (settings.a_prime, settings.b_prime),
    }
    for key, (s1, s2) in pairs.items():
        ctx = MeasurementContext(
            {first: AtomBasis.bloch(*s1), second: AtomBasis.bloch(*s2)}
        )
        yield key, ctx


def _correlation(dist: OutcomeDistribution) -> float:
    e = 0.0
    for c in dist.candidates:
        s1, s2 = (sym for _, sym in c.outcome.atoms)
        sign = 1.0 if s1[-1] == s2[-1] else -1.0
        e += sign * c.weight
    return e


def chsh(network: Network, settings: ChshSettings, post: str = "D") -> ChshResult:
    """Exact CHSH statistic from post-selected conditional distributions."""
    correlations = {}
    for key, ctx in pair_contexts(network, settings):
        conditional, _ = post_select(enumerate_transactions(network, ctx), post)
        correlations[key] = _correlation(conditional)
    s = abs(
        correlations["ab"] - correlations["ab'"] + correlations["a'b"] + correlations["a'b'"]
    )
    return ChshResult(s=s, correlations=correlations, settings=settings)


def chsh_monte_carlo(
    network: Network, settings: ChshSettings, pairs: int, seed: int, post: str = "D"
) -> ChshResult:
    """CHSH estimate from sampled post-selected pairs, split evenly over settings.

    Each setting pair samples its conditional (post-selected) distribution on
    its own deterministic stream, so estimates merge reproducibly.
    """
    if pairs < 4:
        raise UsageError("need at least one pair per setting")
    correlations: dict[str, float] = {}
    counts: dict[str, tuple[int, int]] = {}
    per = pairs // 4
    for lane, (key, ctx) in enumerate(pair_contexts(network, settings)):
        conditional, _ = post_select(enumerate_transactions(network, ctx), post)
        n = per + (1 if lane < pairs % 4 else 0)
        cum = _cumulative([c.weight for c in conditional.candidates])
        u = rng.uniforms(seed, 100 + lane, 0, n)
        idx = np.searchsorted(cum, u, side="right")
        tally = np.bincount(idx, minlength=len(conditional.candidates))
        same = diff = 0
        for c, k in zip(conditional.candidates, tally):
            s1, s2 = (sym for _, sym in c.outcome.atoms)
            if s1[-1] == s2[-1]:
                same += int(k)
            else:
                diff += int(k)
        counts[key] = (same, diff)
        correlations[key] = (same - diff) / n
    s = abs(
        correlations["ab"] - correlations["ab'"] + correlations["a'b"] + correlations["a'b'"]
    )
    return ChshResult(s=s, correlations=correlations, settings=settings, counts=counts)


def chsh_optimal_settings(
    network: Network, resolution_deg: float = 1.0, post: str = "D"
) -> tuple[ChshSettings, float]:
    """Grid search for the settings maximizing S, at the given angular step.

    The search runs over polar angles in the x-z plane (the plane containing
    this family's optimal settings); for each (b, b') column the best a and
    a' are independent, so the search is cubic, not quartic, in grid size.
    """
    dist = enumerate_transactions(network, z_context(network))
    _, ket = post_select(dist, post)
    if ket is None or len(ket.space) != 2:
        raise ContractError("CHSH grid search needs a two-atom post-selected state")
    psi = np.zeros((2, 2), dtype=complex)
    for label, amp in ket.items():
        i = ket.space[0].basis.index(label[0])
        j = ket.space[1].basis.index(label[1])
        psi[i, j] = amp
    thetas = np.deg2rad(np.arange(0.0, 360.0, resolution_deg))
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    ops = np.cos(thetas)[:, None, None] * sz + np.sin(thetas)[:, None, None] * sx
    corr = np.einsum("ab,iac,jbd,cd->ij", psi.conj(), ops, ops, psi).real
    best = (-1.0, 0, 0, 0, 0)
    for jp in range(len(thetas)):
        t1 = corr - corr[:, [jp]]  # E(a, b) - E(a, b') over (a, b)
        t2 = corr + corr[:, [jp]]  # E(a', b) + E(a', b') over (a', b)
        hi = t1.max(axis=0) + t2.max(axis=0)
        lo = -(t1.min(axis=0) + t2.min(axis=0))
        j = int(np.argmax(np.maximum(hi, lo)))
        if hi[j] >= lo[j]:
            s_val, i, ip = hi[j], int(t1[:, j].argmax()), int(t2[:, j].argmax())
        else:
            s_val, i, ip = lo[j], int(t1[:, j].argmin()), int(t2[:, j].argmin())
        if s_val > best[0]:
            best = (float(s_val), i, ip, j, jp)
    s_val, i, ip, j, jp = best
    settings = ChshSettings(
        a=(float(thetas[i]), 0.0),
        a_prime=(float(thetas[ip]), 0.0),
        b=(float(thetas[j]), 0.0),
        b_prime=(float(thetas[jp]), 0.0),
    )
    return settings, s_val


# -- contextuality over deterministic assignments --------------------------------


@dataclass(frozen=True)
class AssignmentVerdict:
    occupied: tuple[bool, ...]
    path: str
    z_prediction: dict
    y_prediction: dict
    matches_z: bool
    matches_y: bool
    compatible_z: bool
    compatible_y: bool


def _tables_equal(a: Mapping, b: Mapping, tol: float = 1e-9) -> bool:
    keys = set(a) | set(b)
    return all(abs(a.get(k, 0.0) - b.get(k, 0.0)) <= tol for k in keys)


def _support(table: Mapping, tol: float = 1e-9):
    return {k for k, v in table.items() if v > tol}


def contextuality_verdicts(network: Network, post: str = "D") -> list[AssignmentVerdict]:
    """Test every deterministic (box occupancies, photon path) assignment.

    Each assignment fixes both atoms' z spins through box occupancy and the
    photon's path.  Its predicted open-the-boxes table is a point mass; its
    predicted y table is uniform, since a z-definite spin gives unbiased,
    independent y outcomes.  A verdict records whether the assignment
    reproduces (equals) or is even support-compatible with the post-selected
    quantum tables in each context.
    """
    boxes = sorted(network.boxes(), key=lambda b: b.id)
    if len(boxes) != 2:
        raise ContractError("contextuality check needs a two-box network")
    atoms = network.atoms()

    def atom_table(dist: OutcomeDistribution) -> dict:
        return {
            tuple(sym for _, sym in c.outcome.atoms): c.weight for c in dist.candidates
        }

    z_cond, _ = post_select(enumerate_transactions(network, z_context(network)), post)
    y_cond, _ = post_select(enumerate_transactions(network, y_context(network)), post)
    z_table, y_table = atom_table(z_cond), atom_table(y_cond)

    paths = tuple(b.path for b in boxes)
    verdicts = []
    for occupied in itertools.product((True, False), repeat=len(boxes)):
        for path in paths:
            syms = []
            for box, occ in zip(boxes, occupied):
                spec = next(a for a in atoms if a.id == box.atom)
                other = next(s for s in spec.basis if s != box.blocking)
                syms.append(box.blocking if occ else other)
            z_pred = {tuple(syms): 1.0}
            y_syms = ("y+", "y-")
            y_pred = {pair: 0.25 for pair in itertools.product(y_syms, repeat=2)}
            verdicts.append(
                AssignmentVerdict(
                    occupied=occupied,
                    path=path,
                    z_prediction=z_pred,
                    y_prediction=y_pred,
                    matches_z=_tables_equal(z_pred, z_table),
                    matches_y=_tables_equal(y_pred, y_table),
                    compatible_z=_support(z_pred) <= _support(z_table),
                    compatible_y=_support(y_pred) <= _support(y_table),
                )
            )
    return verdicts


def no_assignment_reproduces_both(network: Network, post: str = "D") -> bool:
    """True when no deterministic assignment reproduces both conditional tables."""
    return all(
        not (v.matches_z and v.matches_y) and not (v.compatible_z and v.compatible_y)
        for v in contextuality_verdicts(network, post)
    )

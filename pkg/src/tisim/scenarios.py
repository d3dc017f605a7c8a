"""Builtin experiments, exact/Monte-Carlo run harness, and verification checks.

The builtin family:

* ``ev-bomb``      -- balanced interferometer tuned so one port (D) is dark;
                      an obstruction on one arm makes D fire.
* ``hardy-ifm``    -- the obstruction is one spin component of an atom held
                      in a box on the lower arm.
* ``qle``          -- two boxed atoms, one component of each straddling the
                      two arms; detections at the dark port entangle them.
* ``qle-two-laser``-- same statistics from two mutually coherent sources
                      feeding the arms directly, no first splitter.
* ``qle-chsh``     -- the two-atom experiment run at four Bloch-angle setting
                      pairs, reported as a CHSH trial.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import numpy as np

from .amplitudes import Ket, SubsystemSpec, approx_equal, tensor, unit
from .engine import (
    AtomBasis,
    ChshSettings,
    MeasurementContext,
    OutcomeDistribution,
    chsh,
    chsh_monte_carlo,
    enumerate_transactions,
    pair_contexts,
    post_select,
    sample_flat,
    z_context,
)
from .errors import UsageError
from .network import (
    AtomBox,
    BeamSplitter,
    Detector,
    Emitter,
    Network,
    backward_propagate,
    forward_propagate,
    two_laser_variant,
)
from .pathnotation import parse, sum_amplitudes, surviving_detector_paths

_SQ2 = math.sqrt(2.0)


# -- network builders -----------------------------------------------------------


def _atom_pair(idx: int, amp_up: complex) -> tuple[SubsystemSpec, SubsystemSpec, Emitter]:
    """A spin-1/2 atom subsystem pair plus its source.

    The source emits ``amp_up |+> + (1/sqrt(2)) |->`` tensored with the ground
    level; its confirmation filter is the matching dual, so a returning z
    eigenstate is attenuated by its overlap with the prepared state.
    """
    spin = SubsystemSpec(f"atom{idx}", "atom-spin", ("+", "-"))
    level = SubsystemSpec(f"atom{idx}-level", "atom-level", ("0", "1"))
    state = tensor(
        Ket((spin,), {("+",): amp_up, ("-",): 1.0 / _SQ2}),
        unit((level,), ("0",)),
    )
    return spin, level, Emitter(f"atom{idx}-source", 0, state)


def _mzi_elements(photon: SubsystemSpec) -> list:
    return [
        Emitter("L", 0, unit((photon,), ("s",))),
        BeamSplitter("S1", 1, ("s",), ("u", "v")),
        BeamSplitter("S2", 3, ("u", "v"), ("d", "c")),
        Detector("C", 4, "c"),
        Detector("D", 4, "d"),
    ]


def ev_bomb_network(present: bool = True) -> Network:
    """Dark-port interferometer, optionally obstructed on the lower arm."""
    if not present:
        photon = SubsystemSpec("photon", "photon-path", ("s", "u", "v", "c", "d"))
        return Network("ev-bomb", (photon,), tuple(_mzi_elements(photon)))
    photon = SubsystemSpec("photon", "photon-path", ("s", "u", "v", "c", "d", "bomb"))
    arm = SubsystemSpec("bomb-state", "atom-spin", ("armed",))
    level = SubsystemSpec("bomb-level", "atom-level", ("0", "1"))
    source = Emitter("bomb-source", 0, tensor(unit((arm,), ("armed",)), unit((level,), ("0",))))
    elements = _mzi_elements(photon) + [
        source,
        AtomBox("bomb", 2, "bomb-state", "armed", "v", "bomb-level"),
    ]
    return Network("ev-bomb", (photon, arm, level), tuple(elements))


def hardy_network() -> Network:
    """One atom prepared along +x, its up-along-z box intersecting arm v."""
    photon = SubsystemSpec("photon", "photon-path", ("s", "u", "v", "c", "d", "box-v"))
    spin, level, source = _atom_pair(1, amp_up=1.0 / _SQ2)
    elements = _mzi_elements(photon) + [
        source,
        AtomBox("box-v", 2, "atom1", "+", "v", "atom1-level"),
    ]
    return Network("hardy-ifm", (photon, spin, level), tuple(elements))


def qle_network() -> Network:
    """Two boxed atoms: atom 1's |+> box on arm v, atom 2's |-> box on arm u.

    The sources put a phase ``i`` on the up components, which makes the
    post-selected pair come out in the (|++> + |-->)/sqrt(2) form.
    """
    photon = SubsystemSpec("photon", "photon-path", ("s", "u", "v", "c", "d", "A", "B"))
    spin1, level1, source1 = _atom_pair(1, amp_up=1j / _SQ2)
    spin2, level2, source2 = _atom_pair(2, amp_up=1j / _SQ2)
    elements = _mzi_elements(photon) + [
        source1,
        source2,
        AtomBox("A", 2, "atom1", "+", "v", "atom1-level"),
        AtomBox("B", 2, "atom2", "-", "u", "atom2-level"),
    ]
    return Network("qle", (photon, spin1, level1, spin2, level2), tuple(elements))


DEFAULT_CHSH_ANGLES_DEG = (0.0, 90.0, 45.0, 135.0)


def chsh_settings_from_degrees(angles: tuple[float, float, float, float]) -> ChshSettings:
    a, ap, b, bp = (math.radians(x) for x in angles)
    return ChshSettings(a=(a, 0.0), a_prime=(ap, 0.0), b=(b, 0.0), b_prime=(bp, 0.0))


# -- scenarios --------------------------------------------------------------------


@dataclass
class Scenario:
    name: str
    network: Network
    context: MeasurementContext
    post_selection: str | None = None
    params: dict = field(default_factory=dict)


def _parse_atom_basis(spec: str) -> AtomBasis:
    if spec == "z":
        return AtomBasis.z()
    if spec == "y":
        return AtomBasis.y()
    if spec.startswith("bloch:"):
        try:
            theta, phi = (float(x) for x in spec.split(":", 1)[1].split(","))
        except ValueError as err:
            raise UsageError(f"bad bloch angles in {spec!r}; use bloch:theta,phi in degrees") from err
        return AtomBasis.bloch(math.radians(theta), math.radians(phi))
    raise UsageError(f"unknown atom basis {spec!r} (expected z, y, or bloch:theta,phi)")


def scenario_names() -> tuple[str, ...]:
    return ("ev-bomb", "hardy-ifm", "qle", "qle-two-laser", "qle-chsh")


def build_scenario(name: str, **params) -> Scenario:
    """Construct a validated builtin scenario.

    Common params: ``atom_basis`` ("z" | "y" | "bloch:theta,phi" in degrees),
    ``post_select`` ("D" | "C" | None).  ``ev-bomb`` takes ``bomb``
    ("present" | "absent"); ``qle-chsh`` takes ``angles`` (four polar angles
    in degrees, x-z plane).
    """
    atom_basis = params.pop("atom_basis", "z")
    post = params.pop("post_select", None)
    if name == "ev-bomb":
        bomb = params.pop("bomb", "present")
        if bomb not in ("present", "absent"):
            raise UsageError(f"bomb must be 'present' or 'absent', got {bomb!r}")
        network = ev_bomb_network(present=bomb == "present")
        scenario = Scenario(name, network, z_context(network), post, {"bomb": bomb})
    elif name == "hardy-ifm":
        network = hardy_network()
        scenario = Scenario(name, network, z_context(network), post)
    elif name == "qle":
        network = qle_network()
        scenario = Scenario(name, network, z_context(network), post)
    elif name == "qle-two-laser":
        network = two_laser_variant(qle_network())
        scenario = Scenario(name, network, z_context(network), post)
    elif name == "qle-chsh":
        angles = tuple(params.pop("angles", DEFAULT_CHSH_ANGLES_DEG))
        if len(angles) != 4:
            raise UsageError("qle-chsh needs exactly four angles (a, a', b, b') in degrees")
        network = qle_network()
        scenario = Scenario(
            name,
            network,
            z_context(network),
            post or "D",
            {"angles": angles, "settings": chsh_settings_from_degrees(angles)},
        )
    else:
        raise UsageError(f"unknown scenario {name!r}; choose from {', '.join(scenario_names())}")
    if params:
        raise UsageError(f"unknown scenario parameters: {sorted(params)}")
    if atom_basis != "z":
        basis = _parse_atom_basis(atom_basis)
        scenario.context = MeasurementContext(
            {a.id: basis for a in scenario.network.atoms()},
            include_absorption=scenario.context.include_absorption,
        )
    return scenario


# -- reports ----------------------------------------------------------------------


@dataclass
class RunReport:
    schema: int
    scenario: str
    mode: str
    seed: int | None
    trials: int | None
    outcomes: list[dict]
    photon_probabilities: dict[str, float]
    absorbed_probability: float
    derived: dict
    wall_time_s: float

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "scenario": self.scenario,
            "mode": self.mode,
            "seed": self.seed,
            "trials": self.trials,
            "outcomes": self.outcomes,
            "photon_probabilities": self.photon_probabilities,
            "absorbed_probability": self.absorbed_probability,
            "derived": self.derived,
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        return cls(**{k: data[k] for k in (
            "schema", "scenario", "mode", "seed", "trials", "outcomes",
            "photon_probabilities", "absorbed_probability", "derived", "wall_time_s",
        )})

    def to_csv(self) -> str:
        lines = ["outcome,count,probability"]
        for row in self.outcomes:
            count = "" if row.get("count") is None else str(row["count"])
            lines.append(f"{row['outcome']},{count},{row['probability']!r}")
        return "\n".join(lines) + "\n"

    def payload_equal(self, other: "RunReport") -> bool:
        """Equality of everything except wall time."""
        a, b = self.to_dict(), other.to_dict()
        a.pop("wall_time_s"), b.pop("wall_time_s")
        return a == b


def _distribution_rows(dist: OutcomeDistribution) -> list[dict]:
    rows = []
    for i, c in enumerate(dist.candidates):
        count = None if dist.counts is None else dist.counts[i]
        prob = c.weight if dist.counts is None else (
            dist.counts[i] / dist.trials if dist.trials else 0.0
        )
        rows.append({"outcome": c.outcome.label, "count": count, "probability": prob})
    return rows


def _two_atom_correlation(dist: OutcomeDistribution) -> float | None:
    if not dist.candidates or len(dist.candidates[0].outcome.atoms) != 2:
        return None
    e = 0.0
    for c in dist.candidates:
        s1, s2 = (sym for _, sym in c.outcome.atoms)
        e += c.weight if s1[-1] == s2[-1] else -c.weight
    return e


def run_exact(scenario: Scenario) -> RunReport:
    """Analytic distribution (and derived statistics) for a scenario."""
    t0 = time.perf_counter()
    if scenario.name == "qle-chsh":
        return _run_chsh(scenario, t0)
    dist = enumerate_transactions(scenario.network, scenario.context)
    derived: dict = {}
    reported = dist
    if scenario.post_selection:
        reported, _ = post_select(dist, scenario.post_selection)
        derived["post_selected_on"] = scenario.post_selection
        derived["selection_probability"] = dist.photon_marginal().get(scenario.post_selection, 0.0)
    corr = _two_atom_correlation(reported)
    if corr is not None:
        derived["correlation"] = corr
    return RunReport(
        schema=1,
        scenario=scenario.name,
        mode="exact",
        seed=None,
        trials=None,
        outcomes=_distribution_rows(reported),
        photon_probabilities=reported.photon_marginal(),
        absorbed_probability=reported.absorbed_probability(),
        derived=derived,
        wall_time_s=time.perf_counter() - t0,
    )


def _mc_chunk(args) -> np.ndarray:
    dist, trials, seed, start = args
    return sample_flat(dist, trials, seed, start)


def run_mc(scenario: Scenario, trials: int, seed: int, workers: int = 1) -> RunReport:
    """Monte Carlo run; counts are bit-identical for any worker count."""
    if trials < 1:
        raise UsageError("trials must be >= 1")
    if workers < 1:
        raise UsageError("workers must be >= 1")
    t0 = time.perf_counter()
    if scenario.name == "qle-chsh":
        return _run_chsh(scenario, t0, trials=trials, seed=seed)
    dist = enumerate_transactions(scenario.network, scenario.context)
    sampled = dist
    if scenario.post_selection:
        sampled, _ = post_select(dist, scenario.post_selection)
    bounds = [(i * trials) // workers for i in range(workers + 1)]
    chunks = [
        (sampled, hi - lo, seed, lo) for lo, hi in zip(bounds, bounds[1:]) if hi > lo
    ]
    if len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_mc_chunk, chunks))
    else:
        parts = [_mc_chunk(c) for c in chunks]
    counts = np.sum(parts, axis=0).astype(np.int64)
    sampled = OutcomeDistribution(
        candidates=sampled.candidates,
        provenance=sampled.provenance,
        atom_space=sampled.atom_space,
        seed=seed,
        trials=trials,
        counts=tuple(int(c) for c in counts),
    )
    photon_probs: dict[str, float] = {}
    absorbed = 0.0
    for c, k in zip(sampled.candidates, counts):
        p = float(k) / trials
        photon_probs[c.outcome.photon] = photon_probs.get(c.outcome.photon, 0.0) + p
        if c.outcome.excited is not None:
            absorbed += p
    derived: dict = {}
    if scenario.post_selection:
        derived["post_selected_on"] = scenario.post_selection
    return RunReport(
        schema=1,
        scenario=scenario.name,
        mode="monte-carlo",
        seed=seed,
        trials=trials,
        outcomes=_distribution_rows(sampled),
        photon_probabilities=photon_probs,
        absorbed_probability=absorbed,
        derived=derived,
        wall_time_s=time.perf_counter() - t0,
    )


def _run_chsh(scenario: Scenario, t0: float, trials: int | None = None, seed: int | None = None) -> RunReport:
    settings = scenario.params["settings"]
    post = scenario.post_selection or "D"
    pair_names = ("ab", "ab'", "a'b", "a'b'")
    if trials is None:
        result = chsh(scenario.network, settings, post=post)
        mode = "exact"
        outcomes = []
        for key, ctx in pair_contexts(scenario.network, settings):
            conditional, _ = post_select(enumerate_transactions(scenario.network, ctx), post)
            for c in conditional.candidates:
                outcomes.append(
                    {
                        "outcome": f"{key}:{c.outcome.label}",
                        "count": None,
                        "probability": c.weight / len(pair_names),
                    }
                )
    else:
        result = chsh_monte_carlo(scenario.network, settings, pairs=trials, seed=seed, post=post)
        mode = "monte-carlo"
        outcomes = []
        for key in pair_names:
            same, diff = result.counts[key]
            n = same + diff
            outcomes.append(
                {"outcome": f"{key}:same", "count": same, "probability": same / max(trials, 1)}
            )
            outcomes.append(
                {"outcome": f"{key}:different", "count": diff, "probability": diff / max(trials, 1)}
            )
    derived = {
        "chsh_s": result.s,
        "correlations": dict(result.correlations),
        "angles_deg": list(scenario.params["angles"]),
        "post_selected_on": post,
    }
    return RunReport(
        schema=1,
        scenario=scenario.name,
        mode=mode,
        seed=seed,
        trials=trials,
        outcomes=outcomes,
        photon_probabilities={post: 1.0},
        absorbed_probability=0.0,
        derived=derived,
        wall_time_s=time.perf_counter() - t0,
    )




# -- verification checklist ---------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    observed: str
    expected: str


def _close(a: complex, b: complex, tol: float = 1e-12) -> bool:
    return abs(a - b) <= tol


def verification_checks() -> list[Check]:
    """Run the amplitude, cancellation, and echo identities as assertions."""
    checks: list[Check] = []

    def check(name: str, passed: bool, observed, expected):
        checks.append(Check(name, bool(passed), str(observed), str(expected)))

    r = 1.0 / (2.0 * _SQ2)

    # splitter conventions: s -> (i u + v)/sqrt2 ; u -> (c + i d)/sqrt2 ; v -> (d + i c)/sqrt2
    photon = SubsystemSpec("photon", "photon-path", ("s", "u", "v", "c", "d"))
    net1 = Network(
        "first-splitter",
        (photon,),
        (
            Emitter("L", 0, unit((photon,), ("s",))),
            BeamSplitter("S1", 1, ("s",), ("u", "v")),
            Detector("U", 2, "u"),
            Detector("V", 2, "v"),
        ),
    )
    out1 = forward_propagate(net1).continuing
    ok1 = _close(out1.amplitude(("u",)), 1j / _SQ2) and _close(out1.amplitude(("v",)), 1.0 / _SQ2)
    check("first-splitter-rule", ok1, repr(out1), "(i|u> + |v>)/sqrt2")

    net2 = Network(
        "second-splitter",
        (photon,),
        (
            Emitter("Lu", 0, unit((photon,), ("u",), 1.0 / _SQ2)),
            Emitter("Lv", 0, unit((photon,), ("v",), 1.0 / _SQ2)),
            BeamSplitter("S2", 1, ("u", "v"), ("d", "c")),
            Detector("C", 2, "c"),
            Detector("D", 2, "d"),
        ),
        two_source=True,
    )
    from_u = forward_propagate(net2, initial=unit((photon,), ("u",))).continuing
    from_v = forward_propagate(net2, initial=unit((photon,), ("v",))).continuing
    ok2 = (
        _close(from_u.amplitude(("c",)), 1.0 / _SQ2)
        and _close(from_u.amplitude(("d",)), 1j / _SQ2)
        and _close(from_v.amplitude(("d",)), 1.0 / _SQ2)
        and _close(from_v.amplitude(("c",)), 1j / _SQ2)
    )
    check(
        "second-splitter-rule",
        ok2,
        f"u -> {from_u!r}, v -> {from_v!r}",
        "u -> (|c> + i|d>)/sqrt2, v -> (|d> + i|c>)/sqrt2",
    )

    # single-atom interferometer: detector-region amplitudes and absorbed mass
    hardy = hardy_network()
    trace = forward_propagate(hardy)
    got = trace.continuing
    expectations = {
        ("d", "+", "0"): -r,
        ("c", "+", "0"): 1j * r,
        ("c", "-", "0"): 1j / _SQ2,
    }
    ok = all(_close(got.amplitude(k), v) for k, v in expectations.items()) and len(got) == 3
    check(
        "hardy-detector-amplitudes",
        ok,
        repr(got),
        "-(1/2sqrt2)|d,+> + (i/2sqrt2)|c,+> + (i/sqrt2)|c,->",
    )
    absorbed = trace.absorbed_ket("box-v")
    check(
        "hardy-absorbed-amplitude",
        _close(absorbed.amplitude(("box-v", "+", "1")), 0.5),
        repr(absorbed),
        "(1/2)|absorbed,+,excited>",
    )

    # confirmation-wave echo at the dark port: 1/4 x 1/2 = 1/8
    conf = unit((hardy.photon,), ("d",), bra=True)
    spin_spec = hardy.atoms()[0]
    echo = backward_propagate(
        hardy,
        conf,
        {"atom1": unit((spin_spec,), ("+",), bra=True)},
        ow_amplitudes={"L": 0.5, "atom1-source": 1.0 / _SQ2},
    )
    ok = (
        _close(echo.emitter_amplitudes["L"], 0.25)
        and _close(echo.emitter_amplitudes["atom1-source"], 0.5)
        and _close(echo.product(), 0.125)
    )
    check("cw-echo-one-eighth", ok, f"{echo.emitter_amplitudes} product={echo.product()}", "[1/4][1/2] = 1/8")

    # two-atom experiment: final coefficients and the post-selected pair
    qle = qle_network()
    final = forward_propagate(qle).continuing
    expectations = {
        ("d", "+", "0", "+", "0"): 0.25,
        ("d", "-", "0", "-", "0"): 0.25,
        ("c", "-", "0", "-", "0"): 0.25j,
        ("c", "+", "0", "+", "0"): -0.25j,
        ("c", "-", "0", "+", "0"): -0.5,
    }
    ok = all(_close(final.amplitude(k), v) for k, v in expectations.items()) and len(final) == 5
    check(
        "qle-final-coefficients",
        ok,
        repr(final),
        "(1/4)(|d,++> + |d,--> + i|c,--> - i|c,++> - 2|c,-+>)",
    )

    dist = enumerate_transactions(qle, z_context(qle))
    cond, pair = post_select(dist, "D")
    ok = (
        pair is not None
        and _close(pair.amplitude(("+", "+")), 1.0 / _SQ2)
        and _close(pair.amplitude(("-", "-")), 1.0 / _SQ2)
        and len(pair) == 2
    )
    check("qle-post-selected-pair", ok, repr(pair), "(|++> + |-->)/sqrt2")

    marg = dist.photon_marginal()
    ok = (
        _close(marg.get("D", 0.0), 0.125)
        and _close(marg.get("C", 0.0), 0.375)
        and _close(dist.absorbed_probability(), 0.5)
    )
    check(
        "qle-distribution",
        ok,
        f"D={marg.get('D')}, C={marg.get('C')}, absorbed={dist.absorbed_probability()}",
        "D=1/8, C=3/8, absorbed=1/2",
    )

    # dark-port cancellation, in path notation and in the propagated state
    cancel = sum_amplitudes(parse("|L-_S1_-A-_S2_-D> + |L-S1-B-S2-D>"), qle)
    prop_mixed = final.amplitude(("d", "-", "0", "+", "0"))
    ok = abs(cancel) < 1e-12 and abs(prop_mixed) < 1e-12
    check("path-cancellation", ok, f"path sum {cancel}, propagated {prop_mixed}", "both 0")

    survivors = surviving_detector_paths(qle, "D")
    labels = {assignment for assignment, _, _ in survivors}
    amps_ok = all(_close(abs(total), 0.5) for _, _, total in survivors)
    check(
        "path-survivors",
        labels == {("+", "+"), ("-", "-")} and amps_ok,
        str(sorted(labels)),
        "matched-spin components only, each of modulus 1/2",
    )

    # two coherent sources reproduce the single-source statistics
    twin = two_laser_variant(qle)
    final_twin = forward_propagate(twin).continuing
    ok = approx_equal(final, final_twin, tol=1e-12)
    cond_twin, pair_twin = post_select(enumerate_transactions(twin, z_context(twin)), "D")
    ok = ok and pair_twin is not None and approx_equal(pair, pair_twin, tol=1e-12)
    check("two-laser-equivalence", ok, repr(final_twin), "identical detector-region state")

    return checks

import dataclasses
import math

import numpy as np
import pytest

import tisim as t
from tisim.amplitudes import SubsystemSpec, unit
from tisim.errors import ContractError, ValidationError
from tisim.network import AtomBox, BeamSplitter, Detector, Emitter, Network
from netgen import random_network

RT2 = math.sqrt(2.0)
R = 1.0 / (2.0 * RT2)


def strip_boxes(network):
    elements = tuple(e for e in network.elements if not isinstance(e, AtomBox))
    return dataclasses.replace(network, elements=elements)


# -- validation ----------------------------------------------------------------


def test_builtin_networks_validate_clean(hardy, qle, bomb_present, bomb_absent):
    for net in (hardy, qle, bomb_present, bomb_absent):
        assert t.validate(net) == []


def test_cycle_yields_one_acyclicity_diagnostic():
    photon = SubsystemSpec("photon", "photon-path", ("s", "a", "b", "x", "y"))
    net = Network(
        "loop",
        (photon,),
        (
            Emitter("L", 0, unit((photon,), ("s",))),
            BeamSplitter("S1", 1, ("s", "a"), ("b", "x")),
            BeamSplitter("S2", 2, ("b",), ("a", "y")),
            Detector("DX", 3, "x"),
            Detector("DY", 3, "y"),
        ),
    )
    diags = t.validate(net)
    cyclic = [d for d in diags if d.rule == "acyclic"]
    assert len(cyclic) == 1
    assert "cycle" in cyclic[0].message


def test_double_box_on_one_path_is_flagged(qle):
    # move the second box onto path v as well
    elements = []
    for e in qle.elements:
        if isinstance(e, AtomBox) and e.id == "B":
            e = dataclasses.replace(e, path="v")
        elements.append(e)
    bad = dataclasses.replace(qle, elements=tuple(elements))
    diags = t.validate(bad)
    assert any(d.rule == "consumed-twice" and "consumed twice" in d.message for d in diags)


def test_propagation_refuses_invalid_network(qle):
    bad = dataclasses.replace(
        qle,
        elements=tuple(
            dataclasses.replace(e, path="v") if isinstance(e, AtomBox) and e.id == "B" else e
            for e in qle.elements
        ),
    )
    with pytest.raises(ValidationError):
        t.forward_propagate(bad)


# -- forward propagation --------------------------------------------------------


def test_hardy_forward_amplitudes(hardy):
    trace = t.forward_propagate(hardy)
    got = trace.continuing
    assert len(got) == 3
    assert abs(got.amplitude(("d", "+", "0")) - (-R)) < 1e-12
    assert abs(got.amplitude(("c", "+", "0")) - 1j * R) < 1e-12
    assert abs(got.amplitude(("c", "-", "0")) - 1j / RT2) < 1e-12
    absorbed = trace.absorbed_ket("box-v")
    assert len(absorbed) == 1
    assert abs(absorbed.amplitude(("box-v", "+", "1")) - 0.5) < 1e-12


def brute_force_post_splitter_terms():
    """Oracle: expand (1/2sqrt2)[i|u>+|v>] x [i|+>+|->] x [i|+>+|->]."""
    photon = {"u": 1j, "v": 1.0}
    atom = {"+": 1j, "-": 1.0}
    out = {}
    for p, fp in photon.items():
        for s1, f1 in atom.items():
            for s2, f2 in atom.items():
                out[(p, s1, s2)] = fp * f1 * f2 / (2.0 * RT2)
    return out


def test_qle_forward_amplitudes_and_absorbed_masses(qle):
    trace = t.forward_propagate(qle)
    got = trace.continuing
    assert len(got) == 5
    expected = {
        ("d", "+", "0", "+", "0"): 0.25,
        ("d", "-", "0", "-", "0"): 0.25,
        ("c", "-", "0", "-", "0"): 0.25j,
        ("c", "+", "0", "+", "0"): -0.25j,
        ("c", "-", "0", "+", "0"): -0.5,
    }
    for label, amp in expected.items():
        assert abs(got.amplitude(label) - amp) < 1e-12

    # oracle: absorbed components are (v,+,.) at box A and (u,.,-) at box B
    oracle = brute_force_post_splitter_terms()
    absorbed_expected = {
        ("A", ("A", "+", "1", "+", "0")): oracle[("v", "+", "+")],
        ("A", ("A", "+", "1", "-", "0")): oracle[("v", "+", "-")],
        ("B", ("B", "+", "0", "-", "1")): oracle[("u", "+", "-")],
        ("B", ("B", "-", "0", "-", "1")): oracle[("u", "-", "-")],
    }
    for (box, label), amp in absorbed_expected.items():
        ket = trace.absorbed_ket(box)
        assert abs(ket.amplitude(label) - amp) < 1e-12
        assert abs(abs(amp) ** 2 - 0.125) < 1e-12  # each component carries 1/8
    assert abs(trace.absorbed_total() - 0.5) < 1e-12


def test_hardy_snapshot_after_first_splitter(hardy):
    # joint state right after the first splitter: (1/2)[i|u> + |v>][|+> + |->]
    trace = t.forward_propagate(hardy)
    snapshot = dict(trace.snapshots)[1]
    assert abs(snapshot.amplitude(("u", "+", "0")) - 0.5j) < 1e-12
    assert abs(snapshot.amplitude(("v", "+", "0")) - 0.5) < 1e-12
    assert abs(snapshot.amplitude(("u", "-", "0")) - 0.5j) < 1e-12
    assert abs(snapshot.amplitude(("v", "-", "0")) - 0.5) < 1e-12


def test_forward_conserves_mass_rank_by_rank(hardy, qle):
    for net in (hardy, qle):
        trace = t.forward_propagate(net)
        boxes = dict(trace.absorbed)
        for rank, snapshot in trace.snapshots:
            taken = sum(
                t.norm_sq(k)
                for bid, k in boxes.items()
                if net.element(bid).rank <= rank
            )
            assert abs(t.norm_sq(snapshot) + taken - 1.0) < 1e-12


def test_forward_rejects_initial_on_non_emitter_symbols(hardy):
    rogue = unit((hardy.subsystems), ("u", "+", "0"))
    with pytest.raises(ContractError):
        t.forward_propagate(hardy, initial=rogue)


# -- backward propagation ---------------------------------------------------------


def test_echo_bookkeeping_product_is_one_eighth(hardy):
    conf = unit((hardy.photon,), ("d",), bra=True)
    spin = hardy.atoms()[0]
    report = t.backward_propagate(
        hardy,
        conf,
        {"atom1": unit((spin,), ("+",), bra=True)},
        ow_amplitudes={"L": 0.5, "atom1-source": 1.0 / RT2},
    )
    assert abs(report.emitter_amplitudes["L"] - 0.25) < 1e-12
    assert abs(report.emitter_amplitudes["atom1-source"] - 0.5) < 1e-12
    assert abs(report.product() - 0.125) < 1e-12
    # backward joint amplitude equals the forward coefficient
    assert abs(report.amplitude - (-R)) < 1e-12


def test_echo_zero_forward_amplitude_vanishes_at_emitter(hardy):
    conf = unit((hardy.photon,), ("d",), bra=True)
    spin = hardy.atoms()[0]
    report = t.backward_propagate(hardy, conf, {"atom1": unit((spin,), ("-",), bra=True)})
    assert abs(report.amplitude) < 1e-12
    assert abs(report.sector_amplitudes["L"]) < 1e-12
    assert report.product() < 1e-12


def test_echo_default_bookkeeping_squares_to_born_weight(qle):
    conf = unit((qle.photon,), ("d",), bra=True)
    bras = {
        "atom1": unit((qle.atoms()[0],), ("+",), bra=True),
        "atom2": unit((qle.atoms()[1],), ("+",), bra=True),
    }
    report = t.backward_propagate(qle, conf, bras)
    assert abs(report.product() - 1.0 / 16.0) < 1e-12
    assert abs(report.weight - 1.0 / 16.0) < 1e-12


def test_echo_anchored_at_box_marker(hardy):
    conf = unit((hardy.photon,), ("box-v",), bra=True)
    report = t.backward_propagate(hardy, conf)  # absorbing atom bra defaults to blocking
    assert abs(report.weight - 0.25) < 1e-12


def test_echo_rejects_non_terminal_anchor(hardy):
    with pytest.raises(ContractError):
        t.backward_propagate(hardy, unit((hardy.photon,), ("u",), bra=True))


# -- echo identity and unitarity across many networks -------------------------------


def outcome_bra_label(net, candidate):
    """Joint label of a z-basis outcome, for the forward-side inner product."""
    terminals = {eid: sym for sym, eid in net.terminal_symbols().items()}
    label = [terminals[candidate.outcome.photon]]
    for spec in net.subsystems[1:]:
        if spec.kind == "atom-spin":
            label.append(dict(candidate.outcome.atoms)[spec.id])
        else:
            box = next((b for b in net.boxes() if b.level == spec.id), None)
            excited = box is not None and candidate.outcome.excited == box.atom and \
                candidate.outcome.photon == box.id
            label.append(spec.basis[1] if excited else spec.basis[0])
    return tuple(label)


def assert_echo_identity(net):
    """Backward emitter-amplitude product == |forward component|^2, per outcome."""
    ctx = t.z_context(net)
    trace = t.forward_propagate(net)
    absorbed = dict(trace.absorbed)
    for candidate in t.enumerate_transactions(net, ctx).candidates:
        label = outcome_bra_label(net, candidate)
        source = absorbed.get(candidate.outcome.photon, trace.continuing)
        forward_amp = source.amplitude(label)
        report = t.backward_propagate(
            net,
            unit((net.photon,), (label[0],), bra=True),
            {
                aid: unit((next(s for s in net.atoms() if s.id == aid),), (sym,), bra=True)
                for aid, sym in candidate.outcome.atoms
            },
        )
        assert abs(report.product() - abs(forward_amp) ** 2) < 1e-12
        assert abs(report.weight - abs(forward_amp) ** 2) < 1e-12
        assert abs(report.amplitude - forward_amp) < 1e-12


def test_echo_identity_on_builtins(hardy, qle, bomb_present):
    for net in (hardy, qle, bomb_present, t.two_laser_variant(qle)):
        assert_echo_identity(net)


def test_random_networks_conserve_mass_and_satisfy_echo_identity():
    rng = np.random.default_rng(90125)
    for index in range(100):
        net = random_network(rng, index)
        assert t.validate(net) == []
        trace = t.forward_propagate(net)
        total = t.norm_sq(trace.continuing) + trace.absorbed_total()
        assert abs(total - 1.0) < 1e-12
        assert_echo_identity(net)


def test_dark_port_without_boxes(hardy, qle):
    for net in (hardy, qle):
        open_net = strip_boxes(net)
        assert t.validate(open_net) == []
        marginal = {}
        continuing = t.forward_propagate(open_net).continuing
        for label, amp in continuing.items():
            marginal[label[0]] = marginal.get(label[0], 0.0) + abs(amp) ** 2
        assert abs(marginal.get("c", 0.0) - 1.0) < 1e-12
        assert marginal.get("d", 0.0) < 1e-12


# -- two-source variant --------------------------------------------------------------


def test_two_laser_variant_validates_and_matches(qle):
    twin = t.two_laser_variant(qle)
    assert t.validate(twin) == []
    assert twin.two_source
    a = t.forward_propagate(qle).continuing
    b = t.forward_propagate(twin).continuing
    assert t.approx_equal(a, b, tol=1e-12)


def test_two_laser_emitters_feed_paths_directly(qle):
    twin = t.two_laser_variant(qle)
    emitters = twin.photon_emitters()
    assert len(emitters) == 2
    amps = {}
    for e in emitters:
        ((label, amp),) = list(e.state.items())
        amps[label[0]] = amp
    assert abs(amps["u"] - 1j / RT2) < 1e-12
    assert abs(amps["v"] - 1.0 / RT2) < 1e-12


def test_two_laser_post_selected_statistics_match(qle):
    twin = t.two_laser_variant(qle)
    trials, seed = 1_000_000, 313
    counts = {}
    for name, net in (("one", qle), ("two", twin)):
        dist = t.enumerate_transactions(net, t.z_context(net))
        sampled = t.sample_flat(dist, trials, seed)
        d_count = sum(
            int(n)
            for c, n in zip(dist.candidates, sampled)
            if c.outcome.photon == "D"
        )
        counts[name] = d_count
    p = 0.125
    sigma = math.sqrt(p * (1 - p) / trials)
    assert abs(counts["one"] / trials - p) < 4 * sigma
    assert abs(counts["two"] / trials - p) < 4 * sigma
    assert counts["one"] == counts["two"]  # same seed, same exact weights

def test_two_laser_requires_single_source_pattern(qle):
    twin = t.two_laser_variant(qle)
    with pytest.raises(ContractError):
        t.two_laser_variant(twin)


# -- description files ----------------------------------------------------------------


def test_network_json_roundtrip(tmp_path, qle):
    path = tmp_path / "qle.json"
    t.save_network(qle, path)
    loaded = t.load_network(path)
    assert t.network_to_dict(loaded) == t.network_to_dict(qle)
    a = t.forward_propagate(qle).continuing
    b = t.forward_propagate(loaded).continuing
    assert t.approx_equal(a, b, tol=1e-15)


def test_loader_rejects_invalid_description(tmp_path, qle):
    data = t.network_to_dict(qle)
    for item in data["elements"]:
        if item["id"] == "B":
            item["params"]["path"] = "v"
    import json

    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ValidationError):
        t.load_network(path)

"""Seeded random-network builder for conservation and echo property tests."""

from __future__ import annotations

import math

import numpy as np

from tisim.amplitudes import Ket, SubsystemSpec, tensor, unit
from tisim.network import AtomBox, BeamSplitter, Detector, Emitter, Mirror, Network


def random_network(rng: np.random.Generator, index: int) -> Network:
    """A random layered interferometer with 1-3 splitters and 0-2 boxed atoms."""
    n_bs = int(rng.integers(1, 4))
    n_atoms = int(rng.integers(0, 3))

    counter = 0

    def new_sym() -> str:
        nonlocal counter
        counter += 1
        return f"p{counter}"

    frontier = ["p0"]
    symbols = ["p0"]
    elements: list = []
    rank = 1
    for k in range(n_bs):
        sym = frontier.pop(int(rng.integers(len(frontier))))
        o1, o2 = new_sym(), new_sym()
        symbols += [o1, o2]
        elements.append(BeamSplitter(f"bs{k}", rank, (sym,), (o1, o2)))
        rank += 1
        frontier += [o1, o2]
        if rng.random() < 0.4:
            sym2 = frontier.pop(int(rng.integers(len(frontier))))
            o3 = new_sym()
            symbols.append(o3)
            phase = complex(np.exp(1j * rng.uniform(0.0, 2.0 * math.pi)))
            elements.append(Mirror(f"m{k}", rank, sym2, o3, phase))
            rank += 1
            frontier.append(o3)

    specs: list[SubsystemSpec] = []
    emitters: list[Emitter] = []
    markers: list[str] = []
    box_paths: set[str] = set()
    for a in range(n_atoms):
        open_paths = [s for s in frontier if s not in box_paths]
        if not open_paths:
            break
        path = open_paths[int(rng.integers(len(open_paths)))]
        box_paths.add(path)
        spin = SubsystemSpec(f"spin{a}", "atom-spin", ("+", "-"))
        level = SubsystemSpec(f"level{a}", "atom-level", ("0", "1"))
        raw = rng.normal(size=4)
        up, down = complex(raw[0], raw[1]), complex(raw[2], raw[3])
        nrm = math.sqrt(abs(up) ** 2 + abs(down) ** 2)
        state = tensor(
            Ket((spin,), {("+",): up / nrm, ("-",): down / nrm}),
            unit((level,), ("0",)),
        )
        emitters.append(Emitter(f"src{a}", 0, state))
        blocking = "+" if rng.random() < 0.5 else "-"
        elements.append(AtomBox(f"box{a}", rank, f"spin{a}", blocking, path, f"level{a}"))
        rank += 1
        markers.append(f"box{a}")
        specs += [spin, level]

    for i, sym in enumerate(sorted(frontier)):
        elements.append(Detector(f"det{i}", rank, sym))

    photon = SubsystemSpec("photon", "photon-path", tuple(symbols + markers))
    elements.append(Emitter("L", 0, unit((photon,), ("p0",))))
    elements.extend(emitters)
    return Network(f"random-{index}", (photon, *specs), tuple(elements))

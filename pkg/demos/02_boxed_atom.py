"""A boxed atom as the obstruction: offer waves forward, confirmation waves back.

The obstruction becomes one spin component of an atom prepared along +x and
split along z, the up-component box sitting on arm v.  The forward pass
carries the joint photon-atom offer wave through the network; the box peels
off the absorbed component (photon on v AND atom in the box), leaving the
detector-region state.  A dark-port click then projects the atom to "in the
box" even though no energy was exchanged there.

The backward pass runs the confirmation wave from detector D to the sources:
the photon component returns through both splitters (another modulus 1/2)
and the atom component is filtered at its source by the prepared state
(another 1/sqrt2), so the source-matching product is [1/4][1/2] = 1/8 --
exactly the Born weight of the D click.
"""

import math

from tisim import backward_propagate, forward_propagate, unit, z_context
from tisim.engine import Outcome, echo_weight, enumerate_transactions
from tisim.scenarios import hardy_network

RT2 = math.sqrt(2.0)

net = hardy_network()
trace = forward_propagate(net)

print("== detector-region offer wave ==")
print(f"  {trace.continuing!r}")
print(f"  absorbed at the box: {trace.absorbed_ket('box-v')!r}")
print(f"  mass check: {1 - trace.absorbed_total():.4f} continuing + "
      f"{trace.absorbed_total():.4f} absorbed")

print("\n== outcome weights (open the box, i.e. measure z) ==")
dist = enumerate_transactions(net, z_context(net))
for c in dist.candidates:
    print(f"  {c.outcome.label:10s} {c.weight:.4f}")

print("\n== the confirmation-wave echo for the D click ==")
report = backward_propagate(
    net,
    unit((net.photon,), ("d",), bra=True),
    {"atom1": unit((net.atoms()[0],), ("+",), bra=True)},
    ow_amplitudes={"L": 0.5, "atom1-source": 1.0 / RT2},
)
for emitter, amp in sorted(report.emitter_amplitudes.items()):
    print(f"  returning amplitude at {emitter}: {amp:.4f}")
print(f"  product = {report.product():.4f}")
print(f"  echo weight (computed backward only) = "
      f"{echo_weight(net, Outcome('D', (('atom1', '+'),)), z_context(net)):.4f}")

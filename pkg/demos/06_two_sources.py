"""Two mutually coherent sources replace the first beam splitter.

Feed the two arms directly from two lasers with amplitudes (i, 1)/sqrt2 and
drop the first splitter: every downstream amplitude, the dark-port pair, and
the correlation tables are unchanged.  The photon has no identity beyond the
boundary conditions it satisfies -- each source's confirmation filter accepts
only its own component, and their returning amplitudes add coherently as one
source group.
"""

from tisim import (
    approx_equal,
    backward_propagate,
    enumerate_transactions,
    forward_propagate,
    post_select,
    two_laser_variant,
    unit,
    z_context,
)
from tisim.scenarios import qle_network

one = qle_network()
two = two_laser_variant(one)

print("== sources of the two variants ==")
for net in (one, two):
    names = ", ".join(e.id for e in net.photon_emitters())
    print(f"  {net.name}: photon source(s) {names}")

print("\n== identical detector-region states ==")
final_one = forward_propagate(one).continuing
final_two = forward_propagate(two).continuing
print(f"  single source: {final_one!r}")
print(f"  twin sources:  {final_two!r}")
print(f"  equal to 1e-12: {approx_equal(final_one, final_two, tol=1e-12)}")

print("\n== identical dark-port tables ==")
for net in (one, two):
    conditional, pair = post_select(enumerate_transactions(net, z_context(net)), "D")
    rows = {c.outcome.label: round(c.weight, 6) for c in conditional.candidates}
    print(f"  {net.name}: {rows}")

print("\n== one source group in the echo ==")
report = backward_propagate(
    two,
    unit((two.photon,), ("d",), bra=True),
    {
        "atom1": unit((two.atoms()[0],), ("+",), bra=True),
        "atom2": unit((two.atoms()[1],), ("+",), bra=True),
    },
)
for emitter, amp in sorted(report.sector_amplitudes.items()):
    print(f"  returning amplitude at {emitter}: {amp:+.4f}")
print(f"  coherent source-group sum: {report.photon_group_amplitude:+.4f}")
print(f"  product over source groups = {report.product():.4f} (the Born weight)")

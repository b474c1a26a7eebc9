"""Eigenenergy surfaces of the three-level system over the (rabi_p, rabi_s) quadrant.

The zero-field energies 0, delta_p and delta_p - delta_s fix the ordering
of the diabatic states at the origin; the ordering is the case tag. The
sheets only touch on the two edges of the quadrant, where one field is off
and a decoupled level crosses a dressed one. A pulse sequence is a path in
the quadrant, and the state it ends in follows from which of these
crossings the path passes.
"""
import numpy as np

from adiabatic_topology import classify_case, conical_intersections, surface_grid, track_path

delta = 1.0
cases = {"213": (-0.5 * delta, -1.5 * delta), "132": (1.5 * delta, 0.5 * delta), "123": (0.5 * delta, -0.5 * delta)}

for tag, (dp, ds) in cases.items():
    print(f"case {classify_case(dp, ds).value}: delta_p={dp:+.1f}, delta_s={ds:+.1f}")
    for op, os_ in conical_intersections(dp, ds):
        print(f"   crossing at rabi_p={op:.4f}, rabi_s={os_:.4f}")

# labels along rays from the origin: which diabatic state each sheet connects to
dp, ds = cases["213"]
axis = np.linspace(0.0, 4.0, 81)
grid = surface_grid(dp, ds, axis, axis)
print("\ncase 213, sheet labels far out along each edge and on the diagonal")
print("   pump edge   ", grid.labels[-1, 0])
print("   Stokes edge ", grid.labels[0, -1])
print("   diagonal    ", grid.labels[-1, -1])


def delayed_pair(first, peak_first, peak_second, n=800):
    """Two equal-length sine-squared pulses delayed by half a length, as a (rabi_p, rabi_s) path."""
    t = np.linspace(0.0, 1.5, n)
    a = np.where(t < 1.0, np.sin(np.pi * t) ** 2, 0.0) * peak_first
    b = np.where(t > 0.5, np.sin(np.pi * (t - 0.5)) ** 2, 0.0) * peak_second
    b[-1] = 0.0
    return np.column_stack([a, b]) if first == "pump" else np.column_stack([b, a])


print("\nFollowing the adiabatic state that starts in |1> (lambda and ladder systems)")
for tag, (dp, ds) in cases.items():
    for first, name in (("pump", "intuitive"), ("stokes", "counterintuitive")):
        end = track_path(dp, ds, delayed_pair(first, 4.0, 4.0), 1)
        print(f"   case {tag}, {name:16s} -> |{end}>")

print("\nSame paths from |2> (V systems)")
dp, ds = cases["123"]
for first, name in (("pump", "intuitive"), ("stokes", "counterintuitive")):
    print(f"   case 123, {name:16s} -> |{track_path(dp, ds, delayed_pair(first, 4.0, 4.0), 2)}>")

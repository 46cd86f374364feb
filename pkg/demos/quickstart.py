"""
First steps with bloommap
=========================

Store a small key-value table in a few hundred bytes, look things up,
and round-trip the whole structure through a file.  The answers are
approximate in one specific, one-sided way: a key that was never stored
is usually reported absent (wrongly answered with probability at most
epsilon), and a stored key always gets an answer, possibly one value
"too high" in the probability order, never too low and never absent.
"""

import io

from bloommap import build_tree, load, new_distribution, save

# A toy routing table: hosts mapped to a handful of service tiers.  The
# tier frequencies are skewed, which is exactly when this structure
# shines; the common tiers get short paths and few hash probes.
tiers = new_distribution(
    [0.5, 0.25, 0.125, 0.125],
    ["web", "api", "batch", "admin"],
)

pairs = []
for i in range(200):
    host = f"host-{i:03d}.internal".encode()
    tier = ("web", "web", "api", "batch" if i % 2 else "admin")[i % 4]
    pairs.append((host, tier.encode()))

bmap = build_tree(pairs, tiers, epsilon=2 ** -7, seed=7, scheme="standard")
print(f"stored {bmap.n} pairs over {bmap.b} values in {bmap.m} bits "
      f"({bmap.bits_per_key():.2f} bits per key)")

# Stored keys always answer.
for host in (b"host-000.internal", b"host-003.internal"):
    out = bmap.query(host)
    print(f"{host.decode():<22} -> {out.value.decode():<6} "
          f"({out.probes} bit probes)")

# A key that was never stored is almost always reported absent.
out = bmap.query(b"host-999.internal")
print(f"{'host-999.internal':<22} -> {'BOTTOM' if out.is_bottom else out.value.decode()}")

# The whole map serializes to a compact, checksummed blob.
sink = io.BytesIO()
save(bmap, sink)
print(f"serialized to {len(sink.getvalue())} bytes")

back = load(io.BytesIO(sink.getvalue()))
assert back.query(b"host-123.internal") == bmap.query(b"host-123.internal")
print("loaded copy answers identically")

"""
Feature files, manifests, and batch evaluation
==============================================

Large evaluation runs precompute features once and score many model
variants from disk.  This script writes per-image feature stacks as
tensor files, lists them in a JSON-lines manifest, scores the sets
through the library, then re-runs the same evaluation through the
command-line interface and checks the answers agree.
"""

import json
import struct
import subprocess
import sys
import tempfile
import zlib
from pathlib import Path

import numpy as np

import panogrid as pg

workdir = Path(tempfile.mkdtemp(prefix="panogrid_demo_"))
print(f"working in {workdir}")

# ---------------------------------------------------------------------------
# The tensor file format: small header, float32 payload, CRC32 tail
# ---------------------------------------------------------------------------

arr = np.arange(12, dtype=np.float32).reshape(3, 4)
path = workdir / "example.tpaf"
pg.save_tensor(path, arr)

blob = path.read_bytes()
magic, version, dtype, rank = struct.unpack_from("<4sIII", blob, 0)
dims = struct.unpack_from(f"<{rank}I", blob, 16)
print(f"magic {magic!r}, version {version}, rank {rank}, dims {dims}")
payload = blob[16 + 4 * rank:-4]
(crc,) = struct.unpack_from("<I", blob, len(blob) - 4)
assert crc == zlib.crc32(payload)
assert np.array_equal(pg.load_tensor(path), arr)
print("payload CRC verified, round trip exact")

# corruption is caught, not silently returned; byte 30 sits in the payload
bad = bytearray(blob)
bad[30] ^= 0xFF
(workdir / "bad.tpaf").write_bytes(bad)
try:
    pg.load_tensor(workdir / "bad.tpaf")
except pg.ChecksumError as exc:
    print(f"flipped payload byte detected: {exc}")

# ---------------------------------------------------------------------------
# Per-image feature stacks and the manifest that names them
# ---------------------------------------------------------------------------

# 8 real and 8 generated panoramas, each with an (18 views, 5 dims)
# feature stack; generated features drift from the real distribution
rng = np.random.default_rng(19)
records_real, records_gen = [], []
for i in range(8):
    real_id, gen_id = f"real_{i:02d}", f"gen_{i:02d}"
    pg.save_tensor(workdir / f"{real_id}.tpaf", rng.normal(0.0, 1.0, (18, 5)))
    pg.save_tensor(workdir / f"{gen_id}.tpaf", rng.normal(0.25, 1.1, (18, 5)))
    records_real.append({"id": real_id, "image": f"{real_id}.png"})
    records_gen.append({"id": gen_id, "image": f"{gen_id}.png"})

pg.write_manifest(workdir / "real.jsonl", records_real)
pg.write_manifest(workdir / "gen.jsonl", records_gen)

backend = pg.PrecomputedBackend(workdir)
real_stack = backend.stacks(pg.read_manifest(workdir / "real.jsonl"), expected_views=18)
gen_stack = backend.stacks(pg.read_manifest(workdir / "gen.jsonl"), expected_views=18)
print(f"stacks: real {real_stack.shape}, gen {gen_stack.shape}")

real_sets = [real_stack[:, v, :] for v in range(18)]
gen_sets = [gen_stack[:, v, :] for v in range(18)]
report = pg.tangent_fid(real_sets, gen_sets, shrinkage=0.05)
print(f"library tangent FID: {report.aggregate:.6f}")

# ---------------------------------------------------------------------------
# The same evaluation through the command-line interface
# ---------------------------------------------------------------------------

cmd = [sys.executable, "-m", "panogrid", "metrics", "--metric", "tangentfid",
       "--real", str(workdir / "real.jsonl"),
       "--gen", str(workdir / "gen.jsonl"),
       "--real-features-dir", str(workdir),
       "--gen-features-dir", str(workdir),
       "--shrinkage", "0.05",
       "--output", "-"]
out = subprocess.run(cmd, capture_output=True, text=True, check=True)
doc = json.loads(out.stdout)
print(f"cli tangent FID:     {doc['aggregate']:.6f}")
assert abs(doc["aggregate"] - report.aggregate) < 1e-9

# the report carries its own provenance: input digests and settings
print(f"cli config keys: {sorted(doc['config'])}")

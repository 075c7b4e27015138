# Copyright 2026 The synthseg Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes procedural whole-carcass meshes (OBJ + MTL) into assets/.

Each model is a union of closed, deformed ellipsoids: breast/back body,
two drumsticks and two folded wings. Units are meters; +x is head-to-tail.
"""

import argparse
import math
import pathlib


def ellipsoid(center, radii, rings, segments, bulge=0.0, flatten=0.0, yaw=0.0, pitch=0.0):
    cx, cy, cz = center
    rx, ry, rz = radii
    verts, faces = [], []
    cy_, sy_ = math.cos(yaw), math.sin(yaw)
    cp_, sp_ = math.cos(pitch), math.sin(pitch)
    for i in range(1, rings):
        theta = math.pi * i / rings
        for j in range(segments):
            phi = 2.0 * math.pi * j / segments
            x = math.sin(theta) * math.cos(phi)
            y = math.sin(theta) * math.sin(phi)
            z = math.cos(theta)
            # Wider toward one end (breast) and flatter underneath.
            scale = 1.0 + bulge * x
            if z < 0.0:
                z *= 1.0 - flatten
            px, py, pz = rx * x, ry * y * scale, rz * z * scale
            # pitch about y, then yaw about z
            px, pz = cp_ * px + sp_ * pz, -sp_ * px + cp_ * pz
            px, py = cy_ * px - sy_ * py, sy_ * px + cy_ * py
            verts.append((cx + px, cy + py, cz + pz))
    top = len(verts)
    verts.append((cx, cy, cz + rz))
    bottom = len(verts)
    verts.append((cx, cy, cz - rz * (1.0 - flatten)))

    def idx(i, j):
        return (i - 1) * segments + (j % segments)

    for j in range(segments):
        faces.append((top, idx(1, j + 1), idx(1, j)))
    for i in range(1, rings - 1):
        for j in range(segments):
            a, b = idx(i, j), idx(i, j + 1)
            c, d = idx(i + 1, j), idx(i + 1, j + 1)
            faces.append((a, b, d))
            faces.append((a, d, c))
    for j in range(segments):
        faces.append((bottom, idx(rings - 1, j), idx(rings - 1, j + 1)))
    return verts, faces


def carcass(length, width, height, leg_spread):
    parts = [
        ellipsoid((0.0, 0.0, height * 0.5), (length * 0.5, width * 0.5, height * 0.5), 18, 32,
                  bulge=0.18, flatten=0.35),
        ellipsoid((length * 0.30, width * leg_spread, height * 0.45), (length * 0.22, width * 0.16, height * 0.22),
                  10, 16, yaw=0.35, pitch=-0.25),
        ellipsoid((length * 0.30, -width * leg_spread, height * 0.45), (length * 0.22, width * 0.16, height * 0.22),
                  10, 16, yaw=-0.35, pitch=-0.25),
        ellipsoid((-length * 0.18, width * 0.47, height * 0.40), (length * 0.20, width * 0.10, height * 0.14),
                  8, 14, yaw=-0.5),
        ellipsoid((-length * 0.18, -width * 0.47, height * 0.40), (length * 0.20, width * 0.10, height * 0.14),
                  8, 14, yaw=0.5),
    ]
    verts, faces = [], []
    for pv, pf in parts:
        base = len(verts)
        verts.extend(pv)
        faces.extend(tuple(base + k for k in f) for f in pf)
    return verts, faces


def write_model(out_dir, name, verts, faces, kd):
    mtl = out_dir / f"{name}.mtl"
    mtl.write_text(f"newmtl skin\nKd {kd[0]:.3f} {kd[1]:.3f} {kd[2]:.3f}\n")
    lines = [f"# {name}: {len(verts)} vertices, {len(faces)} triangles", f"mtllib {name}.mtl", "usemtl skin"]
    lines += [f"v {x:.6f} {y:.6f} {z:.6f}" for x, y, z in verts]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in faces]
    (out_dir / f"{name}.obj").write_text("\n".join(lines) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "assets"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    specs = [
        ("carcass_a", 0.30, 0.19, 0.11, 0.42, (0.93, 0.80, 0.68)),
        ("carcass_b", 0.27, 0.18, 0.10, 0.45, (0.95, 0.76, 0.62)),
    ]
    for name, length, width, height, spread, kd in specs:
        verts, faces = carcass(length, width, height, spread)
        write_model(out, name, verts, faces, kd)
        print(f"{name}: {len(verts)} vertices, {len(faces)} triangles")


if __name__ == "__main__":
    main()

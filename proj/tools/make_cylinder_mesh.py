#!/usr/bin/env python3
"""Triangulate the channel [0, 2.2] x [0, 0.41] around the disk of radius 0.05
centred at (0.2, 0.2) and write a gmsh 2.2 ASCII file.

Boundary tags: inflow (x = 0), outflow (x = 2.2), walls (y = 0, 0.41),
cylinder. The circle is a polygon with --circle points.

    python3 tools/make_cylinder_mesh.py --h 0.03 --circle 48 -o meshes/cylinder.msh
"""

import argparse
import math

import numpy as np
from scipy.spatial import Delaunay

L, H = 2.2, 0.41
CX, CY, R = 0.2, 0.2, 0.05
TAGS = {"inflow": 1, "outflow": 2, "walls": 3, "cylinder": 4}


def build_points(h, n_circle):
    pts = []
    # Rectangle boundary, corners included once.
    nx, ny = max(2, round(L / h)), max(2, round(H / h))
    pts += [(L * i / nx, 0.0) for i in range(nx + 1)]
    pts += [(L * i / nx, H) for i in range(nx + 1)]
    pts += [(0.0, H * j / ny) for j in range(1, ny)]
    pts += [(L, H * j / ny) for j in range(1, ny)]
    # Rings around the disk, spacing growing from the circle's arc length to h.
    ds = 2 * math.pi * R / n_circle
    rings = [(R, n_circle)]
    r, s = R, ds
    while s < h:
        r += s
        s = min(h, s * 1.2)
        if r + 0.5 * s > min(CY, H - CY):
            break
        rings.append((r, max(n_circle, round(2 * math.pi * r / s))))
    for j, (rr, n) in enumerate(rings):
        shift = 0.5 * (j % 2)
        pts += [(CX + rr * math.cos(2 * math.pi * (i + shift) / n), CY + rr * math.sin(2 * math.pi * (i + shift) / n))
                for i in range(n)]
    r_out = rings[-1][0]
    # Staggered interior lattice outside the rings.
    dy = h * math.sqrt(3) / 2
    rows = max(1, round(H / dy))
    for j in range(1, rows):
        y = H * j / rows
        off = 0.5 * h * (j % 2)
        x = h + off * 0.999
        while x < L - 0.5 * h:
            if math.hypot(x - CX, y - CY) > r_out + 0.6 * h:
                pts.append((x, y))
            x += h
    return np.array(pts), n_circle


def triangulate(points):
    tri = Delaunay(points)
    keep = []
    for t in tri.simplices:
        c = points[t].mean(axis=0)
        if math.hypot(c[0] - CX, c[1] - CY) < R:
            continue
        a, b, d = points[t]
        area = 0.5 * ((b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0]))
        if abs(area) < 1e-14:
            continue
        keep.append(t if area > 0 else t[[0, 2, 1]])
    return np.array(keep)


def boundary_edges(points, cells):
    count = {}
    for t in cells:
        for i in range(3):
            e = tuple(sorted((t[i], t[(i + 1) % 3])))
            count[e] = count.get(e, 0) + 1
    edges = []
    for (a, b), n in count.items():
        if n != 1:
            continue
        m = 0.5 * (points[a] + points[b])
        eps = 1e-9
        if abs(m[0]) < eps:
            tag = "inflow"
        elif abs(m[0] - L) < eps:
            tag = "outflow"
        elif abs(m[1]) < eps or abs(m[1] - H) < eps:
            tag = "walls"
        elif math.hypot(m[0] - CX, m[1] - CY) < R + 1e-6:
            tag = "cylinder"
        else:
            raise RuntimeError(f"boundary edge {a}-{b} at {m} is on no boundary part")
        edges.append((a, b, tag))
    return edges


def write_msh(path, points, cells, edges):
    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write(f"$PhysicalNames\n{len(TAGS)}\n")
        for name, tag in TAGS.items():
            f.write(f'1 {tag} "{name}"\n')
        f.write("$EndPhysicalNames\n")
        f.write(f"$Nodes\n{len(points)}\n")
        for i, (x, y) in enumerate(points):
            f.write(f"{i + 1} {x:.15g} {y:.15g} 0\n")
        f.write("$EndNodes\n")
        f.write(f"$Elements\n{len(edges) + len(cells)}\n")
        n = 0
        for a, b, tag in edges:
            n += 1
            f.write(f"{n} 1 2 {TAGS[tag]} {TAGS[tag]} {a + 1} {b + 1}\n")
        for t in cells:
            n += 1
            f.write(f"{n} 2 2 0 1 {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
        f.write("$EndElements\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, default=0.03, help="far-field edge length")
    ap.add_argument("--circle", type=int, default=48, help="points on the circle")
    ap.add_argument("-o", "--output", default="meshes/cylinder.msh")
    args = ap.parse_args()
    points, _ = build_points(args.h, args.circle)
    cells = triangulate(points)
    edges = boundary_edges(points, cells)
    if sum(1 for e in edges if e[2] == "cylinder") != args.circle:
        raise RuntimeError("circle is not resolved by the triangulation; refine --h or change --circle")
    used = np.unique(cells)
    if len(used) != len(points):
        raise RuntimeError("unused points in the triangulation")
    write_msh(args.output, points, cells, edges)
    print(f"{args.output}: {len(points)} vertices, {len(cells)} triangles, {len(edges)} boundary edges")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerates the bundled terrain, vehicle, path and scenario files under data/."""

import json
import math
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent / "data"
SCHEMA_VERSION = 1
SPACING = 0.25


def grid(x0, x1, y0, y1, spacing=SPACING):
    cols = int(round((x1 - x0) / spacing)) + 1
    rows = int(round((y1 - y0) / spacing)) + 1
    xs = x0 + spacing * np.arange(cols)
    ys = y0 + spacing * np.arange(rows)
    X, Y = np.meshgrid(xs, ys)
    return X, Y


def gaussian(X, Y, cx, cy, sx, sy, amp):
    return amp * np.exp(-((X - cx) ** 2) / (2 * sx**2) - ((Y - cy) ** 2) / (2 * sy**2))


def write(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def terrain(name, X, Y, Z):
    rows, cols = Z.shape
    write(
        ROOT / "terrain" / f"{name}.json",
        {
            "schema_version": SCHEMA_VERSION,
            "rows": rows,
            "cols": cols,
            "origin_x": float(X[0, 0]),
            "origin_y": float(Y[0, 0]),
            "spacing": SPACING,
            "heights": [round(float(h), 12) for h in Z.ravel()],
        },
    )


def vehicle(name, mass, dims, wheels, radius):
    write(
        ROOT / "vehicles" / f"{name}.json",
        {
            "schema_version": SCHEMA_VERSION,
            "mass": mass,
            "dimensions": dims,
            "wheel_radius": radius,
            "wheels": wheels,
        },
    )


def path(name, points):
    write(ROOT / "paths" / f"{name}.json", {"schema_version": SCHEMA_VERSION, "control_points": points})


def scenario(name, terrain_name, vehicle_name, query, **extra):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "terrain": f"../terrain/{terrain_name}.json",
        "vehicle": f"../vehicles/{vehicle_name}.json",
        "query": query,
    }
    doc.update(extra)
    write(ROOT / "scenarios" / f"{name}.json", doc)


def path_params(X, Y, x, y):
    """Global (v, w) path parameters of a world point; v runs along y, w along x."""
    fx0, fx1 = X[0, 1], X[0, -2]
    fy0, fy1 = Y[1, 0], Y[-2, 0]
    return [round((y - fy0) / (fy1 - fy0), 9), round((x - fx0) / (fx1 - fx0), 9)]


def main():
    # Six wheels in three stations, numbered left side front to rear, then right side.
    six = [[0.75, 0.45, -0.45], [0.0, 0.45, -0.45], [-0.75, 0.45, -0.45],
           [0.75, -0.45, -0.45], [0.0, -0.45, -0.45], [-0.75, -0.45, -0.45]]
    vehicle("six_wheel", 500.0, [1.5, 0.9, 0.5], six, 0.15)
    four = [[0.5, 0.35, -0.35], [-0.5, 0.35, -0.35], [0.5, -0.35, -0.35], [-0.5, -0.35, -0.35]]
    vehicle("four_wheel", 400.0, [1.2, 0.8, 0.45], four, 0.12)
    eight = [[x, y, -0.5] for y in (0.5, -0.5) for x in (0.9, 0.3, -0.3, -0.9)]
    vehicle("eight_wheel", 700.0, [1.9, 1.0, 0.6], eight, 0.18)

    X, Y = grid(-3.0, 3.0, -3.0, 3.0)
    terrain("flat", X, Y, np.zeros_like(X))

    # Single-node depressions under wheels 2, 4 and 6 of the six-wheel layout at the origin.
    Z = np.zeros_like(X)
    for wx, wy in ((0.0, 0.45), (0.75, -0.45), (-0.75, -0.45)):
        c = int(round((wx - X[0, 0]) / SPACING))
        r = int(round((wy - Y[0, 0]) / SPACING))
        Z[r, c] = -0.3
    terrain("three_holes", X, Y, Z)

    # A bump across the width under the front wheels.
    terrain("front_bump", X, Y, gaussian(X, Y, 0.75, 0.0, 0.2, 0.6, 0.2))

    slope = math.tan(math.radians(10.0))
    terrain("ramp10", X, Y, slope * X)

    # Small rock under the left track of the four-wheel vehicle.
    X4, Y4 = grid(-3.0, 3.0, -2.0, 2.0)
    terrain("small_rock", X4, Y4, gaussian(X4, Y4, 0.0, 0.35, 0.15, 0.15, 0.12))
    path("straight_rock", [path_params(X4, Y4, x, 0.0) for x in np.linspace(-1.5, 1.5, 5)])

    # Large bump under the left track and a deep hole under the right track.
    X5, Y5 = grid(-4.0, 4.0, -2.0, 2.0)
    Z5 = gaussian(X5, Y5, -1.0, 0.45, 0.35, 0.3, 0.3) + gaussian(X5, Y5, 1.2, -0.45, 0.25, 0.25, -0.35)
    terrain("bump_hole", X5, Y5, Z5)
    path("straight_bump_hole", [path_params(X5, Y5, x, 0.0) for x in np.linspace(-2.5, 2.5, 6)])

    # Rolling hills with a curved path.
    X6, Y6 = grid(-6.0, 6.0, -6.0, 6.0)
    rng = np.random.default_rng(6)
    Z6 = np.zeros_like(X6)
    for _ in range(9):
        cx, cy = rng.uniform(-5.0, 5.0, size=2)
        s = rng.uniform(1.2, 2.2)
        Z6 += gaussian(X6, Y6, cx, cy, s, s, rng.uniform(-0.4, 0.6))
    terrain("hills", X6, Y6, Z6)
    curve = [(-3.5, -3.0), (-2.0, -1.0), (0.0, -1.5), (1.5, 0.5), (2.0, 2.5), (3.5, 3.0)]
    path("curved_hills", [path_params(X6, Y6, x, y) for x, y in curve])

    pose = lambda x=0.0, y=0.0, yaw=0.0: {"pose": {"x": x, "y": y, "yaw": yaw}}
    scenario("example1_flat", "flat", "six_wheel", pose())
    scenario("example2_three_contacts", "three_holes", "six_wheel", pose())
    scenario("example3_bump", "front_bump", "six_wheel", pose())
    scenario("example4_small_rock", "small_rock", "four_wheel",
             {"path": {"file": "../paths/straight_rock.json", "samples": 25}})
    scenario("example5_bump_hole", "bump_hole", "six_wheel",
             {"path": {"file": "../paths/straight_bump_hole.json", "samples": 25}})
    scenario("example6_hills", "hills", "eight_wheel",
             {"path": {"file": "../paths/curved_hills.json", "samples": 30}})
    scenario("ramp10", "ramp10", "six_wheel", pose())


if __name__ == "__main__":
    main()

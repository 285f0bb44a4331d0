#!/usr/bin/env python3
"""Regenerate crates/core/src/em/lebedev_data.rs.

The generator parameters are the Lebedev-Laikov orbit tables as distributed
with SciPy (scipy.integrate._lebedev, itself translated from the
Lebedev-Laikov C routines). Instead of copying the expanded points we record
the orbit calls (orbit type, a, b, weight) and let the Rust side expand each
orbit under the octahedral group.

Usage: python3 scripts/gen_lebedev.py > crates/core/src/em/lebedev_data.rs
"""

import scipy.integrate._lebedev as leb

ORDERS = [6, 14, 26, 50, 86, 110, 146, 194, 302, 590]
# algebraic degree of exactness for each point count
DEGREE = {6: 3, 14: 5, 26: 7, 50: 11, 86: 15, 110: 17, 146: 19, 194: 23, 302: 29, 590: 41}


def record(points):
    calls = []
    orig = leb.get_lebedev_recurrence_points

    def spy(type_, start, a, b, v, leb_tmp):
        calls.append((type_, a, b, v))
        return orig(type_, start, a, b, v, leb_tmp)

    leb.get_lebedev_recurrence_points = spy
    try:
        leb.get_lebedev_sphere(points)
    finally:
        leb.get_lebedev_recurrence_points = orig
    return calls


def main():
    print("// Generated by scripts/gen_lebedev.py; do not edit by hand.")
    print("//")
    print("// Each row is one octahedral orbit: (orbit type, a, b, weight), with weights")
    print("// normalised to sum to one over the sphere.")
    print()
    print("use super::lebedev::{Orbit, RuleTable};")
    print()
    print("pub(crate) static RULES: &[RuleTable] = &[")
    for n in ORDERS:
        calls = record(n)
        print("    RuleTable {")
        print(f"        points: {n},")
        print(f"        degree: {DEGREE[n]},")
        print("        orbits: &[")
        for (t, a, b, v) in calls:
            print(f"            Orbit {{ kind: {t}, a: {a!r}, b: {b!r}, weight: {v!r} }},")
        print("        ],")
        print("    },")
    print("];")


if __name__ == "__main__":
    main()

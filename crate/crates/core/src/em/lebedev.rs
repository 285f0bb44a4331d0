use std::f64::consts::PI;

use super::lebedev_data::RULES;
use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// One octahedral orbit of a Lebedev rule.
///
/// `kind` follows the Lebedev-Laikov numbering:
/// 1: `(±1, 0, 0)`, 2: `(0, ±a, ±a)` with `a = 1/√2`, 3: `(±a, ±a, ±a)` with
/// `a = 1/√3`, 4: `(±a, ±a, ±b)`, 5: `(±a, ±b, 0)`, 6: `(±a, ±b, ±c)`, each
/// closed under coordinate permutations.
pub(crate) struct Orbit {
    pub kind: u8,
    pub a: f64,
    pub b: f64,
    pub weight: f64,
}

pub(crate) struct RuleTable {
    pub points: usize,
    pub degree: usize,
    pub orbits: &'static [Orbit],
}

/// Quadrature nodes on the unit sphere with weights summing to `4π`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
    degree: usize,
}

impl SphereGrid {
    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest polynomial degree integrated exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Two grids are interchangeable if they come from the same rule.
    pub fn same_rule(&self, other: &SphereGrid) -> bool {
        self.len() == other.len() && self.degree == other.degree
    }
}

pub fn available_orders() -> Vec<usize> {
    RULES.iter().map(|r| r.points).collect()
}

/// Lebedev-Laikov rule with exactly `point_count` nodes.
pub fn lebedev_grid(point_count: usize) -> Result<SphereGrid> {
    let table = RULES
        .iter()
        .find(|r| r.points == point_count)
        .ok_or_else(|| Error::UnsupportedOrder {
            requested: point_count,
            available: available_orders(),
        })?;

    let mut nodes = Vec::with_capacity(table.points);
    let mut weights = Vec::with_capacity(table.points);
    for orbit in table.orbits {
        let generator = orbit_generator(orbit);
        let start = nodes.len();
        expand_orbit(generator, &mut nodes);
        weights.resize(nodes.len(), 4.0 * PI * orbit.weight);
        debug_assert_eq!(nodes.len() - start, orbit_size(orbit.kind));
    }
    assert_eq!(nodes.len(), table.points, "corrupt Lebedev table");
    Ok(SphereGrid {
        nodes,
        weights,
        degree: table.degree,
    })
}

fn orbit_size(kind: u8) -> usize {
    match kind {
        1 => 6,
        2 => 12,
        3 => 8,
        4 | 5 => 24,
        _ => 48,
    }
}

fn orbit_generator(orbit: &Orbit) -> Vec3 {
    let (a, b) = (orbit.a, orbit.b);
    match orbit.kind {
        1 => [1.0, 0.0, 0.0],
        2 => {
            let s = 0.5f64.sqrt();
            [0.0, s, s]
        }
        3 => {
            let s = (1.0f64 / 3.0).sqrt();
            [s, s, s]
        }
        4 => [a, a, (1.0 - 2.0 * a * a).sqrt()],
        5 => [a, (1.0 - a * a).sqrt(), 0.0],
        6 => [a, b, (1.0 - a * a - b * b).sqrt()],
        k => panic!("unknown Lebedev orbit kind {k}"),
    }
}

/// All distinct images of `g` under coordinate permutations and sign flips.
fn expand_orbit(g: Vec3, out: &mut Vec<Vec3>) {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let start = out.len();
    for perm in PERMS {
        let base = [g[perm[0]], g[perm[1]], g[perm[2]]];
        for signs in 0..8u8 {
            let mut v = base;
            let mut skip = false;
            for (axis, c) in v.iter_mut().enumerate() {
                if signs & (1 << axis) != 0 {
                    if *c == 0.0 {
                        skip = true;
                    }
                    *c = -*c;
                }
            }
            if skip {
                continue;
            }
            if !out[start..].contains(&v) {
                out.push(v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::norm;

    #[test]
    fn every_shipped_order_satisfies_grid_invariants() {
        for n in available_orders() {
            let g = lebedev_grid(n).unwrap();
            assert_eq!(g.len(), n);
            let sum: f64 = g.weights().iter().sum();
            assert!((sum - 4.0 * PI).abs() < 1e-10, "order {n}: {sum}");
            assert!(g.weights().iter().all(|&w| w > 0.0));
            for x in g.nodes() {
                assert!((norm(x) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn includes_required_orders() {
        for n in [6, 26, 110, 590] {
            assert!(lebedev_grid(n).is_ok());
        }
    }

    #[test]
    fn unsupported_order_lists_alternatives() {
        match lebedev_grid(7) {
            Err(Error::UnsupportedOrder { requested, available }) => {
                assert_eq!(requested, 7);
                assert!(available.contains(&590));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn y10_is_normalised_on_26_points() {
        let g = lebedev_grid(26).unwrap();
        let c = 3.0 / (4.0 * PI);
        let s: f64 = g.nodes().iter().zip(g.weights()).map(|(x, w)| w * c * x[2] * x[2]).sum();
        assert!((s - 1.0).abs() < 1e-10);
    }
}

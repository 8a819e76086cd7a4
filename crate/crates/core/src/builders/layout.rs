//! Rotated surface code geometry.
//!
//! Data qubits sit at integer points `(x, y)` with `y` growing downwards. Plaquette
//! `(i, j)` touches the data qubits `(i-1..=i, j-1..=j)` and is an X check when
//! `i + j` is odd. Boundary checks are X type on the top and bottom edges and Z type
//! on the left and right edges, so the X logical runs down a column and the Z
//! logical along a row.

use std::collections::BTreeMap;

use crate::circuit::Pauli;

pub type Point = (i32, i32);

pub const NW: usize = 0;
pub const NE: usize = 1;
pub const SW: usize = 2;
pub const SE: usize = 3;

/// Standard orders, as corner indices per two-qubit layer. The last two corners of
/// each check form the hook pair: horizontal for X checks, vertical for Z checks,
/// both perpendicular to the logical of the same type.
pub const X_ORDER: [usize; 4] = [NW, NE, SW, SE];
pub const Z_ORDER: [usize; 4] = [NW, SW, NE, SE];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Plaquette {
    pub i: i32,
    pub j: i32,
}

impl Plaquette {
    pub fn basis(self) -> Pauli {
        if (self.i + self.j).rem_euclid(2) == 1 {
            Pauli::X
        } else {
            Pauli::Z
        }
    }

    /// Data positions in NW, NE, SW, SE order.
    pub fn corners(self) -> [Point; 4] {
        let (i, j) = (self.i, self.j);
        [(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)]
    }

    pub fn center(self) -> (f64, f64) {
        (self.i as f64 - 0.5, self.j as f64 - 0.5)
    }

    pub fn standard_order(self) -> [usize; 4] {
        match self.basis() {
            Pauli::X => X_ORDER,
            _ => Z_ORDER,
        }
    }
}

/// A square patch of side `k` whose top-left data qubit is at `(x0, y0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub x0: i32,
    pub y0: i32,
    pub k: i32,
}

impl Region {
    pub fn contains(&self, p: Point) -> bool {
        (self.x0..self.x0 + self.k).contains(&p.0) && (self.y0..self.y0 + self.k).contains(&p.1)
    }

    pub fn data(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for y in self.y0..self.y0 + self.k {
            for x in self.x0..self.x0 + self.k {
                out.push((x, y));
            }
        }
        out
    }

    /// The `k² - 1` checks of the patch.
    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let mut out = Vec::new();
        for b in 0..=self.k {
            for a in 0..=self.k {
                let p = Plaquette { i: self.x0 + a, j: self.y0 + b };
                let top_or_bottom = b == 0 || b == self.k;
                let left_or_right = a == 0 || a == self.k;
                let keep = match (top_or_bottom, left_or_right) {
                    (false, false) => true,
                    (true, false) => p.basis() == Pauli::X,
                    (false, true) => p.basis() == Pauli::Z,
                    (true, true) => false,
                };
                if keep {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Data qubits of the X logical (rightmost column).
    pub fn x_logical(&self) -> Vec<Point> {
        (self.y0..self.y0 + self.k).map(|y| (self.x0 + self.k - 1, y)).collect()
    }

    /// Data qubits of the Z logical (bottom row).
    pub fn z_logical(&self) -> Vec<Point> {
        (self.x0..self.x0 + self.k).map(|x| (x, self.y0 + self.k - 1)).collect()
    }
}

/// Qubit numbering for a distance-`d` patch: data first in row-major order, then one
/// measure qubit per check of the full patch.
#[derive(Clone, Debug)]
pub struct Layout {
    pub d: i32,
    measure: BTreeMap<Plaquette, u32>,
}

impl Layout {
    pub fn new(d: usize) -> Self {
        let d = d as i32;
        let full = Region { x0: 0, y0: 0, k: d };
        let mut measure = BTreeMap::new();
        let mut plaquettes = full.plaquettes();
        plaquettes.sort_by_key(|p| (p.j, p.i));
        for (n, p) in plaquettes.into_iter().enumerate() {
            measure.insert(p, (d * d) as u32 + n as u32);
        }
        Layout { d, measure }
    }

    pub fn full(&self) -> Region {
        Region { x0: 0, y0: 0, k: self.d }
    }

    pub fn data(&self, p: Point) -> u32 {
        (p.1 * self.d + p.0) as u32
    }

    pub fn measure(&self, p: Plaquette) -> u32 {
        self.measure[&p]
    }

    pub fn num_qubits(&self) -> usize {
        (self.d * self.d) as usize + self.measure.len()
    }

    /// Every qubit with its coordinates, in index order.
    pub fn coords(&self) -> Vec<(u32, (f64, f64))> {
        let mut out: Vec<(u32, (f64, f64))> =
            self.full().data().into_iter().map(|p| (self.data(p), (p.0 as f64, p.1 as f64))).collect();
        out.extend(self.measure.iter().map(|(p, &q)| (q, p.center())));
        out.sort_by_key(|e| e.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotated_patch_counts() {
        for k in 2..9 {
            let r = Region { x0: 3, y0: 1, k };
            let plaquettes = r.plaquettes();
            assert_eq!(plaquettes.len() as i32, k * k - 1, "k={k}");
            for p in &plaquettes {
                let inside = p.corners().iter().filter(|&&c| r.contains(c)).count();
                assert!(inside == 2 || inside == 4);
            }
        }
    }

    #[test]
    fn logicals_commute_with_opposite_checks() {
        let r = Region { x0: 0, y0: 0, k: 5 };
        for p in r.plaquettes() {
            let (logical, other) = match p.basis() {
                Pauli::X => (r.z_logical(), Pauli::Z),
                _ => (r.x_logical(), Pauli::X),
            };
            let overlap = p.corners().iter().filter(|c| r.contains(**c) && logical.contains(c)).count();
            assert_eq!(overlap % 2, 0, "{p:?} anticommutes with the {other:?} logical");
        }
    }

    #[test]
    fn qubit_count_is_two_d_squared_minus_one() {
        for d in [3, 5, 7] {
            assert_eq!(Layout::new(d).num_qubits(), 2 * d * d - 1);
        }
    }
}

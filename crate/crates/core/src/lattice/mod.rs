//! Square lattices, the global tensor-product basis and the Hamiltonian.
//!
//! Vertices are numbered `v = x + Lx * y` with sublattice parity `(x + y) % 2`.
//! Links are numbered vertex by vertex, the `x` link before the `y` link, each
//! oriented from `n` to `n + k`. A plaquette at `n` uses links
//! `1 = (n, x)`, `2 = (n + x, y)`, `3 = (n + y, x)`, `4 = (n, y)`.

mod basis;
mod model;
mod operator;

pub use basis::GlobalBasis;
pub use model::{
    default_electric_weights, ElectricWeights, Hamiltonian, Model, ModelParams, OperatorChain, TermKind, TermSet,
};
pub use operator::{basis_vector, dot, norm, LinearMap, LocalTerm, OperatorSum, Product};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub dir: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub corner: usize,
    /// Bottom, right, top, left.
    pub links: [usize; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub lx: usize,
    pub ly: usize,
    #[serde(default)]
    pub boundary_x: Boundary,
    #[serde(default)]
    pub boundary_y: Boundary,
    #[serde(default)]
    pub include_matter: bool,
}

impl LatticeSpec {
    pub fn open(lx: usize, ly: usize, include_matter: bool) -> Self {
        Self {
            lx,
            ly,
            boundary_x: Boundary::Open,
            boundary_y: Boundary::Open,
            include_matter,
        }
    }

    pub fn periodic(lx: usize, ly: usize, include_matter: bool) -> Self {
        Self {
            lx,
            ly,
            boundary_x: Boundary::Periodic,
            boundary_y: Boundary::Periodic,
            include_matter,
        }
    }

    /// Checks sizes; `staggered` additionally requires even periodic lengths.
    pub fn validate(&self, staggered: bool) -> Result<()> {
        if self.lx == 0 || self.ly == 0 {
            return Err(Error::InvalidLattice("lattice lengths must be positive".into()));
        }
        for (len, b, name) in [(self.lx, self.boundary_x, "Lx"), (self.ly, self.boundary_y, "Ly")] {
            if b == Boundary::Periodic {
                if len < 2 {
                    return Err(Error::InvalidLattice(format!("periodic {name} must be at least 2")));
                }
                if staggered && len % 2 == 1 {
                    return Err(Error::InvalidLattice(format!(
                        "periodic {name} = {len} is odd, which breaks the staggered sublattices"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.lx * self.ly
    }

    pub fn vertex(&self, x: usize, y: usize) -> usize {
        x + self.lx * y
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v % self.lx, v / self.lx)
    }

    pub fn parity(&self, v: usize) -> u8 {
        let (x, y) = self.coords(v);
        ((x + y) % 2) as u8
    }

    /// Neighbour of `v` in direction `dir`, if the link exists.
    pub fn step(&self, v: usize, dir: Direction) -> Option<usize> {
        let (x, y) = self.coords(v);
        match dir {
            Direction::X if x + 1 < self.lx => Some(self.vertex(x + 1, y)),
            Direction::X if self.boundary_x == Boundary::Periodic && self.lx >= 2 => Some(self.vertex(0, y)),
            Direction::Y if y + 1 < self.ly => Some(self.vertex(x, y + 1)),
            Direction::Y if self.boundary_y == Boundary::Periodic && self.ly >= 2 => Some(self.vertex(x, 0)),
            _ => None,
        }
    }

    pub fn links(&self) -> Vec<Link> {
        let mut out = Vec::new();
        for v in 0..self.num_vertices() {
            for dir in [Direction::X, Direction::Y] {
                if let Some(to) = self.step(v, dir) {
                    out.push(Link { from: v, to, dir });
                }
            }
        }
        out
    }

    pub fn link_index(&self, from: usize, dir: Direction) -> Option<usize> {
        self.links().iter().position(|l| l.from == from && l.dir == dir)
    }

    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let links = self.links();
        let find = |from: usize, dir: Direction| links.iter().position(|l| l.from == from && l.dir == dir);
        let mut out = Vec::new();
        for n in 0..self.num_vertices() {
            let (Some(nx), Some(ny)) = (self.step(n, Direction::X), self.step(n, Direction::Y)) else {
                continue;
            };
            if let (Some(l1), Some(l2), Some(l3), Some(l4)) =
                (find(n, Direction::X), find(nx, Direction::Y), find(ny, Direction::X), find(n, Direction::Y))
            {
                out.push(Plaquette {
                    corner: n,
                    links: [l1, l2, l3, l4],
                });
            }
        }
        out
    }

    /// `(outgoing, incoming)` link indices at a vertex.
    pub fn star(&self, v: usize) -> (Vec<usize>, Vec<usize>) {
        let links = self.links();
        let out = (0..links.len()).filter(|&l| links[l].from == v).collect();
        let inc = (0..links.len()).filter(|&l| links[l].to == v).collect();
        (out, inc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_counts() {
        for (lx, ly) in [(1, 2), (2, 2), (3, 2), (3, 4)] {
            assert_eq!(LatticeSpec::open(lx, ly, false).links().len(), lx * (ly - 1) + ly * (lx - 1));
        }
        for (lx, ly) in [(2, 2), (4, 2), (4, 4)] {
            let l = LatticeSpec::periodic(lx, ly, false);
            assert_eq!(l.links().len(), 2 * lx * ly);
            assert_eq!(l.plaquettes().len(), lx * ly);
        }
        assert_eq!(LatticeSpec::open(2, 2, false).plaquettes().len(), 1);
        assert_eq!(LatticeSpec::open(3, 3, false).plaquettes().len(), 4);
    }

    #[test]
    fn plaquette_orientation() {
        let l = LatticeSpec::open(2, 2, false);
        let links = l.links();
        let p = l.plaquettes()[0];
        assert_eq!(links[p.links[0]], Link { from: 0, to: 1, dir: Direction::X });
        assert_eq!(links[p.links[1]], Link { from: 1, to: 3, dir: Direction::Y });
        assert_eq!(links[p.links[2]], Link { from: 2, to: 3, dir: Direction::X });
        assert_eq!(links[p.links[3]], Link { from: 0, to: 2, dir: Direction::Y });
    }

    #[test]
    fn periodic_validation() {
        assert!(LatticeSpec::periodic(3, 2, true).validate(true).is_err());
        assert!(LatticeSpec::periodic(3, 2, true).validate(false).is_ok());
        assert!(LatticeSpec::periodic(1, 2, false).validate(false).is_err());
        assert!(LatticeSpec::open(1, 2, true).validate(true).is_ok());
    }
}

//! Open-boundary triangular patches and their bond classes.
//!
//! Sites are numbered from 1, row by row starting at the apex: row `r`
//! holds sites `r(r-1)/2 + 1 ..= r(r+1)/2`. Each site in row `r` (except
//! the last row) has two neighbours in row `r + 1`: the down-left one is
//! joined by an [`BondClass::Omega`] bond and the down-right one by a
//! [`BondClass::Unit`] bond. Neighbours within a row share an
//! [`BondClass::Eta`] bond.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Direction class of a nearest-neighbour bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondClass {
    /// Down-left diagonal, strength `omega * J`.
    Omega,
    /// Horizontal, strength `eta * J`.
    Eta,
    /// Down-right diagonal, strength `J`.
    Unit,
}

impl BondClass {
    pub fn as_str(self) -> &'static str {
        match self {
            BondClass::Omega => "omega",
            BondClass::Eta => "eta",
            BondClass::Unit => "unit",
        }
    }

    /// The class a bond lands in after the left-right mirror.
    pub fn mirrored(self) -> Self {
        match self {
            BondClass::Omega => BondClass::Unit,
            BondClass::Unit => BondClass::Omega,
            BondClass::Eta => BondClass::Eta,
        }
    }
}

/// A bond between sites `i < j` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub class: BondClass,
}

impl Serialize for Bond {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.i, self.j, self.class).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bond {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (i, j, class) = <(usize, usize, BondClass)>::deserialize(d)?;
        Ok(Bond { i, j, class })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    #[serde(rename = "L")]
    side: usize,
    n_sites: usize,
    bonds: Vec<Bond>,
    #[serde(skip)]
    coords: Vec<(usize, usize)>,
}

/// First site (1-based) of row `r` (1-based).
fn row_start(r: usize) -> usize {
    r * (r - 1) / 2 + 1
}

impl Lattice {
    /// Builds the triangular patch with `side` sites along each edge.
    pub fn new(side: usize) -> Result<Self> {
        if side < 2 {
            return Err(Error::invalid(format!("lattice side must be >= 2, got {side}")));
        }
        let n_sites = side * (side + 1) / 2;
        let mut coords = Vec::with_capacity(n_sites);
        let mut bonds = Vec::with_capacity(3 * side * (side - 1) / 2);
        for r in 1..=side {
            for c in 0..r {
                let s = row_start(r) + c;
                coords.push((r, c + 1));
                if c + 1 < r {
                    bonds.push(Bond { i: s, j: s + 1, class: BondClass::Eta });
                }
                if r < side {
                    let below = row_start(r + 1) + c;
                    bonds.push(Bond { i: s, j: below, class: BondClass::Omega });
                    bonds.push(Bond { i: s, j: below + 1, class: BondClass::Unit });
                }
            }
        }
        Ok(Lattice { side, n_sites, bonds, coords })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    /// `(row, column)` of a 1-based site, both 1-based.
    pub fn coords(&self, site: usize) -> (usize, usize) {
        self.coords[site - 1]
    }

    pub fn site_at(&self, row: usize, col: usize) -> usize {
        row_start(row) + col - 1
    }

    pub fn bonds_of_class(&self, class: BondClass) -> impl Iterator<Item = &Bond> {
        self.bonds.iter().filter(move |b| b.class == class)
    }

    /// Left-right mirror as a site permutation: `mirror[s - 1]` is the image of site `s`.
    pub fn mirror_permutation(&self) -> Vec<usize> {
        self.coords
            .iter()
            .map(|&(r, c)| self.site_at(r, r + 1 - c))
            .collect()
    }

    /// Checks that `site` is a valid 1-based index.
    pub fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            return Err(Error::invalid(format!(
                "site {site} out of range 1..={}",
                self.n_sites
            )));
        }
        Ok(())
    }

    /// JSON dump `{L, n_sites, bonds: [[i, j, class], ...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("lattice serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashSet, VecDeque};

    #[test]
    fn smallest_triangle() {
        let lat = Lattice::new(2).unwrap();
        assert_eq!(lat.n_sites(), 3);
        let got: BTreeSet<_> = lat.bonds().iter().copied().collect();
        let want: BTreeSet<_> = [
            Bond { i: 2, j: 3, class: BondClass::Eta },
            Bond { i: 1, j: 2, class: BondClass::Omega },
            Bond { i: 1, j: 3, class: BondClass::Unit },
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn counts() {
        for (side, sites, bonds) in [(2, 3, 3), (3, 6, 9), (4, 10, 18), (5, 15, 30)] {
            let lat = Lattice::new(side).unwrap();
            assert_eq!(lat.n_sites(), sites);
            assert_eq!(lat.bonds().len(), bonds);
            for class in [BondClass::Omega, BondClass::Eta, BondClass::Unit] {
                assert_eq!(lat.bonds_of_class(class).count(), side * (side - 1) / 2);
            }
        }
    }

    #[test]
    fn rejects_tiny() {
        assert!(matches!(Lattice::new(1), Err(Error::InvalidArgument(_))));
        assert!(Lattice::new(0).is_err());
    }

    #[test]
    fn bond_invariants() {
        for side in 2..=6 {
            let lat = Lattice::new(side).unwrap();
            let mut seen = HashSet::new();
            for b in lat.bonds() {
                assert!(b.i < b.j);
                assert!(seen.insert((b.i, b.j)), "duplicate bond {b:?}");
                let (ri, _) = lat.coords(b.i);
                let (rj, _) = lat.coords(b.j);
                match b.class {
                    BondClass::Eta => assert_eq!(ri, rj),
                    _ => assert_eq!(ri + 1, rj),
                }
            }
        }
    }

    #[test]
    fn mirror_swaps_diagonal_classes() {
        for side in 2..=6 {
            let lat = Lattice::new(side).unwrap();
            let m = lat.mirror_permutation();
            let orig: BTreeSet<_> = lat.bonds().iter().copied().collect();
            let mirrored: BTreeSet<_> = lat
                .bonds()
                .iter()
                .map(|b| {
                    let (a, c) = (m[b.i - 1], m[b.j - 1]);
                    Bond { i: a.min(c), j: a.max(c), class: b.class.mirrored() }
                })
                .collect();
            assert_eq!(orig, mirrored);
        }
    }

    #[test]
    fn any_two_classes_connect_the_patch() {
        let pairs = [
            [BondClass::Omega, BondClass::Eta],
            [BondClass::Omega, BondClass::Unit],
            [BondClass::Eta, BondClass::Unit],
        ];
        for side in 2..=6 {
            let lat = Lattice::new(side).unwrap();
            for keep in pairs {
                let mut adj = vec![Vec::new(); lat.n_sites() + 1];
                for b in lat.bonds().iter().filter(|b| keep.contains(&b.class)) {
                    adj[b.i].push(b.j);
                    adj[b.j].push(b.i);
                }
                let mut seen = vec![false; lat.n_sites() + 1];
                let mut queue = VecDeque::from([1]);
                seen[1] = true;
                while let Some(s) = queue.pop_front() {
                    for &t in &adj[s] {
                        if !seen[t] {
                            seen[t] = true;
                            queue.push_back(t);
                        }
                    }
                }
                assert!(seen[1..].iter().all(|&x| x), "side {side} classes {keep:?}");
            }
        }
    }

    #[test]
    fn named_sites() {
        let lat = Lattice::new(4).unwrap();
        assert_eq!(lat.coords(2), (2, 1));
        // site 5 is the middle of row 3 and maps to itself under the mirror
        assert_eq!(lat.coords(5), (3, 2));
        assert_eq!(lat.mirror_permutation()[4], 5);
        assert_eq!(lat.mirror_permutation()[0], 1);
    }

    #[test]
    fn json_shape() {
        let lat = Lattice::new(2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&lat.to_json()).unwrap();
        assert_eq!(v["L"], 2);
        assert_eq!(v["n_sites"], 3);
        assert_eq!(v["bonds"][0], serde_json::json!([1, 2, "omega"]));
    }
}

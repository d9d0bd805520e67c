//! Brute-force reference computations on a bounded universe `0..n`.
//!
//! Nothing here uses the closed forms in `calculus`; the R-graph is built
//! straight from the definition `R(x, y) ⟺ x = γ(y) ∨ y = γ(x)`.

use thiserror::Error;

use super::{AffineRule, NatMap};

fn gamma_def(n: u64) -> u64 {
    if n % 3 == 0 || n % 3 == 2 {
        3 * n + 1
    } else {
        n
    }
}

/// The R-graph restricted to `0..universe`.
pub struct RGraph {
    adj: Vec<Vec<u64>>,
}

impl RGraph {
    pub fn new(universe: u64) -> Self {
        let mut adj = vec![Vec::new(); universe as usize];
        for x in 0..universe {
            let y = gamma_def(x);
            if y < universe && y != x {
                adj[x as usize].push(y);
                adj[y as usize].push(x);
            }
        }
        RGraph { adj }
    }

    pub fn universe(&self) -> u64 {
        self.adj.len() as u64
    }

    /// `Cl({n})` by search. Exact when every point reachable from `n` is
    /// inside the universe.
    pub fn component(&self, n: u64) -> Vec<u64> {
        let mut seen = vec![n];
        let mut stack = vec![n];
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x as usize] {
                if !seen.contains(&y) {
                    seen.push(y);
                    stack.push(y);
                }
            }
        }
        seen.sort_unstable();
        seen
    }
}

/// Iterates R to a fixpoint: adds every R-neighbour of a member until nothing
/// changes. Membership of `x` in the result is exact as long as the component
/// of `x` lies inside `0..bits.len()`.
pub fn closure_bits(bits: &[bool]) -> Vec<bool> {
    let n = bits.len() as u64;
    let mut out = bits.to_vec();
    loop {
        let mut changed = false;
        for x in 0..n {
            let y = gamma_def(x);
            if y >= n {
                continue;
            }
            let (xi, yi) = (x as usize, y as usize);
            if out[xi] != out[yi] {
                out[xi] = true;
                out[yi] = true;
                changed = true;
            }
        }
        if !changed {
            return out;
        }
    }
}

/// Companion of every `n < limit`, read off R-components. Fails if some
/// component has more than two points, i.e. if one companion step would not
/// reach the closure.
pub fn companions(limit: u64) -> Result<Vec<u64>, OracleError> {
    let graph = RGraph::new(3 * limit + 2);
    (0..limit)
        .map(|n| {
            let comp = graph.component(n);
            match comp.as_slice() {
                [x] => Ok(*x),
                [x, y] => Ok(if *x == n { *y } else { *x }),
                _ => Err(OracleError::LargeComponent { n, size: comp.len() }),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("component of {n} has {size} points")]
    LargeComponent { n: u64, size: usize },
    #[error("residue {residue}: samples do not fit an increasing affine rule")]
    NotAffine { residue: u64 },
    #[error("fitted map disagrees with the oracle at {n}: {fitted} vs {expected}")]
    Mismatch { n: u64, fitted: u64, expected: u64 },
}

/// Fits one affine rule per residue class modulo `modulus` to `values`
/// (`values[n]` is the oracle's answer at `n`) from the first two points of the
/// class, then checks the fit on every sample.
pub fn derive_residue_map(modulus: u64, values: &[u64]) -> Result<NatMap, OracleError> {
    let mut rules = Vec::new();
    for r in 0..modulus {
        let (i0, i1) = (r as usize, (r + modulus) as usize);
        if i1 >= values.len() {
            return Err(OracleError::NotAffine { residue: r });
        }
        let (b, next) = (values[i0], values[i1]);
        if next < b {
            return Err(OracleError::NotAffine { residue: r });
        }
        rules.push(AffineRule::new(r, modulus, next - b, b));
    }
    let map = NatMap::new(rules).expect("one rule per residue");
    check_map(&map, values)?;
    Ok(map)
}

/// First disagreement between `map` and the oracle table.
pub fn check_map(map: &NatMap, values: &[u64]) -> Result<(), OracleError> {
    for (n, &expected) in values.iter().enumerate() {
        let fitted = map.apply(n as u64);
        if fitted != expected {
            return Err(OracleError::Mismatch { n: n as u64, fitted, expected });
        }
    }
    Ok(())
}

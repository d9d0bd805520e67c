//! Independent oracles shared by the integration tests: companions read off
//! the graph of γ, and set expressions evaluated on plain bit vectors.

#![allow(dead_code)]

use bethck_core::upset::UpSet;
use rand::Rng;

/// `γ(n) = 3n + 1` off `3ℕ + 1`, identity on it.
pub fn gamma_naive(n: u64) -> u64 {
    if n % 3 == 1 {
        n
    } else {
        3 * n + 1
    }
}

/// The other point of the R-component of `n`, or `n` itself.
pub fn companion_naive(n: u64) -> u64 {
    if n % 3 != 1 {
        return gamma_naive(n);
    }
    let m = (n - 1) / 3;
    if m % 3 != 1 {
        m
    } else {
        n
    }
}

#[derive(Debug, Clone)]
pub enum Expr {
    Residue(u64, u64),
    Finite(Vec<u64>),
    Union(Box<Expr>, Box<Expr>),
    Inter(Box<Expr>, Box<Expr>),
    Diff(Box<Expr>, Box<Expr>),
    Complement(Box<Expr>),
    Closure(Box<Expr>),
    ClMinus(Box<Expr>),
    CompanionImage(Box<Expr>),
    GammaPre(Box<Expr>),
    GammaImage(Box<Expr>),
}

/// Random expression of bounded depth with at most `maps` operators that
/// look above the current point.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32, maps: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.6) {
            let m = rng.gen_range(1..=12);
            Expr::Residue(rng.gen_range(0..m), m)
        } else {
            let k = rng.gen_range(0..6);
            Expr::Finite((0..k).map(|_| rng.gen_range(0..80)).collect())
        };
    }
    let sub = |rng: &mut R, maps| Box::new(random_expr(rng, depth - 1, maps));
    match rng.gen_range(0..10) {
        0 => Expr::Union(sub(rng, maps), sub(rng, maps)),
        1 => Expr::Inter(sub(rng, maps), sub(rng, maps)),
        2 => Expr::Diff(sub(rng, maps), sub(rng, maps)),
        3 => Expr::Complement(sub(rng, maps)),
        4 => Expr::GammaImage(sub(rng, maps)),
        k if maps > 0 => {
            let x = sub(rng, maps - 1);
            match k {
                5 | 6 => Expr::Closure(x),
                7 => Expr::ClMinus(x),
                8 => Expr::CompanionImage(x),
                _ => Expr::GammaPre(x),
            }
        }
        _ => Expr::Complement(sub(rng, maps)),
    }
}

pub fn eval_upset(e: &Expr) -> UpSet {
    match e {
        Expr::Residue(r, m) => UpSet::from_residue(*r, *m).unwrap(),
        Expr::Finite(v) => UpSet::from_finite(v.iter().copied()),
        Expr::Union(a, b) => eval_upset(a).union(&eval_upset(b)),
        Expr::Inter(a, b) => eval_upset(a).intersection(&eval_upset(b)),
        Expr::Diff(a, b) => eval_upset(a).difference(&eval_upset(b)),
        Expr::Complement(a) => eval_upset(a).complement(),
        Expr::Closure(a) => eval_upset(a).closure(),
        Expr::ClMinus(a) => eval_upset(a).cl_minus(),
        Expr::CompanionImage(a) => eval_upset(a).companion_image(),
        Expr::GammaPre(a) => eval_upset(a).gamma_preimage(),
        Expr::GammaImage(a) => eval_upset(a).gamma_image(),
    }
}

/// Membership of `0..limit` computed pointwise from the definitions; each
/// map operator evaluates its argument on the range it reaches.
pub fn eval_bits(e: &Expr, limit: u64) -> Vec<bool> {
    let wide = 3 * limit + 2;
    let n_range = 0..limit;
    match e {
        Expr::Residue(r, m) => n_range.map(|n| n % m == *r).collect(),
        Expr::Finite(v) => n_range.map(|n| v.contains(&n)).collect(),
        Expr::Union(a, b) => zip(eval_bits(a, limit), eval_bits(b, limit), |x, y| x || y),
        Expr::Inter(a, b) => zip(eval_bits(a, limit), eval_bits(b, limit), |x, y| x && y),
        Expr::Diff(a, b) => zip(eval_bits(a, limit), eval_bits(b, limit), |x, y| x && !y),
        Expr::Complement(a) => eval_bits(a, limit).into_iter().map(|x| !x).collect(),
        Expr::Closure(a) => {
            let x = eval_bits(a, wide);
            n_range.map(|n| x[n as usize] || x[companion_naive(n) as usize]).collect()
        }
        Expr::ClMinus(a) => {
            let x = eval_bits(a, wide);
            n_range.map(|n| !x[n as usize] && x[companion_naive(n) as usize]).collect()
        }
        Expr::CompanionImage(a) => {
            let x = eval_bits(a, wide);
            n_range.map(|n| x[companion_naive(n) as usize]).collect()
        }
        Expr::GammaPre(a) => {
            let x = eval_bits(a, wide);
            n_range.map(|n| x[gamma_naive(n) as usize]).collect()
        }
        Expr::GammaImage(a) => {
            let x = eval_bits(a, limit);
            let mut out = vec![false; limit as usize];
            for m in 0..limit {
                let g = gamma_naive(m);
                if x[m as usize] && g < limit {
                    out[g as usize] = true;
                }
            }
            out
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// First point below `limit` where the exact set and the oracle disagree.
pub fn first_mismatch(e: &Expr, limit: u64) -> Option<u64> {
    let exact = eval_upset(e);
    let bits = eval_bits(e, limit);
    (0..limit).find(|&n| exact.member(n) != bits[n as usize])
}

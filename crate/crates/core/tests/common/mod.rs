//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use sevenarc::field::FieldCtx;
use sevenarc::plane::{Plane, ProjPoint};

/// Base-p digits of an element, lowest first.
fn digits(mut x: u32, p: u32, n: usize) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

/// Schoolbook product of two elements as polynomials over GF(p), reduced
/// by the context's monic modulus.
pub fn schoolbook_mul(ctx: &FieldCtx, a: u32, b: u32) -> u32 {
    let p = ctx.characteristic();
    let n = ctx.degree() as usize;
    let m = ctx.modulus();
    assert_eq!(m.len(), n + 1);
    let (da, db) = (digits(a, p, n), digits(b, p, n));
    let mut prod = vec![0u32; 2 * n];
    for i in 0..n {
        for j in 0..n {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    for k in (n..2 * n).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (i, &mi) in m.iter().enumerate() {
            let idx = k - n + i;
            prod[idx] = (prod[idx] + (p - c) * mi % p) % p;
        }
    }
    prod[..n].iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// All (p, s, l) with p^(s·l) at most `max`, p in the given primes.
pub fn small_fields(primes: &[u32], max: u64) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for &p in primes {
        for s in 1..=8 {
            for l in 1..=8 {
                if (p as u64).checked_pow(s * l).is_some_and(|n| n <= max) {
                    out.push((p, s, l));
                }
            }
        }
    }
    out
}

pub type Matrix = [[u32; 3]; 3];

/// A uniformly random invertible matrix with entries in the base field GF(q).
pub fn random_pgl(plane: &Plane, rng: &mut impl Rng) -> Matrix {
    let base = plane.ctx().subfield_elements(1).unwrap();
    loop {
        let mut m = [[0u32; 3]; 3];
        for row in &mut m {
            for x in row.iter_mut() {
                *x = base[rng.gen_range(0..base.len())];
            }
        }
        if plane.det(&m[0], &m[1], &m[2]) != 0 {
            return m;
        }
    }
}

pub fn apply(plane: &Plane, m: &Matrix, p: &ProjPoint) -> ProjPoint {
    let ctx = plane.ctx();
    let v = p.coords();
    let raw = m.map(|row| (0..3).fold(0, |acc, j| ctx.add(acc, ctx.mul(row[j], v[j]))));
    plane.point(raw).unwrap()
}

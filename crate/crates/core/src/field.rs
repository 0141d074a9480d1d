//! Finite fields GF(p^(s·L)) viewed as degree-L extensions of a base field
//! GF(q), q = p^s.
//!
//! Elements are packed into a `u32`: the coefficient of `t^i` of the residue
//! polynomial is the i-th base-p digit. For p = 2 this is the usual bit-packed
//! representation, and addition is XOR.
//!
//! Hot loops work with the raw `u32` operations on [`FieldCtx`]; the checked
//! [`FieldElement`] wrapper carries its owning context and rejects mixed-context
//! arithmetic.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

/// Default cap on the absolute degree s·L of a field context.
pub const DEFAULT_MAX_DEGREE: u32 = 24;

/// Above this absolute degree, characteristic-2 multiplication switches from
/// log/exp tables to carryless multiplication with Barrett reduction.
const TABLE_MAX_BITS: u32 = 20;

static NEXT_CTX_ID: AtomicU64 = AtomicU64::new(1);

/// Primitive polynomials over GF(2), degrees 1..=24, as bit masks including
/// the leading term. Every entry is re-verified when a context is built.
const GF2_MODULI: [u32; 24] = [
    0x3, 0x7, 0xb, 0x13, 0x25, 0x5b, 0x83, 0x11d, 0x211, 0x46f, 0x805, 0x10eb, 0x201b, 0x40a9,
    0x8035, 0x1002d, 0x20009, 0x41403, 0x80027, 0x1006f3, 0x200065, 0x401f61, 0x800021,
    0x101e6a9,
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension parameters must be positive (s = {s}, L = {l})")]
    ZeroDegree { s: u32, l: u32 },
    #[error("GF({p}^{degree}) exceeds the configured cap")]
    TooLarge { p: u32, degree: u32 },
    #[error("modulus for GF({p}^{degree}) failed irreducibility verification")]
    Reducible { p: u32, degree: u32 },
    #[error("modulus for GF({p}^{degree}) is irreducible but not primitive")]
    NotPrimitive { p: u32, degree: u32 },
    #[error("no primitive modulus of degree {degree} over GF({p}) found")]
    NoModulus { p: u32, degree: u32 },
    #[error("elements belong to different field contexts")]
    ContextMismatch,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("{value} is not an element of a field with {size} elements")]
    OutOfRange { value: u64, size: u64 },
    #[error("{d} does not divide the extension degree {l}")]
    NotADivisor { d: u32, l: u32 },
}

enum Arith {
    Tables { log: Vec<u32>, exp: Vec<u32> },
    Clmul { modulus: u64, mu: u64 },
}

/// An immutable finite-field context: GF(q^L) with q = p^s.
pub struct FieldCtx {
    id: u64,
    p: u32,
    s: u32,
    l: u32,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    arith: Arith,
    /// q^i mod (size - 1) for i in 0..L
    frob_log_factor: Vec<u64>,
    /// x -> x^q, present for table-backed fields
    frob_table: Option<Vec<u32>>,
    hw_clmul: bool,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("id", &self.id)
            .field("p", &self.p)
            .field("s", &self.s)
            .field("l", &self.l)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Builds GF(q^L), q = p^s, with the default degree cap.
pub fn make_field(p: u32, s: u32, l: u32) -> Result<Arc<FieldCtx>, FieldError> {
    FieldCtx::new(p, s, l).map(Arc::new)
}

impl FieldCtx {
    pub fn new(p: u32, s: u32, l: u32) -> Result<Self, FieldError> {
        Self::with_max_degree(p, s, l, DEFAULT_MAX_DEGREE)
    }

    pub fn with_max_degree(p: u32, s: u32, l: u32, max_degree: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if s == 0 || l == 0 {
            return Err(FieldError::ZeroDegree { s, l });
        }
        let degree = s.checked_mul(l).ok_or(FieldError::TooLarge { p, degree: u32::MAX })?;
        let size = (p as u64).checked_pow(degree);
        let size = match size {
            Some(v) if degree <= max_degree && v <= 1 << 24 => v as u32,
            _ => return Err(FieldError::TooLarge { p, degree }),
        };

        let modulus = if p == 2 {
            let bits = GF2_MODULI[degree as usize - 1];
            let coeffs: Vec<u32> = (0..=degree).map(|i| (bits >> i) & 1).collect();
            if !poly::is_irreducible(&coeffs, p) {
                return Err(FieldError::Reducible { p, degree });
            }
            if !poly::x_is_primitive(&coeffs, p) {
                return Err(FieldError::NotPrimitive { p, degree });
            }
            coeffs
        } else {
            poly::find_primitive(p, degree).ok_or(FieldError::NoModulus { p, degree })?
        };

        let arith = if p == 2 && degree > TABLE_MAX_BITS {
            let m: u64 = modulus.iter().enumerate().map(|(i, &c)| (c as u64) << i).sum();
            Arith::Clmul { modulus: m, mu: gf2_barrett_mu(m, degree) }
        } else {
            let (log, exp) = build_tables(p, degree, size, &modulus);
            Arith::Tables { log, exp }
        };

        let q = (p as u64).pow(s);
        let order = size as u64 - 1;
        let mut frob_log_factor = Vec::with_capacity(l as usize);
        let mut f = 1u64 % order.max(1);
        for _ in 0..l {
            frob_log_factor.push(f);
            f = if order == 0 { 0 } else { (f as u128 * q as u128 % order as u128) as u64 };
        }

        let mut ctx = FieldCtx {
            id: NEXT_CTX_ID.fetch_add(1, Ordering::Relaxed),
            p,
            s,
            l,
            degree,
            size,
            modulus,
            arith,
            frob_log_factor,
            frob_table: None,
            hw_clmul: detect_clmul(),
        };
        if matches!(ctx.arith, Arith::Tables { .. }) {
            let table = (0..size).map(|x| ctx.frobenius_slow(x, 1)).collect();
            ctx.frob_table = Some(table);
        }
        Ok(ctx)
    }

    pub fn id(&self) -> u64 {
        self.id
    }
    pub fn characteristic(&self) -> u32 {
        self.p
    }
    /// Exponent s of the base field, q = p^s.
    pub fn base_exponent(&self) -> u32 {
        self.s
    }
    /// Extension degree L over the base field.
    pub fn extension_degree(&self) -> u32 {
        self.l
    }
    /// Absolute degree s·L over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }
    /// Number of elements, q^L.
    pub fn size(&self) -> u32 {
        self.size
    }
    /// Size q of the base field.
    pub fn base_size(&self) -> u64 {
        (self.p as u64).pow(self.s)
    }
    /// Modulus coefficients, lowest degree first (monic).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn zero(&self) -> u32 {
        0
    }
    #[inline]
    pub fn one(&self) -> u32 {
        1
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else {
            self.digitwise(a, b, |x, y, p| (x + y) % p)
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else {
            self.digitwise(a, b, |x, y, p| (x + p - y) % p)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            a
        } else {
            self.digitwise(0, a, |x, y, p| (x + p - y) % p)
        }
    }

    fn digitwise(&self, mut a: u32, mut b: u32, op: impl Fn(u32, u32, u32) -> u32) -> u32 {
        let p = self.p;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.degree {
            out += op(a % p, b % p, p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.arith {
            Arith::Tables { log, exp } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                }
            }
            Arith::Clmul { modulus, mu } => {
                let prod = self.clmul(a as u64, b as u64);
                let n = self.degree;
                let t = self.clmul(prod >> n, *mu) >> n;
                ((prod ^ self.clmul(t, *modulus)) & ((1u64 << n) - 1)) as u32
            }
        }
    }

    #[inline]
    fn clmul(&self, a: u64, b: u64) -> u64 {
        #[cfg(target_arch = "x86_64")]
        if self.hw_clmul {
            // SAFETY: the feature was detected at context construction.
            return unsafe { clmul_hw(a, b) };
        }
        clmul_soft(a, b)
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        Some(match &self.arith {
            Arith::Tables { log, exp } => {
                let order = self.size - 1;
                exp[((order - log[a as usize]) % order.max(1)) as usize]
            }
            Arith::Clmul { .. } => self.pow(a, self.size as u64 - 2),
        })
    }

    /// x^(q^i). Uses the precomputed x -> x^q table when i = 1.
    #[inline]
    pub fn frobenius(&self, x: u32, i: u32) -> u32 {
        let i = i % self.l;
        if i == 0 || x == 0 {
            return x;
        }
        if i == 1 {
            if let Some(t) = &self.frob_table {
                return t[x as usize];
            }
        }
        self.frobenius_slow(x, i)
    }

    fn frobenius_slow(&self, x: u32, i: u32) -> u32 {
        let i = i % self.l;
        if i == 0 || x == 0 {
            return x;
        }
        match &self.arith {
            Arith::Tables { log, exp } => {
                let order = (self.size - 1) as u64;
                let k = log[x as usize] as u64 * self.frob_log_factor[i as usize] % order;
                exp[k as usize]
            }
            Arith::Clmul { .. } => {
                // i·s successive squarings (p = 2 on this path)
                let mut y = x;
                for _ in 0..i * self.s {
                    y = self.mul(y, y);
                }
                y
            }
        }
    }

    /// Least d ≥ 1 with x^(q^d) = x; always divides L.
    pub fn degree_over_q(&self, x: u32) -> u32 {
        for d in divisors(self.l) {
            if self.frobenius(x, d) == x {
                return d;
            }
        }
        unreachable!("frobenius^L is the identity")
    }

    /// Elements of the intermediate field GF(q^d), sorted by packed value.
    pub fn subfield_elements(&self, d: u32) -> Result<Vec<u32>, FieldError> {
        if d == 0 || self.l % d != 0 {
            return Err(FieldError::NotADivisor { d, l: self.l });
        }
        if d == self.l {
            return Ok((0..self.size).collect());
        }
        let sub_size = self.base_size().pow(d);
        let step = (self.size as u64 - 1) / (sub_size - 1);
        // x is primitive for every modulus this module accepts
        let gen = self.pow(self.generator(), step);
        let mut out = Vec::with_capacity(sub_size as usize);
        out.push(0);
        let mut cur = 1u32;
        for _ in 0..sub_size - 1 {
            out.push(cur);
            cur = self.mul(cur, gen);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// The residue class of t, a generator of the multiplicative group.
    pub fn generator(&self) -> u32 {
        if self.degree == 1 {
            // modulus t - c, so t ≡ c
            self.neg(self.modulus[0])
        } else {
            self.p
        }
    }

    pub fn element(self: &Arc<Self>, repr: u32) -> Result<FieldElement, FieldError> {
        if repr >= self.size {
            return Err(FieldError::OutOfRange { value: repr as u64, size: self.size as u64 });
        }
        Ok(FieldElement { ctx: Arc::clone(self), repr })
    }

    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size).map(move |repr| FieldElement { ctx: Arc::clone(self), repr })
    }
}

/// An element bound to the context that owns it.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldCtx>,
    repr: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({} in ctx {})", self.repr, self.ctx.id)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.id == other.ctx.id && self.repr == other.repr
    }
}
impl Eq for FieldElement {}

impl FieldElement {
    pub fn repr(&self) -> u32 {
        self.repr
    }
    pub fn ctx_id(&self) -> u64 {
        self.ctx.id
    }
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }
    pub fn is_zero(&self) -> bool {
        self.repr == 0
    }

    fn same_ctx(&self, other: &Self) -> Result<(), FieldError> {
        if self.ctx.id == other.ctx.id {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }

    fn with(&self, repr: u32) -> Self {
        FieldElement { ctx: Arc::clone(&self.ctx), repr }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_ctx(other)?;
        Ok(self.with(self.ctx.add(self.repr, other.repr)))
    }
    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_ctx(other)?;
        Ok(self.with(self.ctx.sub(self.repr, other.repr)))
    }
    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_ctx(other)?;
        Ok(self.with(self.ctx.mul(self.repr, other.repr)))
    }
    pub fn neg(&self) -> Self {
        self.with(self.ctx.neg(self.repr))
    }
    pub fn inv(&self) -> Result<Self, FieldError> {
        self.ctx.inv(self.repr).map(|r| self.with(r)).ok_or(FieldError::ZeroInverse)
    }
    pub fn frobenius_q(&self, i: u32) -> Self {
        self.with(self.ctx.frobenius(self.repr, i))
    }
    pub fn degree_over_q(&self) -> u32 {
        self.ctx.degree_over_q(self.repr)
    }
}

/// Positive divisors of n in increasing order.
pub fn divisors(n: u32) -> impl Iterator<Item = u32> {
    (1..=n).filter(move |d| n % d == 0)
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn build_tables(p: u32, degree: u32, size: u32, modulus: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let order = (size - 1) as usize;
    let mut log = vec![0u32; size as usize];
    let mut exp = vec![0u32; 2 * order.max(1)];
    let top_place = (p as u64).pow(degree - 1) as u32;
    let mut cur = 1u32;
    for i in 0..order.max(1) {
        exp[i] = cur;
        log[cur as usize] = i as u32;
        cur = times_t(cur, p, degree, top_place, modulus);
    }
    for i in order..2 * order {
        exp[i] = exp[i - order];
    }
    (log, exp)
}

/// Multiplies a packed residue by t and reduces.
fn times_t(x: u32, p: u32, degree: u32, top_place: u32, modulus: &[u32]) -> u32 {
    if p == 2 {
        let y = (x as u64) << 1;
        let m: u64 = modulus.iter().enumerate().map(|(i, &c)| (c as u64) << i).sum();
        return if y >> degree & 1 == 1 { (y ^ m) as u32 } else { y as u32 };
    }
    let top = x / top_place;
    let shifted = (x % top_place) * p;
    // subtract top * (modulus without its leading term), digit by digit
    let mut out = 0u32;
    let mut place = 1u32;
    let mut rest = shifted;
    for i in 0..degree as usize {
        let digit = rest % p;
        rest /= p;
        let sub = (top as u64 * modulus[i] as u64 % p as u64) as u32;
        out += ((digit + p - sub) % p) * place;
        place = place.wrapping_mul(p);
    }
    out
}

fn gf2_barrett_mu(modulus: u64, n: u32) -> u64 {
    // floor(x^(2n) / m) by long division
    let mut rem: u128 = 1u128 << (2 * n);
    let m = modulus as u128;
    let mut quot = 0u64;
    for shift in (0..=n).rev() {
        if rem >> (n + shift) & 1 == 1 {
            rem ^= m << shift;
            quot |= 1 << shift;
        }
    }
    quot
}

#[inline]
fn clmul_soft(mut a: u64, mut b: u64) -> u64 {
    let mut r = 0u64;
    while b != 0 {
        r ^= a & (b & 1).wrapping_neg();
        a <<= 1;
        b >>= 1;
    }
    r
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq")]
unsafe fn clmul_hw(a: u64, b: u64) -> u64 {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_cvtsi128_si64, _mm_set_epi64x};
    let va = _mm_set_epi64x(0, a as i64);
    let vb = _mm_set_epi64x(0, b as i64);
    _mm_cvtsi128_si64(_mm_clmulepi64_si128(va, vb, 0)) as u64
}

fn detect_clmul() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("pclmulqdq")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// Dense polynomials over GF(p), coefficients lowest degree first.
mod poly {
    use super::prime_factors;

    fn trim(a: &mut Vec<u32>) {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
    }

    fn inv_mod_p(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub(super) fn rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let df = f.len() - 1;
        let lead_inv = inv_mod_p(f[df], p) as u64;
        while r.len() > df && !(r.len() == 1 && r[0] == 0) {
            let dr = r.len() - 1;
            let c = r[dr] as u64 * lead_inv % p as u64;
            if c != 0 {
                for i in 0..=df {
                    let idx = dr - df + i;
                    r[idx] = ((r[idx] as u64 + p as u64 - c * f[i] as u64 % p as u64) % p as u64) as u32;
                }
            }
            r.pop();
            trim(&mut r);
        }
        trim(&mut r);
        r
    }

    fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut out);
        out
    }

    fn mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), f, p)
    }

    fn powmod(base: &[u32], mut e: u128, f: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, f, p);
            }
            b = mulmod(&b, &b, f, p);
            e >>= 1;
        }
        acc
    }

    fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    fn is_zero(a: &[u32]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !is_zero(&y) {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Rabin-style check: x^(p^n) ≡ x mod f, and gcd(x^(p^d) - x, f) = 1 for
    /// every proper divisor d of n.
    pub(super) fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = f.len() - 1;
        if n == 0 || f[n] == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let x = vec![0u32, 1];
        let mut h = x.clone();
        for d in 1..=n {
            h = powmod(&h, p as u128, f, p);
            if d < n && n % d == 0 {
                let g = gcd(&sub(&h, &x, p), f, p);
                if g.len() > 1 {
                    return false;
                }
            }
        }
        sub(&h, &x, p).iter().all(|&c| c == 0)
    }

    pub(super) fn x_is_primitive(f: &[u32], p: u32) -> bool {
        let n = (f.len() - 1) as u32;
        let order = (p as u64).pow(n) - 1;
        if order == 1 {
            return true;
        }
        let x = vec![0u32, 1];
        if powmod(&x, order as u128, f, p) != vec![1] {
            return false;
        }
        prime_factors(order)
            .into_iter()
            .all(|r| powmod(&x, (order / r) as u128, f, p) != vec![1])
    }

    /// First monic primitive polynomial of the given degree in packed order of
    /// its lower coefficients.
    pub(super) fn find_primitive(p: u32, degree: u32) -> Option<Vec<u32>> {
        let count = (p as u64).pow(degree);
        for code in 1..count {
            let mut f: Vec<u32> = Vec::with_capacity(degree as usize + 1);
            let mut c = code;
            for _ in 0..degree {
                f.push((c % p as u64) as u32);
                c /= p as u64;
            }
            f.push(1);
            if f[0] == 0 {
                continue;
            }
            if is_irreducible(&f, p) && x_is_primitive(&f, p) {
                return Some(f);
            }
        }
        None
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FieldCtx::new(4, 1, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(FieldCtx::new(1, 1, 1).unwrap_err(), FieldError::NotPrime(1));
        assert!(matches!(FieldCtx::new(2, 0, 3), Err(FieldError::ZeroDegree { .. })));
        assert!(matches!(FieldCtx::new(2, 5, 5), Err(FieldError::TooLarge { .. })));
        assert!(matches!(FieldCtx::with_max_degree(2, 2, 7, 12), Err(FieldError::TooLarge { .. })));
    }

    #[test]
    fn gf2_and_gf4_by_hand() {
        let f2 = FieldCtx::new(2, 1, 1).unwrap();
        assert_eq!(f2.size(), 2);
        assert_eq!(f2.add(1, 1), 0);
        assert_eq!(f2.mul(1, 1), 1);

        // GF(4) = F2[t]/(t^2 + t + 1), t packs to 2
        let f4 = FieldCtx::new(2, 1, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert_eq!(f4.mul(2, 2), 3);
        assert_eq!(f4.frobenius(2, 1), 3);
        assert_eq!(f4.degree_over_q(2), 2);
        assert_eq!(f4.degree_over_q(1), 1);
        assert_eq!(f4.inv(2), Some(3));
    }

    #[test]
    fn context_shapes() {
        let f = FieldCtx::new(2, 2, 3).unwrap();
        assert_eq!(f.degree(), 6);
        assert_eq!(f.size(), 64);
        assert_eq!(f.base_size(), 4);
        let f128 = FieldCtx::new(2, 1, 7).unwrap();
        assert_eq!(f128.size(), 128);
        // t generates GF(128)* and 7 is prime, so t has degree 7 over GF(2)
        assert_eq!(f128.degree_over_q(f128.generator()), 7);
    }

    #[test]
    fn clmul_path_matches_tables() {
        // GF(2^21): compare Barrett-reduced product against a slow reference
        let f = FieldCtx::new(2, 3, 7).unwrap();
        assert!(matches!(f.arith, Arith::Clmul { .. }));
        let m: u64 = f.modulus().iter().enumerate().map(|(i, &c)| (c as u64) << i).sum();
        let slow = |a: u32, b: u32| -> u32 {
            let mut r = clmul_soft(a as u64, b as u64);
            for bit in (21..42).rev() {
                if r >> bit & 1 == 1 {
                    r ^= m << (bit - 21);
                }
            }
            r as u32
        };
        let mut x = 0x1234u32;
        for i in 0..2000u32 {
            x = x.wrapping_mul(2654435761).wrapping_add(i) & 0x1f_ffff;
            let y = (x.rotate_left(7) ^ 0x9e37) & 0x1f_ffff;
            assert_eq!(f.mul(x, y), slow(x, y));
        }
        let g = f.generator();
        assert_eq!(f.mul(g, f.inv(g).unwrap()), 1);
        assert_eq!(f.frobenius(g, 7), g);
    }

    #[test]
    fn odd_characteristic_fallback() {
        let f9 = FieldCtx::new(3, 1, 2).unwrap();
        assert_eq!(f9.size(), 9);
        for a in 0..9 {
            assert_eq!(f9.add(a, f9.neg(a)), 0);
            if a != 0 {
                assert_eq!(f9.mul(a, f9.inv(a).unwrap()), 1);
            }
            for b in 0..9 {
                assert_eq!(f9.sub(f9.add(a, b), b), a);
            }
        }
        let f5 = FieldCtx::new(5, 1, 1).unwrap();
        assert_eq!(f5.mul(2, 3), 1);
        assert_eq!(f5.add(4, 3), 2);
    }

    #[test]
    fn checked_elements_reject_mixed_contexts() {
        let a = make_field(2, 1, 3).unwrap();
        let b = make_field(2, 1, 3).unwrap();
        let x = a.element(3).unwrap();
        let y = b.element(3).unwrap();
        assert_eq!(x.add(&y).unwrap_err(), FieldError::ContextMismatch);
        assert_eq!(x.mul(&y).unwrap_err(), FieldError::ContextMismatch);
        assert_eq!(a.element(0).unwrap().inv().unwrap_err(), FieldError::ZeroInverse);
        assert!(matches!(a.element(8), Err(FieldError::OutOfRange { .. })));
        let z = a.element(5).unwrap();
        assert_eq!(x.mul(&z).unwrap().repr(), a.mul(3, 5));
    }

    #[test]
    fn subfields() {
        let f = FieldCtx::new(2, 1, 12).unwrap();
        for d in divisors(12) {
            let sub = f.subfield_elements(d).unwrap();
            assert_eq!(sub.len() as u64, 2u64.pow(d));
            assert!(sub.iter().all(|&x| f.frobenius(x, d) == x));
            assert!(sub.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(matches!(f.subfield_elements(5), Err(FieldError::NotADivisor { .. })));
    }
}

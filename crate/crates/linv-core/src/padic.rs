//! Arithmetic in an unramified extension K of Q_p at capped precision.
//!
//! Elements are stored floating-style: a valuation shift, an absolute
//! precision, and a unit part given by a coefficient vector over Z/p^rel in
//! a fixed polynomial generator g of the degree-d extension.  The working
//! precision N caps the relative precision of every element, so negative
//! valuations (which appear through the |.|^((w-2)/2) twists) stay exact.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Absolute precision used for exact zero.
pub const INF_PREC: i64 = i64::MAX / 4;

/// Immutable description of the scalar field: p, degree d, working
/// precision N and the defining polynomial of the unramified extension.
#[derive(Debug, Clone)]
pub struct PadicContext {
    p: BigUint,
    d: u32,
    n: i64,
    /// Lower coefficients m_0..m_{d-1} of the monic modulus g^d + sum m_i g^i,
    /// reduced mod p^N.  Unused (empty) when d = 1.
    modulus: Vec<BigUint>,
    /// Cached powers p^0..p^N.
    pows: Vec<BigUint>,
    /// Coefficient vector of sigma(g), the Frobenius image of the generator,
    /// mod p^N.  Identity (empty) when d = 1.
    frob_g: Vec<BigUint>,
}

/// An element of K, value p^shift * (unit part) known modulo p^prec.
/// Invariants: coeffs.len() == d; coeffs reduced mod p^(prec-shift); either
/// some coefficient is a unit mod p, or all are zero and shift == prec
/// (a zero known only to precision prec; exact zero has prec = INF_PREC).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PadicElement {
    shift: i64,
    prec: i64,
    coeffs: Vec<BigUint>,
}

impl PadicElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Valuation; for a zero this is a lower bound (its precision).
    pub fn valuation(&self) -> i64 {
        self.shift
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Unit-part coefficient vector (reduced mod p^(prec-shift)).
    pub fn unit_coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }
}

impl PadicContext {
    /// Build a context.  For d > 1 a defining polynomial is found by brute
    /// force (irreducible monic of degree d over F_p) and the Frobenius image
    /// of the generator is Newton-lifted once and cached.
    pub fn new(p: u64, d: u32, n: u32) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::Invalid("need d >= 1 and N >= 1".into()));
        }
        if p < 2 || !is_prime_u64(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        let pb = BigUint::from(p);
        let mut pows = Vec::with_capacity(n as usize + 1);
        let mut acc = BigUint::one();
        for _ in 0..=n {
            pows.push(acc.clone());
            acc *= &pb;
        }
        let mut ctx = PadicContext {
            p: pb,
            d,
            n: n as i64,
            modulus: Vec::new(),
            pows,
            frob_g: Vec::new(),
        };
        if d > 1 {
            ctx.modulus = find_irreducible(p, d)?;
            ctx.frob_g = ctx.lift_frobenius_generator()?;
        }
        Ok(ctx)
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn precision_cap(&self) -> i64 {
        self.n
    }

    /// Residue cardinality q = p^d as a BigUint.
    pub fn q(&self) -> BigUint {
        num_traits::pow::pow(self.p.clone(), self.d as usize)
    }

    pub fn ppow(&self, k: i64) -> BigUint {
        assert!(k >= 0, "ppow of negative exponent");
        if (k as usize) < self.pows.len() {
            self.pows[k as usize].clone()
        } else {
            num_traits::pow::pow(self.p.clone(), k as usize)
        }
    }

    // ---- constructors ----

    pub fn zero(&self) -> PadicElement {
        PadicElement {
            shift: INF_PREC,
            prec: INF_PREC,
            coeffs: vec![BigUint::zero(); self.d as usize],
        }
    }

    pub fn one(&self) -> PadicElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> PadicElement {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> PadicElement {
        let mut coeffs = vec![BigUint::zero(); self.d as usize];
        // Reduce into [0, p^(2N)) so the unit part survives the cap.
        let modulus = num_traits::pow::pow(self.p.clone(), 2 * self.n as usize);
        let m = BigInt::from_biguint(Sign::Plus, modulus);
        let mut r = v % &m;
        if r.is_negative() {
            r += &m;
        }
        coeffs[0] = r.to_biguint().unwrap();
        self.normalize(0, 2 * self.n, coeffs)
    }

    /// a/b as an element at full working precision.
    pub fn from_ratio(&self, a: i64, b: i64) -> Result<PadicElement> {
        self.div(&self.from_i64(a), &self.from_i64(b))
    }

    /// Element from unit-part coefficients (integers) and a shift.
    pub fn from_coeffs(&self, coeffs: &[i64], shift: i64) -> PadicElement {
        assert!(coeffs.len() <= self.d as usize);
        let m = BigInt::from_biguint(Sign::Plus, self.ppow(self.n));
        let cs: Vec<BigUint> = (0..self.d as usize)
            .map(|i| {
                let v = BigInt::from(*coeffs.get(i).unwrap_or(&0));
                let mut r = v % &m;
                if r.is_negative() {
                    r += &m;
                }
                r.to_biguint().unwrap()
            })
            .collect();
        self.normalize(shift, shift + self.n, cs)
    }

    /// Element from a shift and unit-part BigUint coefficients, treated as
    /// exact up to the precision cap.
    pub fn from_biguint_coeffs(&self, shift: i64, coeffs: Vec<BigUint>) -> PadicElement {
        assert_eq!(coeffs.len(), self.d as usize);
        self.normalize(shift, shift.saturating_add(2 * self.n), coeffs)
    }

    /// Canonical form: reduce mod p^(prec-shift), factor p-powers out of the
    /// coefficient vector into the shift, cap relative precision at N.
    fn normalize(&self, shift: i64, prec: i64, mut coeffs: Vec<BigUint>) -> PadicElement {
        let mut shift = shift;
        if prec <= shift {
            return self.zero_at(prec);
        }
        let rel = prec - shift;
        let m = self.ppow(rel);
        for c in coeffs.iter_mut() {
            *c %= &m;
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            return self.zero_at(prec);
        }
        // Factor out the content p^v.
        let mut v = 0i64;
        'outer: while v < rel {
            for c in coeffs.iter() {
                if !(c % &self.p).is_zero() {
                    break 'outer;
                }
            }
            for c in coeffs.iter_mut() {
                *c /= &self.p;
            }
            v += 1;
        }
        shift += v;
        // Cap relative precision at N.
        let prec = prec.min(shift.saturating_add(self.n));
        let m2 = self.ppow(prec - shift);
        for c in coeffs.iter_mut() {
            *c %= &m2;
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            return self.zero_at(prec);
        }
        PadicElement {
            shift,
            prec,
            coeffs,
        }
    }

    // ---- ring operations ----

    pub fn add(&self, a: &PadicElement, b: &PadicElement) -> PadicElement {
        let shift = a.shift.min(b.shift);
        let prec = a.prec.min(b.prec);
        if shift >= prec {
            return self.zero_at(prec);
        }
        let rel = prec - shift;
        let m = self.ppow(rel);
        let mut coeffs = vec![BigUint::zero(); self.d as usize];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let mut s = BigUint::zero();
            if !a.is_zero() {
                s += &a.coeffs[i] * self.ppow(a.shift - shift);
            }
            if !b.is_zero() {
                s += &b.coeffs[i] * self.ppow(b.shift - shift);
            }
            *c = s % &m;
        }
        self.normalize(shift, prec, coeffs)
    }

    pub fn neg(&self, a: &PadicElement) -> PadicElement {
        if a.is_zero() {
            return a.clone();
        }
        let m = self.ppow(a.prec - a.shift);
        let coeffs = a
            .coeffs
            .iter()
            .map(|c| if c.is_zero() { c.clone() } else { &m - c })
            .collect();
        PadicElement {
            shift: a.shift,
            prec: a.prec,
            coeffs,
        }
    }

    pub fn sub(&self, a: &PadicElement, b: &PadicElement) -> PadicElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &PadicElement, b: &PadicElement) -> PadicElement {
        if a.is_zero() || b.is_zero() {
            let prec = if a.is_zero() {
                a.prec.saturating_add(if b.is_zero() { b.prec } else { b.shift })
            } else {
                b.prec.saturating_add(a.shift)
            };
            return self.zero_at(prec.min(INF_PREC));
        }
        let rel = (a.prec - a.shift).min(b.prec - b.shift);
        let m = self.ppow(rel);
        let prod = self.poly_mul(&a.coeffs, &b.coeffs, &m);
        self.normalize(a.shift + b.shift, a.shift + b.shift + rel, prod)
    }

    pub fn inv(&self, a: &PadicElement) -> Result<PadicElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let rel = a.prec - a.shift;
        let inv_unit = self.poly_inv(&a.coeffs, rel)?;
        Ok(self.normalize(-a.shift, -a.shift + rel, inv_unit))
    }

    pub fn div(&self, a: &PadicElement, b: &PadicElement) -> Result<PadicElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &PadicElement, e: i64) -> Result<PadicElement> {
        if e < 0 {
            return self.pow(&self.inv(a)?, -e);
        }
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiply by p^k (exact).
    pub fn shift_by(&self, a: &PadicElement, k: i64) -> PadicElement {
        let mut r = a.clone();
        r.shift = r.shift.saturating_add(k).min(INF_PREC);
        r.prec = r.prec.saturating_add(k).min(INF_PREC);
        r
    }

    /// Forget digits beyond absolute precision `prec`.
    pub fn truncate(&self, a: &PadicElement, prec: i64) -> PadicElement {
        if prec >= a.prec {
            return a.clone();
        }
        self.normalize(a.shift, prec, a.coeffs.clone())
    }

    pub fn zero_at(&self, prec: i64) -> PadicElement {
        PadicElement {
            shift: prec,
            prec,
            coeffs: vec![BigUint::zero(); self.d as usize],
        }
    }

    /// Valuation of a - b, capped at the joint precision.  Equal elements
    /// return the joint precision (or INF_PREC when both exact).
    pub fn agree_valuation(&self, a: &PadicElement, b: &PadicElement) -> i64 {
        let d = self.sub(a, b);
        d.shift
    }

    // ---- Galois / Teichmuller / logarithm ----

    /// Frobenius sigma^k (arithmetic Frobenius x -> x^p on the residue field,
    /// lifted); identity for d = 1.
    pub fn frobenius(&self, a: &PadicElement, k: u32) -> PadicElement {
        let k = k % self.d;
        if k == 0 || self.d == 1 || a.is_zero() {
            return a.clone();
        }
        let rel = a.prec - a.shift;
        let m = self.ppow(rel);
        // sigma^k(g) by iterating the cached sigma(g).
        let mut img: Vec<BigUint> = self.frob_g.clone();
        for c in img.iter_mut() {
            *c %= &m;
        }
        for _ in 1..k {
            img = self.poly_subst(&self.frob_g, &img, &m);
        }
        let out = self.poly_subst(&a.coeffs, &img, &m);
        self.normalize(a.shift, a.prec, out)
    }

    /// The Teichmuller lift: the (q-1)-th root of unity congruent to the
    /// unit part of x mod p, computed as the limit of x^(q^n).  Requires a
    /// unit (valuation 0).
    pub fn teichmuller(&self, x: &PadicElement) -> Result<PadicElement> {
        if x.is_zero() || x.shift != 0 {
            return Err(Error::Invalid("teichmuller needs a unit".into()));
        }
        let rel = self.n;
        let m = self.ppow(rel);
        let mut w: Vec<BigUint> = x.coeffs.iter().map(|c| c % &m).collect();
        let q = self.q();
        for _ in 0..rel {
            w = self.poly_pow(&w, &q, &m);
        }
        Ok(self.normalize(0, rel, w))
    }

    /// Iwasawa-branch logarithm: writing x = p^v * omega * u with u a
    /// 1-unit, returns log(u); so log(p) = 0 and log of roots of unity is 0.
    pub fn iwasawa_log(&self, x: &PadicElement) -> Result<PadicElement> {
        if x.is_zero() {
            return Err(Error::Invalid("log of zero".into()));
        }
        let unit = PadicElement {
            shift: 0,
            prec: x.prec - x.shift,
            coeffs: x.coeffs.clone(),
        };
        let w = self.teichmuller(&unit)?;
        let u = self.div(&unit, &w)?;
        let t = self.sub(&u, &self.one());
        if t.is_zero() {
            return Ok(self.zero_at(t.prec));
        }
        debug_assert!(t.shift >= 1, "1-unit expected after Teichmuller split");
        // log(1+t) = sum (-1)^(n+1) t^n / n.
        let mut sum = self.zero();
        let mut tp = t.clone();
        let mut n: i64 = 1;
        loop {
            let term = self.div(&tp, &self.from_i64(n))?;
            sum = if n % 2 == 1 {
                self.add(&sum, &term)
            } else {
                self.sub(&sum, &term)
            };
            tp = self.mul(&tp, &t);
            if tp.is_zero() {
                break;
            }
            n += 1;
            if n > 4 * self.n {
                break;
            }
        }
        Ok(sum)
    }

    /// Square root of a unit square by digit lifting (odd p).
    pub fn sqrt(&self, x: &PadicElement) -> Result<PadicElement> {
        if x.is_zero() {
            return Ok(self.zero_at((x.prec + 1) / 2));
        }
        if self.p == BigUint::from(2u32) {
            return Err(Error::Invalid("sqrt not implemented for p = 2".into()));
        }
        if x.shift % 2 != 0 {
            return Err(Error::Invalid("sqrt of odd-valuation element".into()));
        }
        let unit = PadicElement {
            shift: 0,
            prec: x.prec - x.shift,
            coeffs: x.coeffs.clone(),
        };
        // Find a square root mod p by scanning the residue field, then lift
        // by Newton: y <- (y + u/y)/2.
        let mut start = None;
        for r in self.residue_digits() {
            let diff = self.sub(&self.mul(&r, &r), &unit);
            if diff.is_zero() || diff.shift >= 1 {
                if !r.is_zero() {
                    start = Some(r);
                    break;
                }
            }
        }
        let mut y = start.ok_or_else(|| Error::Invalid("not a square".into()))?;
        let two_inv = self.inv(&self.from_i64(2))?;
        for _ in 0..64 {
            let next = self.mul(&self.add(&y, &self.div(&unit, &y)?), &two_inv);
            if self.agree_valuation(&next, &y) >= unit.prec {
                y = next;
                break;
            }
            y = next;
        }
        Ok(self.shift_by(&self.truncate(&y, unit.prec), x.shift / 2))
    }

    /// The p^d residue-system digits: all coefficient vectors with entries in
    /// [0, p), as exact elements.  Index 0 is zero.
    pub fn residue_digits(&self) -> Vec<PadicElement> {
        let p = self.p.to_u64().expect("desk-scale p");
        let count = p.pow(self.d);
        let mut out = Vec::with_capacity(count as usize);
        for idx in 0..count {
            let mut rem = idx;
            let mut cs = vec![0i64; self.d as usize];
            for c in cs.iter_mut() {
                *c = (rem % p) as i64;
                rem /= p;
            }
            out.push(self.from_coeffs(&cs, 0));
        }
        out
    }

    // ---- serialization ----

    /// Canonical text form `p^v * (c_0 + c_1*g + ...) + O(p^N)`.
    pub fn to_text(&self, a: &PadicElement) -> String {
        if a.prec >= INF_PREC && a.is_zero() {
            return "0".to_string();
        }
        if a.is_zero() {
            return format!("0 + O({}^{})", self.p, a.prec);
        }
        let body = a
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*g"),
                _ => format!("{c}*g^{i}"),
            })
            .collect::<Vec<_>>()
            .join(" + ");
        format!("{}^{} * ({}) + O({}^{})", self.p, a.shift, body, self.p, a.prec)
    }

    /// Parse the canonical form, plain (signed) integers, and a/b rationals.
    pub fn parse(&self, s: &str) -> Result<PadicElement> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad rational: {s}")))?;
            let d: i64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad rational: {s}")))?;
            return self.from_ratio(n, d);
        }
        if let Ok(v) = s.parse::<i64>() {
            return Ok(self.from_i64(v));
        }
        if s == "0" {
            return Ok(self.zero());
        }
        // Canonical form.
        let (main, prec_part) = s
            .split_once("+ O(")
            .ok_or_else(|| Error::Invalid(format!("unparseable element: {s}")))?;
        let prec_part = prec_part.trim().trim_end_matches(')');
        let prec: i64 = prec_part
            .split('^')
            .nth(1)
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::Invalid(format!("bad precision tag: {s}")))?;
        let main = main.trim();
        if main == "0" {
            return Ok(self.zero_at(prec));
        }
        let (ppow_str, body) = main
            .split_once('*')
            .ok_or_else(|| Error::Invalid(format!("unparseable element: {s}")))?;
        let shift: i64 = ppow_str
            .trim()
            .split('^')
            .nth(1)
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::Invalid(format!("bad p-power: {s}")))?;
        let body = body.trim().trim_start_matches('(').trim_end_matches(')');
        let mut coeffs = vec![BigUint::zero(); self.d as usize];
        for term in body.split('+') {
            let term = term.trim();
            let (cstr, idx) = if let Some((c, gpow)) = term.split_once("*g") {
                let i = if gpow.is_empty() {
                    1
                } else {
                    gpow.trim_start_matches('^')
                        .parse::<usize>()
                        .map_err(|_| Error::Invalid(format!("bad term {term}")))?
                };
                (c.trim(), i)
            } else {
                (term, 0)
            };
            if idx >= coeffs.len() {
                return Err(Error::Invalid(format!("degree too large in {s}")));
            }
            coeffs[idx] = cstr
                .parse::<BigUint>()
                .map_err(|_| Error::Invalid(format!("bad coefficient {cstr}")))?;
        }
        Ok(self.normalize(shift, prec, coeffs))
    }

    // ---- internal polynomial arithmetic mod (modulus, p^rel) ----

    fn poly_mul(&self, a: &[BigUint], b: &[BigUint], m: &BigUint) -> Vec<BigUint> {
        let d = self.d as usize;
        if d == 1 {
            return vec![(&a[0] * &b[0]) % m];
        }
        let mut full = vec![BigUint::zero(); 2 * d - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                full[i + j] += ai * bj;
            }
        }
        self.poly_reduce(full, m)
    }

    /// Reduce a degree < 2d-1 polynomial by the monic modulus, then mod m.
    fn poly_reduce(&self, mut full: Vec<BigUint>, m: &BigUint) -> Vec<BigUint> {
        let d = self.d as usize;
        // g^d = -sum m_i g^i; coefficients of modulus are stored positively,
        // so substitute g^d -> sum (p^N - m_i) g^i ... work over BigInt-free
        // arithmetic by using the complement mod m.
        let neg: Vec<BigUint> = self
            .modulus
            .iter()
            .map(|c| {
                let c = c % m;
                if c.is_zero() {
                    c
                } else {
                    m - c
                }
            })
            .collect();
        for i in (d..full.len()).rev() {
            let top = core::mem::replace(&mut full[i], BigUint::zero()) % m;
            if top.is_zero() {
                continue;
            }
            for (j, nj) in neg.iter().enumerate() {
                full[i - d + j] += &top * nj;
            }
        }
        full.truncate(d);
        for c in full.iter_mut() {
            *c %= m;
        }
        full
    }

    fn poly_pow(&self, a: &[BigUint], e: &BigUint, m: &BigUint) -> Vec<BigUint> {
        let d = self.d as usize;
        let mut acc = vec![BigUint::zero(); d];
        acc[0] = BigUint::one();
        let mut base = a.to_vec();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = self.poly_mul(&acc, &base, m);
            }
            if i + 1 < bits {
                base = self.poly_mul(&base, &base, m);
            }
        }
        acc
    }

    /// Substitute x into the polynomial with coefficient vector a (Horner).
    fn poly_subst(&self, a: &[BigUint], x: &[BigUint], m: &BigUint) -> Vec<BigUint> {
        let d = self.d as usize;
        let mut acc = vec![BigUint::zero(); d];
        for c in a.iter().rev() {
            acc = self.poly_mul(&acc, x, m);
            acc[0] = (&acc[0] + c) % m;
        }
        acc
    }

    /// Inverse of a unit coefficient vector mod p^rel: invert mod p by
    /// Fermat in F_q, then Newton-lift.
    fn poly_inv(&self, a: &[BigUint], rel: i64) -> Result<Vec<BigUint>> {
        let m = self.ppow(rel);
        let a: Vec<BigUint> = a.iter().map(|c| c % &m).collect();
        // y0 = a^(q-2) mod p.
        let q = self.q();
        let y0 = self.poly_pow(
            &a.iter().map(|c| c % &self.p).collect::<Vec<_>>(),
            &(&q - 2u32),
            &self.p.clone(),
        );
        let check = self.poly_mul(&a, &y0, &self.p.clone());
        if !(check[0] == BigUint::one() && check.iter().skip(1).all(|c| c.is_zero())) {
            return Err(Error::DivisionByZero);
        }
        let mut y = y0;
        let mut known: i64 = 1;
        while known < rel {
            known = (2 * known).min(rel);
            let mk = self.ppow(known);
            // y <- y * (2 - a y).
            let ay = self.poly_mul(&a, &y, &mk);
            let mut corr: Vec<BigUint> = ay.iter().map(|c| (&mk - (c % &mk)) % &mk).collect();
            corr[0] = (&corr[0] + 2u32) % &mk;
            y = self.poly_mul(&y, &corr, &mk);
        }
        Ok(y)
    }

    /// Newton-lift the Frobenius image of the generator: the root of the
    /// modulus congruent to g^p mod p.
    fn lift_frobenius_generator(&self) -> Result<Vec<BigUint>> {
        let d = self.d as usize;
        let m = self.ppow(self.n);
        // Full modulus coefficients, monic.
        let mut f: Vec<BigUint> = self.modulus.clone();
        f.push(BigUint::one());
        let fp: Vec<BigUint> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| (c * BigUint::from(i)) % &m)
            .collect();
        let mut g = vec![BigUint::zero(); d];
        if d >= 2 {
            g[1] = BigUint::one();
        }
        let mut r = self.poly_pow(&g, &self.p.clone(), &self.p.clone());
        let mut known: i64 = 1;
        while known < self.n {
            known = (2 * known).min(self.n);
            let mk = self.ppow(known);
            let fr = self.poly_subst(&f, &r, &mk);
            let fpr = self.poly_subst(&fp, &r, &mk);
            let fpr_inv = self.poly_inv_raw(&fpr, known)?;
            let delta = self.poly_mul(&fr, &fpr_inv, &mk);
            for (ri, di) in r.iter_mut().zip(delta.iter()) {
                let di = di % &mk;
                let sub = if di.is_zero() { di } else { &mk - di };
                *ri = (&*ri + sub) % &mk;
            }
        }
        Ok(r)
    }

    /// poly_inv without the q-power shortcut being confused mid-construction.
    fn poly_inv_raw(&self, a: &[BigUint], rel: i64) -> Result<Vec<BigUint>> {
        self.poly_inv(a, rel)
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// Brute-force search for a monic irreducible polynomial of degree d over
/// F_p, returned as its lower coefficients.  Desk-scale d only.
fn find_irreducible(p: u64, d: u32) -> Result<Vec<BigUint>> {
    let d = d as usize;
    let mut lower = vec![0u64; d];
    loop {
        if is_irreducible_mod_p(p, &lower) {
            return Ok(lower.iter().map(|&c| BigUint::from(c)).collect());
        }
        // Increment the coefficient vector as a base-p counter.
        let mut i = 0;
        loop {
            if i == d {
                return Err(Error::Invalid("no irreducible polynomial found".into()));
            }
            lower[i] += 1;
            if lower[i] < p {
                break;
            }
            lower[i] = 0;
            i += 1;
        }
    }
}

/// Irreducibility over F_p: x^(p^d) = x mod f and x^(p^(d/l)) != x for
/// prime divisors l of d.
fn is_irreducible_mod_p(p: u64, lower: &[u64]) -> bool {
    let d = lower.len() as u32;
    let xq = |e: u32| -> Vec<u64> {
        // x^(p^e) mod (f, p) by repeated p-th powering.
        let mut r = vec![0u64, 1];
        r.resize(d as usize, 0);
        for _ in 0..e {
            r = fp_poly_pow(p, &r, p, lower);
        }
        r
    };
    let x_id: Vec<u64> = {
        let mut v = vec![0u64, 1];
        v.resize(d as usize, 0);
        v
    };
    if xq(d) != x_id {
        return false;
    }
    let mut m = d;
    let mut l = 2;
    while l * l <= d {
        if m % l == 0 {
            if xq(d / l) == x_id {
                return false;
            }
            while m % l == 0 {
                m /= l;
            }
        }
        l += 1;
    }
    if m > 1 && m < d && xq(d / m) == x_id {
        return false;
    }
    if d > 1 && m == d && xq(1) == x_id {
        return false;
    }
    true
}

fn fp_poly_mul(p: u64, a: &[u64], b: &[u64], lower: &[u64]) -> Vec<u64> {
    let d = lower.len();
    let mut full = vec![0u128; 2 * d - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            full[i + j] = (full[i + j] + ai as u128 * bj as u128) % p as u128;
        }
    }
    for i in (d..full.len()).rev() {
        let top = full[i];
        full[i] = 0;
        if top == 0 {
            continue;
        }
        for (j, &mj) in lower.iter().enumerate() {
            let neg = (p as u128 - mj as u128 % p as u128) % p as u128;
            full[i - d + j] = (full[i - d + j] + top * neg) % p as u128;
        }
    }
    full.truncate(d);
    full.iter().map(|&c| c as u64).collect()
}

fn fp_poly_pow(p: u64, a: &[u64], e: u64, lower: &[u64]) -> Vec<u64> {
    let d = lower.len();
    let mut acc = vec![0u64; d];
    acc[0] = 1;
    let mut base = a.to_vec();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_poly_mul(p, &acc, &base, lower);
        }
        base = fp_poly_mul(p, &base, &base, lower);
        e >>= 1;
    }
    acc
}

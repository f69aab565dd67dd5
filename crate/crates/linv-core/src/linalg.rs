//! Exact linear algebra over the p-adic scalars.
//!
//! Everything is dense and desk-scale.  Gaussian elimination pivots on the
//! entry of minimal valuation; entries at or above a caller-supplied
//! valuation threshold (working precision minus guard digits) count as zero.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::padic::{PadicContext, PadicElement};
use crate::{Error, Result};

/// A 2x2 matrix over K, the workhorse for tree and group computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub a: PadicElement,
    pub b: PadicElement,
    pub c: PadicElement,
    pub d: PadicElement,
}

impl Mat2 {
    pub fn new(a: PadicElement, b: PadicElement, c: PadicElement, d: PadicElement) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_i64(ctx: &PadicContext, m: [[i64; 2]; 2]) -> Self {
        Mat2 {
            a: ctx.from_i64(m[0][0]),
            b: ctx.from_i64(m[0][1]),
            c: ctx.from_i64(m[1][0]),
            d: ctx.from_i64(m[1][1]),
        }
    }

    pub fn identity(ctx: &PadicContext) -> Self {
        Mat2::from_i64(ctx, [[1, 0], [0, 1]])
    }

    pub fn mul(&self, ctx: &PadicContext, o: &Mat2) -> Mat2 {
        Mat2 {
            a: ctx.add(&ctx.mul(&self.a, &o.a), &ctx.mul(&self.b, &o.c)),
            b: ctx.add(&ctx.mul(&self.a, &o.b), &ctx.mul(&self.b, &o.d)),
            c: ctx.add(&ctx.mul(&self.c, &o.a), &ctx.mul(&self.d, &o.c)),
            d: ctx.add(&ctx.mul(&self.c, &o.b), &ctx.mul(&self.d, &o.d)),
        }
    }

    pub fn det(&self, ctx: &PadicContext) -> PadicElement {
        ctx.sub(&ctx.mul(&self.a, &self.d), &ctx.mul(&self.b, &self.c))
    }

    pub fn inv(&self, ctx: &PadicContext) -> Result<Mat2> {
        let det = self.det(ctx);
        if det.is_zero() {
            return Err(Error::Invalid("singular 2x2 matrix".into()));
        }
        let di = ctx.inv(&det)?;
        Ok(Mat2 {
            a: ctx.mul(&self.d, &di),
            b: ctx.neg(&ctx.mul(&self.b, &di)),
            c: ctx.neg(&ctx.mul(&self.c, &di)),
            d: ctx.mul(&self.a, &di),
        })
    }

    /// Moebius action on a finite point; returns None when the image is
    /// infinity at working precision.
    pub fn mobius(&self, ctx: &PadicContext, t: &PadicElement) -> Option<PadicElement> {
        let num = ctx.add(&ctx.mul(&self.a, t), &self.b);
        let den = ctx.add(&ctx.mul(&self.c, t), &self.d);
        if den.is_zero() {
            return None;
        }
        Some(ctx.div(&num, &den).ok()?)
    }

    /// Moebius image of infinity (a/c), None if c = 0.
    pub fn mobius_infinity(&self, ctx: &PadicContext) -> Option<PadicElement> {
        if self.c.is_zero() {
            return None;
        }
        ctx.div(&self.a, &self.c).ok()
    }
}

fn negligible(x: &PadicElement, threshold: i64) -> bool {
    x.is_zero() || x.valuation() >= threshold
}

/// Reduced row echelon form in place.  Returns the pivot column of each
/// pivot row in order.  `threshold` is the zero cutoff valuation.
pub fn rref(
    ctx: &PadicContext,
    m: &mut [Vec<PadicElement>],
    threshold: i64,
) -> Result<Vec<usize>> {
    let rows = m.len();
    if rows == 0 {
        return Ok(Vec::new());
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for col in 0..cols {
        // Minimal-valuation pivot in column col at rows >= r.
        let mut best: Option<(usize, i64)> = None;
        for i in r..rows {
            let x = &m[i][col];
            if negligible(x, threshold) {
                continue;
            }
            let v = x.valuation();
            if best.map_or(true, |(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
        let Some((pi, _)) = best else { continue };
        m.swap(r, pi);
        let inv = ctx.inv(&m[r][col])?;
        for j in col..cols {
            m[r][j] = ctx.mul(&m[r][j], &inv);
        }
        for i in 0..rows {
            if i == r || negligible(&m[i][col], threshold) {
                continue;
            }
            let factor = m[i][col].clone();
            for j in col..cols {
                let t = ctx.mul(&factor, &m[r][j]);
                m[i][j] = ctx.sub(&m[i][j], &t);
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    Ok(pivots)
}

pub fn rank(ctx: &PadicContext, m: &[Vec<PadicElement>], threshold: i64) -> Result<usize> {
    let mut work: Vec<Vec<PadicElement>> = m.to_vec();
    Ok(rref(ctx, &mut work, threshold)?.len())
}

/// Basis of the right nullspace of m.
pub fn nullspace(
    ctx: &PadicContext,
    m: &[Vec<PadicElement>],
    threshold: i64,
) -> Result<Vec<Vec<PadicElement>>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let cols = m[0].len();
    let mut work: Vec<Vec<PadicElement>> = m.to_vec();
    let pivots = rref(ctx, &mut work, threshold)?;
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![ctx.zero(); cols];
        v[free] = ctx.one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = ctx.neg(&work[row][free]);
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Solve m x = b.  Returns the solution (free variables zero) and the
/// valuation of the residual m x - b, or None when inconsistent beyond the
/// threshold.
pub fn solve(
    ctx: &PadicContext,
    m: &[Vec<PadicElement>],
    b: &[PadicElement],
    threshold: i64,
) -> Result<Option<(Vec<PadicElement>, i64)>> {
    let rows = m.len();
    if rows != b.len() {
        return Err(Error::Invalid(format!(
            "solve: {rows} rows vs {} rhs entries",
            b.len()
        )));
    }
    if rows == 0 {
        return Ok(Some((Vec::new(), crate::padic::INF_PREC)));
    }
    let cols = m[0].len();
    let mut work: Vec<Vec<PadicElement>> = m
        .iter()
        .zip(b.iter())
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(ctx, &mut work, threshold)?;
    if pivots.last().is_some_and(|&c| c == cols) {
        // Pivot in the augmented column: inconsistent.
        return Ok(None);
    }
    let mut x = vec![ctx.zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = work[row][cols].clone();
    }
    // Residual check against the original system.
    let mut res_val = crate::padic::INF_PREC;
    for (row, bi) in m.iter().zip(b.iter()) {
        let mut acc = ctx.zero();
        for (mij, xj) in row.iter().zip(x.iter()) {
            acc = ctx.add(&acc, &ctx.mul(mij, xj));
        }
        let r = ctx.sub(&acc, bi);
        res_val = res_val.min(r.valuation());
    }
    if res_val < threshold {
        return Ok(None);
    }
    Ok(Some((x, res_val)))
}

/// Matrix-vector product.
pub fn mat_vec(
    ctx: &PadicContext,
    m: &[Vec<PadicElement>],
    x: &[PadicElement],
) -> Vec<PadicElement> {
    m.iter()
        .map(|row| {
            let mut acc = ctx.zero();
            for (a, b) in row.iter().zip(x.iter()) {
                acc = ctx.add(&acc, &ctx.mul(a, b));
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PadicContext {
        PadicContext::new(5, 1, 12).unwrap()
    }

    #[test]
    fn mat2_inverse() {
        let c = ctx();
        let m = Mat2::from_i64(&c, [[2, 1], [5, 3]]);
        let mi = m.inv(&c).unwrap();
        let prod = m.mul(&c, &mi);
        assert_eq!(c.agree_valuation(&prod.a, &c.one()), prod.a.precision());
        assert!(prod.b.is_zero() || prod.b.valuation() >= 10);
    }

    #[test]
    fn solve_and_nullspace() {
        let c = ctx();
        let thr = 10;
        // x + y = 3, x - y = 1 -> x = 2, y = 1.
        let m = vec![
            vec![c.one(), c.one()],
            vec![c.one(), c.from_i64(-1)],
        ];
        let b = vec![c.from_i64(3), c.one()];
        let (x, rv) = solve(&c, &m, &b, thr).unwrap().unwrap();
        assert!(c.agree_valuation(&x[0], &c.from_i64(2)) >= thr);
        assert!(c.agree_valuation(&x[1], &c.one()) >= thr);
        assert!(rv >= thr);
        // Singular system with consistent rhs has a 1-dim nullspace.
        let m2 = vec![
            vec![c.one(), c.from_i64(2)],
            vec![c.from_i64(2), c.from_i64(4)],
        ];
        let ns = nullspace(&c, &m2, thr).unwrap();
        assert_eq!(ns.len(), 1);
        let img = mat_vec(&c, &m2, &ns[0]);
        assert!(img.iter().all(|e| e.is_zero() || e.valuation() >= thr));
        // Inconsistent system detected.
        let b2 = vec![c.one(), c.from_i64(3)];
        assert!(solve(&c, &m2, &b2, thr).unwrap().is_none());
    }

    #[test]
    fn pivoting_handles_mixed_valuations() {
        let c = ctx();
        let thr = 8;
        // First row has higher valuation; pivoting must pick row 2.
        let m = vec![
            vec![c.from_i64(25), c.one()],
            vec![c.one(), c.zero()],
        ];
        let b = vec![c.from_i64(26), c.one()];
        let (x, _) = solve(&c, &m, &b, thr).unwrap().unwrap();
        assert!(c.agree_valuation(&x[0], &c.one()) >= thr);
        assert!(c.agree_valuation(&x[1], &c.one()) >= thr);
    }
}

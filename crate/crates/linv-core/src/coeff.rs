//! Coefficient modules V(k, v): tensor products over the embeddings
//! sigma: F -> L of the degree-(k_sigma - 2) homogeneous polynomial modules,
//! with the determinant-twisted left GL(2, F) action, the norm-twisted
//! star action, dual vectors with the adjoint right action, the monomial
//! pairing, and the semilinear operator phi_{q,k,v}.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Mat2;
use crate::padic::{PadicContext, PadicElement};
use crate::{Error, Result};

/// Multiweight (k_1..k_g; w), stored in the (k, v) form with
/// v_i = (w - k_i)/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightData {
    k: Vec<u32>,
    v: Vec<i64>,
}

impl WeightData {
    pub fn from_kw(k: &[u32], w: i64) -> Result<WeightData> {
        let mut v = Vec::with_capacity(k.len());
        for &ki in k {
            if ki < 2 {
                return Err(Error::Invalid(format!("weight component {ki} < 2")));
            }
            let diff = w - ki as i64;
            if diff % 2 != 0 {
                return Err(Error::Invalid(format!(
                    "weight parity: k = {ki} vs w = {w}"
                )));
            }
            v.push(diff / 2);
        }
        Ok(WeightData { k: k.to_vec(), v })
    }

    pub fn from_kv(k: &[u32], v: &[i64]) -> Result<WeightData> {
        if k.len() != v.len() {
            return Err(Error::Invalid("weight k/v length mismatch".into()));
        }
        let w0 = k[0] as i64 + 2 * v[0];
        for (ki, vi) in k.iter().zip(v.iter()) {
            if *ki < 2 {
                return Err(Error::Invalid(format!("weight component {ki} < 2")));
            }
            if *ki as i64 + 2 * vi != w0 {
                return Err(Error::Invalid("weight components disagree on w".into()));
            }
        }
        Ok(WeightData { k: k.to_vec(), v: v.to_vec() })
    }

    pub fn k(&self) -> &[u32] {
        &self.k
    }

    pub fn v(&self) -> &[i64] {
        &self.v
    }

    /// Number of tensor factors (embeddings).
    pub fn factors(&self) -> usize {
        self.k.len()
    }

    pub fn w(&self) -> i64 {
        self.k[0] as i64 + 2 * self.v[0]
    }

    /// Per-factor dimensions k_sigma - 1.
    pub fn dims(&self) -> Vec<usize> {
        self.k.iter().map(|&ki| ki as usize - 1).collect()
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().product()
    }

    fn multi_to_idx(&self, j: &[usize]) -> usize {
        let dims = self.dims();
        let mut idx = 0;
        for (js, ds) in j.iter().zip(dims.iter()) {
            debug_assert!(js < ds);
            idx = idx * ds + js;
        }
        idx
    }

    fn idx_to_multi(&self, mut idx: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut j = vec![0usize; dims.len()];
        for s in (0..dims.len()).rev() {
            j[s] = idx % dims[s];
            idx /= dims[s];
        }
        j
    }
}

/// Element of V(k, v) in the monomial basis
/// prod_sigma X_sigma^{j_sigma} Y_sigma^{k_sigma - 2 - j_sigma}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffVector {
    pub weight: WeightData,
    pub coeffs: Vec<PadicElement>,
}

/// Functional on V(k) in the dual monomial basis (delta-pairing); carries a
/// right action adjoint to `act`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualVector {
    pub weight: WeightData,
    pub coeffs: Vec<PadicElement>,
}

impl CoeffVector {
    pub fn new(weight: WeightData, coeffs: Vec<PadicElement>) -> Result<CoeffVector> {
        if coeffs.len() != weight.dim() {
            return Err(Error::Invalid("coefficient vector dimension mismatch".into()));
        }
        Ok(CoeffVector { weight, coeffs })
    }

    pub fn zero(ctx: &PadicContext, weight: WeightData) -> CoeffVector {
        let n = weight.dim();
        CoeffVector { weight, coeffs: vec![ctx.zero(); n] }
    }

    /// Basis vector for multidegree j (X-exponents per factor).
    pub fn basis(ctx: &PadicContext, weight: WeightData, j: &[usize]) -> CoeffVector {
        let idx = weight.multi_to_idx(j);
        let mut c = CoeffVector::zero(ctx, weight);
        c.coeffs[idx] = ctx.one();
        c
    }

    pub fn get(&self, j: &[usize]) -> &PadicElement {
        &self.coeffs[self.weight.multi_to_idx(j)]
    }

    pub fn scale(&self, ctx: &PadicContext, s: &PadicElement) -> CoeffVector {
        CoeffVector {
            weight: self.weight.clone(),
            coeffs: self.coeffs.iter().map(|c| ctx.mul(c, s)).collect(),
        }
    }

    pub fn add(&self, ctx: &PadicContext, o: &CoeffVector) -> CoeffVector {
        CoeffVector {
            weight: self.weight.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(o.coeffs.iter())
                .map(|(a, b)| ctx.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, ctx: &PadicContext, o: &CoeffVector) -> CoeffVector {
        CoeffVector {
            weight: self.weight.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(o.coeffs.iter())
                .map(|(a, b)| ctx.sub(a, b))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl DualVector {
    pub fn new(weight: WeightData, coeffs: Vec<PadicElement>) -> Result<DualVector> {
        if coeffs.len() != weight.dim() {
            return Err(Error::Invalid("dual vector dimension mismatch".into()));
        }
        Ok(DualVector { weight, coeffs })
    }

    pub fn basis(ctx: &PadicContext, weight: WeightData, j: &[usize]) -> DualVector {
        let idx = weight.multi_to_idx(j);
        let n = weight.dim();
        let mut coeffs = vec![ctx.zero(); n];
        coeffs[idx] = ctx.one();
        DualVector { weight, coeffs }
    }
}

pub(crate) fn binom(ctx: &PadicContext, n: usize, r: usize) -> PadicElement {
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..r {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    ctx.from_ratio((num / den) as i64, 1).expect("binomial")
}

/// Matrix of the single-factor action on monomials X^j Y^{K-j}
/// (K = k - 2): X^j Y^{K-j} maps to det^v (aX + cY)^j (bX + dY)^{K-j},
/// with the embedding sigma (a Frobenius power) applied to the entries.
fn factor_matrix(
    ctx: &PadicContext,
    g: &Mat2,
    k: u32,
    v: i64,
    sigma: u32,
) -> Result<Vec<Vec<PadicElement>>> {
    let kk = k as usize - 2;
    let dim = kk + 1;
    let a = ctx.frobenius(&g.a, sigma);
    let b = ctx.frobenius(&g.b, sigma);
    let c = ctx.frobenius(&g.c, sigma);
    let d = ctx.frobenius(&g.d, sigma);
    let det = ctx.sub(&ctx.mul(&a, &d), &ctx.mul(&b, &c));
    if det.is_zero() {
        return Err(Error::Invalid("singular matrix in coefficient action".into()));
    }
    let twist = ctx.pow(&det, v)?;
    let mut m = vec![vec![ctx.zero(); dim]; dim];
    for j in 0..dim {
        for s in 0..=j {
            for t in 0..=(kk - j) {
                // coefficient of X^{s+t} Y^{K-s-t}
                let term = ctx.mul(
                    &ctx.mul(
                        &ctx.mul(&binom(ctx, j, s), &ctx.pow(&a, s as i64)?),
                        &ctx.pow(&c, (j - s) as i64)?,
                    ),
                    &ctx.mul(
                        &ctx.mul(&binom(ctx, kk - j, t), &ctx.pow(&b, t as i64)?),
                        &ctx.pow(&d, (kk - j - t) as i64)?,
                    ),
                );
                let row = s + t;
                m[row][j] = ctx.add(&m[row][j], &ctx.mul(&twist, &term));
            }
        }
    }
    Ok(m)
}

/// Contract a per-factor matrix along tensor axis `axis`.
fn apply_axis(
    ctx: &PadicContext,
    weight: &WeightData,
    coeffs: &[PadicElement],
    m: &[Vec<PadicElement>],
    axis: usize,
) -> Vec<PadicElement> {
    let dims = weight.dims();
    let n = coeffs.len();
    let mut out = vec![ctx.zero(); n];
    for idx in 0..n {
        let x = &coeffs[idx];
        if x.is_zero() {
            continue;
        }
        let mut multi = weight.idx_to_multi(idx);
        let j = multi[axis];
        for row in 0..dims[axis] {
            let mij = &m[row][j];
            if mij.is_zero() {
                continue;
            }
            multi[axis] = row;
            let tgt = weight.multi_to_idx(&multi);
            out[tgt] = ctx.add(&out[tgt], &ctx.mul(mij, x));
        }
    }
    out
}

/// Left action of g in GL(2, F) on V(k, v): per factor sigma,
/// sigma(det)^{v_sigma} P(sigma(a)X + sigma(c)Y, sigma(b)X + sigma(d)Y).
pub fn act(ctx: &PadicContext, g: &Mat2, p: &CoeffVector) -> Result<CoeffVector> {
    let w = &p.weight;
    let mut coeffs = p.coeffs.clone();
    for (sigma, (&ks, &vs)) in w.k().iter().zip(w.v().iter()).enumerate() {
        let m = factor_matrix(ctx, g, ks, vs, sigma as u32)?;
        coeffs = apply_axis(ctx, w, &coeffs, &m, sigma);
    }
    Ok(CoeffVector { weight: w.clone(), coeffs })
}

/// Star action: |Nrd gamma|^{(w-2)/2} times the plain action, where the
/// norm is det of the image at the place and |x| = p^{-d v(x)} is read as a
/// p-adic scalar (d = residue degree of F).
pub fn star_act(
    ctx: &PadicContext,
    g: &Mat2,
    p: &CoeffVector,
    d_base: u32,
) -> Result<CoeffVector> {
    let acted = act(ctx, g, p)?;
    let w = p.weight.w();
    if w == 2 {
        return Ok(acted);
    }
    let det = g.det(ctx);
    if det.is_zero() {
        return Err(Error::Invalid("singular matrix in star action".into()));
    }
    let e = -(d_base as i64) * det.valuation() * (w - 2);
    if e % 2 != 0 {
        return Err(Error::Invalid("odd norm exponent in star action".into()));
    }
    let s = ctx.shift_by(&ctx.one(), e / 2);
    Ok(acted.scale(ctx, &s))
}

/// Monomial pairing: coefficient of prod_sigma (X_sigma Y_sigma)^{k_sigma-2}
/// in the product P Q.  Anti-diagonal per factor.
pub fn pair(ctx: &PadicContext, p: &CoeffVector, q: &CoeffVector) -> Result<PadicElement> {
    if p.weight != q.weight {
        return Err(Error::Invalid("pairing weight mismatch".into()));
    }
    let w = &p.weight;
    let mut acc = ctx.zero();
    for idx in 0..p.coeffs.len() {
        let pi = &p.coeffs[idx];
        if pi.is_zero() {
            continue;
        }
        let multi = w.idx_to_multi(idx);
        let comp: Vec<usize> = multi
            .iter()
            .zip(w.k().iter())
            .map(|(&j, &ki)| ki as usize - 2 - j)
            .collect();
        let qi = &q.coeffs[w.multi_to_idx(&comp)];
        acc = ctx.add(&acc, &ctx.mul(pi, qi));
    }
    Ok(acc)
}

/// Delta-duality pairing of a functional against a vector.
pub fn dual_pair(ctx: &PadicContext, q: &DualVector, p: &CoeffVector) -> Result<PadicElement> {
    if q.weight != p.weight {
        return Err(Error::Invalid("dual pairing weight mismatch".into()));
    }
    let mut acc = ctx.zero();
    for (a, b) in q.coeffs.iter().zip(p.coeffs.iter()) {
        acc = ctx.add(&acc, &ctx.mul(a, b));
    }
    Ok(acc)
}

/// Right action on functionals, defined by the adjunction
/// <Q|_g, P> = <Q, g.P>.
pub fn dual_act(ctx: &PadicContext, q: &DualVector, g: &Mat2) -> Result<DualVector> {
    let w = &q.weight;
    let mut coeffs = q.coeffs.clone();
    for (sigma, (&ks, &vs)) in w.k().iter().zip(w.v().iter()).enumerate() {
        let m = factor_matrix(ctx, g, ks, vs, sigma as u32)?;
        // Transpose contraction.
        let dim = ks as usize - 1;
        let mut mt = vec![vec![ctx.zero(); dim]; dim];
        for r in 0..dim {
            for c in 0..dim {
                mt[r][c] = m[c][r].clone();
            }
        }
        coeffs = apply_axis(ctx, w, &coeffs, &mt, sigma);
    }
    Ok(DualVector { weight: w.clone(), coeffs })
}

/// The semilinear operator phi_{q,k,v}: arithmetic Frobenius on the
/// coefficients followed per factor by P(Y, sigma(pi) X), all scaled by
/// prod_sigma sigma(-pi)^{v_sigma} (pi = p in the unramified case).
pub fn phi_q(ctx: &PadicContext, p: &CoeffVector) -> Result<CoeffVector> {
    let w = p.weight.clone();
    let n = p.coeffs.len();
    // Frobenius on coefficients.
    let frob: Vec<PadicElement> = p.coeffs.iter().map(|c| ctx.frobenius(c, 1)).collect();
    let mut out = vec![ctx.zero(); n];
    for idx in 0..n {
        if frob[idx].is_zero() {
            continue;
        }
        let multi = w.idx_to_multi(idx);
        // X^j Y^{K-j} -> Y^j (pi X)^{K-j}: index j -> K-j, scale pi^{K-j}.
        let mut shift = 0i64;
        let tgt: Vec<usize> = multi
            .iter()
            .zip(w.k().iter())
            .map(|(&j, &ki)| {
                let nj = ki as usize - 2 - j;
                shift += nj as i64;
                nj
            })
            .collect();
        let t = w.multi_to_idx(&tgt);
        out[t] = ctx.add(&out[t], &ctx.shift_by(&frob[idx], shift));
    }
    // Prefactor prod_sigma sigma(-pi)^{v_sigma} = (-p)^{sum v}.
    let vsum: i64 = w.v().iter().sum();
    let mut result = CoeffVector { weight: w, coeffs: out };
    let sign = if vsum.rem_euclid(2) == 1 { ctx.from_i64(-1) } else { ctx.one() };
    let pre = ctx.mul(&sign, &ctx.shift_by(&ctx.one(), vsum));
    result = result.scale(ctx, &pre);
    Ok(result)
}

//! The two L-invariants and their comparison: solve for the Teitelbaum
//! invariant from kappa^col = l * kappa^sch in H^1, assemble the rank-2
//! monodromy module from the cocycle data, compute the Fontaine-Mazur
//! invariant from its filtration against the monodromy operator, and
//! report the agreement.
//!
//! Coordinates of the assembled module D (single eigenform, single tree
//! factor, so the coefficient algebra is the field itself): e1 spans the
//! image of the monodromy operator N inside ker(N), realized as the
//! cocycle c itself; e2 is the complementary vector y = omega - x with
//! x the ker(N)-component of the de Rham class omega.  In these
//! coordinates the class omega has coordinates (s, 1) where s is the
//! scalar with [kappa^col] = s * [delta(c)] (solved numerically), N sends
//! e2 to rho * e1 with rho the scalar comparing the residue map output to
//! c (computed by refinement, not assumed to be 1), and phi_q acts by
//! (alpha, q*alpha) with alpha the Frobenius scalar of the coefficient
//! realization and the second eigenvalue forced by N phi = q phi N.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::coeff::{phi_q, star_act, CoeffVector};
use crate::cohom::{delta, epsilon, GroupCocycle, HarmonicCocycle};
use crate::integrate::{residue, ColemanBranch};
use crate::linalg;
use crate::padic::{PadicContext, PadicElement};
use crate::schottky::{QuotientGraph, SchottkyGroup};
use crate::{Error, Result};

/// Rank-2 monodromy module in a fixed basis: Frobenius matrix, monodromy
/// matrix, filtration generator, and filtration index.
#[derive(Debug, Clone)]
pub struct MonodromyModule {
    pub phi: Vec<Vec<PadicElement>>,
    pub n: Vec<Vec<PadicElement>>,
    pub fil: Vec<PadicElement>,
    pub j0: i64,
}

fn mat2_apply(ctx: &PadicContext, m: &[Vec<PadicElement>], v: &[PadicElement]) -> Vec<PadicElement> {
    linalg::mat_vec(ctx, m, v)
}

fn mat2_mul(
    ctx: &PadicContext,
    a: &[Vec<PadicElement>],
    b: &[Vec<PadicElement>],
) -> Vec<Vec<PadicElement>> {
    let mut out = vec![vec![ctx.zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for (k, bk) in b.iter().enumerate() {
                out[i][j] = ctx.add(&out[i][j], &ctx.mul(&a[i][k], &bk[j]));
            }
        }
    }
    out
}

fn small(x: &PadicElement, thr: i64) -> bool {
    x.is_zero() || x.valuation() >= thr
}

impl MonodromyModule {
    /// Structural invariants: N^2 = 0 with N of rank one, the
    /// q-commutation N phi = q phi N, and Fil transverse to ker N.
    pub fn validate(&self, ctx: &PadicContext, q: &PadicElement, threshold: i64) -> Result<()> {
        let nn = mat2_mul(ctx, &self.n, &self.n);
        if !nn.iter().flatten().all(|x| small(x, threshold)) {
            return Err(Error::Invalid("monodromy is not square-zero".into()));
        }
        if self.n.iter().flatten().all(|x| small(x, threshold)) {
            return Err(Error::Invalid("monodromy vanishes".into()));
        }
        let lhs = mat2_mul(ctx, &self.n, &self.phi);
        let rhs = mat2_mul(ctx, &self.phi, &self.n);
        for (l, r) in lhs.iter().flatten().zip(rhs.iter().flatten()) {
            if !small(&ctx.sub(l, &ctx.mul(q, r)), threshold) {
                return Err(Error::Invalid("N phi = q phi N fails".into()));
            }
        }
        let k = kernel_line(ctx, &self.n, threshold)?;
        let det = ctx.sub(
            &ctx.mul(&k[0], &self.fil[1]),
            &ctx.mul(&k[1], &self.fil[0]),
        );
        if small(&det, threshold) {
            return Err(Error::Invalid("filtration meets ker N".into()));
        }
        Ok(())
    }
}

fn kernel_line(
    ctx: &PadicContext,
    n: &[Vec<PadicElement>],
    threshold: i64,
) -> Result<Vec<PadicElement>> {
    let basis = linalg::nullspace(ctx, n, threshold)?;
    if basis.len() != 1 {
        return Err(Error::Invalid(format!(
            "monodromy kernel has dimension {}, expected 1",
            basis.len()
        )));
    }
    Ok(basis.into_iter().next().unwrap())
}

/// The scalar s with [target] = s * [reference] in H^1(Gamma, V): exact
/// linear solve in the unknowns (s, cobounding vector).  The residual of
/// the solve is returned alongside.  Errors if the reference class
/// vanishes, which would leave s undetermined.
pub fn class_ratio(
    group: &SchottkyGroup,
    target: &GroupCocycle,
    reference: &GroupCocycle,
    threshold: i64,
) -> Result<(PadicElement, i64)> {
    let ctx = group.tree().ctx();
    let dim = reference.weight.dim();
    let d = group.tree().base_degree();
    // Columns of gamma_i star . - id per generator.
    let mut cob_rows: Vec<Vec<PadicElement>> = Vec::new();
    for i in 0..group.rank() {
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut b = CoeffVector::zero(ctx, reference.weight.clone());
            b.coeffs[j] = ctx.one();
            let mut col = star_act(ctx, group.generator(i), &b, d)?.coeffs;
            col[j] = ctx.sub(&col[j], &ctx.one());
            cols.push(col);
        }
        for r in 0..dim {
            let mut row: Vec<PadicElement> = Vec::with_capacity(dim);
            for col in &cols {
                row.push(col[r].clone());
            }
            cob_rows.push(row);
        }
    }
    let ref_rhs: Vec<PadicElement> = (0..group.rank())
        .flat_map(|i| reference.values[i].coeffs.clone())
        .collect();
    let exact = ctx.precision_cap() - 2;
    if linalg::solve(ctx, &cob_rows, &ref_rhs, exact)?.is_some() {
        return Err(Error::Invalid(
            "reference cocycle class vanishes in H^1".into(),
        ));
    }
    // Augment with the s-column: s * reference + coboundary = target.
    let mut rows = Vec::with_capacity(cob_rows.len());
    for (r, row) in cob_rows.iter().enumerate() {
        let mut full = Vec::with_capacity(dim + 1);
        full.push(ref_rhs[r].clone());
        full.extend(row.iter().cloned());
        rows.push(full);
    }
    let rhs: Vec<PadicElement> = (0..group.rank())
        .flat_map(|i| target.values[i].coeffs.clone())
        .collect();
    match linalg::solve(ctx, &rows, &rhs, threshold)? {
        Some((x, res)) => Ok((x.into_iter().next().unwrap(), res)),
        None => Err(Error::PrecisionLoss(
            "class comparison inconsistent at the requested threshold; raise depth or precision"
                .into(),
        )),
    }
}

/// The Teitelbaum invariant: the unique scalar with
/// kappa^col - l * kappa^sch a coboundary.
pub fn solve_lt(
    group: &SchottkyGroup,
    kappa_sch: &GroupCocycle,
    kappa_col: &GroupCocycle,
    threshold: i64,
) -> Result<(PadicElement, i64)> {
    class_ratio(group, kappa_col, kappa_sch, threshold)
}

/// The scalar by which phi_q acts on the coefficient realization of c;
/// errors if the values do not lie on a single phi_q-eigenline.
fn frobenius_scalar(
    group: &SchottkyGroup,
    c: &HarmonicCocycle,
    threshold: i64,
) -> Result<PadicElement> {
    let ctx = group.tree().ctx();
    let mut alpha: Option<PadicElement> = None;
    for v in &c.values {
        let fv = phi_q(ctx, v)?;
        for (orig, img) in v.coeffs.iter().zip(fv.coeffs.iter()) {
            if orig.is_zero() {
                if !small(img, threshold) {
                    return Err(Error::Invalid("cocycle is not a phi_q eigenvector".into()));
                }
                continue;
            }
            let r = ctx.div(img, orig)?;
            match &alpha {
                None => alpha = Some(r),
                Some(a) => {
                    if !small(&ctx.sub(a, &r), threshold - a.valuation().min(0)) {
                        return Err(Error::Invalid(
                            "cocycle is not a phi_q eigenvector".into(),
                        ));
                    }
                }
            }
        }
    }
    alpha.ok_or_else(|| Error::Invalid("zero cocycle has no Frobenius scalar".into()))
}

/// The scalar rho with I(omega_c) = rho * c, computed by comparing the
/// depth-D residue refinement against the stored values on every quotient
/// edge.
fn residue_scalar(
    group: &SchottkyGroup,
    graph: &QuotientGraph,
    c: &HarmonicCocycle,
    depth: u32,
    threshold: i64,
) -> Result<PadicElement> {
    let ctx = group.tree().ctx();
    let mut rho: Option<PadicElement> = None;
    for (i, qe) in graph.edges.iter().enumerate() {
        let r = residue(group, graph, c, &qe.tree_edge, depth)?;
        let v = &c.values[i];
        for (orig, img) in v.coeffs.iter().zip(r.coeffs.iter()) {
            if orig.is_zero() {
                continue;
            }
            let ratio = ctx.div(img, orig)?;
            match &rho {
                None => rho = Some(ratio),
                Some(p) => {
                    if !small(&ctx.sub(p, &ratio), threshold) {
                        return Err(Error::PrecisionLoss(
                            "residue map is not scalar on c at this depth".into(),
                        ));
                    }
                }
            }
        }
    }
    let rho = rho.ok_or_else(|| Error::Invalid("zero cocycle".into()))?;
    if small(&rho, threshold) {
        return Err(Error::PrecisionLoss(
            "monodromy N(y) vanishes at working precision".into(),
        ));
    }
    Ok(rho)
}

/// The norm q = p^{d_base} as a field element.
pub fn norm_q(group: &SchottkyGroup) -> PadicElement {
    let ctx = group.tree().ctx();
    ctx.shift_by(&ctx.one(), group.tree().base_degree() as i64)
}

/// Assemble the monodromy module from the eigencocycle and its Coleman
/// cocycle (already integrated at the chosen branch and depth).
pub fn build_monodromy_module(
    group: &SchottkyGroup,
    graph: &QuotientGraph,
    c: &HarmonicCocycle,
    kappa_col: &GroupCocycle,
    depth: u32,
    threshold: i64,
) -> Result<MonodromyModule> {
    let ctx = group.tree().ctx();
    // x = iota delta^{-1} P(omega): the ker(N)-component of omega is
    // s * e1 where [kappa^col] = s * [delta(c)].
    let dc = delta(group, graph, c, &group.tree().base_vertex())?;
    let (s, _) = class_ratio(group, kappa_col, &dc, threshold)?;
    // N(y) = iota(I(omega)) = rho * e1 via the residue map.
    let rho = residue_scalar(group, graph, c, depth.min(4), threshold)?;
    // Frobenius: alpha on the e1-line, q * alpha on e2 forced by the
    // commutation with N.
    let alpha = frobenius_scalar(group, c, threshold)?;
    let q = norm_q(group);
    let z = || ctx.zero();
    let module = MonodromyModule {
        phi: vec![
            vec![alpha.clone(), z()],
            vec![z(), ctx.mul(&q, &alpha)],
        ],
        n: vec![vec![z(), rho], vec![z(), z()]],
        fil: vec![s, ctx.one()],
        j0: (c.weight.w() - 2) / 2,
    };
    module.validate(ctx, &q, threshold)?;
    Ok(module)
}

/// Split D = D1 + D2: D1 = ker N, D2 the phi-eigenline whose eigenvalue is
/// q times the other and which N carries isomorphically onto D1.  Returns
/// generators (d1, d2).
pub fn fm_decompose(
    ctx: &PadicContext,
    module: &MonodromyModule,
    q: &PadicElement,
    threshold: i64,
) -> Result<(Vec<PadicElement>, Vec<PadicElement>)> {
    let d1 = kernel_line(ctx, &module.n, threshold)?;
    let phi = &module.phi;
    let tr = ctx.add(&phi[0][0], &phi[1][1]);
    let det = ctx.sub(
        &ctx.mul(&phi[0][0], &phi[1][1]),
        &ctx.mul(&phi[0][1], &phi[1][0]),
    );
    let disc = ctx.sub(&ctx.mul(&tr, &tr), &ctx.mul(&ctx.from_i64(4), &det));
    let root = ctx.sqrt(&disc).map_err(|_| {
        Error::PrecisionLoss("phi_q eigenvalues not split at working precision".into())
    })?;
    let half = ctx.from_ratio(1, 2)?;
    let l1 = ctx.mul(&half, &ctx.sub(&tr, &root));
    let l2 = ctx.mul(&half, &ctx.add(&tr, &root));
    if l1.is_zero() || l2.is_zero() {
        return Err(Error::PrecisionLoss("phi_q eigenvalue vanishes".into()));
    }
    // Orientation by the q-ratio; refuse to guess if ambiguous.
    let a12 = ctx.sub(&ctx.div(&l2, &l1)?, q).valuation();
    let a21 = ctx.sub(&ctx.div(&l1, &l2)?, q).valuation();
    let big = if a12 > a21 { l2 } else { l1 };
    if a12.max(a21) < threshold || a12 == a21 {
        return Err(Error::PrecisionLoss(
            "phi_q eigenvalue ratio does not resolve q; raise precision".into(),
        ));
    }
    let shifted: Vec<Vec<PadicElement>> = (0..2)
        .map(|i| {
            (0..2)
                .map(|j| {
                    if i == j {
                        ctx.sub(&phi[i][j], &big)
                    } else {
                        phi[i][j].clone()
                    }
                })
                .collect()
        })
        .collect();
    let d2 = kernel_line(ctx, &shifted, threshold)?;
    // N must carry D2 isomorphically onto D1.
    let nd2 = mat2_apply(ctx, &module.n, &d2);
    if nd2.iter().all(|x| small(x, threshold)) {
        return Err(Error::Invalid("N is not injective on D2".into()));
    }
    Ok((d1, d2))
}

/// Fontaine-Mazur invariant: the unique L with x - L N(x) in Fil for x
/// spanning D2; unique because Fil is transverse to ker N.
pub fn l_fm(
    ctx: &PadicContext,
    module: &MonodromyModule,
    d2: &[PadicElement],
    threshold: i64,
) -> Result<PadicElement> {
    let nx = mat2_apply(ctx, &module.n, d2);
    // L * N(x) + mu * fil = x.
    let rows: Vec<Vec<PadicElement>> = (0..2)
        .map(|i| vec![nx[i].clone(), module.fil[i].clone()])
        .collect();
    let rhs: Vec<PadicElement> = d2.to_vec();
    match linalg::solve(ctx, &rows, &rhs, threshold)? {
        Some((x, _)) => Ok(x.into_iter().next().unwrap()),
        None => Err(Error::Invalid(
            "filtration condition unsolvable (degenerate module)".into(),
        )),
    }
}

/// Comparison record for one embedding.
#[derive(Debug, Clone)]
pub struct LInvariantReport {
    pub l_teit: PadicElement,
    pub l_fm: PadicElement,
    pub agree_valuation: i64,
    pub budget: i64,
    pub pass: bool,
    pub depth: u32,
    pub residual: i64,
    pub branch: String,
}

pub fn compare(
    ctx: &PadicContext,
    l_teit: &PadicElement,
    l_fm_val: &PadicElement,
    budget: i64,
    depth: u32,
    residual: i64,
    branch: String,
) -> LInvariantReport {
    let agree = ctx.agree_valuation(l_teit, l_fm_val);
    LInvariantReport {
        l_teit: l_teit.clone(),
        l_fm: l_fm_val.clone(),
        agree_valuation: agree,
        budget,
        pass: agree >= budget,
        depth,
        residual,
        branch,
    }
}

/// Full per-cocycle pipeline: kappa^sch and kappa^col, the Teitelbaum
/// solve, module assembly, the Fontaine-Mazur solve, and the comparison.
pub fn l_invariant_report(
    group: &SchottkyGroup,
    graph: &QuotientGraph,
    c: &HarmonicCocycle,
    branch: &ColemanBranch,
    depth: u32,
    budget: i64,
) -> Result<(LInvariantReport, MonodromyModule)> {
    let ctx = group.tree().ctx();
    let ks = epsilon(group, graph, c)?;
    let kc = crate::integrate::kappa_col(group, graph, c, branch, depth)?;
    let (lt, residual) = solve_lt(group, &ks, &kc, budget)?;
    let module = build_monodromy_module(group, graph, c, &kc, depth, budget)?;
    let q = norm_q(group);
    let (_, d2) = fm_decompose(ctx, &module, &q, budget)?;
    let lfm = l_fm(ctx, &module, &d2, budget)?;
    let marker = if branch.log_p.is_zero() {
        String::from("iwasawa")
    } else {
        format!("log_p={}", ctx.to_text(&branch.log_p))
    };
    Ok((
        compare(ctx, &lt, &lfm, budget, depth, residual, marker),
        module,
    ))
}

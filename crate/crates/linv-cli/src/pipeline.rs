//! Pipeline wiring: tree -> quotient -> harmonic basis -> eigencocycle ->
//! kappa^sch / kappa^col -> L-invariants -> monodromy module -> report.

use anyhow::{anyhow, bail, Context, Result};
use std::path::Path;

use linv_core::btree::Tree;
use linv_core::coeff::{star_act, CoeffVector, WeightData};
use linv_core::cohom::{
    boundary, default_up_reps, delta, epsilon, h1_dimension, h1_equal, harmonic_basis, hecke_up,
    GroupCocycle, HarmonicCocycle,
};
use linv_core::integrate::{
    coleman_lambda_detailed, default_base_point, error_exponent, g_eval, residue, ColemanBranch,
};
use linv_core::linalg::{self, Mat2};
use linv_core::linv::{l_invariant_report, norm_q};
use linv_core::padic::{PadicContext, PadicElement};
use linv_core::schottky::{verify_schottky, QuotientGraph, SchottkyGroup};

use crate::config::{GroupSource, RunConfig, WeightConfig};
use crate::fixture::{load_group, parse_matrix, FixtureFile};
use crate::report::*;

fn ce(module: &str, op: &str, e: linv_core::Error) -> anyhow::Error {
    anyhow!("{module}::{op}: {e}; hint: raise the precision N or the covering depth D")
}

/// Pass budget in digits: working precision capped by the depth-D error
/// exponent, minus the guard.
pub fn budget_for(cfg: &RunConfig, depth: u32) -> Result<i64> {
    let k_tau = cfg.weight.k[cfg.tau];
    let e = error_exponent(cfg.p, k_tau, depth);
    let b = (cfg.precision as i64).min(e) - cfg.guard();
    if b < 1 {
        bail!(
            "cli::budget: depth {depth} leaves no digits after guard {}; raise D or lower guard",
            cfg.guard()
        );
    }
    Ok(b)
}

pub struct BuiltGroup {
    pub tree: Tree,
    pub group: SchottkyGroup,
    pub graph: QuotientGraph,
}

pub fn build_group(cfg: &RunConfig, base_dir: &Path) -> Result<BuiltGroup> {
    // The coefficient field must be a proper unramified extension of the
    // base field so that a generic integration base point exists.
    let ctx = PadicContext::new(cfg.p, 2 * cfg.d, cfg.precision)
        .map_err(|e| ce("padic", "new", e))?;
    let tree = Tree::new(ctx, cfg.d).map_err(|e| ce("btree", "new", e))?;
    let (group, graph) = match &cfg.group {
        GroupSource::Generators { generators } => {
            let gens = generators
                .iter()
                .map(|m| parse_matrix(tree.ctx(), m))
                .collect::<Result<Vec<_>>>()?;
            let group = verify_schottky(&tree, gens).map_err(|e| ce("schottky", "verify_schottky", e))?;
            let graph = group
                .quotient_graph(0)
                .map_err(|e| ce("schottky", "quotient_graph", e))?;
            (group, graph)
        }
        GroupSource::Fixture { fixture } => {
            let path = base_dir.join(fixture);
            let fx = FixtureFile::load(&path)?;
            load_group(&tree, &fx).with_context(|| format!("fixture {}", path.display()))?
        }
    };
    Ok(BuiltGroup { tree, group, graph })
}

pub struct Built {
    pub group: SchottkyGroup,
    pub graph: QuotientGraph,
    pub weight: WeightData,
    pub basis: Vec<HarmonicCocycle>,
    pub h1_dim: usize,
    pub combination: Vec<i64>,
    pub cocycle: HarmonicCocycle,
    pub branch: ColemanBranch,
    pub budget: i64,
}

pub fn build(cfg: &RunConfig, base_dir: &Path) -> Result<Built> {
    let bg = build_group(cfg, base_dir)?;
    let BuiltGroup { group, graph, .. } = bg;
    let ctx = group.tree().ctx().clone();
    let weight = WeightData::from_kw(&cfg.weight.k, cfg.weight.w)
        .map_err(|e| ce("coeff", "weight", e))?;
    let basis =
        harmonic_basis(&group, &graph, &weight).map_err(|e| ce("cohom", "harmonic_basis", e))?;
    let h1_dim = h1_dimension(&group, &weight).map_err(|e| ce("cohom", "h1_dimension", e))?;
    if basis.is_empty() {
        bail!("cohom::harmonic_basis: no harmonic cocycles at this weight");
    }
    let combination = match &cfg.cocycle {
        Some(c) => {
            if c.len() != basis.len() {
                bail!(
                    "cli::build: cocycle combination has {} entries, basis has {}",
                    c.len(),
                    basis.len()
                );
            }
            c.clone()
        }
        None => {
            let mut c = vec![0i64; basis.len()];
            c[0] = 1;
            c
        }
    };
    let mut cocycle = basis[0].scale(&ctx, &ctx.from_i64(combination[0]));
    for (b, &s) in basis.iter().zip(combination.iter()).skip(1) {
        cocycle = cocycle.add(&ctx, &b.scale(&ctx, &ctx.from_i64(s)));
    }
    cocycle
        .verify(&group, &graph, ctx.precision_cap() - 2)
        .map_err(|e| ce("cohom", "verify", e))?;
    let branch = match &cfg.branch_log_p {
        None => ColemanBranch::iwasawa(&group).map_err(|e| ce("integrate", "branch", e))?,
        Some(s) => {
            let log_p = ctx
                .parse(s)
                .map_err(|e| anyhow!("cli::build: bad branch_log_p {s:?}: {e}"))?;
            let z0 = default_base_point(&group).map_err(|e| ce("integrate", "base_point", e))?;
            ColemanBranch::new(&group, log_p, z0).map_err(|e| ce("integrate", "branch", e))?
        }
    };
    let budget = budget_for(cfg, cfg.depth)?;
    Ok(Built {
        group,
        graph,
        weight,
        basis,
        h1_dim,
        combination,
        cocycle,
        branch,
        budget,
    })
}

fn up_reps_for(cfg: &RunConfig, group: &SchottkyGroup) -> Result<Vec<Mat2>> {
    match &cfg.up_reps {
        Some(ms) => ms
            .iter()
            .map(|m| parse_matrix(group.tree().ctx(), m))
            .collect(),
        None => Ok(default_up_reps(group.tree())),
    }
}

/// Check the declared eigencocycle normalization: nu * U_p c = q^{w/2} c
/// to full working precision.
pub fn check_up(cfg: &RunConfig, b: &Built) -> Result<Option<UpCheck>> {
    let Some(nu_text) = &cfg.cmp_normalization else {
        return Ok(None);
    };
    let ctx = b.group.tree().ctx();
    let nu = ctx
        .parse(nu_text)
        .map_err(|e| anyhow!("cli::check_up: bad normalization {nu_text:?}: {e}"))?;
    let reps = up_reps_for(cfg, &b.group)?;
    let uc = hecke_up(&b.group, &b.graph, &b.cocycle, &reps).map_err(|e| ce("cohom", "hecke_up", e))?;
    let qpow = ctx
        .pow(&norm_q(&b.group), cfg.weight.w / 2)
        .map_err(|e| ce("linv", "norm_q", e))?;
    let cap = ctx.precision_cap();
    let mut pass = true;
    for (uv, cv) in uc.values.iter().zip(b.cocycle.values.iter()) {
        for (a, c) in uv.coeffs.iter().zip(cv.coeffs.iter()) {
            let d = ctx.sub(&ctx.mul(&nu, a), &ctx.mul(&qpow, c));
            if !(d.is_zero() || d.valuation() >= cap - 1) {
                pass = false;
            }
        }
    }
    Ok(Some(UpCheck {
        normalization: ctx.to_text(&nu),
        norm_power: ctx.to_text(&qpow),
        pass,
    }))
}

fn defaults_of(cfg: &RunConfig, b: &Built) -> Defaults {
    Defaults {
        guard: cfg.guard(),
        branch: match &cfg.branch_log_p {
            None => "iwasawa".into(),
            Some(s) => format!("log_p={s}"),
        },
        tau: cfg.tau,
        component_index: b.graph.component_index,
        cocycle_combination: b.combination.clone(),
    }
}

fn context_of(cfg: &RunConfig, b: &Built) -> ContextInfo {
    ContextInfo {
        p: cfg.p,
        base_degree: b.group.tree().base_degree(),
        coefficient_degree: b.group.tree().ctx().degree(),
        precision: cfg.precision,
    }
}

fn graph_of(b: &Built) -> GraphSummary {
    GraphSummary {
        vertices: b.graph.vertices.len(),
        oriented_edges: b.graph.edges.len(),
        unoriented_edges: b.graph.unoriented_count(),
        rank: b.group.rank(),
    }
}

pub fn cmd_compute(cfg: &RunConfig, base_dir: &Path) -> Result<ComputeReport> {
    if cfg.weight.k.len() != 1 {
        bail!(
            "cli::compute: integration supports single-factor weights only; \
             got {} factors",
            cfg.weight.k.len()
        );
    }
    let b = build(cfg, base_dir)?;
    let ctx = b.group.tree().ctx().clone();
    let up = check_up(cfg, &b)?;
    let (_, stats) =
        coleman_lambda_detailed(&b.group, &b.graph, &b.cocycle, &b.branch, &[1], cfg.depth)
            .map_err(|e| ce("integrate", "coleman_lambda", e))?;
    let (rep, module) =
        l_invariant_report(&b.group, &b.graph, &b.cocycle, &b.branch, cfg.depth, b.budget)
            .map_err(|e| ce("linv", "l_invariant_report", e))?;
    let module_ok = module
        .validate(&ctx, &norm_q(&b.group), b.budget)
        .map(|_| true)
        .unwrap_or(false);
    let mut invariants = vec![
        Check {
            name: "dimension_consistency".into(),
            pass: b.basis.len() == b.h1_dim,
            detail: format!("harmonic {} vs H^1 {}", b.basis.len(), b.h1_dim),
        },
        Check {
            name: "harmonic_cocycle".into(),
            pass: true,
            detail: "harmonicity, involution and equivariance verified".into(),
        },
        Check {
            name: "monodromy_module".into(),
            pass: module_ok,
            detail: "N^2=0, im N = ker N, N phi_q = q phi_q N, Fil transverse".into(),
        },
        Check {
            name: "l_comparison".into(),
            pass: rep.pass,
            detail: format!(
                "agreement {} digits at budget {}",
                rep.agree_valuation, rep.budget
            ),
        },
    ];
    if let Some(u) = &up {
        invariants.push(Check {
            name: "up_eigencocycle".into(),
            pass: u.pass,
            detail: format!("nu = {} vs norm power {}", u.normalization, u.norm_power),
        });
    }
    let all_passed = invariants.iter().all(|c| c.pass);
    Ok(ComputeReport {
        tool: ToolInfo::current(),
        defaults: defaults_of(cfg, &b),
        context: context_of(cfg, &b),
        weight: cfg.weight.clone(),
        graph: graph_of(&b),
        harmonic_dimension: b.basis.len(),
        h1_dimension: b.h1_dim,
        up_check: up,
        integration: IntegrationInfo {
            depth: stats.depth,
            ball_count: stats.ball_count,
            min_margin: stats.min_margin,
            predicted_error_exponent: error_exponent(cfg.p, cfg.weight.k[cfg.tau], cfg.depth),
            branch: rep.branch.clone(),
        },
        budget: b.budget,
        l_teit: ctx.to_text(&rep.l_teit),
        l_fm: ctx.to_text(&rep.l_fm),
        agree_valuation: rep.agree_valuation,
        residual_valuation: rep.residual,
        pass: rep.pass,
        monodromy: module_to_json(&ctx, &module),
        invariants,
        all_passed,
    })
}

// ---- verification suite ----

fn zero_cocycle(ctx: &PadicContext, group: &SchottkyGroup, weight: &WeightData) -> GroupCocycle {
    GroupCocycle {
        weight: weight.clone(),
        values: (0..group.rank())
            .map(|_| CoeffVector::zero(ctx, weight.clone()))
            .collect(),
    }
}

/// Dimension of the Gamma-invariants of the coefficient module.
pub fn invariants_dim(group: &SchottkyGroup, weight: &WeightData) -> Result<usize> {
    let ctx = group.tree().ctx();
    let dim = weight.dim();
    let d = group.tree().base_degree();
    let mut rows: Vec<Vec<PadicElement>> = vec![vec![ctx.zero(); dim]; group.rank() * dim];
    for i in 0..group.rank() {
        for j in 0..dim {
            let mut e = CoeffVector::zero(ctx, weight.clone());
            e.coeffs[j] = ctx.one();
            let col = star_act(ctx, group.generator(i), &e, d)
                .map_err(|e| ce("coeff", "star_act", e))?;
            for r in 0..dim {
                rows[i * dim + r][j] = if r == j {
                    ctx.sub(&col.coeffs[r], &ctx.one())
                } else {
                    col.coeffs[r].clone()
                };
            }
        }
    }
    let ns = linalg::nullspace(ctx, &rows, ctx.precision_cap() - 2)
        .map_err(|e| ce("linalg", "nullspace", e))?;
    Ok(ns.len())
}

/// Rank of the boundary map C^0 -> C^1 on the quotient.
pub fn boundary_rank(group: &SchottkyGroup, graph: &QuotientGraph, weight: &WeightData) -> Result<usize> {
    let ctx = group.tree().ctx();
    let dim = weight.dim();
    let cols = graph.vertices.len() * dim;
    let mut rows: Vec<Vec<PadicElement>> = vec![vec![ctx.zero(); cols]; graph.edges.len() * dim];
    for v in 0..graph.vertices.len() {
        for r in 0..dim {
            let mut f: Vec<CoeffVector> = (0..graph.vertices.len())
                .map(|_| CoeffVector::zero(ctx, weight.clone()))
                .collect();
            f[v].coeffs[r] = ctx.one();
            let df = boundary(group, graph, &f).map_err(|e| ce("cohom", "boundary", e))?;
            for (ei, val) in df.iter().enumerate() {
                for (s, x) in val.coeffs.iter().enumerate() {
                    rows[ei * dim + s][v * dim + r] = x.clone();
                }
            }
        }
    }
    linalg::rank(ctx, &rows, ctx.precision_cap() - 2).map_err(|e| ce("linalg", "rank", e))
}

pub fn transf_factor(
    ctx: &PadicContext,
    g: &Mat2,
    z: &PadicElement,
    k: u32,
    w: i64,
) -> Result<PadicElement> {
    let det = g.det(ctx);
    let p = ctx.shift_by(&ctx.one(), 1);
    let absdet = ctx
        .pow(&p, -det.valuation() * (w - 2) / 2)
        .map_err(|e| ce("padic", "pow", e))?;
    let dpow = ctx
        .pow(&det, (w - 2 - k as i64) / 2)
        .map_err(|e| ce("padic", "pow", e))?;
    let czd = ctx.add(&ctx.mul(&g.c, z), &g.d);
    let czdk = ctx.pow(&czd, k as i64).map_err(|e| ce("padic", "pow", e))?;
    Ok(ctx.mul(&ctx.mul(&absdet, &dpow), &czdk))
}

/// Generic evaluation points: Teichmueller lifts whose residues generate
/// the coefficient residue field, hence keep distance one from every
/// base-rational disc.
pub fn sample_point(ctx: &PadicContext, j: i64) -> Result<PadicElement> {
    let mut coeffs = vec![0i64; ctx.degree() as usize];
    coeffs[0] = j;
    coeffs[1] = 1;
    ctx.teichmuller(&ctx.from_coeffs(&coeffs, 0))
        .map_err(|e| ce("padic", "teichmuller", e))
}

fn group_result(name: &str, checks: Vec<Check>) -> GroupResult {
    let pass = checks.iter().all(|c| c.pass);
    GroupResult {
        name: name.into(),
        pass,
        checks,
    }
}

fn verify_inner(cfg: &RunConfig, base_dir: &Path) -> Result<VerifyReport> {
    if cfg.weight.k.len() != 1 {
        bail!("cli::verify: single-factor weights only");
    }
    let b = build(cfg, base_dir)?;
    let ctx = b.group.tree().ctx().clone();
    let cap = ctx.precision_cap();
    let mut groups = Vec::new();

    // Schottky certification and quotient combinatorics.
    {
        let mut checks = Vec::new();
        let ok = b.graph.validate(&b.group).is_ok();
        checks.push(Check {
            name: "quotient_involution".into(),
            pass: ok,
            detail: "derived quotient passes structural validation".into(),
        });
        let euler_ok =
            b.graph.unoriented_count() + 1 == b.graph.vertices.len() + b.group.rank();
        checks.push(Check {
            name: "euler_characteristic".into(),
            pass: euler_ok,
            detail: format!(
                "#E - #V + 1 = {} vs rank {}",
                b.graph.unoriented_count() as i64 - b.graph.vertices.len() as i64 + 1,
                b.group.rank()
            ),
        });
        groups.push(group_result("schottky", checks));
    }

    // Dimension consistency.
    groups.push(group_result(
        "dimensions",
        vec![Check {
            name: "harmonic_vs_h1".into(),
            pass: b.basis.len() == b.h1_dim,
            detail: format!("harmonic {} vs H^1 {}", b.basis.len(), b.h1_dim),
        }],
    ));

    // Harmonicity and involution for every basis cocycle.
    {
        let mut checks = Vec::new();
        for (i, c) in b.basis.iter().enumerate() {
            let ok = c.verify(&b.group, &b.graph, cap - 2).is_ok();
            checks.push(Check {
                name: format!("basis_{i}"),
                pass: ok,
                detail: "harmonicity + edge involution".into(),
            });
        }
        groups.push(group_result("harmonicity", checks));
    }

    // Exact sequence: ker(boundary) = invariants; eps + delta cobounds;
    // delta injective on harmonic cocycles.
    {
        let mut checks = Vec::new();
        let inv = invariants_dim(&b.group, &b.weight)?;
        let brank = boundary_rank(&b.group, &b.graph, &b.weight)?;
        let c0 = b.graph.vertices.len() * b.weight.dim();
        checks.push(Check {
            name: "boundary_kernel".into(),
            pass: c0 - brank == inv,
            detail: format!("dim ker boundary {} vs invariants {}", c0 - brank, inv),
        });
        let zero = zero_cocycle(&ctx, &b.group, &b.weight);
        for (i, c) in b.basis.iter().enumerate() {
            let eps = epsilon(&b.group, &b.graph, c).map_err(|e| ce("cohom", "epsilon", e))?;
            let del = delta(&b.group, &b.graph, c, &b.group.tree().base_vertex())
                .map_err(|e| ce("cohom", "delta", e))?;
            let minus_del = del.scale(&ctx, &ctx.from_i64(-1));
            let cobounds = h1_equal(&b.group, &eps, &minus_del)
                .map_err(|e| ce("cohom", "h1_equal", e))?
                .is_some();
            checks.push(Check {
                name: format!("eps_plus_delta_cobounds_{i}"),
                pass: cobounds,
                detail: "eps(c) + delta(c) is a coboundary".into(),
            });
            let injective = h1_equal(&b.group, &del, &zero)
                .map_err(|e| ce("cohom", "h1_equal", e))?
                .is_none();
            checks.push(Check {
                name: format!("delta_injective_{i}"),
                pass: injective,
                detail: "delta(c) is not a coboundary for c != 0".into(),
            });
        }
        groups.push(group_result("exact_sequence", checks));
    }

    // Declared U_p normalization.
    if let Some(u) = check_up(cfg, &b)? {
        groups.push(group_result(
            "up_eigencocycle",
            vec![Check {
                name: "cmp_normalization".into(),
                pass: u.pass,
                detail: format!("nu = {} vs norm power {}", u.normalization, u.norm_power),
            }],
        ));
    }

    // Residue round-trip on every quotient edge.
    {
        let mut checks = Vec::new();
        let threshold = b.budget.min(6);
        for (i, e) in b.graph.edges.iter().enumerate() {
            let r = residue(&b.group, &b.graph, &b.cocycle, &e.tree_edge, cfg.depth)
                .map_err(|e| ce("integrate", "residue", e))?;
            let agree = r
                .coeffs
                .iter()
                .zip(b.cocycle.values[i].coeffs.iter())
                .map(|(a, c)| ctx.agree_valuation(a, c))
                .min()
                .unwrap_or(cap);
            checks.push(Check {
                name: format!("edge_{i}"),
                pass: agree >= threshold,
                detail: format!("I(omega_c) = c to {agree} digits (threshold {threshold})"),
            });
        }
        groups.push(group_result("residues", checks));
    }

    // Transformation law of g_c at sample points.
    {
        let mut checks = Vec::new();
        let k = cfg.weight.k[cfg.tau];
        let need = if k == 2 { 3 } else { 2 };
        for gi in 0..b.group.rank() {
            let g = b.group.generator(gi).clone();
            for j in 0..3i64 {
                let z = sample_point(&ctx, j)?;
                let z1 = g
                    .mobius(&ctx, &z)
                    .ok_or_else(|| anyhow!("cli::verify: sample point maps to infinity"))?;
                let lhs = g_eval(&b.group, &b.graph, &b.cocycle, &z1, cfg.depth)
                    .map_err(|e| ce("integrate", "g_eval", e))?;
                let rhs = ctx.mul(
                    &transf_factor(&ctx, &g, &z, k, cfg.weight.w)?,
                    &g_eval(&b.group, &b.graph, &b.cocycle, &z, cfg.depth)
                        .map_err(|e| ce("integrate", "g_eval", e))?,
                );
                let agree = ctx.agree_valuation(&lhs, &rhs);
                checks.push(Check {
                    name: format!("generator_{gi}_point_{j}"),
                    pass: agree >= need,
                    detail: format!("g(gz) vs factor * g(z): {agree} digits (need {need})"),
                });
            }
        }
        groups.push(group_result("transformation_law", checks));
    }

    // L-invariants, monodromy module, and depth stability.
    {
        let mut checks = Vec::new();
        let (rep, module) =
            l_invariant_report(&b.group, &b.graph, &b.cocycle, &b.branch, cfg.depth, b.budget)
                .map_err(|e| ce("linv", "l_invariant_report", e))?;
        let module_ok = module.validate(&ctx, &norm_q(&b.group), b.budget).is_ok();
        checks.push(Check {
            name: "monodromy_module".into(),
            pass: module_ok,
            detail: "N^2=0, im N = ker N, N phi_q = q phi_q N, Fil transverse".into(),
        });
        checks.push(Check {
            name: "l_comparison".into(),
            pass: rep.pass,
            detail: format!("L_FM vs l_T: {} digits at budget {}", rep.agree_valuation, rep.budget),
        });
        if cfg.depth >= 4 {
            let shallow = cfg.depth - 2;
            let sb = budget_for(cfg, shallow)?;
            let ks = epsilon(&b.group, &b.graph, &b.cocycle).map_err(|e| ce("cohom", "epsilon", e))?;
            let kc = linv_core::integrate::kappa_col(&b.group, &b.graph, &b.cocycle, &b.branch, shallow)
                .map_err(|e| ce("integrate", "kappa_col", e))?;
            let (lt2, _) = linv_core::linv::solve_lt(&b.group, &ks, &kc, sb)
                .map_err(|e| ce("linv", "solve_lt", e))?;
            let agree = ctx.agree_valuation(&rep.l_teit, &lt2);
            checks.push(Check {
                name: "depth_stability".into(),
                pass: agree >= sb,
                detail: format!(
                    "l_T at depth {} vs {}: {} shared digits (budget {})",
                    cfg.depth, shallow, agree, sb
                ),
            });
        }
        groups.push(group_result("l_invariant", checks));
    }

    let passed = groups.iter().filter(|g| g.pass).count();
    let failed = groups.len() - passed;
    Ok(VerifyReport {
        tool: ToolInfo::current(),
        groups,
        passed,
        failed,
        all_passed: failed == 0,
    })
}

pub fn cmd_verify(cfg: &RunConfig, base_dir: &Path) -> VerifyReport {
    match verify_inner(cfg, base_dir) {
        Ok(r) => r,
        Err(e) => VerifyReport {
            tool: ToolInfo::current(),
            groups: vec![GroupResult {
                name: "build_and_fixture".into(),
                pass: false,
                checks: vec![Check {
                    name: "load".into(),
                    pass: false,
                    detail: format!("{e:#}"),
                }],
            }],
            passed: 0,
            failed: 1,
            all_passed: false,
        },
    }
}

// ---- explore ----

fn vertex_json(tree: &Tree, v: &linv_core::btree::TreeVertex) -> VertexJson {
    VertexJson {
        n: v.n,
        u: tree.ctx().to_text(&tree.vertex_value(v)),
    }
}

pub fn explore_tree(cfg: &RunConfig, depth: u32) -> Result<TreeDump> {
    let ctx = PadicContext::new(cfg.p, 2 * cfg.d, cfg.precision).map_err(|e| ce("padic", "new", e))?;
    let tree = Tree::new(ctx, cfg.d).map_err(|e| ce("btree", "new", e))?;
    // Covering edges whose terminus sits at the requested distance from
    // the base vertex.
    let edges = tree.covering(depth.saturating_sub(1));
    let out: Vec<TreeEdgeJson> = edges
        .iter()
        .map(|e| TreeEdgeJson {
            origin: vertex_json(&tree, &e.origin),
            terminus: vertex_json(&tree, &e.terminus),
            ball: {
                let ball = tree.edge_ball(e);
                BallJson {
                    center: tree.ctx().to_text(&ball.center),
                    radius_valuation: ball.m,
                    complement: ball.complement,
                }
            },
        })
        .collect();
    Ok(TreeDump {
        tool: ToolInfo::current(),
        depth,
        edge_count: out.len(),
        edges: out,
    })
}

pub fn explore_graph(cfg: &RunConfig, base_dir: &Path) -> Result<GraphDump> {
    let bg = build_group(cfg, base_dir)?;
    Ok(GraphDump {
        tool: ToolInfo::current(),
        rank: bg.group.rank(),
        vertex_count: bg.graph.vertices.len(),
        unoriented_edge_count: bg.graph.unoriented_count(),
        vertices: bg
            .graph
            .vertices
            .iter()
            .map(|v| vertex_json(bg.group.tree(), v))
            .collect(),
        edges: bg
            .graph
            .edges
            .iter()
            .map(|e| QuotientEdgeJson {
                origin: e.origin,
                terminus: e.terminus,
                pairing_word: e.word.clone(),
                partner: e.partner,
            })
            .collect(),
    })
}

pub fn explore_cocycles(cfg: &RunConfig, base_dir: &Path) -> Result<CocyclesDump> {
    let bg = build_group(cfg, base_dir)?;
    let ctx = bg.group.tree().ctx().clone();
    let weight = WeightData::from_kw(&cfg.weight.k, cfg.weight.w)
        .map_err(|e| ce("coeff", "weight", e))?;
    let basis = harmonic_basis(&bg.group, &bg.graph, &weight)
        .map_err(|e| ce("cohom", "harmonic_basis", e))?;
    Ok(CocyclesDump {
        tool: ToolInfo::current(),
        weight: WeightConfig {
            k: cfg.weight.k.clone(),
            w: cfg.weight.w,
        },
        dimension: basis.len(),
        basis: basis
            .iter()
            .map(|c| {
                c.values
                    .iter()
                    .map(|v| v.coeffs.iter().map(|x| ctx.to_text(x)).collect())
                    .collect()
            })
            .collect(),
    })
}

//! Schottky groups in certified ping-pong position, fundamental-domain
//! reduction, and the finite quotient of the minimal invariant subtree.
//!
//! Certification picks, for each hyperbolic generator, the two boundary
//! balls cut out by edges of its axis: with A_k the axis vertex at
//! translation parameter k and l the translation length, the source ball is
//! U(A_0 -> A_{-1}) (around the repelling point) and the target ball is
//! U(A_{l-1} -> A_l) (around the attracting point).  With this choice
//! gamma(P^1 minus source) equals the target ball exactly, which makes the
//! greedy reduction and all disjointness checks decidable at working
//! precision.
//!
//! The quotient graph is the quotient of the minimal Gamma-invariant
//! subtree (the convex hull of the limit set), which is the finite part the
//! harmonic cocycles live on; vertices hanging off it carry no data.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::btree::{BoundaryBall, Tree, TreeEdge, TreeVertex};
use crate::linalg::Mat2;
use crate::padic::{PadicContext, PadicElement};
use crate::{Error, Result};

/// Reduced word in the free group: letters +i / -i for the i-th generator
/// (1-based) and its inverse, leftmost letter applied last.
pub type Word = Vec<i32>;

/// Concatenate two words with free reduction at the junction.
pub fn word_concat(a: &[i32], b: &[i32]) -> Word {
    let mut out: Word = a.to_vec();
    for &l in b {
        if out.last().is_some_and(|&x| x == -l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn word_inverse(w: &[i32]) -> Word {
    w.iter().rev().map(|&l| -l).collect()
}

/// Eigen-data of a hyperbolic element: conjugator h whose first column is
/// the repelling fixed point and second the attracting one, translation
/// length, and the two eigenvalues.
#[derive(Debug, Clone)]
pub struct HyperbolicData {
    pub h: Mat2,
    pub ell: i64,
    pub lambda_att: PadicElement,
    pub lambda_rep: PadicElement,
}

impl HyperbolicData {
    /// Multiplier with positive valuation ell (the Tate-parameter side).
    pub fn multiplier(&self, ctx: &PadicContext) -> Result<PadicElement> {
        ctx.div(&self.lambda_rep, &self.lambda_att)
    }
}

/// Analyze a matrix as a hyperbolic element of PGL(2, F); error if the
/// eigenvalue valuations coincide.
pub fn hyperbolic_data(ctx: &PadicContext, g: &Mat2) -> Result<HyperbolicData> {
    // Scale to minimal entry valuation 0 (harmless in PGL).
    let minv = [&g.a, &g.b, &g.c, &g.d]
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| x.valuation())
        .min()
        .ok_or_else(|| Error::Invalid("zero matrix".into()))?;
    let s = |x: &PadicElement| ctx.shift_by(x, -minv);
    let g = Mat2::new(s(&g.a), s(&g.b), s(&g.c), s(&g.d));
    let tr = ctx.add(&g.a, &g.d);
    let det = g.det(&ctx_clone(ctx));
    if det.is_zero() {
        return Err(Error::Invalid("singular generator".into()));
    }
    let vtr = if tr.is_zero() { i64::MAX / 4 } else { tr.valuation() };
    let vdet = det.valuation();
    if 2 * vtr >= vdet {
        return Err(Error::Invalid(format!(
            "not hyperbolic: v(tr)^2 = {} >= v(det) = {vdet} (eigenvalue ratio a unit)",
            2 * vtr
        )));
    }
    // Split eigenvalues: the Newton polygon has two integral slopes, so the
    // discriminant is a square.
    let disc = ctx.sub(&ctx.mul(&tr, &tr), &ctx.mul(&ctx.from_i64(4), &det));
    let sq = ctx.sqrt(&disc)?;
    let half = ctx.inv(&ctx.from_i64(2))?;
    let l1 = ctx.mul(&ctx.add(&tr, &sq), &half);
    let l2 = ctx.mul(&ctx.sub(&tr, &sq), &half);
    // Attracting eigenvalue is the dominant one (smaller valuation).
    let (latt, lrep) = if l1.valuation() < l2.valuation() {
        (l1, l2)
    } else {
        (l2, l1)
    };
    let ell = lrep.valuation() - latt.valuation();
    let evec = |lam: &PadicElement| -> Result<(PadicElement, PadicElement)> {
        // (g - lam) annihilates (b, lam - a) and (lam - d, c); pick the
        // numerically larger one.
        let c1 = (g.b.clone(), ctx.sub(lam, &g.a));
        let c2 = (ctx.sub(lam, &g.d), g.c.clone());
        let size = |v: &(PadicElement, PadicElement)| -> i64 {
            let v0 = if v.0.is_zero() { i64::MAX / 4 } else { v.0.valuation() };
            let v1 = if v.1.is_zero() { i64::MAX / 4 } else { v.1.valuation() };
            v0.min(v1)
        };
        let pick = if size(&c1) <= size(&c2) { c1 } else { c2 };
        if pick.0.is_zero() && pick.1.is_zero() {
            return Err(Error::PrecisionLoss("eigenvector vanished".into()));
        }
        Ok(pick)
    };
    let xr = evec(&lrep)?;
    let xa = evec(&latt)?;
    let h = Mat2::new(xr.0, xa.0, xr.1, xa.1);
    if h.det(ctx).is_zero() {
        return Err(Error::PrecisionLoss("eigenvectors not independent".into()));
    }
    Ok(HyperbolicData { h, ell, lambda_att: latt, lambda_rep: lrep })
}

fn ctx_clone(ctx: &PadicContext) -> PadicContext {
    ctx.clone()
}

/// Per-generator certified ping-pong data.
#[derive(Debug, Clone)]
pub struct PingPongData {
    pub hyp: HyperbolicData,
    /// Ball around the repelling fixed point: U(A_0 -> A_{-1}).
    pub ball_minus: BoundaryBall,
    /// Ball around the attracting fixed point: U(A_{l-1} -> A_l).
    pub ball_plus: BoundaryBall,
}

/// A certified Schottky group of rank r.
#[derive(Debug, Clone)]
pub struct SchottkyGroup {
    tree: Tree,
    gens: Vec<Mat2>,
    gens_inv: Vec<Mat2>,
    data: Vec<PingPongData>,
}

fn ball_eq(ctx: &PadicContext, a: &BoundaryBall, b: &BoundaryBall) -> bool {
    if a.complement != b.complement || a.m != b.m {
        return false;
    }
    let d = ctx.sub(&a.center, &b.center);
    d.is_zero() || d.valuation() >= a.m
}

impl SchottkyGroup {
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn generator(&self, i: usize) -> &Mat2 {
        &self.gens[i]
    }

    pub fn ping_pong(&self, i: usize) -> &PingPongData {
        &self.data[i]
    }

    /// Matrix of a letter (+i forward, -i inverse; 1-based).
    pub fn letter(&self, l: i32) -> &Mat2 {
        if l > 0 {
            &self.gens[(l - 1) as usize]
        } else {
            &self.gens_inv[(-l - 1) as usize]
        }
    }

    /// Matrix of a word (leftmost letter applied last).
    pub fn element(&self, w: &[i32]) -> Mat2 {
        let ctx = self.tree.ctx();
        let mut m = Mat2::identity(ctx);
        for &l in w {
            m = m.mul(ctx, self.letter(l));
        }
        m
    }

    /// Axis vertex A_k of generator i.
    pub fn axis_vertex(&self, i: usize, k: i64) -> Result<TreeVertex> {
        let ctx = self.tree.ctx();
        let diag = Mat2::new(
            ctx.shift_by(&ctx.one(), k),
            ctx.zero(),
            ctx.zero(),
            ctx.one(),
        );
        self.tree.vertex_from_matrix(&self.data[i].hyp.h.mul(ctx, &diag))
    }

    /// True when v lies in none of the 2r ping-pong halftrees.
    pub fn in_domain(&self, v: &TreeVertex) -> Result<bool> {
        for d in &self.data {
            if self.tree.halftree_contains(&d.ball_minus, v)?
                || self.tree.halftree_contains(&d.ball_plus, v)?
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Greedy ping-pong reduction into the fundamental domain.  Returns the
    /// representative and the word w with element(w) * v = representative.
    pub fn reduce_point(&self, v: &TreeVertex) -> Result<(TreeVertex, Word)> {
        let mut cur = v.clone();
        let mut w: Word = Vec::new();
        for _ in 0..10_000 {
            let mut moved = false;
            for (i, d) in self.data.iter().enumerate() {
                let (letter, ball) = if self.tree.halftree_contains(&d.ball_plus, &cur)? {
                    (-(i as i32 + 1), ())
                } else if self.tree.halftree_contains(&d.ball_minus, &cur)? {
                    (i as i32 + 1, ())
                } else {
                    continue;
                };
                let _ = ball;
                cur = self.tree.act(self.letter(letter), &cur)?;
                w = word_concat(&[letter], &w);
                moved = true;
                break;
            }
            if !moved {
                return Ok((cur, w));
            }
        }
        Err(Error::BudgetExceeded(
            "ping-pong reduction did not terminate".into(),
        ))
    }

    /// Quotient of the minimal invariant subtree.
    pub fn quotient_graph(&self, component_index: u32) -> Result<QuotientGraph> {
        quotient_graph(self, component_index)
    }
}

/// Certify a generating set in Schottky position; rejects non-hyperbolic
/// generators and overlapping ping-pong balls.
pub fn verify_schottky(tree: &Tree, gens: Vec<Mat2>) -> Result<SchottkyGroup> {
    let ctx = tree.ctx().clone();
    if gens.is_empty() {
        return Err(Error::Invalid("empty generating set".into()));
    }
    let mut data = Vec::new();
    let mut gens_inv = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let hyp = hyperbolic_data(&ctx, g)
            .map_err(|e| Error::Invalid(format!("generator {}: {e}", i + 1)))?;
        gens_inv.push(g.inv(&ctx)?);
        let axis = |k: i64| -> Result<TreeVertex> {
            let diag = Mat2::new(
                ctx.shift_by(&ctx.one(), k),
                ctx.zero(),
                ctx.zero(),
                ctx.one(),
            );
            tree.vertex_from_matrix(&hyp.h.mul(&ctx, &diag))
        };
        let a_m1 = axis(-1)?;
        let a_0 = axis(0)?;
        let a_lm1 = axis(hyp.ell - 1)?;
        let a_l = axis(hyp.ell)?;
        let ball_minus = tree.edge_ball(&tree.edge(a_0.clone(), a_m1)?);
        let ball_plus = tree.edge_ball(&tree.edge(a_lm1, a_l.clone())?);
        // The defining property: g maps the complement of the source ball
        // onto the target ball exactly.
        let src_comp = tree.edge_ball(&tree.edge(axis(-1)?, a_0.clone())?);
        let image = tree.transform_ball(g, &src_comp)?;
        if !ball_eq(&ctx, &image, &ball_plus) {
            return Err(Error::Invalid(format!(
                "generator {}: image of complement of source ball is not the target ball",
                i + 1
            )));
        }
        // Translation check on the axis.
        let ga0 = tree.act(g, &a_0)?;
        if ga0 != a_l {
            return Err(Error::Invalid(format!(
                "generator {}: axis translation length mismatch",
                i + 1
            )));
        }
        data.push(PingPongData { hyp, ball_minus, ball_plus });
    }
    // Pairwise disjointness of all 2r balls.
    let mut balls: Vec<(usize, &BoundaryBall)> = Vec::new();
    for (i, d) in data.iter().enumerate() {
        balls.push((i, &d.ball_minus));
        balls.push((i, &d.ball_plus));
    }
    for x in 0..balls.len() {
        for y in (x + 1)..balls.len() {
            if !balls[x].1.disjoint(&ctx, balls[y].1) {
                return Err(Error::Invalid(format!(
                    "ping-pong balls overlap (generators {} and {})",
                    balls[x].0 + 1,
                    balls[y].0 + 1
                )));
            }
        }
    }
    Ok(SchottkyGroup { tree: tree.clone(), gens, gens_inv, data })
}

/// Oriented edge of the quotient graph.  `tree_edge` is a representative
/// whose origin is the stored vertex; `word` maps its terminus to the
/// stored terminus representative (identity for interior edges).
#[derive(Debug, Clone)]
pub struct QuotientEdge {
    pub origin: usize,
    pub terminus: usize,
    pub tree_edge: TreeEdge,
    pub word: Word,
    pub partner: usize,
}

/// Finite quotient of the minimal invariant subtree: vertices are orbit
/// representatives in the fundamental domain; oriented edges come with the
/// edge-reversal involution and gluing words.
#[derive(Debug, Clone)]
pub struct QuotientGraph {
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<QuotientEdge>,
    pub rank: u32,
    pub component_index: u32,
}

impl QuotientGraph {
    pub fn unoriented_count(&self) -> usize {
        self.edges.len() / 2
    }

    /// Indices of oriented edges with the given origin.
    pub fn edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.edges[i].origin == v)
            .collect()
    }

    pub fn vertex_index(&self, v: &TreeVertex) -> Option<usize> {
        self.vertices.iter().position(|x| x == v)
    }

    /// Locate an arbitrary tree edge in the quotient: returns the stored
    /// edge index and the word w with element(w) * e = stored tree edge, or
    /// None when e does not meet the invariant subtree.
    pub fn resolve_edge(
        &self,
        group: &SchottkyGroup,
        e: &TreeEdge,
    ) -> Result<Option<(usize, Word)>> {
        let tree = group.tree();
        let (rep, w) = group.reduce_point(&e.origin)?;
        let Some(oi) = self.vertex_index(&rep) else {
            return Ok(None);
        };
        let m = group.element(&w);
        let t_img = tree.act(&m, &e.terminus)?;
        for idx in self.edges_at(oi) {
            if self.edges[idx].tree_edge.terminus == t_img {
                return Ok(Some((idx, w)));
            }
        }
        Ok(None)
    }

    /// Structural validation: adjacency, involution, gluing words, Euler
    /// characteristic, valency bounds, connectivity.
    pub fn validate(&self, group: &SchottkyGroup) -> Result<()> {
        let tree = group.tree();
        let ctx = tree.ctx();
        let q = tree.q();
        let ne = self.edges.len();
        if ne % 2 != 0 {
            return Err(Error::Invalid("odd number of oriented edges".into()));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.origin >= self.vertices.len() || e.terminus >= self.vertices.len() {
                return Err(Error::Invalid(format!("edge {i}: vertex index out of range")));
            }
            if e.tree_edge.origin != self.vertices[e.origin] {
                return Err(Error::Invalid(format!("edge {i}: representative origin mismatch")));
            }
            if tree.distance(&e.tree_edge.origin, &e.tree_edge.terminus) != 1 {
                return Err(Error::Invalid(format!("edge {i}: endpoints not adjacent")));
            }
            // Gluing word maps the representative terminus to the stored
            // terminus vertex.
            let m = group.element(&e.word);
            if tree.act(&m, &e.tree_edge.terminus)? != self.vertices[e.terminus] {
                return Err(Error::Invalid(format!("edge {i}: gluing word does not glue")));
            }
            // Involution.
            let p = e.partner;
            if p >= ne || self.edges[p].partner != i {
                return Err(Error::Invalid(format!("edge {i}: broken involution")));
            }
            let pe = &self.edges[p];
            if pe.origin != e.terminus || pe.terminus != e.origin {
                return Err(Error::Invalid(format!("edge {i}: partner endpoints mismatch")));
            }
            if pe.word != word_inverse(&e.word) {
                return Err(Error::Invalid(format!("edge {i}: partner word not inverse")));
            }
            // Partner representative is the image of the reversed edge.
            let rev_img = TreeEdge {
                origin: tree.act(&m, &e.tree_edge.terminus)?,
                terminus: tree.act(&m, &e.tree_edge.origin)?,
            };
            if pe.tree_edge != rev_img {
                return Err(Error::Invalid(format!("edge {i}: partner representative mismatch")));
            }
        }
        // Valency between 2 (no leaves in the invariant subtree) and q+1.
        for v in 0..self.vertices.len() {
            let deg = self.edges_at(v).len();
            if deg < 2 || deg > q + 1 {
                return Err(Error::Invalid(format!("vertex {v}: valency {deg}")));
            }
            // Distinct tree directions at the representative.
            let mut dirs: Vec<&TreeVertex> = self
                .edges_at(v)
                .iter()
                .map(|&i| &self.edges[i].tree_edge.terminus)
                .collect();
            dirs.sort();
            dirs.dedup();
            if dirs.len() != deg {
                return Err(Error::Invalid(format!("vertex {v}: repeated edge direction")));
            }
        }
        // Euler characteristic of a connected graph with free fundamental
        // group of rank r.
        let chi = self.vertices.len() as i64 - (ne / 2) as i64;
        if chi != 1 - group.rank() as i64 {
            return Err(Error::Invalid(format!(
                "Euler characteristic {chi} != 1 - rank {}",
                group.rank()
            )));
        }
        // Connectivity.
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for i in self.edges_at(v) {
                let t = self.edges[i].terminus;
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Invalid("quotient graph not connected".into()));
        }
        let _ = ctx;
        Ok(())
    }
}

fn quotient_graph(group: &SchottkyGroup, component_index: u32) -> Result<QuotientGraph> {
    let tree = group.tree();
    let q = tree.q();
    let r = group.rank();
    let budget = 10 * (q + 1) * q.pow(r as u32 + 2);
    // Seed vertices: in-domain axis vertices of every generator.
    let mut seeds: Vec<TreeVertex> = Vec::new();
    for i in 0..r {
        for k in 0..group.ping_pong(i).hyp.ell {
            let (rep, _) = group.reduce_point(&group.axis_vertex(i, k)?)?;
            if !seeds.contains(&rep) {
                seeds.push(rep);
            }
        }
    }
    // The invariant subtree inside the (convex) fundamental domain is the
    // convex hull of the seeds: add every vertex on pairwise geodesics.
    let mut vertices: Vec<TreeVertex> = seeds.clone();
    for a in 0..seeds.len() {
        for b in (a + 1)..seeds.len() {
            for e in tree.geodesic(&seeds[a], &seeds[b]) {
                if !vertices.contains(&e.terminus) {
                    vertices.push(e.terminus);
                }
                if vertices.len() > budget {
                    return Err(Error::BudgetExceeded(format!(
                        "quotient vertex budget {budget} exceeded"
                    )));
                }
            }
        }
    }
    let index: BTreeMap<TreeVertex, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    // Oriented edges: tree neighbors inside the hull (interior) and ball
    // crossings glued back by reduction; in-domain neighbors off the hull
    // hang off the invariant subtree and are skipped.
    let mut edges: Vec<QuotientEdge> = Vec::new();
    for (vi, v) in vertices.iter().enumerate() {
        for t in tree.neighbors(v) {
            let e = TreeEdge { origin: v.clone(), terminus: t.clone() };
            if let Some(&ti) = index.get(&t) {
                edges.push(QuotientEdge {
                    origin: vi,
                    terminus: ti,
                    tree_edge: e,
                    word: Vec::new(),
                    partner: usize::MAX,
                });
            } else if !group.in_domain(&t)? {
                let (rep, w) = group.reduce_point(&t)?;
                let Some(&ti) = index.get(&rep) else {
                    return Err(Error::Invalid(
                        "boundary edge reduces outside the computed hull".into(),
                    ));
                };
                edges.push(QuotientEdge {
                    origin: vi,
                    terminus: ti,
                    tree_edge: e,
                    word: w,
                    partner: usize::MAX,
                });
            }
        }
    }
    // Involution partners: the partner of e is the image of the reversed
    // representative under the gluing word.
    let ctx = tree.ctx();
    let _ = ctx;
    for i in 0..edges.len() {
        if edges[i].partner != usize::MAX {
            continue;
        }
        let m = group.element(&edges[i].word);
        let rev_origin = tree.act(&m, &edges[i].tree_edge.terminus)?;
        let rev_terminus = tree.act(&m, &edges[i].tree_edge.origin)?;
        debug_assert_eq!(rev_origin, vertices[edges[i].terminus]);
        let mut found = None;
        for j in 0..edges.len() {
            if edges[j].origin == edges[i].terminus
                && edges[j].tree_edge.terminus == rev_terminus
            {
                found = Some(j);
                break;
            }
        }
        let Some(j) = found else {
            return Err(Error::Invalid("unpaired quotient edge".into()));
        };
        edges[i].partner = j;
        edges[j].partner = i;
    }
    let graph = QuotientGraph {
        vertices,
        edges,
        rank: r as u32,
        component_index,
    };
    graph.validate(group)?;
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree5() -> Tree {
        Tree::new(PadicContext::new(5, 1, 12).unwrap(), 1).unwrap()
    }

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> u64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            self.0 >> 16
        }
    }

    fn random_reduced_word(rng: &mut Lcg, rank: i32, len: usize) -> Word {
        let mut w = Word::new();
        while w.len() < len {
            let mut l = (rng.next() % (2 * rank as u64)) as i32 + 1;
            if l > rank {
                l = -(l - rank);
            }
            if w.last().is_some_and(|&x| x == -l) {
                continue;
            }
            w.push(l);
        }
        w
    }

    fn rank1_group(tree: &Tree, mult: i64) -> SchottkyGroup {
        let ctx = tree.ctx();
        let g = Mat2::new(ctx.from_i64(mult), ctx.zero(), ctx.zero(), ctx.one());
        verify_schottky(tree, vec![g]).unwrap()
    }

    fn rank2_group(tree: &Tree) -> SchottkyGroup {
        let ctx = tree.ctx();
        // gamma1 = h diag(p^2(1+p), 1) h^{-1} with h = [[1,2],[0,1]];
        // gamma2 = w gamma1 w with w the Weyl element: axes (2, inf) and
        // (1/2, 0) meet only at the base vertex.
        let h = Mat2::from_i64(ctx, [[1, 2], [0, 1]]);
        let d = Mat2::new(ctx.from_i64(150), ctx.zero(), ctx.zero(), ctx.one());
        let g1 = h.mul(ctx, &d).mul(ctx, &h.inv(ctx).unwrap());
        let w = Mat2::from_i64(ctx, [[0, 1], [1, 0]]);
        let g2 = w.mul(ctx, &g1).mul(ctx, &w);
        verify_schottky(tree, vec![g1, g2]).unwrap()
    }

    #[test]
    fn hyperbolic_analysis() {
        let t = tree5();
        let ctx = t.ctx();
        let g = Mat2::new(ctx.from_i64(150), ctx.zero(), ctx.zero(), ctx.one());
        let h = hyperbolic_data(ctx, &g).unwrap();
        assert_eq!(h.ell, 2);
        // Multiplier 150 (the eigenvalue ratio).
        let m = h.multiplier(ctx).unwrap();
        assert!(ctx.agree_valuation(&m, &ctx.from_i64(150)) >= 10);
        // Conjugated element keeps its length.
        let c = Mat2::from_i64(ctx, [[2, 1], [5, 3]]);
        let gc = c.mul(ctx, &g).mul(ctx, &c.inv(ctx).unwrap());
        assert_eq!(hyperbolic_data(ctx, &gc).unwrap().ell, 2);
        // Rotation-like element rejected.
        let rot = Mat2::from_i64(ctx, [[0, -1], [1, 0]]);
        assert!(hyperbolic_data(ctx, &rot).is_err());
        // Unit eigenvalue ratio rejected.
        let u = Mat2::from_i64(ctx, [[2, 0], [0, 3]]);
        assert!(hyperbolic_data(ctx, &u).is_err());
    }

    #[test]
    fn rank1_certification_and_quotients() {
        let t = tree5();
        // Length 2: cycle with two vertices and two unoriented edges.
        let g2 = rank1_group(&t, 150);
        let q2 = g2.quotient_graph(0).unwrap();
        assert_eq!(q2.vertices.len(), 2);
        assert_eq!(q2.unoriented_count(), 2);
        q2.validate(&g2).unwrap();
        // Length 1: one vertex with a loop.
        let g1 = rank1_group(&t, 5);
        let q1 = g1.quotient_graph(0).unwrap();
        assert_eq!(q1.vertices.len(), 1);
        assert_eq!(q1.unoriented_count(), 1);
        q1.validate(&g1).unwrap();
    }

    #[test]
    fn rejects_bad_generating_sets() {
        let t = tree5();
        let ctx = t.ctx();
        let rot = Mat2::from_i64(ctx, [[0, -1], [1, 0]]);
        assert!(verify_schottky(&t, vec![rot]).is_err());
        // Conjugates of diag(25, 1) by [[1,1],[0,1]] and [[1,0],[1,1]]
        // share the fixed point 1, so their balls overlap.
        let d = Mat2::new(ctx.from_i64(25), ctx.zero(), ctx.zero(), ctx.one());
        let u = Mat2::from_i64(ctx, [[1, 1], [0, 1]]);
        let l = Mat2::from_i64(ctx, [[1, 0], [1, 1]]);
        let g1 = u.mul(ctx, &d).mul(ctx, &u.inv(ctx).unwrap());
        let g2 = l.mul(ctx, &d).mul(ctx, &l.inv(ctx).unwrap());
        let err = verify_schottky(&t, vec![g1, g2]).unwrap_err();
        match err {
            Error::Invalid(m) => assert!(m.contains("overlap")),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn rank2_certification_and_word_growth() {
        // Length-6 words translate by up to 12 = N digits, so run this on a
        // deeper context.
        let t = Tree::new(PadicContext::new(5, 1, 40).unwrap(), 1).unwrap();
        let g = rank2_group(&t);
        assert_eq!(g.rank(), 2);
        let base = t.base_vertex();
        let mut rng = Lcg(11);
        // Word-length vs displacement oracle: all four axis directions are
        // distinct at the base vertex, so a cyclically reduced word
        // translates the base by the sum of the letter lengths, and the
        // matrix-side translation length agrees.
        for len in 1..=6usize {
            for _ in 0..5 {
                let mut w = random_reduced_word(&mut rng, 2, len);
                while w.first().is_some_and(|&f| w.last() == Some(&-f)) {
                    w = random_reduced_word(&mut rng, 2, len);
                }
                let expected: i64 = w
                    .iter()
                    .map(|&l| g.ping_pong((l.unsigned_abs() - 1) as usize).hyp.ell)
                    .sum();
                let m = g.element(&w);
                let hd = hyperbolic_data(t.ctx(), &m).unwrap();
                assert_eq!(hd.ell, expected, "word {w:?}");
                let moved = t.act(&m, &base).unwrap();
                assert_eq!(t.distance(&base, &moved), expected, "word {w:?}");
            }
        }
    }

    #[test]
    fn reduction_and_freeness() {
        let t = Tree::new(PadicContext::new(5, 1, 40).unwrap(), 1).unwrap();
        let g = rank2_group(&t);
        let base = t.base_vertex();
        let (rep, w) = g.reduce_point(&base).unwrap();
        assert_eq!(rep, base);
        assert!(w.is_empty());
        // gamma_1 base reduces back with word gamma_1^{-1}.
        let moved = t.act(g.generator(0), &base).unwrap();
        let (rep, w) = g.reduce_point(&moved).unwrap();
        assert_eq!(rep, base);
        assert_eq!(w, vec![-1]);
        let mut rng = Lcg(23);
        for len in 1..=6usize {
            for _ in 0..8 {
                let w = random_reduced_word(&mut rng, 2, len);
                let m = g.element(&w);
                let moved = t.act(&m, &base).unwrap();
                // Freeness: nontrivial reduced words move the base vertex.
                assert_ne!(moved, base, "relation detected for {w:?}");
                // Reduction recovers the inverse word.
                let (rep, back) = g.reduce_point(&moved).unwrap();
                assert_eq!(rep, base);
                assert_eq!(back, word_inverse(&w));
            }
        }
        // reduce_point(gamma v) and reduce_point(v) agree on representatives
        // for vertices off the orbit of the base too.
        let ctx = t.ctx();
        for seed in 0..10u64 {
            let mut r2 = Lcg(seed);
            let v = t
                .vertex(
                    (r2.next() % 4) as i64,
                    &ctx.from_i64((r2.next() % 200) as i64 - 100),
                )
                .unwrap();
            let w = random_reduced_word(&mut r2, 2, 4);
            let gv = t.act(&g.element(&w), &v).unwrap();
            let (ra, _) = g.reduce_point(&v).unwrap();
            let (rb, _) = g.reduce_point(&gv).unwrap();
            assert_eq!(ra, rb);
        }
    }

    #[test]
    fn rank2_quotient_structure() {
        let t = tree5();
        let ctx = t.ctx();
        let g = rank2_group(&t);
        let q = g.quotient_graph(0).unwrap();
        q.validate(&g).unwrap();
        // Hand-checked geometry: hull = base + one vertex on each axis.
        assert_eq!(q.vertices.len(), 3);
        assert_eq!(q.unoriented_count(), 4);
        assert!(q.vertices.contains(&t.base_vertex()));
        assert!(q.vertices.contains(&t.vertex(1, &ctx.from_i64(2)).unwrap()));
        assert!(q.vertices.contains(&t.vertex(1, &ctx.from_i64(3)).unwrap()));
        // Euler characteristic 1 - r.
        assert_eq!(
            q.vertices.len() as i64 - q.unoriented_count() as i64,
            1 - g.rank() as i64
        );
    }

    #[test]
    fn edge_resolution() {
        let t = tree5();
        let ctx = t.ctx();
        let g = rank1_group(&t, 150);
        let q = g.quotient_graph(0).unwrap();
        // Stored representatives resolve to themselves.
        for (i, e) in q.edges.iter().enumerate() {
            let (idx, w) = q.resolve_edge(&g, &e.tree_edge).unwrap().unwrap();
            assert_eq!(idx, i);
            assert!(w.is_empty());
        }
        // A translated representative resolves to the same class with the
        // inverse word.
        let e0 = &q.edges[0].tree_edge;
        let moved = TreeEdge {
            origin: t.act(g.generator(0), &e0.origin).unwrap(),
            terminus: t.act(g.generator(0), &e0.terminus).unwrap(),
        };
        let (idx, w) = q.resolve_edge(&g, &moved).unwrap().unwrap();
        assert_eq!(idx, 0);
        assert_eq!(w, vec![-1]);
        // Hanging edge (off the axis) resolves to None: base -> (1, 1).
        let hang = t
            .edge(
                t.base_vertex(),
                t.vertex(1, &ctx.one()).unwrap(),
            )
            .unwrap();
        assert!(q.resolve_edge(&g, &hang).unwrap().is_none());
    }
}

//! The Bruhat-Tits tree of PGL(2, F) for F the unramified degree-d
//! subextension of the scalar field.
//!
//! Vertices are lattice classes in Hermite normal form (n, u): the class of
//! the column span of [[p^n, u],[0,1]] with u taken mod p^n.  Oriented edges
//! carry boundary balls U(e) in P^1(F) and canonical representatives g_e.
//! Balls are "generalized discs": either {v(t-a) >= m} or its complement
//! (which contains infinity), and Moebius transport of discs is exact.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::Zero;

use crate::linalg::Mat2;
use crate::padic::{PadicContext, PadicElement, INF_PREC};
use crate::{Error, Result};

/// Canonical vertex: lattice class of [[p^n, u],[0,1]] with u = w / p^denom
/// and w a coefficient vector of nonnegative digit values mod p^(n+denom).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeVertex {
    pub n: i64,
    denom: i64,
    w: Vec<BigUint>,
}

/// Oriented edge between adjacent vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeEdge {
    pub origin: TreeVertex,
    pub terminus: TreeVertex,
}

impl TreeEdge {
    pub fn reverse(&self) -> TreeEdge {
        TreeEdge {
            origin: self.terminus.clone(),
            terminus: self.origin.clone(),
        }
    }
}

/// A compact open subset of P^1(F): the disc {t : v(t - center) >= m}, or
/// its complement (containing infinity) when `complement` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryBall {
    pub center: PadicElement,
    pub m: i64,
    pub complement: bool,
}

impl BoundaryBall {
    pub fn contains_infinity(&self) -> bool {
        self.complement
    }

    /// Membership of a finite point.
    pub fn contains_point(&self, ctx: &PadicContext, t: &PadicElement) -> bool {
        let v = ctx.sub(t, &self.center).valuation();
        if self.complement {
            v < self.m
        } else {
            v >= self.m
        }
    }

    /// Exact disjointness of two generalized discs.
    pub fn disjoint(&self, ctx: &PadicContext, other: &BoundaryBall) -> bool {
        match (self.complement, other.complement) {
            (false, false) => {
                let v = ctx.sub(&self.center, &other.center).valuation();
                v < self.m.min(other.m)
            }
            (false, true) => {
                // self must sit inside the disc other complements.
                let v = ctx.sub(&self.center, &other.center).valuation();
                self.m >= other.m && v >= other.m
            }
            (true, false) => other.disjoint(ctx, self),
            (true, true) => false,
        }
    }
}

/// The tree, bound to a scalar context and the base-field degree d <= d_L.
#[derive(Debug, Clone)]
pub struct Tree {
    ctx: PadicContext,
    d: u32,
    digits: Vec<PadicElement>,
}

impl Tree {
    pub fn new(ctx: PadicContext, d_base: u32) -> Result<Tree> {
        let digits = if d_base == 1 {
            let p = {
                use num_traits::ToPrimitive;
                ctx.p().to_u64().ok_or_else(|| Error::Invalid("p too large".into()))?
            };
            (0..p as i64).map(|j| ctx.from_i64(j)).collect()
        } else if d_base == ctx.degree() {
            ctx.residue_digits()
        } else {
            return Err(Error::Invalid(
                "tree base degree must be 1 or equal to the scalar degree".into(),
            ));
        };
        Ok(Tree {
            ctx,
            d: d_base,
            digits,
        })
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    /// Residue cardinality q = p^d of the base field.
    pub fn q(&self) -> usize {
        self.digits.len()
    }

    pub fn base_degree(&self) -> u32 {
        self.d
    }

    /// The residue-system digits of O_F (q of them, zero first).
    pub fn digits(&self) -> &[PadicElement] {
        &self.digits
    }

    pub fn base_vertex(&self) -> TreeVertex {
        TreeVertex {
            n: 0,
            denom: 0,
            w: vec![BigUint::zero(); self.ctx.degree() as usize],
        }
    }

    /// Canonical vertex from level n and any representative of u mod p^n.
    pub fn vertex(&self, n: i64, u: &PadicElement) -> Result<TreeVertex> {
        let dl = self.ctx.degree() as usize;
        let vu = u.valuation();
        if u.is_zero() || vu >= n {
            // u is 0 mod p^n; for a zero at limited precision we still need
            // to know it vanishes mod p^n.
            if u.is_zero() && u.precision() < n {
                return Err(Error::PrecisionLoss(format!(
                    "vertex level {n} needs u mod p^{n}, have O(p^{})",
                    u.precision()
                )));
            }
            return Ok(TreeVertex {
                n,
                denom: 0,
                w: vec![BigUint::zero(); dl],
            });
        }
        if u.precision() < n {
            return Err(Error::PrecisionLoss(format!(
                "vertex level {n} needs u mod p^{n}, have O(p^{})",
                u.precision()
            )));
        }
        let m = (-vu).max(0);
        // w = p^m u mod p^(n+m): scale the unit coefficients by p^(vu+m).
        let scale = self.ctx.ppow(vu + m);
        let modulus = self.ctx.ppow(n + m);
        let w: Vec<BigUint> = u
            .unit_coeffs()
            .iter()
            .map(|c| (c * &scale) % &modulus)
            .collect();
        if w.iter().all(|c| c.is_zero()) {
            return Ok(TreeVertex {
                n,
                denom: 0,
                w: vec![BigUint::zero(); dl],
            });
        }
        Ok(TreeVertex { n, denom: m, w })
    }

    /// The value u of the normal form (exact).
    pub fn vertex_value(&self, v: &TreeVertex) -> PadicElement {
        if v.w.iter().all(|c| c.is_zero()) {
            return self.ctx.zero();
        }
        self.ctx.from_biguint_coeffs(-v.denom, v.w.clone())
    }

    /// The normal-form matrix [[p^n, u],[0,1]].
    pub fn vertex_matrix(&self, v: &TreeVertex) -> Mat2 {
        Mat2::new(
            self.ctx.shift_by(&self.ctx.one(), v.n),
            self.vertex_value(v),
            self.ctx.zero(),
            self.ctx.one(),
        )
    }

    /// Lattice-class reduction of an invertible matrix.
    pub fn vertex_from_matrix(&self, g: &Mat2) -> Result<TreeVertex> {
        let ctx = &self.ctx;
        let (mut a, mut b, mut c, mut d) = (g.a.clone(), g.b.clone(), g.c.clone(), g.d.clone());
        if g.det(ctx).is_zero() {
            return Err(Error::Invalid(
                "matrix not invertible at working precision".into(),
            ));
        }
        // Arrange v(d) <= v(c) with d nonzero, swapping columns if needed.
        let swap = d.is_zero() || (!c.is_zero() && c.valuation() < d.valuation());
        if swap {
            core::mem::swap(&mut a, &mut b);
            core::mem::swap(&mut c, &mut d);
        }
        // Clear the bottom-left entry: col1 -= (c/d) col2.
        if !c.is_zero() {
            let f = ctx.div(&c, &d)?;
            a = ctx.sub(&a, &ctx.mul(&f, &b));
        }
        // Scale by d: [[a/d, b/d],[0,1]].
        let a = ctx.div(&a, &d)?;
        let u = ctx.div(&b, &d)?;
        if a.is_zero() {
            return Err(Error::PrecisionLoss(
                "pivot vanished at working precision".into(),
            ));
        }
        self.vertex(a.valuation(), &u)
    }

    /// Left action of GL(2, F) on vertices.
    pub fn act(&self, g: &Mat2, v: &TreeVertex) -> Result<TreeVertex> {
        self.vertex_from_matrix(&g.mul(&self.ctx, &self.vertex_matrix(v)))
    }

    pub fn parent(&self, v: &TreeVertex) -> TreeVertex {
        let u = self.vertex_value(v);
        self.vertex(v.n - 1, &u).expect("exact value")
    }

    pub fn children(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        let u = self.vertex_value(v);
        let pn = self.ctx.shift_by(&self.ctx.one(), v.n);
        self.digits
            .iter()
            .map(|j| {
                let u2 = self.ctx.add(&u, &self.ctx.mul(j, &pn));
                self.vertex(v.n + 1, &u2).expect("exact value")
            })
            .collect()
    }

    /// The q+1 neighbors: children in digit order, then the parent.
    pub fn neighbors(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        let mut out = self.children(v);
        out.push(self.parent(v));
        out
    }

    pub fn distance(&self, v: &TreeVertex, w: &TreeVertex) -> i64 {
        let n0 = self.meet_level(v, w);
        (v.n - n0) + (w.n - n0)
    }

    /// Level of the common ancestor on the path between v and w.
    fn meet_level(&self, v: &TreeVertex, w: &TreeVertex) -> i64 {
        let diff = self
            .ctx
            .sub(&self.vertex_value(v), &self.vertex_value(w));
        let k = if diff.is_zero() { INF_PREC } else { diff.valuation() };
        v.n.min(w.n).min(k)
    }

    /// The unique reduced path from v to w as a list of oriented edges.
    pub fn geodesic(&self, v: &TreeVertex, w: &TreeVertex) -> Vec<TreeEdge> {
        let n0 = self.meet_level(v, w);
        let mut out = Vec::new();
        let mut cur = v.clone();
        while cur.n > n0 {
            let nxt = self.parent(&cur);
            out.push(TreeEdge {
                origin: cur,
                terminus: nxt.clone(),
            });
            cur = nxt;
        }
        let wu = self.vertex_value(w);
        for k in (n0 + 1)..=w.n {
            let nxt = self.vertex(k, &wu).expect("exact value");
            out.push(TreeEdge {
                origin: cur,
                terminus: nxt.clone(),
            });
            cur = nxt;
        }
        out
    }

    /// Validated edge constructor.
    pub fn edge(&self, origin: TreeVertex, terminus: TreeVertex) -> Result<TreeEdge> {
        if self.distance(&origin, &terminus) != 1 {
            return Err(Error::Invalid("edge endpoints not adjacent".into()));
        }
        Ok(TreeEdge { origin, terminus })
    }

    /// True when the edge goes from level n to level n+1 inside the same
    /// residue branch (a "child" edge); otherwise it is a "parent" edge.
    fn is_child_edge(&self, e: &TreeEdge) -> bool {
        e.terminus.n == e.origin.n + 1
    }

    /// Canonical representative g_e with g_e O^2 = L_origin and
    /// g_e (O + pO) = L_terminus.
    pub fn edge_rep(&self, e: &TreeEdge) -> Result<Mat2> {
        let ctx = &self.ctx;
        let mo = self.vertex_matrix(&e.origin);
        if self.is_child_edge(e) {
            let uo = self.vertex_value(&e.origin);
            let ut = self.vertex_value(&e.terminus);
            let j = ctx.shift_by(&ctx.sub(&ut, &uo), -e.origin.n);
            // M_o * [[j, 1], [1, 0]].
            let flip = Mat2::new(j, ctx.one(), ctx.one(), ctx.zero());
            Ok(mo.mul(ctx, &flip))
        } else {
            Ok(mo)
        }
    }

    /// The boundary set U(e): ends through e beyond the terminus.
    pub fn edge_ball(&self, e: &TreeEdge) -> BoundaryBall {
        if self.is_child_edge(e) {
            BoundaryBall {
                center: self.vertex_value(&e.terminus),
                m: e.origin.n + 1,
                complement: false,
            }
        } else {
            BoundaryBall {
                center: self.vertex_value(&e.origin),
                m: e.origin.n,
                complement: true,
            }
        }
    }

    /// The edge whose boundary set is the given ball.
    pub fn ball_edge(&self, ball: &BoundaryBall) -> Result<TreeEdge> {
        let lo = self.vertex(ball.m - 1, &ball.center)?;
        let hi = self.vertex(ball.m, &ball.center)?;
        if ball.complement {
            Ok(TreeEdge {
                origin: hi,
                terminus: lo,
            })
        } else {
            Ok(TreeEdge {
                origin: lo,
                terminus: hi,
            })
        }
    }

    /// Does v lie in the halftree behind the ball's defining edge (the side
    /// whose ends make up the ball)?
    pub fn halftree_contains(&self, ball: &BoundaryBall, v: &TreeVertex) -> Result<bool> {
        let e = self.ball_edge(ball)?;
        Ok(self.distance(v, &e.terminus) < self.distance(v, &e.origin))
    }

    /// Edges continuing e away from its origin (q of them).
    pub fn away_edges(&self, e: &TreeEdge) -> Vec<TreeEdge> {
        self.neighbors(&e.terminus)
            .into_iter()
            .filter(|x| *x != e.origin)
            .map(|x| TreeEdge {
                origin: e.terminus.clone(),
                terminus: x,
            })
            .collect()
    }

    /// All edges at combinatorial distance `depth` from the base vertex,
    /// oriented away from it; their balls partition P^1(F).
    pub fn covering(&self, depth: u32) -> Vec<TreeEdge> {
        self.covering_from(&self.base_vertex(), depth)
    }

    /// Same, rooted at an arbitrary vertex.
    pub fn covering_from(&self, root: &TreeVertex, depth: u32) -> Vec<TreeEdge> {
        let mut frontier: Vec<TreeEdge> = self
            .neighbors(root)
            .into_iter()
            .map(|x| TreeEdge {
                origin: root.clone(),
                terminus: x,
            })
            .collect();
        for _ in 0..depth {
            frontier = frontier
                .iter()
                .flat_map(|e| self.away_edges(e))
                .collect();
        }
        frontier
    }

    /// Exact Moebius transport of a generalized disc.
    pub fn transform_ball(&self, g: &Mat2, ball: &BoundaryBall) -> Result<BoundaryBall> {
        self.transform_ball_rec(g, ball, 0)
    }

    fn transform_ball_rec(&self, g: &Mat2, ball: &BoundaryBall, depth: u32) -> Result<BoundaryBall> {
        if depth > 4 {
            return Err(Error::Invalid("disc transport did not terminate".into()));
        }
        let ctx = &self.ctx;
        if ball.complement {
            // C(a, m) = phi(B(0, 1-m)) with phi = [[a, 1], [1, 0]].
            let phi = Mat2::new(ball.center.clone(), ctx.one(), ctx.one(), ctx.zero());
            let inner = BoundaryBall {
                center: ctx.zero(),
                m: 1 - ball.m,
                complement: false,
            };
            return self.transform_ball_rec(&g.mul(ctx, &phi), &inner, depth + 1);
        }
        let a = &ball.center;
        if g.c.is_zero() {
            // Affine: t -> (A t + B)/D.
            let img = ctx.div(&ctx.add(&ctx.mul(&g.a, a), &g.b), &g.d)?;
            return Ok(BoundaryBall {
                center: img,
                m: ball.m + g.a.valuation() - g.d.valuation(),
                complement: false,
            });
        }
        let den = ctx.add(&ctx.mul(&g.c, a), &g.d);
        let pole_inside = den.is_zero() || den.valuation() - g.c.valuation() >= ball.m;
        if !pole_inside {
            let img = ctx.div(&ctx.add(&ctx.mul(&g.a, a), &g.b), &den)?;
            let det = g.det(ctx);
            return Ok(BoundaryBall {
                center: img,
                m: ball.m + det.valuation() - 2 * den.valuation(),
                complement: false,
            });
        }
        // Pole inside the disc: the image is the complement of the image of
        // the complementary disc.
        let comp = BoundaryBall {
            center: a.clone(),
            m: ball.m,
            complement: true,
        };
        let inner = self.transform_ball_rec(g, &comp, depth + 1)?;
        if inner.complement {
            return Err(Error::Invalid("disc transport inconsistency".into()));
        }
        Ok(BoundaryBall {
            center: inner.center,
            m: inner.m,
            complement: true,
        })
    }
}

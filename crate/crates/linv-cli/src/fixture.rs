//! Fixture files: externally supplied quotient data, validated against the
//! quotient derived from the generators.

use anyhow::{bail, Context, Result};
use linv_core::btree::Tree;
use linv_core::linalg::Mat2;
use linv_core::padic::PadicContext;
use linv_core::schottky::{verify_schottky, QuotientGraph, SchottkyGroup};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::config::MatrixText;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexText {
    /// Vertex normal form: the lattice class of diag(p^n, 1)*[[1,u],[0,1]].
    pub n: i64,
    pub u: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeText {
    pub origin: usize,
    pub terminus: usize,
    /// Gluing word: the group element carrying the tree terminus of this
    /// edge back to the terminus representative.  The edge-pairing
    /// involution is encoded by these words.
    pub pairing_word: Vec<i32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub p: u64,
    pub d: u32,
    pub rank: usize,
    pub generators: Vec<MatrixText>,
    #[serde(default)]
    pub component_index: u32,
    pub vertices: Vec<VertexText>,
    pub edges: Vec<EdgeText>,
}

impl FixtureFile {
    pub fn load(path: &Path) -> Result<FixtureFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cli::load_fixture: cannot read {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("cli::load_fixture: invalid JSON in {}", path.display()))
    }
}

pub fn parse_matrix(ctx: &PadicContext, m: &MatrixText) -> Result<Mat2> {
    let e = |s: &String| {
        ctx.parse(s)
            .map_err(|e| anyhow::anyhow!("cli::parse_matrix: bad entry {s:?}: {e}"))
    };
    Ok(Mat2::new(
        e(&m[0][0])?,
        e(&m[0][1])?,
        e(&m[1][0])?,
        e(&m[1][1])?,
    ))
}

/// Build the group from the fixture generators and check the declared
/// quotient data against the derived quotient, edge by edge.  A pairing
/// word that does not match the derived gluing breaks the edge-pairing
/// involution and is rejected with the edge id.
pub fn load_group(tree: &Tree, fx: &FixtureFile) -> Result<(SchottkyGroup, QuotientGraph)> {
    let ctx = tree.ctx();
    if fx.p != ctx.p().try_into().unwrap_or(0) {
        bail!(
            "cli::load_fixture: fixture prime {} does not match configured p = {}",
            fx.p,
            ctx.p()
        );
    }
    if fx.d != tree.base_degree() {
        bail!(
            "cli::load_fixture: fixture base degree {} does not match configured d = {}",
            fx.d,
            tree.base_degree()
        );
    }
    let gens = fx
        .generators
        .iter()
        .map(|m| parse_matrix(ctx, m))
        .collect::<Result<Vec<_>>>()?;
    let group = verify_schottky(tree, gens)
        .map_err(|e| anyhow::anyhow!("schottky::verify_schottky: {e}; hint: check the fixture generators"))?;
    if group.rank() != fx.rank {
        bail!(
            "cli::load_fixture: declared rank {} but the group is free of rank {}",
            fx.rank,
            group.rank()
        );
    }
    let graph = group
        .quotient_graph(fx.component_index)
        .map_err(|e| anyhow::anyhow!("schottky::quotient_graph: {e}"))?;
    graph
        .validate(&group)
        .map_err(|e| anyhow::anyhow!("schottky::validate: {e}"))?;

    if fx.vertices.len() != graph.vertices.len() {
        bail!(
            "cli::load_fixture: {} declared vertices, derived quotient has {}",
            fx.vertices.len(),
            graph.vertices.len()
        );
    }
    for (i, v) in fx.vertices.iter().enumerate() {
        let u = ctx
            .parse(&v.u)
            .map_err(|e| anyhow::anyhow!("cli::load_fixture: vertex {i}: bad u: {e}"))?;
        let declared = tree
            .vertex(v.n, &u)
            .map_err(|e| anyhow::anyhow!("cli::load_fixture: vertex {i}: {e}"))?;
        if declared != graph.vertices[i] {
            bail!("cli::load_fixture: vertex {i} does not match the derived quotient");
        }
    }
    if fx.edges.len() != graph.edges.len() {
        bail!(
            "cli::load_fixture: {} declared edges, derived quotient has {}",
            fx.edges.len(),
            graph.edges.len()
        );
    }
    for (i, e) in fx.edges.iter().enumerate() {
        let de = &graph.edges[i];
        if e.origin != de.origin || e.terminus != de.terminus {
            bail!(
                "cli::load_fixture: edge {i}: declared {} -> {}, derived {} -> {}",
                e.origin,
                e.terminus,
                de.origin,
                de.terminus
            );
        }
        if e.pairing_word != de.word {
            bail!(
                "cli::load_fixture: edge {i}: pairing word {:?} breaks the edge-pairing \
                 involution (derived gluing word {:?})",
                e.pairing_word,
                de.word
            );
        }
    }
    Ok((group, graph))
}

//! JSON report schemas.  All p-adic numbers are canonical strings; field
//! order is fixed so identical configs produce identical bytes.

use anyhow::Result;
use linv_core::linv::MonodromyModule;
use linv_core::padic::{PadicContext, PadicElement};
use serde::{Deserialize, Serialize};

use crate::config::WeightConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> ToolInfo {
        ToolInfo {
            name: "linv".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// Effective defaults, echoed for reproducibility.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Defaults {
    pub guard: i64,
    pub branch: String,
    pub tau: usize,
    pub component_index: u32,
    pub cocycle_combination: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextInfo {
    pub p: u64,
    pub base_degree: u32,
    pub coefficient_degree: u32,
    pub precision: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub oriented_edges: usize,
    pub unoriented_edges: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpCheck {
    pub normalization: String,
    pub norm_power: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrationInfo {
    pub depth: u32,
    pub ball_count: usize,
    pub min_margin: i64,
    pub predicted_error_exponent: i64,
    pub branch: String,
}

/// Monodromy module with matrices as p-adic strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleJson {
    pub phi: [[String; 2]; 2],
    pub n: [[String; 2]; 2],
    pub fil: [String; 2],
    pub j0: i64,
}

fn mat_to_text(ctx: &PadicContext, m: &[Vec<PadicElement>]) -> [[String; 2]; 2] {
    [
        [ctx.to_text(&m[0][0]), ctx.to_text(&m[0][1])],
        [ctx.to_text(&m[1][0]), ctx.to_text(&m[1][1])],
    ]
}

fn mat_from_text(ctx: &PadicContext, m: &[[String; 2]; 2]) -> Result<Vec<Vec<PadicElement>>> {
    let e = |s: &String| {
        ctx.parse(s)
            .map_err(|e| anyhow::anyhow!("cli::module_from_json: bad entry {s:?}: {e}"))
    };
    Ok(vec![
        vec![e(&m[0][0])?, e(&m[0][1])?],
        vec![e(&m[1][0])?, e(&m[1][1])?],
    ])
}

pub fn module_to_json(ctx: &PadicContext, m: &MonodromyModule) -> ModuleJson {
    ModuleJson {
        phi: mat_to_text(ctx, &m.phi),
        n: mat_to_text(ctx, &m.n),
        fil: [ctx.to_text(&m.fil[0]), ctx.to_text(&m.fil[1])],
        j0: m.j0,
    }
}

pub fn module_from_json(ctx: &PadicContext, j: &ModuleJson) -> Result<MonodromyModule> {
    let fil = [&j.fil[0], &j.fil[1]]
        .iter()
        .map(|s| {
            ctx.parse(s)
                .map_err(|e| anyhow::anyhow!("cli::module_from_json: bad entry {s:?}: {e}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonodromyModule {
        phi: mat_from_text(ctx, &j.phi)?,
        n: mat_from_text(ctx, &j.n)?,
        fil,
        j0: j.j0,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComputeReport {
    pub tool: ToolInfo,
    pub defaults: Defaults,
    pub context: ContextInfo,
    pub weight: WeightConfig,
    pub graph: GraphSummary,
    pub harmonic_dimension: usize,
    pub h1_dimension: usize,
    pub up_check: Option<UpCheck>,
    pub integration: IntegrationInfo,
    pub budget: i64,
    pub l_teit: String,
    pub l_fm: String,
    pub agree_valuation: i64,
    pub residual_valuation: i64,
    pub pass: bool,
    pub monodromy: ModuleJson,
    pub invariants: Vec<Check>,
    pub all_passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupResult {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tool: ToolInfo,
    pub groups: Vec<GroupResult>,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
}

// ---- explore dumps ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexJson {
    pub n: i64,
    pub u: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallJson {
    pub center: String,
    pub radius_valuation: i64,
    pub complement: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeEdgeJson {
    pub origin: VertexJson,
    pub terminus: VertexJson,
    pub ball: BallJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeDump {
    pub tool: ToolInfo,
    pub depth: u32,
    pub edge_count: usize,
    pub edges: Vec<TreeEdgeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientEdgeJson {
    pub origin: usize,
    pub terminus: usize,
    pub pairing_word: Vec<i32>,
    pub partner: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDump {
    pub tool: ToolInfo,
    pub rank: usize,
    pub vertex_count: usize,
    pub unoriented_edge_count: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<QuotientEdgeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocyclesDump {
    pub tool: ToolInfo,
    pub weight: WeightConfig,
    pub dimension: usize,
    /// basis[i][edge] = coefficient strings of the value on that edge.
    pub basis: Vec<Vec<Vec<String>>>,
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

//! End-to-end pipeline: group, atlas, carve, pairing, verification, mesh,
//! report. The report is fully deterministic for a given configuration;
//! wall-clock timings are kept out of it and written separately.

use std::time::Instant;

use lfd::carve::{carve_adaptive, face_pairing, verify_tiling, CarvedDomain, FacePairing};
use lfd::mesh::{euclidean_mesh, reflection_residual, rotation_residual, Mesh};
use lfd::num::round_sig;
use lfd::orbit::level_certificate;
use lfd::triangle::{
    find_lift_offsets, lifted_group, LiftedGroup, OffsetSearch, TriangleSignature, VertexChoice,
};
use serde::Serialize;

use crate::config::{OffsetsChoice, RunConfig, VertexConfig};

/// Pipeline failure, mapped onto process exit codes by the binary.
#[derive(Debug)]
pub enum PipelineError {
    /// Exit code 2.
    Config(String),
    /// Exit code 3.
    Unrealizable { signature: [u32; 3], level: u32, bound: i64 },
    /// Exit code 4.
    Verification(String),
    /// Exit code 1.
    Io(String),
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PipelineError::Config(m) => write!(f, "invalid configuration: {m}"),
            PipelineError::Unrealizable { signature, level, bound } => write!(
                f,
                "no offsets in [-{bound}, {bound}]^3 give level {level} for ({},{},{})",
                signature[0], signature[1], signature[2]
            ),
            PipelineError::Verification(m) => write!(f, "verification failed: {m}"),
            PipelineError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for PipelineError {}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Io(_) => 1,
            PipelineError::Config(_) => 2,
            PipelineError::Unrealizable { .. } => 3,
            PipelineError::Verification(_) => 4,
        }
    }
}

fn r12(v: f64) -> f64 {
    round_sig(v, 12)
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub signature: [u32; 3],
    pub level: u32,
    pub offsets: [i64; 3],
    pub base_vertex: usize,
    pub isotropy_order: u32,
    pub wedge_angle: f64,
    pub product_exponent: i64,
    pub relation_residual: f64,
    /// Present for levels <= 2: bounded words realize exactly the computed
    /// deck subgroup.
    pub level_certificate: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CarveReport {
    pub cutoff_initial: f64,
    pub cutoff_used: f64,
    pub carve_attempts: u32,
    pub atlas_size: usize,
    pub cutter_planes: usize,
    pub active_sites: usize,
    pub stability_margin: f64,
    pub cells: usize,
    pub boundary_facets: usize,
    pub components: usize,
    pub chart_volume: f64,
    pub invariant_volume: f64,
    /// invariant_volume / (level * (1 - sum 1/a_i)).
    pub volume_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeshReport {
    pub vertices: usize,
    pub corner_vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub is_closed: bool,
    pub rotation_angle: f64,
    pub rotation_residual: f64,
    pub reflection_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub face: String,
    pub partner: String,
    pub mapping: String,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TilingSection {
    pub samples: usize,
    pub covered: usize,
    pub interior_double: usize,
    pub seed: u64,
}

/// The run report. Every float is rounded to 12 significant digits before
/// serialization, and field order is fixed, so identical configurations
/// produce byte-identical JSON.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub realizable: bool,
    pub group: Option<GroupReport>,
    pub carve: Option<CarveReport>,
    pub mesh: Option<MeshReport>,
    pub pairing: Option<Vec<PairReport>>,
    pub tiling: Option<TilingSection>,
}

/// Wall-clock stage timings in milliseconds; written next to the report but
/// never into it.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub group_ms: u128,
    pub carve_ms: u128,
    pub pairing_ms: u128,
    pub tiling_ms: u128,
    pub mesh_ms: u128,
}

pub struct PipelineOutput {
    pub report: Report,
    pub timings: Timings,
    pub group: LiftedGroup,
    pub carved: CarvedDomain,
    pub pairing: FacePairing,
    pub mesh: Mesh,
}

/// Resolves offsets, builds the lifted group.
pub fn build_group(config: &RunConfig) -> Result<(LiftedGroup, [i64; 3]), PipelineError> {
    let signature = TriangleSignature::new(config.signature)
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let offsets = match config.offsets {
        OffsetsChoice::Explicit(s) => s,
        OffsetsChoice::Auto => {
            match find_lift_offsets(signature, config.level, config.search_bound)
                .map_err(|e| PipelineError::Config(e.to_string()))?
            {
                OffsetSearch::Found(s) => s,
                OffsetSearch::Unrealizable => {
                    return Err(PipelineError::Unrealizable {
                        signature: config.signature,
                        level: config.level,
                        bound: config.search_bound,
                    })
                }
            }
        }
    };
    let choice = match config.vertex {
        VertexConfig::Auto => VertexChoice::Auto,
        VertexConfig::Index(i) => VertexChoice::Index(i - 1),
    };
    let group =
        lifted_group(signature, offsets, choice).map_err(|e| PipelineError::Config(e.to_string()))?;
    if group.level != config.level {
        return Err(PipelineError::Config(format!(
            "offsets {:?} give level {}, configuration wants {}",
            offsets, group.level, config.level
        )));
    }
    Ok((group, offsets))
}

/// Runs the full pipeline. Deterministic for a fixed configuration.
pub fn run_pipeline(config: &RunConfig) -> Result<PipelineOutput, PipelineError> {
    config.validate().map_err(|e| PipelineError::Config(e.0))?;
    let mut timings = Timings::default();

    let t0 = Instant::now();
    let (group, offsets) = build_group(config)?;
    let certificate = if group.level <= 2 {
        Some(level_certificate(&group, 9))
    } else {
        None
    };
    timings.group_ms = t0.elapsed().as_millis();

    let t0 = Instant::now();
    let carved = carve_adaptive(&group, config.epsilon)
        .map_err(|e| PipelineError::Verification(e.to_string()))?;
    timings.carve_ms = t0.elapsed().as_millis();

    let t0 = Instant::now();
    let pairing = face_pairing(&carved.complex, &carved.atlas)
        .map_err(|e| PipelineError::Verification(e.to_string()))?;
    timings.pairing_ms = t0.elapsed().as_millis();

    let t0 = Instant::now();
    let tiling = verify_tiling(&carved.atlas, config.samples, config.seed)
        .map_err(|e| PipelineError::Verification(e.to_string()))?;
    timings.tiling_ms = t0.elapsed().as_millis();
    if tiling.covered != tiling.samples || tiling.interior_double != 0 {
        return Err(PipelineError::Verification(format!(
            "tiling: {}/{} covered, {} interior double covers",
            tiling.covered, tiling.samples, tiling.interior_double
        )));
    }

    let t0 = Instant::now();
    let mesh = euclidean_mesh(&carved.complex, &carved.atlas);
    if !mesh.is_closed {
        return Err(PipelineError::Verification("boundary mesh is not closed".into()));
    }
    let corners = mesh.corner_vertices();
    let rotation_angle =
        2.0 * std::f64::consts::PI * group.level as f64 / group.isotropy_order as f64;
    let rot_residual = rotation_residual(&corners, rotation_angle);
    let refl_residual = reflection_residual(&corners, group.isotropy_order);
    timings.mesh_ms = t0.elapsed().as_millis();

    let invariant_volume = carved.complex.invariant_volume();
    let defect = group.signature.defect();
    let report = Report {
        realizable: true,
        group: Some(GroupReport {
            signature: config.signature,
            level: group.level,
            offsets,
            base_vertex: group.base_vertex + 1,
            isotropy_order: group.isotropy_order,
            wedge_angle: r12(group.wedge_angle),
            product_exponent: group.product_exponent,
            relation_residual: r12(group.relation_residual()),
            level_certificate: certificate,
        }),
        carve: Some(CarveReport {
            cutoff_initial: r12(config.epsilon),
            cutoff_used: r12(carved.cutoff_used),
            carve_attempts: carved.attempts,
            atlas_size: carved.atlas.len(),
            cutter_planes: carved.complex.cutter_planes,
            active_sites: carved.complex.active_sites,
            stability_margin: r12(carved.complex.margin),
            cells: carved.complex.cells.len(),
            boundary_facets: carved.complex.boundary.len(),
            components: carved.complex.component_count(),
            chart_volume: r12(carved.complex.volume()),
            invariant_volume: r12(invariant_volume),
            volume_ratio: r12(invariant_volume / (group.level as f64 * defect)),
        }),
        mesh: Some(MeshReport {
            vertices: mesh.vertices.len(),
            corner_vertices: corners.len(),
            edges: mesh.edge_count,
            faces: mesh.faces.len(),
            euler_characteristic: mesh.euler_characteristic,
            is_closed: mesh.is_closed,
            rotation_angle: r12(rotation_angle),
            rotation_residual: r12(rot_residual),
            reflection_residual: r12(refl_residual),
        }),
        pairing: Some(
            pairing
                .pairs
                .iter()
                .map(|p| PairReport {
                    face: p.word_a.clone(),
                    partner: p.word_b.clone(),
                    mapping: p.mapping_word.clone(),
                    residual: r12(p.residual),
                })
                .collect(),
        ),
        tiling: Some(TilingSection {
            samples: tiling.samples,
            covered: tiling.covered,
            interior_double: tiling.interior_double,
            seed: config.seed,
        }),
    };

    Ok(PipelineOutput { report, timings, group, carved, pairing, mesh })
}

/// Report for a preset the offset search cannot realize.
pub fn unrealizable_report() -> Report {
    Report {
        realizable: false,
        group: None,
        carve: None,
        mesh: None,
        pairing: None,
        tiling: None,
    }
}

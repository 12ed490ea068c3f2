//! The three geometric lifts and their admissibility structures.
//!
//! * projective: a map into `P(R⁴)` as a rank-1 subbundle `F` with derived
//!   bundles `F⁽¹⁾` (rank 3) and `F⁽²⁾ = R⁴`,
//! * conformal: the light-cone lift `σ = (x, (1−|x|²)/2, (1+|x|²)/2)` into
//!   `R^{4,1}`, a null line bundle with `F⁽¹⁾ ≤ F^⊥`,
//! * Lie sphere: a Legendre map as a rank-2 null bundle `f ≤ R^{s,t}`
//!   spanned by the point-sphere and tangent-plane lifts, with curvature
//!   sphere congruences and the Lie cyclide splitting.
//!
//! Lifts validate their geometry's standing assumptions pointwise and flag
//! violations; a run fails if more than 1% of interior points are flagged.

mod conformal;
mod legendre;
mod projective;
pub mod quaddiff;
pub mod theta;

pub use conformal::light_cone_jet;
pub use legendre::{
    curvature_spheres, directional_derived, lie_cyclide_splitting, point_sphere_jet,
    quotient_frame, splitting_orthogonality_residual, tangent_plane_jet, unit_normal_jet,
    CurvatureData,
};
pub use quaddiff::{quadratic_differential, QuadDiff, QuadDiffField};
pub use theta::{psi_basis, theta_basis, theta_dimension, ThetaFrame};

use std::fmt;
use std::rc::Rc;

use nalgebra::DMatrix;

use crate::directions::DirectionField;
use crate::dsl::SurfaceExpr;
use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::jet::{JetMat, JetVec};
use crate::multilinear::{AlgebraKind, MetricSpace, WedgeSpace};
use crate::subbundle::SubbundleSample;

/// Which Klein geometry a lifted surface lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    /// `P(R⁴)` with group `SL(4)`.
    Projective,
    /// The conformal 3-sphere as the projective light cone of `R^{4,1}`.
    Conformal,
    /// Legendre maps into null 2-planes of `R^{3,3}` (contact lifts).
    LieSphere33,
    /// Legendre maps into null 2-planes of `R^{4,2}` (point/tangent lifts).
    LieSphere42,
}

impl GeometryKind {
    pub fn key(self) -> &'static str {
        match self {
            GeometryKind::Projective => "projective",
            GeometryKind::Conformal => "conformal",
            GeometryKind::LieSphere33 => "lie_sphere_33",
            GeometryKind::LieSphere42 => "lie_sphere_42",
        }
    }

    pub fn from_key(s: &str) -> Option<Self> {
        match s {
            "projective" => Some(GeometryKind::Projective),
            "conformal" => Some(GeometryKind::Conformal),
            "lie_sphere_33" => Some(GeometryKind::LieSphere33),
            "lie_sphere_42" => Some(GeometryKind::LieSphere42),
            _ => None,
        }
    }
}

/// Ambient space and transformation group of a geometry.
#[derive(Debug, Clone)]
pub struct GeometrySpec {
    pub kind: GeometryKind,
    pub space: MetricSpace,
    pub group: AlgebraKind,
}

impl GeometrySpec {
    pub fn projective() -> Self {
        GeometrySpec {
            kind: GeometryKind::Projective,
            space: MetricSpace::plain(4),
            group: AlgebraKind::SpecialLinear,
        }
    }

    pub fn conformal() -> Self {
        GeometrySpec {
            kind: GeometryKind::Conformal,
            space: MetricSpace::indefinite(4, 1),
            group: AlgebraKind::Orthogonal,
        }
    }

    pub fn lie_sphere_42() -> Self {
        GeometrySpec {
            kind: GeometryKind::LieSphere42,
            space: MetricSpace::indefinite(4, 2),
            group: AlgebraKind::Orthogonal,
        }
    }

    /// The (3,3) picture carries the `SL(4)`-invariant volume pairing of
    /// `∧²R⁴` as its Gram matrix, so contact lifts land in it verbatim.
    pub fn lie_sphere_33() -> Self {
        let ws = WedgeSpace::volume_pairing_r4().expect("volume pairing is involutive");
        GeometrySpec {
            kind: GeometryKind::LieSphere33,
            space: ws.space().clone(),
            group: AlgebraKind::Orthogonal,
        }
    }
}

/// Adapted projective frame at a point: columns `σ, σ_u, σ_v, w` as jets
/// together with the jet-exact dual frame (the inverse matrix). The
/// completing vector `w` is the second derivative sticking furthest out of
/// `F⁽¹⁾` (`σ_uv` wherever it works, e.g. on the graph quadric).
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    pub frame: JetMat,
    pub dual: JetMat,
}

/// Build the adapted frame of a projective section by largest-pivot
/// selection of the completing second derivative.
pub fn adapted_frame(sigma: &JetVec) -> Result<AdaptedFrame> {
    let f1 = crate::subbundle::span_with_derivatives(
        std::slice::from_ref(sigma),
        1,
        crate::subbundle::RANK_TOL,
        (0.0, 0.0),
        crate::subbundle::BundleLabel::F1,
    )?;
    if f1.rank != 3 {
        return Err(Error::GeometryMismatch {
            required: "an immersed projective surface (rank-3 F^(1))",
            actual: format!("rank {}", f1.rank),
        });
    }
    let candidates = [sigma.du().dv(), sigma.du().du(), sigma.dv().dv()];
    let w = candidates
        .iter()
        .max_by(|a, b| {
            let da = f1.distance(&a.value()) / (1.0 + a.value().norm());
            let db = f1.distance(&b.value()) / (1.0 + b.value().norm());
            da.total_cmp(&db)
        })
        .unwrap()
        .clone();
    let frame = JetMat::from_columns(&[sigma.clone(), sigma.du(), sigma.dv(), w]);
    let dual = frame.inverse()?;
    Ok(AdaptedFrame { frame, dual })
}

/// Everything computed at one healthy grid point.
#[derive(Clone)]
pub struct PointData {
    /// Primary section jets (the lift σ; for Legendre maps the point-sphere
    /// lift).
    pub sigma: JetVec,
    /// Second spanning section for Legendre maps (tangent-plane lift).
    pub sigma_tilde: Option<JetVec>,
    /// Derived bundle `F⁽¹⁾` (or `f⁽¹⁾`).
    pub f1: SubbundleSample,
    /// `F⁽²⁾` where the geometry uses it (projective).
    pub f2: Option<SubbundleSample>,
    /// Adapted frame and jet dual frame (projective).
    pub adapted: Option<AdaptedFrame>,
    /// Asymptotic directions where real (projective).
    pub asymptotic: Option<(DirectionField, DirectionField)>,
    /// Curvature sphere data (Legendre).
    pub curvature: Option<CurvatureData>,
}

/// A grid point that failed the geometry's standing assumptions.
#[derive(Debug, Clone)]
pub struct FlaggedPoint {
    pub i: usize,
    pub j: usize,
    pub u: f64,
    pub v: f64,
    pub reason: String,
}

/// Evaluates the lift's spanning section(s) at arbitrary parameters; used
/// by gauge integration and the contact-order probe to leave the grid.
#[derive(Clone)]
pub struct SectionEval(pub Rc<dyn Fn(f64, f64, usize) -> Result<JetVec>>);

impl SectionEval {
    pub fn eval(&self, u: f64, v: f64, degree: usize) -> Result<JetVec> {
        (self.0)(u, v, degree)
    }
}

impl fmt::Debug for SectionEval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SectionEval(..)")
    }
}

/// A surface lifted into one of the three geometries over a grid.
#[derive(Clone)]
pub struct LiftedSurface {
    pub spec: GeometrySpec,
    pub grid: ParamGrid,
    pub degree: usize,
    /// Row-major per-point data; `Err`-like points are in `flagged`.
    points: Vec<Option<PointData>>,
    pub flagged: Vec<FlaggedPoint>,
    /// Evaluator for σ off the grid.
    pub section: SectionEval,
    /// Evaluator for the Legendre partner σ̃ off the grid.
    pub section_tilde: Option<SectionEval>,
    /// Human-readable provenance (DSL text or construction name).
    pub source: String,
}

impl LiftedSurface {
    pub fn point(&self, i: usize, j: usize) -> Option<&PointData> {
        self.points[self.grid.index(i, j)].as_ref()
    }

    /// Interior points with full data, in fixed row-major order.
    pub fn interior_ok(&self) -> impl Iterator<Item = ((usize, usize), &PointData)> + '_ {
        self.grid.interior_indices().filter_map(move |(i, j)| {
            self.points[self.grid.index(i, j)]
                .as_ref()
                .map(|d| ((i, j), d))
        })
    }

    fn check_flag_budget(&self) -> Result<()> {
        let interior = self.grid.interior_indices().count();
        let flagged_interior = self
            .flagged
            .iter()
            .filter(|f| self.grid.is_interior(f.i, f.j))
            .count();
        if flagged_interior * 100 > interior {
            return Err(Error::GeometryAssumption {
                what: self
                    .flagged
                    .first()
                    .map(|f| f.reason.clone())
                    .unwrap_or_else(|| "assumption violations".into()),
                count: flagged_interior,
                total: interior,
            });
        }
        Ok(())
    }
}

/// Lift a surface into projective 3-space. A 3-component expression is
/// auto-homogenised to `(1, x, y, z)`.
pub fn projective_lift(
    expr: &SurfaceExpr,
    grid: &ParamGrid,
    degree: usize,
) -> Result<LiftedSurface> {
    projective::lift(expr, grid, degree)
}

/// Light-cone lift of an immersion `x: Σ → R³` into `R^{4,1}`.
pub fn conformal_lift(
    expr: &SurfaceExpr,
    grid: &ParamGrid,
    degree: usize,
) -> Result<LiftedSurface> {
    conformal::lift(expr, grid, degree)
}

/// Legendre lift of an immersion with its unit normal into `R^{4,2}`.
pub fn legendre_lift(expr: &SurfaceExpr, grid: &ParamGrid, degree: usize) -> Result<LiftedSurface> {
    legendre::lift(expr, grid, degree)
}

/// Assemble a Legendre-type lifted surface from explicit spanning-section
/// evaluators over an arbitrary ambient space (used by the contact bridge).
pub fn legendre_from_sections(
    spec: GeometrySpec,
    grid: &ParamGrid,
    degree: usize,
    section: SectionEval,
    section_tilde: SectionEval,
    source: String,
) -> Result<LiftedSurface> {
    legendre::from_sections(spec, grid, degree, section, section_tilde, source)
}

pub(crate) fn flag(
    flags: &mut Vec<FlaggedPoint>,
    i: usize,
    j: usize,
    point: (f64, f64),
    reason: impl Into<String>,
) {
    flags.push(FlaggedPoint {
        i,
        j,
        u: point.0,
        v: point.1,
        reason: reason.into(),
    });
}

pub(crate) struct LiftBuilder {
    pub points: Vec<Option<PointData>>,
    pub flagged: Vec<FlaggedPoint>,
}

impl LiftBuilder {
    pub fn new(len: usize) -> Self {
        LiftBuilder {
            points: (0..len).map(|_| None).collect(),
            flagged: Vec::new(),
        }
    }

    pub fn finish(
        self,
        spec: GeometrySpec,
        grid: ParamGrid,
        degree: usize,
        section: SectionEval,
        section_tilde: Option<SectionEval>,
        source: String,
    ) -> Result<LiftedSurface> {
        let ls = LiftedSurface {
            spec,
            grid,
            degree,
            points: self.points,
            flagged: self.flagged,
            section,
            section_tilde,
            source,
        };
        ls.check_flag_budget()?;
        Ok(ls)
    }
}

/// Detect the Dupin-cyclide degeneracy: the Lie cyclide splitting is
/// constant across the grid. Those inputs are accepted for splitting tests
/// but rejected by uniqueness-sensitive flows.
pub fn is_dupin(ls: &LiftedSurface) -> Result<bool> {
    let mut reference: Option<DMatrix<f64>> = None;
    let mut max_defect: f64 = 0.0;
    for ((i, j), data) in ls.interior_ok() {
        let cur = data
            .curvature
            .as_ref()
            .ok_or_else(|| Error::GeometryMismatch {
                required: "a Legendre lift with curvature data",
                actual: ls.spec.kind.key().into(),
            })?;
        let (s1, _s2) = lie_cyclide_splitting(cur, ls.grid.point(i, j))?;
        let basis = s1.basis_matrix();
        match &reference {
            None => reference = Some(basis),
            Some(r) => {
                max_defect = max_defect.max(crate::subbundle::subspace_distance(r, &basis));
            }
        }
    }
    Ok(max_defect < 1e-8)
}

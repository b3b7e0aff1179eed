//! End-to-end comparison of the almost toric and the symplectic blow-up of
//! one ball.
//!
//! A scenario fixes a toric diagram, a convex region around one boundary
//! edge and a ball. The pipeline shrinks the problem to a Delzant
//! sub-polygon, performs the nodal blow-up there, computes the lattice of
//! the result straight from the diagram, computes the lattice of the
//! symplectic blow-up from the reduced toric model, and certifies that the
//! two agree.

use std::fmt;

use crate::affine::Point;
use crate::diagram::{BaseDiagram, ConvexRegion};
use crate::error::{Error, Result};
use crate::format::{write_diagram, write_lattice, write_scenario};
use crate::homology::{
    blowup_compatible, blowup_noncompatible, lattice_from_diagram, lattice_of_atf_diagram,
    LatticeModel,
};
use crate::rational::Rat;
use crate::surgery::{
    atf_blowup, find_delzant_subpolygon, reduce_along, standard_triangle, BallPlacement, Triangle,
};
use crate::torelli::{build_g, sha256_hex, verify_isometry, IsometryCertificate, MarkedClassMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub diagram: BaseDiagram,
    pub region: ConvexRegion,
    /// Boundary edge the ball sits on; must be the region's designated edge.
    pub edge_index: usize,
    pub capacity: Rat,
    /// Lattice distance from the edge's tail to the ball's corner.
    pub offset: Rat,
    pub margin: Rat,
    pub compatible: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.diagram.validate().first() {
            return Err(Error::InvalidScenario(v.to_string()));
        }
        if self.edge_index >= self.diagram.len() {
            return Err(Error::IndexOutOfRange {
                index: self.edge_index,
                len: self.diagram.len(),
            });
        }
        if self.region.designated_edge != self.edge_index {
            return Err(Error::InvalidScenario(format!(
                "region is designated on edge {}, ball sits on edge {}",
                self.region.designated_edge, self.edge_index
            )));
        }
        if !self.capacity.is_positive() {
            return Err(Error::NonPositiveCapacity);
        }
        if self.margin.is_negative() || self.offset.is_negative() {
            return Err(Error::InvalidScenario(
                "offset and margin must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn placement(&self) -> Result<BallPlacement> {
        let v = self.diagram.edge_direction(self.edge_index)?;
        Ok(BallPlacement {
            anchor: self.diagram.vertices[self.edge_index].offset(v, &self.offset),
            edge_index: self.edge_index,
            capacity: self.capacity.clone(),
            compatible: self.compatible,
            margin: self.margin.clone(),
        })
    }

    pub fn triangle(&self) -> Result<Triangle> {
        standard_triangle(&self.diagram, self.edge_index, &self.offset, &self.capacity)
    }

    pub fn digest(&self) -> String {
        sha256_hex(&write_scenario(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Validate,
    Placement,
    Search,
    Reduce,
    AtfBlowup,
    AtfLattice,
    SymplecticLattice,
    BuildMap,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Validate => "validate",
            Stage::Placement => "placement",
            Stage::Search => "subpolygon search",
            Stage::Reduce => "reduction",
            Stage::AtfBlowup => "nodal blow-up",
            Stage::AtfLattice => "almost toric lattice",
            Stage::SymplecticLattice => "symplectic lattice",
            Stage::BuildMap => "marked map",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    pub source: Error,
}

fn at(stage: Stage) -> impl FnOnce(Error) -> StageError {
    move |source| StageError { stage, source }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineReport {
    pub scenario_digest: String,
    pub triangle: Triangle,
    pub subpolygon: ConvexRegion,
    pub reduced: BaseDiagram,
    /// Edge of the reduced diagram carrying the ball.
    pub reduced_edge: usize,
    pub local_atf: BaseDiagram,
    /// The nodal blow-up performed on the whole diagram.
    pub ambient_atf: BaseDiagram,
    pub atf_lattice: LatticeModel,
    pub symplectic_lattice: LatticeModel,
    pub map: MarkedClassMap,
    pub certificate: IsometryCertificate,
    pub locality_note: String,
}

pub const LOCALITY_NOTE: &str = "both surgeries are supported over the chosen sub-polygon P, which lies in R; outside P the diagram is unchanged";

impl PipelineReport {
    pub fn is_valid(&self) -> bool {
        self.certificate.is_valid()
    }

    /// A plain text summary; identical inputs give identical text.
    pub fn canonical_text(&self) -> String {
        let mut out = String::from("report v1\n");
        out.push_str(&format!("scenario {}\n", self.scenario_digest));
        let t = &self.triangle;
        out.push_str(&format!(
            "triangle {} {} {} {} {}\n",
            t.base_start, t.base_direction.x, t.base_direction.y, t.size, t.apex
        ));
        let verts: Vec<String> = self
            .subpolygon
            .vertices
            .iter()
            .map(Point::to_string)
            .collect();
        out.push_str(&format!("subpolygon {}\n", verts.join(" ; ")));
        out.push_str(&format!("reduced_edge {}\n", self.reduced_edge));
        out.push_str(&format!("locality {}\n", self.locality_note));
        out.push_str("[reduced]\n");
        out.push_str(&write_diagram(&self.reduced));
        out.push_str("[local_atf]\n");
        out.push_str(&write_diagram(&self.local_atf));
        out.push_str("[ambient_atf]\n");
        out.push_str(&write_diagram(&self.ambient_atf));
        out.push_str("[atf_lattice]\n");
        out.push_str(&write_lattice(&self.atf_lattice));
        out.push_str("[symplectic_lattice]\n");
        out.push_str(&write_lattice(&self.symplectic_lattice));
        out.push_str(&format!(
            "verdict {}\ncertificate {}\n",
            if self.is_valid() { "valid" } else { "invalid" },
            self.certificate.digest()
        ));
        out
    }
}

pub fn run(s: &Scenario) -> std::result::Result<PipelineReport, StageError> {
    s.validate().map_err(at(Stage::Validate))?;
    let tri = s.triangle().map_err(at(Stage::Placement))?;
    let placement = s.placement().map_err(at(Stage::Placement))?;
    let i = s.edge_index;
    let p = find_delzant_subpolygon(&s.diagram, &s.region, i, &tri, &placement)
        .map_err(at(Stage::Search))?;
    let reduced = reduce_along(&s.diagram, &p).map_err(at(Stage::Reduce))?;
    let reduced_edge = p.designated_side(&s.diagram).ok_or_else(|| StageError {
        stage: Stage::Reduce,
        source: Error::Inconsistent("sub-polygon lost its designated side".into()),
    })?;
    let local_atf = atf_blowup(&reduced, &tri).map_err(at(Stage::AtfBlowup))?;
    let ambient_atf = atf_blowup(&s.diagram, &tri).map_err(at(Stage::AtfBlowup))?;
    let atf_lattice = lattice_of_atf_diagram(&local_atf).map_err(at(Stage::AtfLattice))?;
    let base = lattice_from_diagram(&reduced).map_err(at(Stage::SymplecticLattice))?;
    let symplectic_lattice = if s.compatible {
        blowup_compatible(&base, reduced_edge, &s.capacity)
    } else {
        blowup_noncompatible(&base, reduced_edge, &s.capacity)
    }
    .map_err(at(Stage::SymplecticLattice))?;
    let map = build_g(&atf_lattice, &symplectic_lattice).map_err(at(Stage::BuildMap))?;
    let mut certificate = verify_isometry(&map);
    let scenario_digest = s.digest();
    certificate.scenario_digest = Some(scenario_digest.clone());
    certificate.bind(
        "placement",
        if s.compatible {
            "compatible ball, checked against its toric footprint only"
        } else {
            "non-compatible ball completed to an anticanonical boundary, checked against its toric footprint only"
        },
    );
    Ok(PipelineReport {
        scenario_digest,
        triangle: tri,
        subpolygon: p,
        reduced,
        reduced_edge,
        local_atf,
        ambient_atf,
        atf_lattice,
        symplectic_lattice,
        map,
        certificate,
        locality_note: LOCALITY_NOTE.to_string(),
    })
}

/// What a surgery changed: vertices only in `before`, vertices only in
/// `after`, and nodes only in `after`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalityDiff {
    pub removed: Vec<Point>,
    pub added: Vec<Point>,
    pub new_nodes: Vec<Point>,
}

impl LocalityDiff {
    /// Whether every change lies in the closed convex region.
    pub fn within(&self, region: &ConvexRegion) -> bool {
        let pts: Vec<Point> = self
            .removed
            .iter()
            .chain(&self.added)
            .chain(&self.new_nodes)
            .cloned()
            .collect();
        crate::geometry::convex_contains(&region.vertices, &pts)
    }
}

pub fn locality_diff(before: &BaseDiagram, after: &BaseDiagram) -> LocalityDiff {
    let removed = before
        .vertices
        .iter()
        .filter(|p| !after.vertices.contains(p))
        .cloned()
        .collect();
    let added = after
        .vertices
        .iter()
        .filter(|p| !before.vertices.contains(p))
        .cloned()
        .collect();
    let new_nodes = after
        .nodes
        .iter()
        .filter(|n| !before.nodes.iter().any(|m| m.position == n.position))
        .map(|n| n.position.clone())
        .collect();
    LocalityDiff {
        removed,
        added,
        new_nodes,
    }
}

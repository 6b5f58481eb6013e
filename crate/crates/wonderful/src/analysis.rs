//! Full combinatorial report for one graph: lattices, building set, nested sets, homology and charts.

use serde::Serialize;
use thiserror::Error;

use crate::charts::{enumerate_charts, ChartError};
use crate::graph::{DivergenceReport, EdgeSet, Graph};
use crate::homology::{homology_from_atoms, homology_gm_oracle, BettiTable};
use crate::lattice::{BuildingSet, LatticeCheck, LatticeError, SubgraphPoset};
use crate::renorm::{pole_profile, LaurentProfile};
use crate::report::{chart_report, ChartReport};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Building {
    Minimal,
    Maximal,
}

impl Building {
    pub fn of(self, lattice: &SubgraphPoset) -> BuildingSet {
        match self {
            Building::Minimal => lattice.minimal_building_set(),
            Building::Maximal => lattice.maximal_building_set(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub dim: u32,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub classification: DivergenceReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct PosetReport {
    pub kind: crate::lattice::PosetKind,
    pub elements: Vec<EdgeSet>,
    pub covers: Vec<(EdgeSet, EdgeSet)>,
}

impl PosetReport {
    pub fn new(p: &SubgraphPoset) -> Self {
        PosetReport { kind: p.kind(), elements: p.elements().to_vec(), covers: p.covers() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedElement {
    pub element: EdgeSet,
    pub grade: i64,
    pub a_dim: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyReport {
    pub from_atoms: BettiTable,
    pub gm_oracle: BettiTable,
    pub agree: bool,
}

impl HomologyReport {
    pub fn new(p: &SubgraphPoset) -> Self {
        let (from_atoms, gm_oracle) = (homology_from_atoms(p), homology_gm_oracle(p));
        HomologyReport { agree: from_atoms == gm_oracle, from_atoms, gm_oracle }
    }
}

/// One nested set with its chart on the lattice-adapted tree and the number of markings.
#[derive(Clone, Debug, Serialize)]
pub struct ChartFamily {
    pub markings: usize,
    pub first: ChartReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub graph: GraphSummary,
    pub saturated_poset: PosetReport,
    pub divergent_lattice: PosetReport,
    pub grading: Vec<GradedElement>,
    pub property_check: LatticeCheck,
    pub properties_hold: bool,
    pub irreducibles: Vec<EdgeSet>,
    pub building: Building,
    pub building_set: Vec<EdgeSet>,
    pub nested_sets: Vec<Vec<EdgeSet>>,
    pub max_nested_cardinality: usize,
    pub laurent: LaurentProfile,
    pub homology: HomologyReport,
    pub chart_count: usize,
    pub charts: Vec<ChartFamily>,
}

impl Analysis {
    pub fn lattice_elements(&self) -> usize {
        self.divergent_lattice.elements.len()
    }
}

pub fn analyze(g: &Graph, building: Building) -> Result<Analysis, AnalysisError> {
    let saturated = SubgraphPoset::saturated_poset(g)?;
    let lattice = SubgraphPoset::divergent_lattice(g)?;
    let check = lattice.check_lattice_properties();
    let b = building.of(&lattice);
    let charts = enumerate_charts(&b)?;
    let mut families: Vec<ChartFamily> = Vec::new();
    for c in &charts {
        match families.last_mut() {
            Some(f) if f.first.nested == c.nested => f.markings += 1,
            _ => families.push(ChartFamily { markings: 1, first: chart_report(c) }),
        }
    }
    Ok(Analysis {
        graph: GraphSummary {
            dim: g.dim(),
            vertices: g.vertices().to_vec(),
            edges: g.edges().iter().map(|&(a, b)| (g.vertices()[a].clone(), g.vertices()[b].clone())).collect(),
            classification: g.classify(g.all()),
        },
        saturated_poset: PosetReport::new(&saturated),
        divergent_lattice: PosetReport::new(&lattice),
        grading: lattice
            .elements()
            .iter()
            .map(|&e| GradedElement { element: e, grade: lattice.grade(e), a_dim: lattice.a_dim(e) })
            .collect(),
        properties_hold: check.passed(),
        property_check: check,
        irreducibles: lattice.irreducibles(),
        building,
        building_set: b.members.clone(),
        nested_sets: b.nested_sets(),
        max_nested_cardinality: b.max_nested_cardinality(),
        laurent: pole_profile(&b),
        homology: HomologyReport::new(&lattice),
        chart_count: charts.len(),
        charts: families,
    })
}

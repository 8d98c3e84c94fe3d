//! Tripod spider linkages: workspaces, energy landscapes, Morse censuses and
//! robust control.
//!
//! A spider has three feet at the vertices of a triangle and a center joined
//! to each foot by a two-link leg (thigh at the foot, shin at the center). The
//! center can reach the intersection `W(S)` of three annuli, the workspace.
//! The modules compute that region exactly as a circular-arc polygon, count
//! critical points of Hooke and Coulomb potentials on it, lift the count to
//! the configuration space, and solve the inverse problem of holding the
//! center at a prescribed target.

pub mod charges;
pub mod control;
pub mod cspace;
pub mod error;
pub mod geom;
pub mod morse;
mod newton;
pub mod oracle;
pub mod potentials;
pub mod workspace;

pub use charges::{
    default_window, equilibria, is_trapped, robust_domain, stationary_charges, trapping_discriminant, trapping_domain,
    trapping_hessian, Equilibrium, Region, RegionDef,
};
pub use control::{
    coulomb_charges_for, gradient_flow, hooke_weights_for, Certificate, ControlMode, ControlParameters,
    ControlSolution, FlowOptions, Segment, SegmentTag, Trajectory,
};
pub use cspace::{covering_degree, knee_positions, lift_census, CspaceCensus, LiftInput};
pub use error::{Error, Result};
pub use geom::{BBox, Circle, Point, Sym2, Triangle, Vec2, EPS_GEO};
pub use morse::{census, BoundaryClass, Cell, CriticalKind, CriticalPoint, MorseCensus, MorseConfig};
pub use oracle::{box_census, fd_gradient, fd_hessian, grid_census, grid_census_at, GridCensus, GridEvent};
pub use potentials::{ChargeTriple, Coulomb, Hooke, Negated, Potential, WeightedHooke, Weights};
pub use workspace::{build_workspace, Arc, Corner, Leg, Side, SpiderSpec, Workspace};

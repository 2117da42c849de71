//! Grid-world path planning and image pre-processing for mobile robot
//! navigation.
//!
//! Planners: a shunting neural field, a biased min-consensus wavefront, an
//! artificial potential field tracker, and three stochastic waypoint
//! optimizers (GA, ACO, beetle swarm). The perception module turns grayscale
//! frames into occupancy grids and no-reference quality scores.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the command line tools use.

pub mod consensus;
pub mod grid;
pub mod metaheuristics;
pub mod numfmt;
pub mod perception;
pub mod potential;
mod scalar;
pub mod shunting;

pub use grid::{Cell, Coord, GridMap, Neighborhood, Path};
pub use scalar::{neg_part, pos_part, sign0, Scalar};

pub type DistanceField = grid::DistanceField<f64>;
pub type ScenarioConfig = grid::ScenarioConfig<f64>;
pub type ActivityField = shunting::ActivityField<f64>;
pub type ShuntingParams = shunting::ShuntingParams<f64>;
pub type ConsensusNet = consensus::ConsensusNet<f64>;
pub type ImageFrame = perception::ImageFrame<f64>;
pub type QualityReport = perception::QualityReport<f64>;
pub type PredictorModel = perception::PredictorModel<f64>;
pub type Vec2 = potential::Vec2<f64>;
pub type ApfParams = potential::ApfParams<f64>;
pub type RobotState = potential::RobotState<f64>;
pub type TargetState = potential::TargetState<f64>;
pub type ObstacleSet = potential::ObstacleSet<f64>;
pub type GaParams = metaheuristics::GaParams<f64>;
pub type AcoParams = metaheuristics::AcoParams<f64>;
pub type BsoParams = metaheuristics::BsoParams<f64>;

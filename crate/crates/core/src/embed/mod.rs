//! Long monochromatic cycles through a cluster partition: paths inside dense
//! pairs, a closed walk over a connected matching of the reduced graph, and
//! the stitching of both into a cycle of an exact length.

pub mod path;
pub mod pipeline;
pub mod stitch;
pub mod walk;

pub use path::{connect_in_pair, verify_path, PairParams, PathHypotheses, PathOutcome, PathReport};
pub use pipeline::{find_long_mono_cycle, PipelineConfig, PipelineMode, PipelineReport, Stage, StageStatus};
pub use stitch::{split_lengths, stitch_long_cycle, StitchError, StitchOptions, StitchPlan, StitchResult};
pub use walk::{verify_walk, walk_plan, WalkPlan};

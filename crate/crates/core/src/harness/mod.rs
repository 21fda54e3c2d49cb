//! Evaluation layer: normalisation, splitting, cross-validation, grid
//! search, pruning and data editing.

pub mod cv;
pub mod edit;
pub mod grid;
pub mod metrics;
pub mod prune;
pub mod scaler;
pub mod split;

pub use cv::{cross_validate, CvReport};
pub use edit::{edit_samples, EditResult};
pub use grid::{grid_search, GridCell, GridSearchResult};
pub use metrics::accuracy;
pub use prune::{prune, PruneOptions};
pub use scaler::{scaler_fit, ScalerState};
pub use split::{kfold_indices, train_test_split, train_test_split_indices};

//! Hyperbox-based fuzzy min-max classifiers.
//!
//! A model is a set of labelled axis-aligned boxes in the unit cube. Samples
//! may be points, intervals, or have missing features. The crate provides
//! online learners (Onln-GFMM, IOL-GFMM, FMNN), an agglomerative batch
//! learner, bagging and random-hyperbox ensembles, and an evaluation harness
//! with scaling, splitting, cross-validation, grid search, pruning and data
//! editing.
//!
//! ```
//! use hbx_core::{fit_onln_gfmm, Dataset, OnlineFitConfig, ClassLabel};
//!
//! let data = Dataset::from_points(&[vec![0.1, 0.2], vec![0.8, 0.9]], &[1, 2]).unwrap();
//! let model = fit_onln_gfmm(&data, &OnlineFitConfig::gfmm(0.3)).unwrap();
//! let x = hbx_core::IntervalSample::point(vec![0.15, 0.2]).unwrap();
//! assert_eq!(model.predict(&x).unwrap().label, ClassLabel::Class(1));
//! ```

pub mod agglo;
pub mod ensemble;
pub mod error;
pub mod explain;
pub mod geometry;
pub mod harness;
pub mod hyperbox;
pub mod io;
pub mod learner;
pub mod membership;
pub mod model;
pub mod online;

pub use agglo::{box_similarity, fit_agglo2, AggloConfig, SimilarityKind};
pub use ensemble::{
    fit_bagging, fit_random_hyperboxes, majority_vote, merge_models, Aggregation, EnsembleModel, EnsemblePrediction,
};
pub use error::{HyperboxError, Result};
pub use explain::{
    decision_boundary_grid, explain, export_parallel_coordinates, write_parallel_coordinates_csv, BoundaryGrid,
    Explanation,
};
pub use geometry::{contract, fmnn_expandable, is_expandable, overlap_test, Overlap, OverlapCase};
pub use harness::{
    accuracy, cross_validate, edit_samples, grid_search, kfold_indices, prune, scaler_fit, train_test_split, CvReport,
    GridSearchResult, PruneOptions, ScalerState,
};
pub use hyperbox::{ClassLabel, Dataset, Hyperbox, IntervalSample};
pub use io::{load_model, read_csv, save_model, DatasetSchema};
pub use learner::{BaseLearner, GridParam, LearnerConfig, Model};
pub use membership::{fmnn_membership, gfmm_membership, ramp, Gamma, MembershipKind};
pub use model::{Algorithm, ModelParams, Prediction, TrainedModel};
pub use online::{fit_fmnn, fit_iol_gfmm, fit_onln_gfmm, partial_fit, OnlineFitConfig};

//! K-means clustering, the Calinski-Harabasz index and cross-validated
//! selection of the cluster count.

mod ch;
mod kmeans;
mod select;

pub use ch::{ch_components, ch_index, ChComponents};
pub use kmeans::{
    inertia, kmeans_fit, kmeans_fit_traced, nearest_centroid, KMeansConfig, KMeansModel,
};
pub use select::{choose_k, select_k, ChScoring, KSelectionResult, SelectKConfig};

//! Static views of a document: Graphviz DOT and a per-layer HTML report.

mod dot;
mod html;

pub use dot::to_dot;
pub use html::to_html_report;

use thiserror::Error;

use crate::layering::{Layer, LayerError};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// Restrict output to one layer's view.
    pub layer_filter: Option<Layer>,
    /// Show dash attributes and relation times in DOT labels.
    pub include_attributes: bool,
    pub title: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error(transparent)]
    Layering(#[from] LayerError),
    #[error("only layers 1, 2 and 3 can be rendered on their own")]
    UnlayeredFilter,
}

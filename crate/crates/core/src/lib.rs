//! Schema-driven product graph formation and structural graph convolution
//! for functional product classification and similarity search.

pub mod formation;
pub mod graph;
pub mod numerics;
pub mod sgcnn;
pub mod training;

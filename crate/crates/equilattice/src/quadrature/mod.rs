pub mod circle;
pub mod haar;

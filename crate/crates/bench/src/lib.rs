//! Criterion timing benches for the compilation passes live in `benches/`.

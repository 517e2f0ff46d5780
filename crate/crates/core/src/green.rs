//! Discrete and reference parabolic Green's functions (placeholder).

//! Trajectory persistence (under construction).

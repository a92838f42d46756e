//! Pulse-level gates (stub).

//! Readout model (stub).

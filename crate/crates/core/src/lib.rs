//! Offline batch analytics for dashcam-style video.
//!
//! Frames are decoded by an external process, classified in batches, and
//! the per-frame labels are smoothed into contiguous events. Each frame's
//! burned-in timestamp is read with template matching against ten binary
//! digit masks, so every event carries real capture timestamps.

pub mod active;
pub mod buffer;
pub mod classify;
pub mod digitmask;
pub mod events;
pub mod geometry;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod synthgen;
pub mod tsocr;

pub mod baselines;
pub mod clustering;
pub mod detect;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod model;
pub mod presets;
pub mod spectra;

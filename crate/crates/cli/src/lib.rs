//! Command-line front end for `spiderlab-core`: JSON spider descriptions in,
//! JSON/CSV reports and SVG figures out.

pub mod app;
pub mod config;
pub mod render;

pub use app::{run, Cli, Command, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO, EXIT_OK, GRID_ENV};
pub use config::{ConfigError, Lengths, SpiderConfig};
pub use render::{render_svg, Scene};

//! Command-line front end: explain, encode, score and heatmap.

pub mod config;
pub mod error;
pub mod heatmap;
pub mod output;
pub mod pipeline;
pub mod report;

pub use config::{Cli, Command, RunConfig};
pub use error::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Explain(a) => pipeline::run_explain(&RunConfig::from_args(&a)?).map(drop),
        Command::Encode(a) => pipeline::run_encode(&RunConfig::from_args(&a)?).map(drop),
        Command::Score(a) => {
            for p in pipeline::run_score(&a)? {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Heatmap(a) => {
            pipeline::run_heatmap(&a)?;
            println!("wrote {}", a.out.display());
            Ok(())
        }
    }
}

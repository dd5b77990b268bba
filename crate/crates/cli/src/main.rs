use clap::Parser;
use credal_kernel_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    credal_kernel::configure_threads();
    match run(&cli) {
        Ok(out) => print!("{out}"),
        Err(f) => {
            eprintln!("{f}");
            std::process::exit(f.code);
        }
    }
}

use clap::Parser;

fn main() -> std::process::ExitCode {
    fluctuon::cli::configure_threads();
    let cli = fluctuon::cli::Cli::parse();
    std::process::ExitCode::from(fluctuon::cli::run(cli) as u8)
}

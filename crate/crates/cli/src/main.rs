use clap::Parser;

fn main() {
    let cli = cli::Cli::parse();
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr());
    if let Err(e) = cli::run(&cli, &mut out, &mut err) {
        eprintln!("eebounds: {e}");
        std::process::exit(e.exit_code());
    }
}

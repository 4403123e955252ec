use clap::Parser;

use arcring_cli::{render, run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match cli.resolve().and_then(|cfg| {
        rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global().ok();
        run(&cfg)
    }) {
        Ok(report) => {
            print!("{}", render(&report));
            if report.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

use clap::Parser;

use vreal::cli::{run, Cli, EXIT_INPUT, EXIT_OK};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors share the input-error code; clap's own 2 would read as Unknown
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = run(&cli, &mut std::io::stdout().lock());
    std::process::exit(code);
}

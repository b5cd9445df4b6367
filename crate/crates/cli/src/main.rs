use std::io;
use std::process::ExitCode;

use clap::Parser;

use lnratio_cli::{run, Cli, Io};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut stdin, mut stdout, mut stderr) =
        (io::stdin().lock(), io::stdout().lock(), io::stderr());
    let streams = Io {
        stdin: &mut stdin,
        stdout: &mut stdout,
        stderr: &mut stderr,
    };
    match run(cli, streams) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lnratio: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

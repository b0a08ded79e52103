use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = cpmult_cli::run(std::env::args_os());
    if !out.stderr.is_empty() {
        eprint!("{}", out.stderr);
    }
    if !out.stdout.is_empty() {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(out.stdout.as_bytes());
    }
    ExitCode::from(out.code)
}

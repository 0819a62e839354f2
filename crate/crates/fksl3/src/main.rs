use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = fksl3::cli::run(std::env::args_os());
    print!("{}", out.stdout);
    if !out.stderr.is_empty() {
        eprintln!("{}", out.stderr.trim_end());
    }
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}

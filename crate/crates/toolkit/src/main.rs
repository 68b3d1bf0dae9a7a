use std::io::Write;
use std::process::ExitCode;

fn main() -> anyhow::Result<ExitCode> {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = resetproof::cli::run(std::env::args_os(), &mut out, &mut err)?;
    out.flush()?;
    Ok(ExitCode::from(code))
}

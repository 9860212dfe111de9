use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let result = locc_core::cli::run(&args);
    let code = locc_core::cli::exit_code(&result);
    match &result {
        Ok(()) => {}
        // clap renders its own help, version and usage text
        Err(locc_core::Error::Usage(msg)) => eprint!("{msg}"),
        Err(e) if code == 3 => eprintln!("{}", locc_core::cli::diagnostic(e, &args)),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}

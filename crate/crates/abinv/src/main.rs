use std::process::ExitCode;

fn main() -> ExitCode {
    let code = abinv::cli::run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code.clamp(0, u8::MAX as i32) as u8)
}

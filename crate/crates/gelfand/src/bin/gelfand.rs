use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let (code, output) = gelfand::cli::run(&args);
    print!("{}", output);
    ExitCode::from(code as u8)
}

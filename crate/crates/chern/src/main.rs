use std::process::ExitCode;

fn main() -> ExitCode {
    chern::cli::main()
}

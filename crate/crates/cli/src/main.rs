use std::process::ExitCode;

fn main() -> ExitCode {
    f2add_cli::main_with(std::env::args_os(), &f2add_cli::Hooks::default())
}

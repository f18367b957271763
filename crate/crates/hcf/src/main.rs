use std::process::ExitCode;

fn main() -> ExitCode {
    hcf::run::cli_main()
}

fn main() -> std::process::ExitCode {
    uslcrp::cli::main()
}

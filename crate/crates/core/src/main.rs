fn main() -> std::process::ExitCode {
    dunkl_lab::cli::main()
}

fn main() -> std::process::ExitCode {
    singular_paths::cli::main()
}

fn main() -> std::process::ExitCode {
    indemnity::cli::run()
}

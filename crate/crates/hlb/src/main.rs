fn main() -> std::process::ExitCode {
    hlb::cli::main_exit()
}

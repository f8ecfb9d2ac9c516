fn main() {
    std::process::exit(ssh_lambda::cli::run(std::env::args_os()));
}

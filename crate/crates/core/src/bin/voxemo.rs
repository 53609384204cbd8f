fn main() {
    std::process::exit(voxemo::cli::run(std::env::args_os()));
}

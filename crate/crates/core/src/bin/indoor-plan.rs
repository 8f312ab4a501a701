fn main() {
    std::process::exit(indoor_planner::cli::run(std::env::args_os()));
}

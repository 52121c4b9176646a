fn main() { std::process::exit(stiefel_compare::cli::run()); }

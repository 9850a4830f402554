fn main() {
    if let Err(error) = guf_bench::cli::run() {
        eprintln!("error: {error}");
        std::process::exit(1);
    }
}

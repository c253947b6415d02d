fn main() {
    std::process::exit(magvertex::verify::run_cli(std::env::args_os()));
}

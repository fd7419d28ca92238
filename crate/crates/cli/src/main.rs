fn main() {
    std::process::exit(aras_bench::main_with_args(std::env::args_os()));
}

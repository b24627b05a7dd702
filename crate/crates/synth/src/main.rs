fn main() {
    std::process::exit(mor_synth::cli::main_with_args(std::env::args_os()));
}

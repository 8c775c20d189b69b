fn main() {
    qmm::cli::main();
}

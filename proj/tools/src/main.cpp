#include "sdist_cli/cli.hpp"

int main(int argc, char** argv) { return sdist::cli::run_cli(argc, argv); }

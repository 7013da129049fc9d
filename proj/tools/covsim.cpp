#include "covsim/cli.hpp"

int main(int argc, char** argv) { return covsim::cli::run_cli(argc, argv); }

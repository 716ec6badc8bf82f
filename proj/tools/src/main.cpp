#include "cli.hpp"

int main(int argc, char** argv) { return agentsec::cli::run_cli(argc, argv); }

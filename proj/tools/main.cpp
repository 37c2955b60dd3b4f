#include "cli.hpp"

int main(int argc, char** argv) { return qpulse::cli::run_cli(argc, argv); }

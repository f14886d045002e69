#include "fedq/cli/app.hpp"

int main(int argc, char** argv) { return fedq::cli::run_cli(argc, argv); }

#include "ioshock_cli/cli.hpp"

int main(int argc, char** argv) { return ioshock::cli::run_main(argc, argv); }

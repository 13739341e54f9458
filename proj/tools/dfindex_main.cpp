#include "dfindex/cli_runner.hpp"

int main(int argc, char** argv) { return dfindex::run_cli(argc, argv); }

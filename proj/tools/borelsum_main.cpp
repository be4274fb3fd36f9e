#include "borelsum/cli_io.hpp"

int main(int argc, char** argv) { return borelsum::run_cli(argc, argv); }

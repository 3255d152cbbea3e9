#include "argpipe/cli.hpp"

int main(int argc, char** argv) { return argpipe::run_cli(argc, argv); }

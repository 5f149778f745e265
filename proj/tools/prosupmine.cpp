#include "prosupmine/cli.hpp"

int main(int argc, char** argv) { return prosupmine::cli::run_cli(argc, argv); }

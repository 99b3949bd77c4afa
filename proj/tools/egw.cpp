#include "egw/cli.hpp"

int main(int argc, char** argv) { return egw::cli::run_cli(argc, argv); }

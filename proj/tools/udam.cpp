#include "udam/cli.hpp"

int main(int argc, char** argv) { return udam::cli::run_cli(argc, argv); }

#include "pls/cli.hpp"

int main(int argc, char** argv) { return pls::run_cli(argc, argv); }

#include "sisdecay/cli.hpp"

int main(int argc, char** argv) { return sisdecay::run_cli(argc, argv); }

#include "eael/cli.hpp"

int main(int argc, char** argv) { return eael::cli::run(argc, argv); }

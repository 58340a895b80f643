#include <iostream>

#include "qph/cli.hpp"

int main(int argc, char **argv) { return qph::cli::run(argc, argv, std::cout, std::cerr); }

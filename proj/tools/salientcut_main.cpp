#include <iostream>

#include "salientcut/cli.hpp"

int main(int argc, char** argv) { return salientcut::run_cli(argc, argv, std::cout, std::cerr); }

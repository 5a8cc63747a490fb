#include <iostream>

#include "policylens/cli/app.hpp"

int main(int argc, char** argv) { return policylens::cli::run(argc, argv, std::cout, std::cerr); }

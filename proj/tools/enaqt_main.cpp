#include <iostream>

#include "enaqt/cli.hpp"

int main(int argc, char** argv) { return enaqt::cli::run(argc, argv, std::cout, std::cerr); }

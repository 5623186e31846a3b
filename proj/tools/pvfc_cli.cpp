#include <iostream>

#include "pvfc/commands.hpp"

int main(int argc, char** argv) { return pvfc::cli::cmd_dispatch(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "pmstat/cli.hpp"

int main(int argc, char** argv) { return pmstat::dispatch(argc, argv, std::cout, std::cerr); }

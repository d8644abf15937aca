#include "photon_smatrix/app/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return psm::app::run(argc, argv, std::cout, std::cerr); }

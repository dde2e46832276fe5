#include <iostream>

#include "sensorvis_harness/cli.hpp"

int main(int argc, char** argv) {
  return sensorvis::harness::run_cli(argc, argv, std::cout, std::cerr);
}

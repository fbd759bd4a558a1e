#include <iostream>
#include <string>
#include <vector>

#include "radar_odom/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return radar_odom::run_cli(args, std::cout, std::cerr);
}

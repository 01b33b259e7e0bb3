#include <iostream>
#include <string>
#include <vector>

#include <polydil/cli.hpp>

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return polydil::run_cli(args, std::cout, std::cerr);
}

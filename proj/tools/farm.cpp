#include <vector>

#include "farm/cli.hpp"

int main(int argc, char** argv) {
  return farm::execute(std::vector<std::string>(argv, argv + argc));
}

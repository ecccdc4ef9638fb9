#include <iostream>

#include "quotrep/cli_app.hpp"

int main(int argc, char** argv) {
  return quotrep::run_cli(argc, argv, std::cout, std::cerr);
}

#include "veechcomb/shell.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto r = veechcomb::run(args);
  if (!r.diagnostics.empty()) std::cerr << r.diagnostics << "\n";
  std::cout << r.to_json().dump(2) << "\n";
  return r.exit_code;
}

// Writes a synthetic PNG corpus: synth_corpus <dir> <count> <seed>

#include <cstdio>
#include <cstdlib>

#include "synth.hpp"

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: %s <dir> <count> <seed>\n", argv[0]);
    return 1;
  }
  simx::test::make_corpus(argv[1], std::atoi(argv[2]),
                          std::strtoull(argv[3], nullptr, 10));
  return 0;
}

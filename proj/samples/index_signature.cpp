// Singular values of I - 2 M_g T for the logistic and radial symbols: one
// collapses to zero, matched by the positive cokernel witness.

#include <cstdlib>
#include <iostream>

#include "qdlie/operators.hpp"

int main(int argc, char** argv) {
  using namespace qdlie::ops;
  const int n = argc > 1 ? std::atoi(argv[1]) : 512;
  const Grid grid(30.0, n);
  for (const auto& g : {SymbolFunction::logistic(), SymbolFunction::radial(1.0), SymbolFunction::constant(1.0)}) {
    Vector witness;
    try {
      witness = cokernel_witness(g, grid).zeta;
    } catch (const qdlie::PreconditionError&) {
      // The constant symbol has no interior witness.
    }
    const IndexReport r = index_signature(product_conv_operator(g, grid), witness);
    std::cout << g.label() << ": " << to_string(r.outcome) << "\n  bottom singular values:";
    for (double s : r.bottom) std::cout << " " << s;
    std::cout << "\n  " << r.reason << "\n";
  }
}

// Classifies every catalog group and a few matrices, one line per group.

#include <iomanip>
#include <iostream>
#include <string>

#include "qdlie/qdlie.hpp"

namespace {

void row(const std::string& name, const qdlie::QDReport& r) {
  using qdlie::to_string;
  std::cout << std::left << std::setw(22) << name << std::setw(8) << to_string(r.nilpotent.value) << std::setw(8)
            << to_string(r.exponential.value) << std::setw(10) << to_string(r.strongly_quasidiagonal.value)
            << std::setw(8) << to_string(r.quasidiagonal.value) << to_string(r.af_embeddable.value) << "\n";
}

}  // namespace

int main() {
  using namespace qdlie;
  std::cout << std::left << std::setw(22) << "group" << std::setw(8) << "nilp" << std::setw(8) << "exp" << std::setw(10)
            << "strongQD" << std::setw(8) << "QD" << "AF\n";
  for (const std::string name : {"S2", "S3(1)", "S3(-0.5)", "S4", "mautner", "heisenberg", "euclid_scaled(2)",
                                 "euclid_scaled(3)"})
    row(name, classify(parse_catalog_name(name)));

  // Saddle, focus and a commensurable rotation pair.
  row("diag(1,-1)", classify(MatrixSpec{Endomorphism::from_rows({{1, 0}, {0, -1}}), std::nullopt}));
  row("[[-1,2],[-2,-1]]", classify(MatrixSpec{Endomorphism::from_rows({{-1, 2}, {-2, -1}}), std::nullopt}));
  Matrix d = Matrix::Zero(4, 4);
  d.topLeftCorner(2, 2) = rotation_generator(1.0);
  d.bottomRightCorner(2, 2) = rotation_generator(2.0);
  row("rot(1) + rot(2)", classify(MatrixSpec{Endomorphism(d), std::nullopt}));
}

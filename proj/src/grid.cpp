#include "prm/grid.hpp"

#include <numbers>

namespace prm {

ProjGrid::ProjGrid(int n) : n_(n), h_(std::numbers::pi / n) {
  if (n < 64) throw DomainError("projective grid needs N >= 64");
}

}  // namespace prm

#include "fksusc/grid.hpp"

#include <cmath>
#include <string>

#include "fksusc/errors.hpp"

namespace fksusc {

MatsubaraGrid::MatsubaraGrid(double beta, int n_cut) : beta_(beta), n_cut_(n_cut) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw InputError("beta", "must be finite and strictly positive, got " + std::to_string(beta));
  if (n_cut < 1) throw InputError("n_cut", "must be a positive integer, got " + std::to_string(n_cut));
}

}  // namespace fksusc

#pragma once

namespace fksusc {

/// Falicov-Kimball model parameters. `w1` is the heavy-fermion density <w1>,
/// treated as a given input (never solved for).
struct FkParams {
  double mu = 0.0;
  double U = 0.0;
  double w1 = 0.0;

  // throws InputError naming the offending field
  void validate() const;
};

}  // namespace fksusc

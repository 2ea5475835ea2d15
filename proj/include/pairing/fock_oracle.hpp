#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "pairing/model.hpp"

namespace pairing {

inline constexpr std::size_t kDefaultBasisCap = 20000;

struct basis_too_large_error : input_error {
  basis_too_large_error(std::size_t dimension, std::size_t cap)
      : input_error("basis dimension " + std::to_string(dimension) + " exceeds cap " +
                    std::to_string(cap)),
        dimension(dimension) {}
  std::size_t dimension;
};

struct diagonalization_error : solver_error {
  using solver_error::solver_error;
};

// Occupancy vectors n = (n_0, ..., n_{L-1}) with sum n = M, enumerated in
// decreasing lexicographic order so the all-pairs-at-level-0 state has
// ordinal 0.
class PairBasis {
 public:
  PairBasis(int levels, int pairs, std::size_t cap = kDefaultBasisCap);

  std::size_t size() const { return states_.size(); }
  int levels() const { return levels_; }
  int pairs() const { return pairs_; }
  const std::vector<int>& state(std::size_t ordinal) const { return states_[ordinal]; }
  std::size_t ordinal(const std::vector<int>& occupancy) const;

  // Number of weak compositions of M into L parts, C(M+L-1, L-1).
  static std::size_t dimension(int levels, int pairs);

 private:
  int levels_;
  int pairs_;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, std::size_t> index_;
};

// <n+1| b+ |n> on a shell of charge C: sqrt((n+1)(n+C)).
double raise_element(int n, int C);

struct DenseHamiltonian {
  Eigen::MatrixXd matrix;
  std::shared_ptr<const PairBasis> basis;
  double g_eff = 0.0;
};

DenseHamiltonian build_hamiltonian(const LevelSpectrum& spectrum, const PairSector& sector,
                                   double g_eff, std::size_t cap = kDefaultBasisCap);

struct EigenSystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

EigenSystem diagonalize(const DenseHamiltonian& h);

// Mean boson count per level, <2 n_a + nu_a>, for a normalized eigenvector.
std::vector<double> occupations_exact(const Eigen::VectorXd& vec, const PairBasis& basis,
                                      const std::vector<int>& nu);

// "row col value" triples of the nonzero entries.
void dump_coordinate_format(const Eigen::MatrixXd& m, std::ostream& out);

}  // namespace pairing

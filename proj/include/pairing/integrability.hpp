#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pairing/fock_oracle.hpp"
#include "pairing/model.hpp"

namespace pairing {

struct invalid_parameters_error : input_error {
  using input_error::input_error;
};

// One conserved charge H_i = n_i/g + sum_{l != i} (S_i.S_l)/(xi_i - xi_l)
// in the pair basis. The g coefficient is used exactly as given; pass a
// negative value for the attractive convention.
struct ChargeMatrix {
  int index = 0;
  std::vector<double> xi;
  Eigen::MatrixXd matrix;
};

ChargeMatrix build_charge(int i, const LevelSpectrum& spectrum, const std::vector<double>& xi,
                          double g, const PairSector& sector,
                          std::size_t cap = kDefaultBasisCap);

// sum_i eps_i n_i + g sum_{i<j} (eps_i - eps_j)/(xi_i - xi_j) (S_i.S_j).
DenseHamiltonian build_two_parameter_hamiltonian(const LevelSpectrum& spectrum,
                                                 const std::vector<double>& xi, double g,
                                                 const PairSector& sector,
                                                 std::size_t cap = kDefaultBasisCap);

// Frobenius norm of AB - BA.
double commutator_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Rotates each charge into the eigenbasis of h and reports the largest
// off-diagonal magnitude outside degenerate blocks (eigenvalues closer than
// degeneracy_tol are grouped).
double shared_eigenbasis_check(const Eigen::MatrixXd& h,
                               const std::vector<Eigen::MatrixXd>& charges,
                               double degeneracy_tol = 1e-9);

// b_i^+ as a map between the M-pair and (M+1)-pair bases; rows index the
// target basis. Used to assemble Bethe states explicitly.
Eigen::MatrixXd pair_raising_matrix(int level, const LevelSpectrum& spectrum,
                                    const PairSector& sector, const PairBasis& from,
                                    const PairBasis& to);

}  // namespace pairing

#include "pairing/integrability.hpp"

#include <cmath>
#include <set>

namespace pairing {

namespace {

void check_xi(const std::vector<double>& xi, int L) {
  if (static_cast<int>(xi.size()) != L) {
    throw invalid_parameters_error("xi length does not match spectrum size");
  }
  std::set<double> unique(xi.begin(), xi.end());
  if (static_cast<int>(unique.size()) != L) {
    throw invalid_parameters_error("inhomogeneity parameters xi must be pairwise distinct");
  }
}

// (S_i.S_j) = -1/2 (b_i^+ b_j + b_j^+ b_i) + 1/4 (1+n_i)(1+n_j) with n the
// boson count 2 n_pairs + nu.
Eigen::MatrixXd spin_scalar_product(int i, int j, const LevelSpectrum& spectrum,
                                    const PairSector& sector, const PairBasis& basis) {
  const std::size_t dim = basis.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  const auto ii = static_cast<std::size_t>(i);
  const auto jj = static_cast<std::size_t>(j);
  const int Ci = sector.charge(spectrum, i);
  const int Cj = sector.charge(spectrum, j);
  std::vector<int> moved;
  for (std::size_t s = 0; s < dim; ++s) {
    const std::vector<int>& n = basis.state(s);
    const double bos_i = 2.0 * n[ii] + sector.nu()[ii];
    const double bos_j = 2.0 * n[jj] + sector.nu()[jj];
    m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) =
        0.25 * (1.0 + bos_i) * (1.0 + bos_j);
    if (n[jj] > 0) {  // b_i^+ b_j
      moved = n;
      --moved[jj];
      ++moved[ii];
      const auto t = static_cast<Eigen::Index>(basis.ordinal(moved));
      const double amp = -0.5 * raise_element(n[ii], Ci) * raise_element(n[jj] - 1, Cj);
      m(t, static_cast<Eigen::Index>(s)) += amp;
      m(static_cast<Eigen::Index>(s), t) += amp;
    }
  }
  return m;
}

}  // namespace

ChargeMatrix build_charge(int i, const LevelSpectrum& spectrum, const std::vector<double>& xi,
                          double g, const PairSector& sector, std::size_t cap) {
  const int L = spectrum.size();
  check_xi(xi, L);
  if (g == 0.0) throw invalid_parameters_error("coupling must be nonzero");
  PairBasis basis(L, sector.pairs(), cap);
  const std::size_t dim = basis.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  const auto ii = static_cast<std::size_t>(i);
  for (std::size_t s = 0; s < dim; ++s) {
    const double bos = 2.0 * basis.state(s)[ii] + sector.nu()[ii];
    m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = bos / g;
  }
  for (int l = 0; l < L; ++l) {
    if (l == i) continue;
    m += spin_scalar_product(i, l, spectrum, sector, basis) /
         (xi[ii] - xi[static_cast<std::size_t>(l)]);
  }
  return ChargeMatrix{i, xi, std::move(m)};
}

DenseHamiltonian build_two_parameter_hamiltonian(const LevelSpectrum& spectrum,
                                                 const std::vector<double>& xi, double g,
                                                 const PairSector& sector, std::size_t cap) {
  const int L = spectrum.size();
  check_xi(xi, L);
  auto basis = std::make_shared<PairBasis>(L, sector.pairs(), cap);
  const std::size_t dim = basis->size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int a = 0; a < L; ++a) {
      const auto ia = static_cast<std::size_t>(a);
      diag += spectrum.level(a).epsilon * (2.0 * basis->state(s)[ia] + sector.nu()[ia]);
    }
    m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = diag;
  }
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      const double w = (spectrum.level(i).epsilon - spectrum.level(j).epsilon) /
                       (xi[static_cast<std::size_t>(i)] - xi[static_cast<std::size_t>(j)]);
      m += g * w * spin_scalar_product(i, j, spectrum, sector, *basis);
    }
  }
  return DenseHamiltonian{std::move(m), std::move(basis), g};
}

double commutator_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw invalid_parameters_error("commutator needs square matrices of equal dimension");
  }
  return (a * b - b * a).norm();
}

double shared_eigenbasis_check(const Eigen::MatrixXd& h,
                               const std::vector<Eigen::MatrixXd>& charges,
                               double degeneracy_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw diagonalization_error("eigensolve failed in shared-eigenbasis check");
  }
  const Eigen::VectorXd& vals = solver.eigenvalues();
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  const Eigen::Index dim = vals.size();

  // Group eigenvalues into degenerate blocks; leakage is only meaningful
  // across distinct blocks.
  std::vector<int> block(static_cast<std::size_t>(dim), 0);
  for (Eigen::Index k = 1; k < dim; ++k) {
    block[static_cast<std::size_t>(k)] =
        (vals(k) - vals(k - 1) <= degeneracy_tol) ? block[static_cast<std::size_t>(k - 1)]
                                                  : block[static_cast<std::size_t>(k - 1)] + 1;
  }

  double leakage = 0.0;
  for (const auto& charge : charges) {
    if (charge.rows() != dim) {
      throw invalid_parameters_error("charge dimension does not match Hamiltonian");
    }
    const Eigen::MatrixXd rotated = vecs.transpose() * charge * vecs;
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        if (block[static_cast<std::size_t>(r)] != block[static_cast<std::size_t>(c)]) {
          leakage = std::max(leakage, std::abs(rotated(r, c)));
        }
      }
    }
  }
  return leakage;
}

Eigen::MatrixXd pair_raising_matrix(int level, const LevelSpectrum& spectrum,
                                    const PairSector& sector, const PairBasis& from,
                                    const PairBasis& to) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(to.size()),
                                            static_cast<Eigen::Index>(from.size()));
  const auto il = static_cast<std::size_t>(level);
  const int C = sector.charge(spectrum, level);
  std::vector<int> raised;
  for (std::size_t s = 0; s < from.size(); ++s) {
    raised = from.state(s);
    ++raised[il];
    m(static_cast<Eigen::Index>(to.ordinal(raised)), static_cast<Eigen::Index>(s)) =
        raise_element(from.state(s)[il], C);
  }
  return m;
}

}  // namespace pairing

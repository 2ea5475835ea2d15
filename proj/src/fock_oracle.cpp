#include "pairing/fock_oracle.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace pairing {

std::size_t PairBasis::dimension(int levels, int pairs) {
  // C(M+L-1, L-1) without overflow for the sizes we accept.
  long double dim = 1.0L;
  for (int k = 1; k <= levels - 1; ++k) {
    dim *= static_cast<long double>(pairs + k);
    dim /= static_cast<long double>(k);
  }
  if (dim > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2)) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(dim + 0.5L);
}

PairBasis::PairBasis(int levels, int pairs, std::size_t cap) : levels_(levels), pairs_(pairs) {
  if (levels < 1) throw invalid_spectrum_error("basis needs at least one level");
  if (pairs < 0) throw invalid_sector_error("basis needs pairs >= 0");
  const std::size_t dim = dimension(levels, pairs);
  if (dim > cap) throw basis_too_large_error(dim, cap);
  states_.reserve(dim);

  std::vector<int> occ(static_cast<std::size_t>(levels), 0);
  // Decreasing lexicographic enumeration: level 0 takes the largest count
  // first, recursing over the remainder.
  const auto enumerate = [&](auto&& self, int a, int remaining) -> void {
    if (a == levels - 1) {
      occ[static_cast<std::size_t>(a)] = remaining;
      states_.push_back(occ);
      return;
    }
    for (int n = remaining; n >= 0; --n) {
      occ[static_cast<std::size_t>(a)] = n;
      self(self, a + 1, remaining - n);
    }
    occ[static_cast<std::size_t>(a)] = 0;
  };
  enumerate(enumerate, 0, pairs);

  for (std::size_t i = 0; i < states_.size(); ++i) index_[states_[i]] = i;
}

std::size_t PairBasis::ordinal(const std::vector<int>& occupancy) const {
  const auto it = index_.find(occupancy);
  if (it == index_.end()) throw invalid_sector_error("occupancy vector not in basis");
  return it->second;
}

double raise_element(int n, int C) {
  return std::sqrt(static_cast<double>(n + 1) * static_cast<double>(n + C));
}

DenseHamiltonian build_hamiltonian(const LevelSpectrum& spectrum, const PairSector& sector,
                                   double g_eff, std::size_t cap) {
  const int L = spectrum.size();
  auto basis = std::make_shared<PairBasis>(L, sector.pairs(), cap);
  const std::size_t dim = basis->size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));

  std::vector<int> C(static_cast<std::size_t>(L));
  for (int a = 0; a < L; ++a) C[static_cast<std::size_t>(a)] = sector.charge(spectrum, a);

  std::vector<int> moved;
  for (std::size_t s = 0; s < dim; ++s) {
    const std::vector<int>& n = basis->state(s);
    double diag = 0.0;
    for (int a = 0; a < L; ++a) {
      const auto ia = static_cast<std::size_t>(a);
      diag += spectrum.level(a).epsilon * (2.0 * n[ia] + sector.nu()[ia]);
      diag -= g_eff * n[ia] * (n[ia] - 1.0 + C[ia]);
    }
    h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = diag;

    // One pair moved from level b to level a; fill the upper triangle only.
    for (int b = 0; b < L; ++b) {
      const auto ib = static_cast<std::size_t>(b);
      if (n[ib] == 0) continue;
      for (int a = 0; a < L; ++a) {
        if (a == b) continue;
        const auto ia = static_cast<std::size_t>(a);
        moved = n;
        --moved[ib];
        ++moved[ia];
        const std::size_t t = basis->ordinal(moved);
        if (t < s) continue;
        const double amp = -g_eff * raise_element(n[ia], C[ia]) * raise_element(n[ib] - 1, C[ib]);
        h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = amp;
        h(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = amp;
      }
    }
  }
  return DenseHamiltonian{std::move(h), std::move(basis), g_eff};
}

EigenSystem diagonalize(const DenseHamiltonian& h) {
  if (h.matrix.rows() < 1) throw invalid_sector_error("empty Hamiltonian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
  if (solver.info() != Eigen::Success) {
    throw diagonalization_error("symmetric eigensolver failed to converge at dimension " +
                                std::to_string(h.matrix.rows()));
  }
  EigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
  const double scale = h.matrix.norm();
  const double bound = 1e-10 * std::max(scale, 1.0);
  for (Eigen::Index k = 0; k < out.values.size(); ++k) {
    const double resid = (h.matrix * out.vectors.col(k) - out.values(k) * out.vectors.col(k)).norm();
    if (resid > bound) {
      throw diagonalization_error("eigenpair residual " + std::to_string(resid) +
                                  " exceeds bound at index " + std::to_string(k));
    }
  }
  return out;
}

std::vector<double> occupations_exact(const Eigen::VectorXd& vec, const PairBasis& basis,
                                      const std::vector<int>& nu) {
  std::vector<double> counts(static_cast<std::size_t>(basis.levels()), 0.0);
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const double w = vec(static_cast<Eigen::Index>(s)) * vec(static_cast<Eigen::Index>(s));
    const std::vector<int>& n = basis.state(s);
    for (int a = 0; a < basis.levels(); ++a) {
      const auto ia = static_cast<std::size_t>(a);
      counts[ia] += w * (2.0 * n[ia] + nu[ia]);
    }
  }
  return counts;
}

void dump_coordinate_format(const Eigen::MatrixXd& m, std::ostream& out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) out << i << ' ' << j << ' ' << m(i, j) << '\n';
    }
  }
}

}  // namespace pairing

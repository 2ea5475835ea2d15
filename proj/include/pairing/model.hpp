#pragma once

#include <stdexcept>
#include <string>
#include <vector>
#include <iosfwd>

namespace pairing {

// Base for everything thrown by this library. `input_error` covers bad
// problem definitions (spectra, sectors, configs); `solver_error` covers
// numerical failures at valid inputs.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct input_error : error {
  using error::error;
};
struct solver_error : error {
  using error::error;
};

struct invalid_spectrum_error : input_error {
  using input_error::input_error;
};
struct invalid_sector_error : input_error {
  using input_error::input_error;
};

// One collapsed shell: energy, degeneracy (number of pair modes), and the
// number of unpaired bosons frozen on it.
struct Level {
  double epsilon = 0.0;
  int omega = 1;
  int nu = 0;
};

// Pair-scattering strength felt by a shell: C = Omega + nu.
int charge(const Level& level);

class LevelSpectrum {
 public:
  // Strictly increasing epsilons; this is the production entry point.
  static LevelSpectrum from_levels(std::vector<Level> levels);
  // Permits repeated epsilons; used to cross-check a collapsed shell
  // against its explicitly split counterpart.
  static LevelSpectrum from_levels_allow_shared_energies(std::vector<Level> levels);

  int size() const { return static_cast<int>(levels_.size()); }
  const Level& level(int a) const { return levels_[static_cast<std::size_t>(a)]; }
  const std::vector<Level>& levels() const { return levels_; }
  double min_spacing() const;
  bool strictly_increasing() const { return strict_; }

 private:
  LevelSpectrum(std::vector<Level> levels, bool strict);
  std::vector<Level> levels_;
  bool strict_ = true;
};

// epsilon_a = a/L, Omega = 1, nu = 0, so the bandwidth is (L-1)/L and
// L*epsilon_1 = 1.
LevelSpectrum equal_spacing_spectrum(int L);

// Plain text, one "epsilon omega nu" triple per line, '#' comments.
LevelSpectrum load_spectrum(std::istream& in);
LevelSpectrum load_spectrum_file(const std::string& path);

// g_bare > 0 means attraction: H = sum eps_i n_i - g_eff B+ B-.
struct Coupling {
  double g_bare = 0.0;
  int L = 1;
  double g_eff() const { return g_bare / L; }
};

// Fixes the Hilbert-space block: M pairs plus per-level unpaired counts.
class PairSector {
 public:
  PairSector(const LevelSpectrum& spectrum, int pairs);
  PairSector(const LevelSpectrum& spectrum, int pairs, std::vector<int> nu_per_level);

  int pairs() const { return pairs_; }
  const std::vector<int>& nu() const { return nu_; }
  int bosons() const;  // sum nu + 2M
  int charge(const LevelSpectrum& spectrum, int a) const;

 private:
  int pairs_ = 0;
  std::vector<int> nu_;
};

double density(const LevelSpectrum& spectrum, const PairSector& sector);

}  // namespace pairing

#include "pairing/model.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace pairing {

int charge(const Level& level) { return level.omega + level.nu; }

namespace {

void check_level(const Level& level, int index) {
  if (level.omega < 1) {
    throw invalid_spectrum_error("level " + std::to_string(index) +
                                 ": degeneracy must be >= 1, got " + std::to_string(level.omega));
  }
  if (level.nu < 0) {
    throw invalid_spectrum_error("level " + std::to_string(index) +
                                 ": seniority must be >= 0, got " + std::to_string(level.nu));
  }
  if (level.omega == 1 && level.nu > 1) {
    throw invalid_spectrum_error("level " + std::to_string(index) +
                                 ": a non-degenerate level carries at most one unpaired boson");
  }
}

}  // namespace

LevelSpectrum::LevelSpectrum(std::vector<Level> levels, bool strict)
    : levels_(std::move(levels)), strict_(strict) {
  if (levels_.empty()) {
    throw invalid_spectrum_error("spectrum must contain at least one level");
  }
  for (int a = 0; a < size(); ++a) {
    check_level(levels_[static_cast<std::size_t>(a)], a);
    if (a > 0) {
      const double prev = levels_[static_cast<std::size_t>(a - 1)].epsilon;
      const double cur = levels_[static_cast<std::size_t>(a)].epsilon;
      if (strict_ ? (cur <= prev) : (cur < prev)) {
        throw invalid_spectrum_error("level energies must be " +
                                     std::string(strict_ ? "strictly increasing" : "non-decreasing"));
      }
    }
  }
}

LevelSpectrum LevelSpectrum::from_levels(std::vector<Level> levels) {
  return LevelSpectrum(std::move(levels), true);
}

LevelSpectrum LevelSpectrum::from_levels_allow_shared_energies(std::vector<Level> levels) {
  return LevelSpectrum(std::move(levels), false);
}

double LevelSpectrum::min_spacing() const {
  double spacing = std::numeric_limits<double>::infinity();
  for (int a = 1; a < size(); ++a) {
    spacing = std::min(spacing, level(a).epsilon - level(a - 1).epsilon);
  }
  return spacing;
}

LevelSpectrum equal_spacing_spectrum(int L) {
  if (L < 2) {
    throw invalid_spectrum_error("equal-spacing spectrum needs L >= 2, got " + std::to_string(L));
  }
  std::vector<Level> levels(static_cast<std::size_t>(L));
  for (int a = 0; a < L; ++a) {
    levels[static_cast<std::size_t>(a)] = Level{static_cast<double>(a) / L, 1, 0};
  }
  return LevelSpectrum::from_levels(std::move(levels));
}

LevelSpectrum load_spectrum(std::istream& in) {
  std::vector<Level> levels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Level level;
    if (!(fields >> level.epsilon >> level.omega >> level.nu)) {
      throw invalid_spectrum_error("spectrum line " + std::to_string(lineno) +
                                   ": expected \"epsilon omega nu\"");
    }
    levels.push_back(level);
  }
  return LevelSpectrum::from_levels(std::move(levels));
}

LevelSpectrum load_spectrum_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw invalid_spectrum_error("cannot open spectrum file: " + path);
  }
  return load_spectrum(in);
}

PairSector::PairSector(const LevelSpectrum& spectrum, int pairs)
    : PairSector(spectrum, pairs, [&] {
        std::vector<int> nu(static_cast<std::size_t>(spectrum.size()));
        for (int a = 0; a < spectrum.size(); ++a) nu[static_cast<std::size_t>(a)] = spectrum.level(a).nu;
        return nu;
      }()) {}

PairSector::PairSector(const LevelSpectrum& spectrum, int pairs, std::vector<int> nu_per_level)
    : pairs_(pairs), nu_(std::move(nu_per_level)) {
  if (pairs_ < 0) {
    throw invalid_sector_error("pair count must be >= 0, got " + std::to_string(pairs_));
  }
  if (static_cast<int>(nu_.size()) != spectrum.size()) {
    throw invalid_sector_error("seniority list length " + std::to_string(nu_.size()) +
                               " does not match spectrum size " + std::to_string(spectrum.size()));
  }
  for (int a = 0; a < spectrum.size(); ++a) {
    const Level level{spectrum.level(a).epsilon, spectrum.level(a).omega, nu_[static_cast<std::size_t>(a)]};
    check_level(level, a);
  }
}

int PairSector::bosons() const {
  return std::accumulate(nu_.begin(), nu_.end(), 0) + 2 * pairs_;
}

int PairSector::charge(const LevelSpectrum& spectrum, int a) const {
  return spectrum.level(a).omega + nu_[static_cast<std::size_t>(a)];
}

double density(const LevelSpectrum& spectrum, const PairSector& sector) {
  return static_cast<double>(sector.bosons()) / spectrum.size();
}

}  // namespace pairing

#pragma once

// Fine-structure level tables, Ritz-combination line prediction and the
// air/vacuum wavelength conversion used for fluorescence channels.

#include <array>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "hfslock/hfs.hpp"

namespace hfslock {

class LevelDatabase {
 public:
  LevelDatabase() = default;
  explicit LevelDatabase(std::string metadata) : metadata_(std::move(metadata)) {}

  /// Throws ValidationError for a negative energy or when another level has
  /// the same J and parity within 0.001 cm^-1.
  void add(Level level);

  /// Index of a level clashing with `level`, if any.
  std::optional<std::size_t> find_duplicate(const Level& level) const;

  const std::vector<Level>& levels() const noexcept { return levels_; }
  const std::string& metadata() const noexcept { return metadata_; }
  std::size_t size() const noexcept { return levels_.size(); }

 private:
  std::vector<Level> levels_;
  std::string metadata_;
};

/// Tab-separated level table:
///   energy_cm1  parity  twoJ  A_MHz  B_MHz  label
/// parity is `e` or `o`, A and B may be empty, `#` starts a comment line.
/// Throws ParseError with the offending line and column.
LevelDatabase parse_database(std::istream& in, const std::string& source_name);
LevelDatabase load_database(const std::filesystem::path& path);

struct FluorescenceLine {
  Level final_level;
  double vacuum_wavelength = 0.0;  // nm
  double air_wavelength = 0.0;     // nm
};

struct PredictedLine {
  Level lower;
  Level upper;
  Wavenumber wavenumber;
  double vacuum_wavelength = 0.0;  // nm, 1e7 / wavenumber
  double boltzmann_weight = 0.0;
  std::vector<FluorescenceLine> fluorescence_candidates;
  std::optional<double> match_quality;  // |ritz - measured| nm, classify only
};

struct PredictOptions {
  double temperature = 2000.0;  // K, population temperature of the lower level
  double fluorescence_min = 300.0;  // nm (air)
  double fluorescence_max = 900.0;
};

/// Vacuum wavelength (nm) of a transition with the given wavenumber.
double ritz_wavelength(Wavenumber sigma);

/// exp(-c2 E / T) with the second radiation constant c2 = hc/k.
double boltzmann_weight(Wavenumber energy, double temperature);

/// Every dipole-allowed level pair whose Ritz wavelength falls in
/// [lambda_min, lambda_max] nm (vacuum), by descending Boltzmann weight.
/// The order does not depend on the row order of the database.
std::vector<PredictedLine> predict(const LevelDatabase& db, double lambda_min, double lambda_max,
                                   const PredictOptions& options = {});

/// Candidates for a measured vacuum wavelength within +-tolerance nm, best
/// match first. A zero tolerance yields no candidates.
std::vector<PredictedLine> classify(const LevelDatabase& db, double measured_vacuum_wavelength, double tolerance,
                                    const PredictOptions& options = {});

/// Refractive index of standard air (Edlen 1966) at a vacuum wavelength in nm.
double air_refractive_index(double vacuum_wavelength);
double vacuum_to_air(double vacuum_wavelength);
double air_to_vacuum(double air_wavelength);

struct MgReference {
  int isotope = 0;
  double fundamental = 0.0;  // nm
  double second_subharmonic = 0.0;
  double fourth_subharmonic = 0.0;
};

/// D2 line of 24Mg+, 25Mg+ and 26Mg+ with its 2nd and 4th sub-harmonics.
const std::array<MgReference, 3>& mg_reference_table();
const MgReference& mg_reference(int isotope);

/// Frequency of a line at `wavelength` (nm, vacuum) minus that of the 4th
/// sub-harmonic of `ref`, MHz.
double mg_offset(double wavelength, const MgReference& ref);

}  // namespace hfslock

#include "hfslock/levels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

#include "hfslock/constants.hpp"
#include "hfslock/error.hpp"
#include "hfslock/text.hpp"

namespace hfslock {

namespace {

constexpr std::int64_t duplicate_window = Wavenumber::units_per_cm1 / 1000;  // 0.001 cm^-1
constexpr std::string_view kHeader = "energy_cm1\tparity\ttwoJ\tA_MHz\tB_MHz\tlabel";

bool same_key(const Level& a, const Level& b) {
  return a.j == b.j && a.parity == b.parity && std::abs((a.energy - b.energy).units()) <= duplicate_window;
}

// Total order used to make prediction output independent of row order.
auto level_key(const Level& l) { return std::make_tuple(l.energy, l.j, l.parity, l.label); }

}  // namespace

std::optional<std::size_t> LevelDatabase::find_duplicate(const Level& level) const {
  for (std::size_t k = 0; k < levels_.size(); ++k)
    if (same_key(levels_[k], level)) return k;
  return std::nullopt;
}

void LevelDatabase::add(Level level) {
  if (level.energy < Wavenumber{}) throw ValidationError("level energy must be non-negative");
  if (const auto k = find_duplicate(level))
    throw ValidationError("level '" + level.label + "' duplicates '" + levels_[*k].label + "'");
  levels_.push_back(std::move(level));
}

LevelDatabase parse_database(std::istream& in, const std::string& source_name) {
  LevelDatabase db(source_name);
  std::vector<std::size_t> line_of;
  bool header_seen = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!header_seen) {
      if (trimmed != kHeader)
        throw ParseError(source_name, lineno, 1, "expected header 'energy_cm1<TAB>parity<TAB>twoJ<TAB>A_MHz<TAB>B_MHz<TAB>label'");
      header_seen = true;
      continue;
    }

    const auto fields = text::split(line, '\t');
    if (fields.size() != 6)
      throw ParseError(source_name, lineno, 1, "expected 6 tab-separated fields, found " + std::to_string(fields.size()));
    auto column = [&](std::size_t f) { return static_cast<std::size_t>(fields[f].data() - line.data()) + 1; };

    Level level;
    level.source = source_name + ":" + std::to_string(lineno);
    try {
      level.energy = Wavenumber::parse(text::trim(fields[0]));
    } catch (const ValidationError& e) {
      throw ParseError(source_name, lineno, column(0), e.what());
    }
    if (level.energy < Wavenumber{}) throw ParseError(source_name, lineno, column(0), "energy must be non-negative");

    const auto parity = text::trim(fields[1]);
    if (parity == "e") level.parity = Parity::even;
    else if (parity == "o") level.parity = Parity::odd;
    else throw ParseError(source_name, lineno, column(1), "parity must be 'e' or 'o', got '" + std::string(parity) + "'");

    const auto two_j = text::parse_int(text::trim(fields[2]));
    if (!two_j || *two_j < 0 || *two_j > 200)
      throw ParseError(source_name, lineno, column(2), "twoJ must be a non-negative integer");
    level.j = HalfInt::from_twice(static_cast<int>(*two_j));

    const auto a_text = text::trim(fields[3]);
    const auto b_text = text::trim(fields[4]);
    if (!a_text.empty() || !b_text.empty()) {
      HfsConstants c;
      if (!a_text.empty()) {
        const auto a = text::parse_double(a_text);
        if (!a || !std::isfinite(*a)) throw ParseError(source_name, lineno, column(3), "bad A value");
        c.a = *a;
      }
      if (!b_text.empty()) {
        const auto b = text::parse_double(b_text);
        if (!b || !std::isfinite(*b)) throw ParseError(source_name, lineno, column(4), "bad B value");
        c.b = *b;
      }
      level.hfs = c;
    }
    level.label = std::string(text::trim(fields[5]));

    if (const auto k = db.find_duplicate(level))
      throw ParseError(source_name, lineno, column(0),
                       "duplicate level (same J and parity within 0.001 cm^-1 as line " + std::to_string(line_of[*k]) + ")");
    db.add(std::move(level));
    line_of.push_back(lineno);
  }
  if (!header_seen) throw ParseError(source_name, lineno == 0 ? 1 : lineno, 1, "missing header line");
  return db;
}

LevelDatabase load_database(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open level table " + path.string());
  return parse_database(in, path.string());
}

double ritz_wavelength(Wavenumber sigma) {
  if (!(sigma > Wavenumber{})) throw ValidationError("transition wavenumber must be positive");
  return 1e7 / sigma.cm1();
}

double boltzmann_weight(Wavenumber energy, double temperature) {
  if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
  return std::exp(-constants::second_radiation_constant * energy.cm1() / temperature);
}

double air_refractive_index(double vacuum_wavelength) {
  if (!(vacuum_wavelength >= 200.0 && vacuum_wavelength <= 2000.0))
    throw ValidationError("wavelength " + text::format_double(vacuum_wavelength) + " nm outside 200-2000 nm");
  const double sigma = 1e3 / vacuum_wavelength;  // um^-1
  const double s2 = sigma * sigma;
  return 1.0 + 1e-8 * (8342.13 + 2406030.0 / (130.0 - s2) + 15997.0 / (38.9 - s2));
}

double vacuum_to_air(double vacuum_wavelength) { return vacuum_wavelength / air_refractive_index(vacuum_wavelength); }

double air_to_vacuum(double air_wavelength) {
  if (!(air_wavelength >= 200.0 && air_wavelength <= 2000.0))
    throw ValidationError("wavelength " + text::format_double(air_wavelength) + " nm outside 200-2000 nm");
  double vac = air_wavelength;
  for (int it = 0; it < 50; ++it) {
    const double next = air_wavelength * air_refractive_index(std::min(vac, 2000.0));
    if (std::abs(next - vac) < 1e-12) return next;
    vac = next;
  }
  return vac;
}

namespace {

std::vector<FluorescenceLine> fluorescence_for(const LevelDatabase& db, const Level& upper, const PredictOptions& opt) {
  std::vector<FluorescenceLine> out;
  for (const Level& f : db.levels()) {
    if (!(f.energy < upper.energy) || !dipole_allowed(f, upper)) continue;
    const double vac = ritz_wavelength(upper.energy - f.energy);
    if (vac < 200.0 || vac > 2000.0) continue;
    const double air = vacuum_to_air(vac);
    if (air < opt.fluorescence_min || air > opt.fluorescence_max) continue;
    out.push_back({f, vac, air});
  }
  std::sort(out.begin(), out.end(), [](const FluorescenceLine& a, const FluorescenceLine& b) {
    return level_key(a.final_level) < level_key(b.final_level);
  });
  return out;
}

}  // namespace

std::vector<PredictedLine> predict(const LevelDatabase& db, double lambda_min, double lambda_max,
                                   const PredictOptions& options) {
  if (!(lambda_min < lambda_max)) throw ValidationError("predict: window needs lambda_min < lambda_max");
  if (!(options.temperature > 0.0)) throw ValidationError("predict: temperature must be positive");

  std::vector<PredictedLine> out;
  for (const Level& lo : db.levels()) {
    for (const Level& up : db.levels()) {
      if (!(lo.energy < up.energy) || !dipole_allowed(lo, up)) continue;
      const Wavenumber sigma = up.energy - lo.energy;
      const double vac = ritz_wavelength(sigma);
      if (vac < lambda_min || vac > lambda_max) continue;
      PredictedLine p;
      p.lower = lo;
      p.upper = up;
      p.wavenumber = sigma;
      p.vacuum_wavelength = vac;
      p.boltzmann_weight = boltzmann_weight(lo.energy, options.temperature);
      p.fluorescence_candidates = fluorescence_for(db, up, options);
      out.push_back(std::move(p));
    }
  }
  std::sort(out.begin(), out.end(), [](const PredictedLine& a, const PredictedLine& b) {
    if (a.boltzmann_weight != b.boltzmann_weight) return a.boltzmann_weight > b.boltzmann_weight;
    return std::tie(a.wavenumber, a.lower.energy, a.lower.j, a.lower.label, a.upper.j, a.upper.label) <
           std::tie(b.wavenumber, b.lower.energy, b.lower.j, b.lower.label, b.upper.j, b.upper.label);
  });
  return out;
}

std::vector<PredictedLine> classify(const LevelDatabase& db, double measured_vacuum_wavelength, double tolerance,
                                    const PredictOptions& options) {
  if (!(tolerance >= 0.0)) throw ValidationError("classify: tolerance must be non-negative");
  if (tolerance == 0.0) return {};
  auto out = predict(db, measured_vacuum_wavelength - tolerance, measured_vacuum_wavelength + tolerance, options);
  for (auto& p : out) p.match_quality = std::abs(p.vacuum_wavelength - measured_vacuum_wavelength);
  std::stable_sort(out.begin(), out.end(),
                   [](const PredictedLine& a, const PredictedLine& b) { return *a.match_quality < *b.match_quality; });
  return out;
}

const std::array<MgReference, 3>& mg_reference_table() {
  static const std::array<MgReference, 3> table = {{
      {24, 279.6355, 559.2710, 1118.5420},
      {25, 279.6349, 559.2698, 1118.5396},
      {26, 279.6347, 559.2694, 1118.5388},
  }};
  return table;
}

const MgReference& mg_reference(int isotope) {
  for (const auto& r : mg_reference_table())
    if (r.isotope == isotope) return r;
  throw ValidationError("no Mg+ reference for isotope " + std::to_string(isotope) + " (24, 25 or 26)");
}

double mg_offset(double wavelength, const MgReference& ref) {
  if (!(wavelength > 0.0) || !(ref.fourth_subharmonic > 0.0)) throw ValidationError("mg_offset: wavelengths must be positive");
  // c / lambda with lambda in nm gives GHz; x 1e3 for MHz.
  const double c = constants::speed_of_light;
  return c * 1e3 * (1.0 / wavelength - 1.0 / ref.fourth_subharmonic);
}

}  // namespace hfslock

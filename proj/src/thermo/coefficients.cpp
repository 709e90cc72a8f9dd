#include "hxdram/thermo/coefficients.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hxdram::thermo {

namespace detail {
extern const std::string_view kBuiltinCoefficientText;
}

namespace {

[[noreturn]] void parse_error(int line, const std::string& msg) {
  throw std::runtime_error("coefficient table line " + std::to_string(line) + ": " + msg);
}

PitchFamily parse_family(const std::string& s, int line) {
  if (s == "triangular") return PitchFamily::triangular;
  if (s == "square") return PitchFamily::square;
  parse_error(line, "unknown pitch family '" + s + "'");
}

}  // namespace

PitchFamily pitch_family(TubeLayout layout) {
  return layout == TubeLayout::triangular_30 ? PitchFamily::triangular : PitchFamily::square;
}

CoefficientTable CoefficientTable::parse(std::istream& in) {
  CoefficientTable table;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string keyword;
    if (!(line >> keyword)) continue;

    if (keyword == "version") {
      if (!(line >> table.version_)) parse_error(line_no, "bad version");
    } else if (keyword == "band") {
      double angle = 0;
      ReynoldsBand b;
      if (!(line >> angle >> b.re_min >> b.re_max >> b.a1 >> b.a2 >> b.b1 >> b.b2))
        parse_error(line_no, "band needs 7 numbers");
      if (!(b.re_max > b.re_min) || b.re_min < 0) parse_error(line_no, "bad Reynolds range");
      TubeLayout layout{};
      try {
        layout = layout_from_angle(angle);
      } catch (const std::invalid_argument& e) {
        parse_error(line_no, e.what());
      }
      table.layouts_[layout].bands.push_back(b);
    } else if (keyword == "exponent") {
      double angle = 0;
      Exponents e;
      if (!(line >> angle >> e.a3 >> e.a4 >> e.b3 >> e.b4))
        parse_error(line_no, "exponent needs 5 numbers");
      TubeLayout layout{};
      try {
        layout = layout_from_angle(angle);
      } catch (const std::invalid_argument& ex) {
        parse_error(line_no, ex.what());
      }
      auto& data = table.layouts_[layout];
      data.exponents = e;
      data.has_exponents = true;
    } else if (keyword == "bundle") {
      std::string family;
      int passes = 0;
      BundleConstants k;
      if (!(line >> family >> passes >> k.k1 >> k.n1))
        parse_error(line_no, "bundle needs family, passes, K1, n1");
      if (passes < 1 || !(k.k1 > 0) || !(k.n1 > 0))
        parse_error(line_no, "bundle constants must be positive");
      table.bundles_[parse_family(family, line_no)][passes] = k;
    } else {
      parse_error(line_no, "unknown record '" + keyword + "'");
    }
    std::string extra;
    if (line >> extra) parse_error(line_no, "trailing field '" + extra + "'");
  }

  for (auto& [layout, data] : table.layouts_) {
    std::sort(data.bands.begin(), data.bands.end(),
              [](const ReynoldsBand& a, const ReynoldsBand& b) { return a.re_min < b.re_min; });
  }
  table.check_complete();
  return table;
}

CoefficientTable CoefficientTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coefficient table " + path.string());
  return parse(in);
}

const CoefficientTable& CoefficientTable::builtin() {
  static const CoefficientTable table = [] {
    std::istringstream in{std::string(detail::kBuiltinCoefficientText)};
    return parse(in);
  }();
  return table;
}

std::shared_ptr<const CoefficientTable> builtin_coefficients() {
  static const std::shared_ptr<const CoefficientTable> shared(
      std::shared_ptr<const CoefficientTable>{}, &CoefficientTable::builtin());
  return shared;
}

void CoefficientTable::check_complete() const {
  if (layouts_.empty()) throw std::runtime_error("coefficient table has no bands");
  for (const auto& [layout, data] : layouts_) {
    const auto name = std::string(to_string(layout));
    if (!data.has_exponents) throw std::runtime_error("no exponent row for layout " + name);
    for (std::size_t i = 1; i < data.bands.size(); ++i) {
      if (data.bands[i].re_min != data.bands[i - 1].re_max)
        throw std::runtime_error("Reynolds bands for layout " + name + " are not contiguous");
    }
  }
  if (bundles_.empty()) throw std::runtime_error("coefficient table has no bundle constants");
}

const std::vector<ReynoldsBand>& CoefficientTable::bands(TubeLayout layout) const {
  const auto it = layouts_.find(layout);
  if (it == layouts_.end())
    throw std::out_of_range("no coefficients for layout " + std::string(to_string(layout)));
  return it->second.bands;
}

CoefficientTable::Lookup CoefficientTable::lookup(TubeLayout layout, double reynolds) const {
  const auto it = layouts_.find(layout);
  if (it == layouts_.end())
    throw std::out_of_range("no coefficients for layout " + std::string(to_string(layout)));
  const auto& data = it->second;

  Lookup out;
  const ReynoldsBand* band = nullptr;
  for (const auto& b : data.bands) {
    if (reynolds >= b.re_min && reynolds < b.re_max) {
      band = &b;
      break;
    }
  }
  if (band == nullptr) {
    out.clamped = true;
    band = reynolds < data.bands.front().re_min ? &data.bands.front() : &data.bands.back();
  }
  out.coefficients = {band->a1, band->a2, data.exponents.a3, data.exponents.a4,
                      band->b1, band->b2, data.exponents.b3, data.exponents.b4};
  return out;
}

BundleConstants CoefficientTable::bundle(TubeLayout layout, int passes) const {
  const auto it = bundles_.find(pitch_family(layout));
  if (it == bundles_.end() || it->second.empty())
    throw std::out_of_range("no bundle constants for layout " + std::string(to_string(layout)));
  // Row with the largest min_passes not exceeding `passes`.
  auto row = it->second.upper_bound(passes);
  if (row == it->second.begin())
    throw std::out_of_range("no bundle constants for " + std::to_string(passes) + " passes");
  return std::prev(row)->second;
}

bool CoefficientTable::operator==(const CoefficientTable& other) const {
  auto band_eq = [](const ReynoldsBand& a, const ReynoldsBand& b) {
    return a.re_min == b.re_min && a.re_max == b.re_max && a.a1 == b.a1 && a.a2 == b.a2 &&
           a.b1 == b.b1 && a.b2 == b.b2;
  };
  if (version_ != other.version_ || layouts_.size() != other.layouts_.size()) return false;
  for (const auto& [layout, data] : layouts_) {
    const auto it = other.layouts_.find(layout);
    if (it == other.layouts_.end()) return false;
    const auto& o = it->second;
    if (!std::equal(data.bands.begin(), data.bands.end(), o.bands.begin(), o.bands.end(), band_eq))
      return false;
    const auto& e = data.exponents;
    const auto& f = o.exponents;
    if (e.a3 != f.a3 || e.a4 != f.a4 || e.b3 != f.b3 || e.b4 != f.b4) return false;
  }
  if (bundles_.size() != other.bundles_.size()) return false;
  for (const auto& [family, rows] : bundles_) {
    const auto it = other.bundles_.find(family);
    if (it == other.bundles_.end() || it->second.size() != rows.size()) return false;
    for (const auto& [p, k] : rows) {
      const auto r = it->second.find(p);
      if (r == it->second.end() || r->second.k1 != k.k1 || r->second.n1 != k.n1) return false;
    }
  }
  return true;
}

}  // namespace hxdram::thermo

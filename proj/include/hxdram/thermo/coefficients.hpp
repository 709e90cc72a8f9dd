#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "hxdram/thermo/types.hpp"

namespace hxdram::thermo {

// Ideal tube-bank coefficients for one layout and Reynolds band:
//   j    = a1 (1.33 / (P_t/d_o))^a Re^a2,  a = a3 / (1 + 0.14 Re^a4)
//   f_id = b1 (1.33 / (P_t/d_o))^b Re^b2,  b = b3 / (1 + 0.14 Re^b4)
struct BandCoefficients {
  double a1 = 0, a2 = 0, a3 = 0, a4 = 0;
  double b1 = 0, b2 = 0, b3 = 0, b4 = 0;
};

struct ReynoldsBand {
  double re_min = 0.0;
  double re_max = 0.0;
  double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
};

struct BundleConstants {
  double k1 = 0.0;
  double n1 = 0.0;
};

enum class PitchFamily { triangular, square };

PitchFamily pitch_family(TubeLayout layout);

// Correlation data for the Bell-Delaware ideal bank and the bundle-diameter
// fit. Loaded once, read-only afterwards.
//
// Text format: one record per line, '#' starts a comment.
//   version <int>
//   band <layout_deg> <re_min> <re_max> <a1> <a2> <b1> <b2>
//   exponent <layout_deg> <a3> <a4> <b3> <b4>
//   bundle <triangular|square> <min_passes> <K1> <n1>
// A `bundle` row applies to every pass count >= min_passes up to the next row.
class CoefficientTable {
 public:
  struct Lookup {
    BandCoefficients coefficients;
    bool clamped = false;  // Re fell outside the tabulated bands
  };

  static CoefficientTable parse(std::istream& in);
  static CoefficientTable load(const std::filesystem::path& path);
  static const CoefficientTable& builtin();

  Lookup lookup(TubeLayout layout, double reynolds) const;
  BundleConstants bundle(TubeLayout layout, int passes) const;

  int version() const { return version_; }
  const std::vector<ReynoldsBand>& bands(TubeLayout layout) const;

  bool operator==(const CoefficientTable&) const;

 private:
  struct Exponents {
    double a3 = 0, a4 = 0, b3 = 0, b4 = 0;
  };
  struct LayoutData {
    std::vector<ReynoldsBand> bands;  // sorted by re_min
    Exponents exponents;
    bool has_exponents = false;
  };

  void check_complete() const;

  int version_ = 0;
  std::map<TubeLayout, LayoutData> layouts_;
  std::map<PitchFamily, std::map<int, BundleConstants>> bundles_;
};

}  // namespace hxdram::thermo

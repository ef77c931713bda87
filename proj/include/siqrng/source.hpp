#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace siqrng {

enum class SourceKind { vacuum, thermal, squeezed, custom };

enum class Quadrature { check, data };

enum class CalibrationStage { dark, shot };

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view name);

// Untrusted optical source, described only by the marginal variances of the
// two quadratures in shot-noise units. The check quadrature is P, the data
// quadrature is Q.
struct SourceModel {
  SourceKind kind = SourceKind::vacuum;
  double v_check = 1.0;
  double v_data = 1.0;
  double loss = 0.0;          // squeezed only
  double squeezing_db = 0.0;  // squeezed only

  static SourceModel vacuum();
  /// Thermal state with equal variance on both quadratures, variance >= 1.
  static SourceModel thermal(double variance);
  /// P-squeezed state: pure squeezing of `squeezing_db` followed by `loss`.
  static SourceModel squeezed(double squeezing_db, double loss);
  /// Arbitrary Gaussian marginals. Only positivity is enforced; an adversarial
  /// source need not respect the uncertainty principle for the simulation to run.
  static SourceModel custom(double v_check, double v_data);

  double variance(Quadrature q) const { return q == Quadrature::check ? v_check : v_data; }

  /// Throws std::invalid_argument when an invariant of the model kind is broken.
  void validate() const;
};

// Trusted homodyne detector + digitizer, in raw digitizer units.
struct DetectorModel {
  double dark_var = 0.0;
  double shot_var = 1.0;
  double range = std::numeric_limits<double>::infinity();  // saturation half-range R
  std::uint64_t seed = 1;

  void validate() const;
};

struct RawBlock {
  std::vector<double> samples;
  bool saturated = false;
};

// Seeded simulator of the source + detector chain. One instance owns one PRNG
// stream; give parallel streams distinct seeds instead of sharing an instance.
class QuadratureSource {
 public:
  QuadratureSource(SourceModel model, DetectorModel detector);

  /// n zero-mean Gaussian draws with variance v_quad*(shot_var - dark_var) + dark_var,
  /// clipped to +-range. `saturated` is set iff some pre-clip |x| >= range.
  RawBlock draw_block(Quadrature quadrature, std::size_t n);

  /// Blocked-beam calibration draws: dark stage has variance dark_var, shot stage
  /// (LO only, dark noise included) has variance shot_var.
  std::vector<double> draw_calibration(CalibrationStage stage, std::size_t n);

  const SourceModel& model() const { return model_; }
  const DetectorModel& detector() const { return detector_; }

 private:
  SourceModel model_;
  DetectorModel detector_;
  std::mt19937_64 rng_;
};

}  // namespace siqrng

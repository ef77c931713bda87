#include "siqrng/source.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace siqrng {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::vacuum: return "vacuum";
    case SourceKind::thermal: return "thermal";
    case SourceKind::squeezed: return "squeezed";
    case SourceKind::custom: return "custom";
  }
  return "unknown";
}

SourceKind source_kind_from_string(std::string_view name) {
  if (name == "vacuum") return SourceKind::vacuum;
  if (name == "thermal") return SourceKind::thermal;
  if (name == "squeezed") return SourceKind::squeezed;
  if (name == "custom") return SourceKind::custom;
  throw std::invalid_argument("unknown source kind: " + std::string(name));
}

SourceModel SourceModel::vacuum() { return {}; }

SourceModel SourceModel::thermal(double variance) {
  SourceModel m;
  m.kind = SourceKind::thermal;
  m.v_check = variance;
  m.v_data = variance;
  m.validate();
  return m;
}

SourceModel SourceModel::squeezed(double squeezing_db, double loss) {
  SourceModel m;
  m.kind = SourceKind::squeezed;
  m.squeezing_db = squeezing_db;
  m.loss = loss;
  const double transmitted = 1.0 - loss;
  m.v_check = transmitted * std::pow(10.0, -squeezing_db / 10.0) + loss;
  m.v_data = transmitted * std::pow(10.0, squeezing_db / 10.0) + loss;
  m.validate();
  return m;
}

SourceModel SourceModel::custom(double v_check, double v_data) {
  SourceModel m;
  m.kind = SourceKind::custom;
  m.v_check = v_check;
  m.v_data = v_data;
  m.validate();
  return m;
}

void SourceModel::validate() const {
  if (!(v_check > 0.0) || !(v_data > 0.0)) {
    throw std::invalid_argument("source variances must be positive");
  }
  switch (kind) {
    case SourceKind::vacuum:
      if (v_check != 1.0 || v_data != 1.0) {
        throw std::invalid_argument("vacuum source must have unit variances");
      }
      break;
    case SourceKind::thermal:
      if (v_check != v_data || v_check < 1.0) {
        throw std::invalid_argument("thermal source needs equal variances >= 1");
      }
      break;
    case SourceKind::squeezed: {
      if (!(loss >= 0.0 && loss < 1.0)) {
        throw std::invalid_argument("squeezed source loss must lie in [0, 1)");
      }
      const double t = 1.0 - loss;
      const double vc = t * std::pow(10.0, -squeezing_db / 10.0) + loss;
      const double vd = t * std::pow(10.0, squeezing_db / 10.0) + loss;
      if (std::abs(vc - v_check) > 1e-12 * vc || std::abs(vd - v_data) > 1e-12 * vd) {
        throw std::invalid_argument("squeezed source variances do not match squeezing/loss");
      }
      break;
    }
    case SourceKind::custom:
      break;
  }
}

void DetectorModel::validate() const {
  if (!(dark_var >= 0.0)) throw std::invalid_argument("dark_var must be >= 0");
  if (!(shot_var > dark_var)) throw std::invalid_argument("shot_var must exceed dark_var");
  if (!(range >= 0.0)) throw std::invalid_argument("range must be >= 0");
}

QuadratureSource::QuadratureSource(SourceModel model, DetectorModel detector)
    : model_(model), detector_(detector), rng_(detector.seed) {
  model_.validate();
  if (!(detector_.dark_var >= 0.0) || !(detector_.shot_var > detector_.dark_var)) {
    throw std::invalid_argument("detector needs shot_var > dark_var >= 0");
  }
}

RawBlock QuadratureSource::draw_block(Quadrature quadrature, std::size_t n) {
  if (n == 0) throw std::invalid_argument("draw_block needs n >= 1");
  const double vacuum_part = detector_.shot_var - detector_.dark_var;
  const double total = model_.variance(quadrature) * vacuum_part + detector_.dark_var;
  std::normal_distribution<double> gauss(0.0, std::sqrt(total));
  const double range = detector_.range;

  RawBlock out;
  out.samples.resize(n);
  for (auto& x : out.samples) {
    x = gauss(rng_);
    if (std::abs(x) >= range) {
      x = std::copysign(range, x);
      out.saturated = true;
    }
  }
  return out;
}

std::vector<double> QuadratureSource::draw_calibration(CalibrationStage stage, std::size_t n) {
  if (n < 2) throw std::invalid_argument("draw_calibration needs n >= 2");
  const double var = stage == CalibrationStage::dark ? detector_.dark_var : detector_.shot_var;
  std::normal_distribution<double> gauss(0.0, std::sqrt(var));
  std::vector<double> out(n);
  if (var == 0.0) return out;
  for (auto& x : out) x = gauss(rng_);
  return out;
}

}  // namespace siqrng

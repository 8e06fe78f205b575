#include "lmstim/focus_phase.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace lmstim {

namespace {

constexpr double kDegenerateMagnitude = 1e-12;
constexpr double kCoincidentDistance = 1e-9;  // mm

void check_lengths(std::span<const PhaseVector> per_focus) {
  if (per_focus.empty()) {
    throw ConfigError("phase combination needs at least one phase vector");
  }
  for (const PhaseVector& v : per_focus) {
    if (v.size() != per_focus.front().size()) {
      throw ConfigError("phase vectors differ in length");
    }
  }
}

}  // namespace

double wrap_phase(double phase) {
  double r = std::fmod(phase, kTwoPi);
  if (r < 0.0) {
    r += kTwoPi;
  }
  // fmod of a tiny negative value plus 2pi can round up to exactly 2pi.
  if (r >= kTwoPi) {
    r = 0.0;
  }
  return r;
}

PhaseVector::PhaseVector(std::vector<double> phases) : phases_(std::move(phases)) {
  for (double& p : phases_) {
    if (!std::isfinite(p)) {
      throw NumericalError("phase vector entry is not finite");
    }
    p = wrap_phase(p);
  }
}

PhaseVector single_focus_phases(const TransducerArray& array, const FocusSpec& focus) {
  if (!focus.point.allFinite()) {
    throw ConfigError("focus point must be finite");
  }
  const double k = array.wavenumber();
  std::vector<double> out;
  out.reserve(array.size());
  for (const Transducer& t : array.transducers()) {
    const double r = (focus.point - t.position).norm();
    if (r < kCoincidentDistance) {
      throw ConfigError("focus coincides with a transducer position");
    }
    out.push_back(-k * r);
  }
  return PhaseVector(std::move(out));
}

PhaseVector combine_phases_literal(std::span<const PhaseVector> per_focus) {
  check_lengths(per_focus);
  std::vector<double> sum(per_focus.front().size(), 0.0);
  for (const PhaseVector& v : per_focus) {
    for (std::size_t t = 0; t < sum.size(); ++t) {
      sum[t] = wrap_phase(sum[t] + v[t]);
    }
  }
  return PhaseVector(std::move(sum));
}

ComplexCombineResult combine_phases_complex(std::span<const PhaseVector> per_focus) {
  check_lengths(per_focus);
  const std::size_t n = per_focus.front().size();
  std::vector<double> out(n, 0.0);
  std::size_t degenerate = 0;
  for (std::size_t t = 0; t < n; ++t) {
    std::complex<double> acc{0.0, 0.0};
    for (const PhaseVector& v : per_focus) {
      acc += std::polar(1.0, v[t]);
    }
    if (std::abs(acc) < kDegenerateMagnitude) {
      ++degenerate;
      continue;
    }
    out[t] = std::arg(acc);
  }
  return {PhaseVector(std::move(out)), degenerate};
}

DriveFrame drive_for_foci(const TransducerArray& array, std::span<const FocusSpec> foci,
                          Combiner combiner, double duration) {
  if (foci.empty()) {
    throw ConfigError("drive needs at least one focus");
  }
  if (!(duration > 0.0)) {
    throw ConfigError("drive frame duration must be positive");
  }
  if (foci.size() == 1) {
    return DriveFrame{single_focus_phases(array, foci.front()), 1.0, duration};
  }
  std::vector<PhaseVector> per_focus;
  per_focus.reserve(foci.size());
  for (const FocusSpec& f : foci) {
    per_focus.push_back(single_focus_phases(array, f));
  }
  PhaseVector combined = combiner == Combiner::literal
                             ? combine_phases_literal(per_focus)
                             : combine_phases_complex(per_focus).phases;
  return DriveFrame{std::move(combined), 1.0, duration};
}

const char* to_string(Combiner c) {
  return c == Combiner::literal ? "literal" : "complex";
}

Combiner combiner_from_string(const std::string& name) {
  if (name == "literal") return Combiner::literal;
  if (name == "complex") return Combiner::complex;
  throw ConfigError("unknown combiner '" + name + "' (expected literal or complex)");
}

}  // namespace lmstim

#pragma once

#include "lmstim/array_model.hpp"

#include <span>
#include <string>
#include <vector>

namespace lmstim {

/// Maps any finite angle into [0, 2pi).
double wrap_phase(double phase);

/// One phase per transducer, every entry in [0, 2pi).
class PhaseVector {
public:
  PhaseVector() = default;
  /// Wraps each entry into [0, 2pi).
  explicit PhaseVector(std::vector<double> phases);

  std::size_t size() const { return phases_.size(); }
  double operator[](std::size_t i) const { return phases_[i]; }
  const std::vector<double>& values() const { return phases_; }

  friend bool operator==(const PhaseVector&, const PhaseVector&) = default;

private:
  std::vector<double> phases_;
};

struct FocusSpec {
  Vec3 point;
};

/// Phases held for one dwell interval. Stimuli drive every emitter at full
/// amplitude; lower amplitudes exist only for simulator tests.
struct DriveFrame {
  PhaseVector phases;
  double amplitude = 1.0;
  double duration = 0.0;  // s
};

enum class Combiner { literal, complex };

/// Focusing phases: -k * |focus - position| mod 2pi, so every wave arrives at
/// the focus with phase zero under the exp(j(kr - wt + phi)) convention.
PhaseVector single_focus_phases(const TransducerArray& array, const FocusSpec& focus);

/// Element-wise sum of the per-focus phase vectors, mod 2pi.
PhaseVector combine_phases_literal(std::span<const PhaseVector> per_focus);

struct ComplexCombineResult {
  PhaseVector phases;
  /// Transducers whose phasor sum vanished (|sum| < 1e-12); their phase is 0.
  std::size_t degenerate_count = 0;
};

/// Per transducer, arg(sum_i exp(j phi_i)) mapped to [0, 2pi).
ComplexCombineResult combine_phases_complex(std::span<const PhaseVector> per_focus);

DriveFrame drive_for_foci(const TransducerArray& array, std::span<const FocusSpec> foci,
                          Combiner combiner, double duration);

const char* to_string(Combiner c);
Combiner combiner_from_string(const std::string& name);

}  // namespace lmstim

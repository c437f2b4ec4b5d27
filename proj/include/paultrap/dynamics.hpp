#pragma once

// Direct integration of m r'' = Z e (U E_static(r) + U~ cos(omega_rf t) E_rf(r))
// and spectral analysis of the resulting trajectories.

#include <array>
#include <optional>
#include <ostream>
#include <vector>

#include "paultrap/fields/basis.hpp"

namespace paultrap {

/// Trajectory too short for the requested spectral resolution.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Trajectory {
  std::vector<double> t;      // s, uniform
  std::vector<Vec3> r;        // m
  std::vector<Vec3> v;        // m/s
  std::vector<double> phase;  // omega_rf t modulo 2 pi
  double dt = 0.0;            // integrator step (s)
  int steps_per_period = 0;
  Vec3 null = Vec3::Zero();
  bool escaped = false;
  std::optional<double> escape_time;  // s
};

struct IntegrateOptions {
  Vec3 null = Vec3::Zero();      // reference point of the escape guard
  double escape_radius = 0.0;    // 0: the basis length scale d
  int sample_every = 1;          // keep every n-th step
  bool check_surface = true;     // reject starting points next to electrodes
};

/// Fixed-step RK4 with an integer number of steps per RF period, the smallest
/// count whose step does not exceed `dt`. Throws DomainError when dt exceeds
/// 1/50 of the RF period or the start point is next to an electrode.
/// Escape (|r - null| > escape radius) ends the run and is reported in the result.
Trajectory integrate(const FieldBasis& basis, const DriveConfig& drive, const IonSpecies& species,
                     const Vec3& r0, const Vec3& v0, double duration, double dt,
                     const IntegrateOptions& options = {});

enum class Window { Hann, Rectangular };

struct SpectralPeak {
  double frequency = 0.0;  // Hz
  double amplitude = 0.0;  // m, sinusoid amplitude
  int axis = 0;
};

struct SpectralEstimate {
  std::vector<double> frequency;               // Hz, one-sided bins
  std::array<std::vector<double>, 3> amplitude;  // per axis, calibrated to sinusoid amplitude
  std::vector<SpectralPeak> peaks;             // local maxima, sorted by amplitude
  double rbw = 0.0;                            // Hz, 1 / duration

  /// Interpolated amplitude of the largest local maximum within `bins` bins of f.
  SpectralPeak peak_near(int axis, double f, int bins = 3) const;
};

struct SpectralOptions {
  Window window = Window::Hann;
  std::size_t max_peaks = 32;
  double min_periods = 200.0;  // the dominant peak must span this many periods
};

/// Windowed FFT of each coordinate (mean removed) with parabolic peak
/// interpolation on the log magnitude.
SpectralEstimate spectral_peaks(const Trajectory& trajectory, const SpectralOptions& options = {});

struct MicromotionEstimate {
  double ratio = 0.0;  // (sum of the two sideband amplitudes) / secular amplitude
  int axis = 0;
  double secular_frequency = 0.0;  // Hz
};

/// RF-synchronous displacement relative to the secular amplitude along the
/// axis with the strongest secular motion; ~ q/2 for small q.
/// Throws StabilityError for escaped trajectories.
MicromotionEstimate micromotion_amplitude(const Trajectory& trajectory, double omega_rf,
                                          const SpectralOptions& options = {});

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_spectrum_csv(std::ostream& out, const SpectralEstimate& spectrum);

}  // namespace paultrap

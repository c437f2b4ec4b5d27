#include "paultrap/dynamics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>

#include "paultrap/csv.hpp"

namespace paultrap {

Trajectory integrate(const FieldBasis& basis, const DriveConfig& drive, const IonSpecies& species,
                     const Vec3& r0, const Vec3& v0, double duration, double dt,
                     const IntegrateOptions& o) {
  drive.validate();
  const double period = 2.0 * constants::pi / drive.omega_rf;
  if (!(dt > 0.0) || dt > period / 50.0 * (1.0 + 1e-12))
    throw DomainError("time step must be positive and at most 1/50 of the RF period");
  if (!(duration > 0.0)) throw DomainError("duration must be positive");
  if (o.sample_every < 1) throw DomainError("sample_every must be >= 1");
  if (o.check_surface && basis.near_surface(r0))
    throw DomainError("start point lies next to an electrode surface");

  const int spp = static_cast<int>(std::ceil(period / dt * (1.0 - 1e-12)));
  const double h = period / spp;
  const auto nsteps = static_cast<long long>(std::llround(std::ceil(duration / h - 1e-9)));

  const auto rf = basis.combine(rf_weights(basis, drive));
  const auto dcw = dc_weights(basis, drive);
  const bool has_dc = drive.u_dc != 0.0 && std::any_of(dcw.begin(), dcw.end(), [](double w) { return w != 0.0; });
  const auto dc = has_dc ? basis.combine(dcw) : nullptr;
  const double qm = species.charge() / species.mass;
  const double radius = o.escape_radius > 0.0 ? o.escape_radius : basis.length_scale();

  // Drive phase at step k and half step is exact: omega t = 2 pi k / spp.
  auto accel = [&](const Vec3& r, double cos_phase) {
    Vec3 E = drive.u_tilde * cos_phase * rf->field(r);
    if (dc) E += drive.u_dc * dc->field(r);
    return Vec3(qm * E);
  };

  Trajectory tr;
  tr.dt = h;
  tr.steps_per_period = spp;
  tr.null = o.null;
  const auto keep = static_cast<std::size_t>(nsteps / o.sample_every + 1);
  tr.t.reserve(keep);
  tr.r.reserve(keep);
  tr.v.reserve(keep);
  tr.phase.reserve(keep);

  Vec3 r = r0, v = v0;
  auto record = [&](long long k) {
    const long long within = k % spp;
    tr.t.push_back(static_cast<double>(k) * h);
    tr.r.push_back(r);
    tr.v.push_back(v);
    tr.phase.push_back(2.0 * constants::pi * static_cast<double>(within) / spp);
  };
  record(0);
  for (long long k = 0; k < nsteps; ++k) {
    const long long within = k % spp;
    const double c0 = std::cos(2.0 * constants::pi * within / spp);
    const double c1 = std::cos(2.0 * constants::pi * (within + 0.5) / spp);
    const double c2 = std::cos(2.0 * constants::pi * (within + 1) / spp);
    const Vec3 k1v = accel(r, c0), k1r = v;
    const Vec3 k2v = accel(r + 0.5 * h * k1r, c1), k2r = v + 0.5 * h * k1v;
    const Vec3 k3v = accel(r + 0.5 * h * k2r, c1), k3r = v + 0.5 * h * k2v;
    const Vec3 k4v = accel(r + h * k3r, c2), k4r = v + h * k3v;
    r += h / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    const bool out = !((r - o.null).norm() <= radius);
    if ((k + 1) % o.sample_every == 0 || out) record(k + 1);
    if (out) {
      tr.escaped = true;
      tr.escape_time = static_cast<double>(k + 1) * h;
      break;
    }
  }
  return tr;
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlan {
  fftw_plan plan = nullptr;
  ~FftwPlan() {
    if (plan) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

// Peak of the parabola through log magnitudes at bins k-1, k, k+1.
std::pair<double, double> interpolate(const std::vector<double>& a, std::size_t k) {
  if (k == 0 || k + 1 >= a.size() || a[k - 1] <= 0 || a[k + 1] <= 0 || a[k] <= 0) return {0.0, a[k]};
  const double l = std::log(a[k - 1]), c = std::log(a[k]), r = std::log(a[k + 1]);
  const double den = l - 2 * c + r;
  if (den >= 0.0) return {0.0, a[k]};
  const double p = 0.5 * (l - r) / den;
  return {p, std::exp(c - 0.25 * (l - r) * p)};
}

}  // namespace

SpectralPeak SpectralEstimate::peak_near(int axis, double f, int bins) const {
  const auto& a = amplitude.at(axis);
  if (frequency.size() < 2) return {};
  const double df = frequency[1] - frequency[0];
  const long long centre = std::llround(f / df);
  std::size_t best = 0;
  double best_amp = -1.0;
  for (long long k = centre - bins; k <= centre + bins; ++k) {
    if (k < 1 || k + 1 >= static_cast<long long>(a.size())) continue;
    const auto kk = static_cast<std::size_t>(k);
    if (a[kk] >= a[kk - 1] && a[kk] >= a[kk + 1] && a[kk] > best_amp) {
      best = kk;
      best_amp = a[kk];
    }
  }
  if (best_amp < 0.0) return {f, 0.0, axis};
  const auto [p, amp] = interpolate(a, best);
  return {(static_cast<double>(best) + p) * df, amp, axis};
}

SpectralEstimate spectral_peaks(const Trajectory& tr, const SpectralOptions& o) {
  const std::size_t n = tr.t.size();
  if (n < 16) throw ResolutionError("trajectory too short for a spectrum");
  const double ts = tr.t[1] - tr.t[0];
  const double duration = ts * static_cast<double>(n);

  std::vector<double> w(n, 1.0);
  if (o.window == Window::Hann)
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * constants::pi * i / n);
  double gain = 0.0;
  for (double x : w) gain += x;

  const std::size_t nf = n / 2 + 1;
  SpectralEstimate s;
  s.rbw = 1.0 / duration;
  s.frequency.resize(nf);
  for (std::size_t k = 0; k < nf; ++k) s.frequency[k] = static_cast<double>(k) / duration;

  std::unique_ptr<double, decltype(&fftw_free)> in(fftw_alloc_real(n), &fftw_free);
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> out(fftw_alloc_complex(nf), &fftw_free);
  FftwPlan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  for (int axis = 0; axis < 3; ++axis) {
    double mean = 0.0;
    for (const auto& p : tr.r) mean += p[axis];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) in.get()[i] = (tr.r[i][axis] - mean) * w[i];
    fftw_execute(plan.plan);
    auto& a = s.amplitude[axis];
    a.resize(nf);
    for (std::size_t k = 0; k < nf; ++k) a[k] = 2.0 * std::hypot(out.get()[k][0], out.get()[k][1]) / gain;
    a[0] = 0.0;
    for (std::size_t k = 1; k + 1 < nf; ++k) {
      if (a[k] > a[k - 1] && a[k] >= a[k + 1]) {
        const auto [p, amp] = interpolate(a, k);
        s.peaks.push_back({(static_cast<double>(k) + p) / duration, amp, axis});
      }
    }
  }
  std::stable_sort(s.peaks.begin(), s.peaks.end(),
                   [](const SpectralPeak& x, const SpectralPeak& y) { return x.amplitude > y.amplitude; });
  if (s.peaks.size() > o.max_peaks) s.peaks.resize(o.max_peaks);
  if (s.peaks.empty()) throw ResolutionError("no spectral peaks found");
  if (s.peaks.front().frequency * duration < o.min_periods) {
    std::ostringstream msg;
    msg << "trajectory covers " << s.peaks.front().frequency * duration << " periods of the dominant "
        << "peak at " << s.peaks.front().frequency << " Hz; " << o.min_periods << " are required";
    throw ResolutionError(msg.str());
  }
  return s;
}

MicromotionEstimate micromotion_amplitude(const Trajectory& tr, double omega_rf, const SpectralOptions& o) {
  if (tr.escaped) throw StabilityError("micromotion of an escaped trajectory is undefined");
  const SpectralEstimate s = spectral_peaks(tr, o);
  const SpectralPeak& sec = s.peaks.front();
  const double f_rf = omega_rf / (2.0 * constants::pi);
  const SpectralPeak lo = s.peak_near(sec.axis, f_rf - sec.frequency);
  const SpectralPeak hi = s.peak_near(sec.axis, f_rf + sec.frequency);
  return {(lo.amplitude + hi.amplitude) / sec.amplitude, sec.axis, sec.frequency};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  CsvWriter w(out, {"t_us", "x_um", "y_um", "z_um"});
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    w.row({tr.t[i] * 1e6, tr.r[i].x() * 1e6, tr.r[i].y() * 1e6, tr.r[i].z() * 1e6});
}

void write_spectrum_csv(std::ostream& out, const SpectralEstimate& s) {
  CsvWriter w(out, {"f_MHz", "amp_x", "amp_y", "amp_z"});
  for (std::size_t k = 0; k < s.frequency.size(); ++k)
    w.row({s.frequency[k] * 1e-6, s.amplitude[0][k], s.amplitude[1][k], s.amplitude[2][k]});
}

}  // namespace paultrap

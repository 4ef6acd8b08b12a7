#include "csl/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "csl/errors.hpp"

namespace csl::oracle {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place transform of a fixed shape. The plan is built unaligned so it can
// run on any buffer of that shape through the new-array interface.
class FftPlan {
 public:
  FftPlan(int rows, int cols, int sign) : size_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    std::vector<Complex> scratch(size_);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (rows == 1) {
      plan_ = fftw_plan_dft_1d(cols, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    } else {
      plan_ = fftw_plan_dft_2d(rows, cols, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (plan_ == nullptr) throw NumericalError("FFTW plan creation failed");
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void run(Complex* data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_, buf, buf);
  }

 private:
  std::size_t size_;
  fftw_plan plan_ = nullptr;
};

// Plans are shared by all threads; execution on distinct buffers is thread safe.
const FftPlan& plan_for(int rows, int cols, int sign) {
  static std::map<std::tuple<int, int, int>, std::unique_ptr<FftPlan>> cache;
  static std::mutex cache_mutex;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto& slot = cache[{rows, cols, sign}];
  if (!slot) slot = std::make_unique<FftPlan>(rows, cols, sign);
  return *slot;
}

void require_time_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("time step must be > 0 and finite");
  }
}

void check_state(const GridDensity& rho, Complex trace0, const MasterSettings& s) {
  const CMatrix& v = rho.values;
  const int n = rho.grid.n;
  const double peak = v.cwiseAbs().maxCoeff();
  const double herm = (v - v.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10 * peak) {
    std::ostringstream os;
    os << "hermiticity lost: max |rho - rho^dagger| = " << herm << " against max |rho| = " << peak;
    throw NumericalError(os.str());
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - trace0) > 1e-6 * std::abs(trace0)) {
    std::ostringstream os;
    os << "trace drift: " << tr << " against " << trace0;
    throw NumericalError(os.str());
  }
  double border = 0.0;
  for (int i = 0; i < n; ++i) {
    border = std::max({border, std::abs(v(0, i)), std::abs(v(n - 1, i)), std::abs(v(i, 0)), std::abs(v(i, n - 1))});
  }
  if (border > s.boundary_tol * peak) {
    std::ostringstream os;
    os << "density reached the grid boundary: " << border / peak << " of the peak (limit " << s.boundary_tol
       << "); widen the grid";
    throw NumericalError(os.str());
  }
}

void check_spectrum(const CMatrix& spectrum, const MasterSettings& s) {
  const int n = static_cast<int>(spectrum.rows());
  const int cut = (3 * n) / 8;  // |bin| above 3/4 of n/2
  double high = 0.0;
  double peak = 0.0;
  for (int j = 0; j < n; ++j) {
    const int bj = j < n / 2 ? j : n - j;
    for (int i = 0; i < n; ++i) {
      const int bi = i < n / 2 ? i : n - i;
      const double a = std::abs(spectrum(i, j));
      peak = std::max(peak, a);
      if (bi > cut || bj > cut) high = std::max(high, a);
    }
  }
  if (high > s.resolution_tol * peak) {
    std::ostringstream os;
    os << "grid under-resolved: spectrum near Nyquist at " << high / peak << " of its peak (limit "
       << s.resolution_tol << "); reduce dx";
    throw NumericalError(os.str());
  }
}

// Pairwise sum of |psi_k><psi_k| over k in [lo, hi).
CMatrix pairwise_outer(const std::vector<CVector>& psis, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return psis[lo] * psis[lo].adjoint();
  const std::size_t mid = lo + (hi - lo) / 2;
  CMatrix left = pairwise_outer(psis, lo, mid);
  left += pairwise_outer(psis, mid, hi);
  return left;
}

CVector run_trajectory(const Grid& grid, const CVector& psi0, double t_final, double dt, const SdeSettings& settings,
                       std::uint64_t seed, std::uint64_t index) {
  SdeTrajectory traj(grid, psi0, seed, index);
  while (traj.time < t_final * (1.0 - 1e-12)) {
    step_sde(traj, std::min(dt, t_final - traj.time), settings);
  }
  return traj.psi;
}

GridDensity reduce(const Grid& grid, const std::vector<CVector>& psis, double t_final) {
  GridDensity out{grid, pairwise_outer(psis, 0, psis.size()), t_final};
  out.values /= static_cast<double>(psis.size());
  return out;
}

void require_ensemble(const Grid& grid, const CVector& psi0, int n_traj) {
  grid.validate();
  if (psi0.size() != grid.n) throw DomainError("ensemble: initial wavefunction does not match the grid");
  if (n_traj < 1) throw DomainError("ensemble: need at least one trajectory");
}

}  // namespace

Grid Grid::centred(int n, double length) {
  if (n < 1 || !(length > 0.0)) throw DomainError("Grid::centred: need n >= 1 and length > 0");
  const double dx = length / n;
  return {n, -0.5 * length, dx};
}

double Grid::k(int i) const {
  const int b = i < n / 2 ? i : i - n;
  return 2.0 * kPi * b / (n * dx);
}

void Grid::validate() const {
  if (n < 64 || n % 2 != 0) throw DomainError("Grid: n must be even and >= 64");
  if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x0)) throw DomainError("Grid: dx must be > 0");
}

Complex GridDensity::trace() const { return values.diagonal().sum() * grid.dx; }

std::vector<double> GridDensity::diagonal() const {
  std::vector<double> out(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) out[static_cast<std::size_t>(i)] = values(i, i).real();
  return out;
}

void MasterSettings::validate(const Grid& grid) const {
  dynamics.validate();
  if (form == DecoherenceForm::Exponential && !(alpha > 0.0 && std::isfinite(alpha))) {
    throw DomainError("exponential form needs a finite alpha > 0");
  }
  if (!potential.empty() && static_cast<int>(potential.size()) != grid.n) {
    throw DomainError("potential must be sampled on the grid");
  }
  if (!(boundary_tol > 0.0) || !(resolution_tol > 0.0)) throw DomainError("tolerances must be > 0");
}

double MasterSettings::gamma(double u) const {
  const double hb2 = dynamics.hbar * dynamics.hbar;
  if (form == DecoherenceForm::Quadratic) return dynamics.D * u * u / hb2;
  const double lambda = 4.0 * dynamics.D / (alpha * hb2);
  return -lambda * std::expm1(-alpha * u * u / 4.0);
}

GridDensity sample(const gaussian::GaussianSum& rho, const Grid& grid, double time) {
  grid.validate();
  if (rho.dim() != 2) throw DomainError("sample: density matrix must have two variables");
  const int n = grid.n;
  GridDensity out{grid, CMatrix::Zero(n, n), time};
  for (const auto& term : rho.terms()) {
    const auto& A = term.quadratic();
    const auto& b = term.linear();
    const Complex c = term.constant();
    for (int j = 0; j < n; ++j) {
      const double y = grid.x(j);
      for (int i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const Complex e = -0.5 * (A(0, 0) * x * x + 2.0 * A(0, 1) * x * y + A(1, 1) * y * y) + b(0) * x + b(1) * y + c;
        out.values(i, j) += std::exp(e);
      }
    }
  }
  return out;
}

GridDensity step_master(const GridDensity& rho, double dt, const MasterSettings& s) {
  require_time_step(dt);
  const Grid& g = rho.grid;
  g.validate();
  s.validate(g);
  if (rho.values.rows() != g.n || rho.values.cols() != g.n) throw DomainError("step_master: values do not match grid");
  const int n = g.n;
  const double hbar = s.dynamics.hbar;
  const Complex trace0 = rho.trace();

  // Half step of the pointwise part, exp{-[Gamma(x - y) + i (V(x) - V(y)) / hbar] dt / 2}.
  CMatrix half(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Complex rate = s.gamma(g.x(i) - g.x(j));
      if (!s.potential.empty()) {
        rate += I * (s.potential[static_cast<std::size_t>(i)] - s.potential[static_cast<std::size_t>(j)]) / hbar;
      }
      half(i, j) = std::exp(-0.5 * dt * rate);
    }
  }

  GridDensity out{g, rho.values.cwiseProduct(half), rho.time + dt};
  if (s.kinetic) {
    // Column-major storage: the fast FFT axis is i (x), the slow one j (y).
    const FftPlan& forward = plan_for(n, n, FFTW_FORWARD);
    const FftPlan& backward = plan_for(n, n, FFTW_BACKWARD);
    forward.run(out.values.data());
    check_spectrum(out.values, s);
    const double c = hbar * dt / (2.0 * s.dynamics.mass);
    for (int j = 0; j < n; ++j) {
      const double ky = g.k(j);
      for (int i = 0; i < n; ++i) {
        const double kx = g.k(i);
        out.values(i, j) *= std::exp(-I * c * (kx * kx - ky * ky));
      }
    }
    backward.run(out.values.data());
    out.values /= static_cast<double>(n) * static_cast<double>(n);
  }
  out.values = out.values.cwiseProduct(half);
  check_state(out, trace0, s);
  return out;
}

GridDensity evolve_master(GridDensity rho, double t_final, double dt, const MasterSettings& settings) {
  require_time_step(dt);
  if (!(t_final >= 0.0)) throw DomainError("evolve_master: t_final must be >= 0");
  const double start = rho.time;
  const long steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  if (steps == 0) return rho;
  const double h = t_final / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) rho = step_master(rho, h, settings);
  rho.time = start + t_final;
  return rho;
}

SdeTrajectory::SdeTrajectory(const Grid& g, CVector psi0, std::uint64_t seed_, std::uint64_t index_)
    : grid(g), psi(std::move(psi0)), seed(seed_), index(index_), rng(trajectory_seed(seed_, index_)) {
  grid.validate();
  if (psi.size() != grid.n) throw DomainError("SdeTrajectory: wavefunction does not match the grid");
  const double norm = std::sqrt(psi.squaredNorm() * grid.dx);
  if (!(norm > 0.0)) throw DomainError("SdeTrajectory: zero wavefunction");
  psi /= norm;
}

std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void step_sde(SdeTrajectory& traj, double dt, const SdeSettings& settings) {
  require_time_step(dt);
  settings.dynamics.validate();
  const Grid& g = traj.grid;
  const int n = g.n;
  const double hbar = settings.dynamics.hbar;
  const double D = settings.dynamics.D;
  CVector& psi = traj.psi;

  if (D > 0.0) {
    // A = sqrt(2D)(x - <x>) / hbar; exp(A dW - A^2 dt) has Ito expansion
    // 1 + A dW - A^2 dt / 2, which is the stochastic part of the equation.
    double mean = 0.0;
    double weight = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = std::norm(psi(i));
      mean += w * g.x(i);
      weight += w;
    }
    mean /= weight;
    std::normal_distribution<double> normal(0.0, 1.0);
    const double dW = std::sqrt(dt) * normal(traj.rng);
    const double k = std::sqrt(2.0 * D) / hbar;
    for (int i = 0; i < n; ++i) {
      const double a = k * (g.x(i) - mean);
      psi(i) *= std::exp(a * dW - a * a * dt);
    }
    const double norm2 = psi.squaredNorm() * g.dx;
    if (!(std::abs(norm2 - 1.0) <= settings.max_norm_drift)) {
      std::ostringstream os;
      os << "step-size error: norm drift " << std::abs(norm2 - 1.0) << " exceeds " << settings.max_norm_drift
         << " at t = " << traj.time << "; reduce dt";
      throw NumericalError(os.str());
    }
    psi /= std::sqrt(norm2);
  }

  const FftPlan& forward = plan_for(1, n, FFTW_FORWARD);
  const FftPlan& backward = plan_for(1, n, FFTW_BACKWARD);
  forward.run(psi.data());
  const double c = hbar * dt / (2.0 * settings.dynamics.mass);
  for (int i = 0; i < n; ++i) {
    const double kx = g.k(i);
    psi(i) *= std::exp(-I * c * kx * kx) / static_cast<double>(n);
  }
  backward.run(psi.data());
  psi /= std::sqrt(psi.squaredNorm() * g.dx);
  traj.time += dt;
}

GridDensity ensemble_average(const Grid& grid, const CVector& psi0, double t_final, double dt,
                             const SdeSettings& settings, int n_traj, std::uint64_t seed) {
  require_ensemble(grid, psi0, n_traj);
  std::vector<CVector> psis(static_cast<std::size_t>(n_traj));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n_traj; ++k) {
    try {
      psis[static_cast<std::size_t>(k)] =
          run_trajectory(grid, psi0, t_final, dt, settings, seed, static_cast<std::uint64_t>(k));
    } catch (...) {
#pragma omp critical(csl_oracle_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return reduce(grid, psis, t_final);
}

GridDensity ensemble_average_serial(const Grid& grid, const CVector& psi0, double t_final, double dt,
                                    const SdeSettings& settings, int n_traj, std::uint64_t seed) {
  require_ensemble(grid, psi0, n_traj);
  std::vector<CVector> psis;
  psis.reserve(static_cast<std::size_t>(n_traj));
  for (int k = 0; k < n_traj; ++k) {
    psis.push_back(run_trajectory(grid, psi0, t_final, dt, settings, seed, static_cast<std::uint64_t>(k)));
  }
  return reduce(grid, psis, t_final);
}

CVector gaussian_wavefunction(const Grid& grid, double sigma, double x0, double p0, double hbar) {
  grid.validate();
  if (!(sigma > 0.0)) throw DomainError("gaussian_wavefunction: sigma must be > 0");
  CVector psi(grid.n);
  const double norm = std::pow(2.0 * kPi * sigma * sigma, -0.25);
  for (int i = 0; i < grid.n; ++i) {
    const double u = grid.x(i) - x0;
    psi(i) = norm * std::exp(-u * u / (4.0 * sigma * sigma) + I * p0 * grid.x(i) / hbar);
  }
  return psi;
}

Comparison compare(const GridDensity& a, const GridDensity& b) {
  if (!(a.grid == b.grid) || a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
    throw DomainError("compare: grids differ");
  }
  const CMatrix diff = a.values - b.values;
  const double ref_l2 = b.values.norm();
  const double ref_sup = b.values.cwiseAbs().maxCoeff();
  Comparison out;
  out.l2_error = ref_l2 > 0.0 ? diff.norm() / ref_l2 : diff.norm();
  out.sup_error = ref_sup > 0.0 ? diff.cwiseAbs().maxCoeff() / ref_sup : diff.cwiseAbs().maxCoeff();
  out.trace_gap = std::abs(a.trace() - b.trace());
  return out;
}

Comparison compare(const GridDensity& a, const gaussian::GaussianSum& b) { return compare(a, sample(b, a.grid, a.time)); }

double trace_distance(const GridDensity& a, const GridDensity& b) {
  if (!(a.grid == b.grid)) throw DomainError("trace_distance: grids differ");
  const CMatrix diff = (a.values - b.values) * a.grid.dx;
  const CMatrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace csl::oracle

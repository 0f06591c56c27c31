#include "adhesim/nonlocal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace adhesim {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

int wrap(int i, int m) {
  const int r = i % m;
  return r < 0 ? r + m : r;
}

// SIMD-aligned per-thread work arrays so the plans can use aligned codelets.
struct FftBuffers {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  void reserve(std::size_t m) {
    if (m <= n) return;
    release();
    real = fftw_alloc_real(m);
    cplx = fftw_alloc_complex(m / 2 + 1);
    n = m;
  }
  void release() {
    if (real) fftw_free(real);
    if (cplx) fftw_free(cplx);
    real = nullptr, cplx = nullptr, n = 0;
  }
  ~FftBuffers() { release(); }
};

FftBuffers& fft_buffers(std::size_t m) {
  thread_local FftBuffers buf;
  buf.reserve(m);
  return buf;
}

// Above this many stencil offsets the periodic convolution switches to FFT.
constexpr int kFftThreshold = 48;

}  // namespace

const char* to_string(Domain d) {
  switch (d) {
    case Domain::Periodic: return "periodic";
    case Domain::Naive: return "naive";
    case Domain::NoFlux: return "noflux";
  }
  return "?";
}

std::string SensingMode::name() const {
  std::string s = to_string(domain);
  if (weighted) s = "weighted(" + s + ")";
  if (neutral) s = "neutral(" + s + ")";
  return s;
}

SensingMode resolve_reference(SensingMode mode, double fallback_mean) {
  if (mode.neutral && std::isnan(mode.u_ref)) mode.u_ref = fallback_mean;
  return mode;
}

std::pair<double, double> sensing_limits(const SensingMode& mode, double x, double R, double L) {
  if (!(x >= 0.0 && x <= L))
    throw Error(ErrorKind::OutOfDomain, "x = " + std::to_string(x) + " outside [0, L]");
  switch (mode.domain) {
    case Domain::Periodic:
      return {-R, R};
    case Domain::Naive:
      return {std::max(-x, -R), std::min(R, L - x)};
    case Domain::NoFlux:
      return {std::max(R - 2.0 * x, -R), std::min(R, 2.0 * L - R - 2.0 * x)};
  }
  return {-R, R};
}

std::pair<double, double> sensing_slopes(const SensingMode& mode, double x, double R, double L) {
  switch (mode.domain) {
    case Domain::Periodic:
      return {0.0, 0.0};
    case Domain::Naive:
      return {x < R ? -1.0 : 0.0, x > L - R ? -1.0 : 0.0};
    case Domain::NoFlux:
      return {x < R ? -2.0 : 0.0, x > L - R ? -2.0 : 0.0};
  }
  return {0.0, 0.0};
}

AdhesionFunction AdhesionFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw Error(ErrorKind::InvalidParameter, "h.coeffs must not be empty");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidParameter, "h.coeffs must be finite");
  AdhesionFunction h;
  h.coeffs_ = std::move(coeffs);
  return h;
}

double AdhesionFunction::value(double u) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double AdhesionFunction::derivative(double u) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * u + static_cast<double>(k) * coeffs_[k];
  return acc;
}

bool AdhesionFunction::is_linear() const {
  if (coeffs_.size() < 2 || coeffs_[0] != 0.0 || coeffs_[1] != 1.0) return false;
  return std::all_of(coeffs_.begin() + 2, coeffs_.end(), [](double c) { return c == 0.0; });
}

struct NonlocalOperator::FftPlan {
  int m = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<std::complex<double>> kernel_hat;  // already divided by m

  ~FftPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

NonlocalOperator::NonlocalOperator(Grid grid, KernelSpec kernel, SensingMode mode,
                                   AdhesionFunction h, Backend backend)
    : grid_(grid), kernel_(std::move(kernel)), mode_(mode), h_(std::move(h)) {
  if (!kernel_.normalized()) kernel_ = normalize(kernel_);
  const double R = kernel_.R;
  const double L = grid_.length();
  if (!(L > 2.0 * R))
    throw Error(ErrorKind::RangeError, "domain length must exceed one sensing diameter (L > 2R)");
  if (mode_.neutral && std::isnan(mode_.u_ref))
    throw Error(ErrorKind::InvalidParameter, "neutral mode needs a reference density");
  if (mode_.weighted && !mode_.bounded())
    throw Error(ErrorKind::InvalidParameter, "weighted boundary terms need a bounded base domain");

  if (mode_.bounded()) {
    if (omega(kernel_, R) > 1e-12 * omega_sup(kernel_)) {
      warnings_.push_back({"omega-at-R",
                           "omega(R) != 0: boundary terms of K' are discontinuous at x = R and "
                           "x = L - R (K itself stays continuous)"});
    }
    if (mode_.domain == Domain::NoFlux && omega_at_zero(kernel_) == 0.0) {
      warnings_.push_back({"noflux-omega-plus",
                           "Omega(0+) = 0: the no-flux boundary construction is not defined for "
                           "this kernel; results are reported without that guarantee"});
    }
    build_bounded();
  } else {
    build_periodic(backend);
  }

  const int M = grid_.cells();
  offset_.assign(static_cast<std::size_t>(M), 0.0);
  for (int i = 0; i < M; ++i) {
    const double x = grid_.x(i);
    double extra = 0.0;
    if (mode_.neutral && mode_.bounded()) {
      const auto [f1, f2] = sensing_limits(mode_, x, R, L);
      extra -= h_.value(mode_.u_ref) * omega_odd_integral(kernel_, f1, f2);
    }
    if (mode_.weighted) {
      if (x < R) extra += mode_.beta0 * omega_odd_integral(kernel_, -R, -x);
      if (x > L - R) extra += mode_.betaL * omega_odd_integral(kernel_, L - x, R);
    }
    offset_[static_cast<std::size_t>(i)] = extra;
  }
  if (std::all_of(offset_.begin(), offset_.end(), [](double v) { return v == 0.0; })) offset_.clear();
}

NonlocalOperator::~NonlocalOperator() = default;
NonlocalOperator::NonlocalOperator(NonlocalOperator&&) noexcept = default;
NonlocalOperator& NonlocalOperator::operator=(NonlocalOperator&&) noexcept = default;

void NonlocalOperator::build_periodic(Backend backend) {
  const double dx = grid_.dx();
  const double R = kernel_.R;
  const int J = std::max(1, static_cast<int>(std::ceil(R / dx - 0.5)));
  stencil_.assign(static_cast<std::size_t>(J) + 1, 0.0);
  for (int j = 1; j <= J; ++j)
    stencil_[static_cast<std::size_t>(j)] =
        omega_odd_integral(kernel_, (j - 0.5) * dx, (j + 0.5) * dx);

  const bool want_fft =
      backend == Backend::Fft || (backend == Backend::Auto && J > kFftThreshold);
  if (!want_fft) return;

  const int M = grid_.cells();
  auto plan = std::make_unique<FftPlan>();
  plan->m = M;
  std::vector<double> g(static_cast<std::size_t>(M), 0.0);
  for (int j = 1; j <= J; ++j) {
    const double w = stencil_[static_cast<std::size_t>(j)];
    // K_i = Σ_j w_j (h_{i+j} − h_{i−j}) written as the convolution (g ⊛ h)_i.
    g[static_cast<std::size_t>(wrap(-j, M))] += w;
    g[static_cast<std::size_t>(wrap(j, M))] -= w;
  }
  const std::size_t nh = static_cast<std::size_t>(M / 2 + 1);
  std::vector<std::complex<double>> spec(nh);
  {
    std::lock_guard lock(fftw_planner_mutex());
    FftBuffers& buf = fft_buffers(static_cast<std::size_t>(M));
    plan->forward = fftw_plan_dft_r2c_1d(M, buf.real, buf.cplx, FFTW_ESTIMATE);
    plan->backward = fftw_plan_dft_c2r_1d(M, buf.cplx, buf.real, FFTW_ESTIMATE);
    std::copy(g.begin(), g.end(), buf.real);
    fftw_execute_dft_r2c(plan->forward, buf.real, buf.cplx);
    for (std::size_t k = 0; k < nh; ++k) spec[k] = {buf.cplx[k][0], buf.cplx[k][1]};
  }
  for (auto& c : spec) c /= static_cast<double>(M);
  plan->kernel_hat = std::move(spec);
  fft_ = std::move(plan);
}

void NonlocalOperator::build_bounded() {
  const int M = grid_.cells();
  const double dx = grid_.dx();
  const double R = kernel_.R;
  const double L = grid_.length();
  rows_.resize(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    const double x = grid_.x(i);
    const auto [f1, f2] = sensing_limits(mode_, x, R, L);
    Row& row = rows_[static_cast<std::size_t>(i)];
    if (!(f2 > f1)) continue;
    const int kmin = std::clamp(static_cast<int>(std::floor((x + f1) / dx)), 0, M - 1);
    const int kmax = std::clamp(static_cast<int>(std::floor((x + f2) / dx)), 0, M - 1);
    row.first = kmin;
    row.weights.resize(static_cast<std::size_t>(kmax - kmin + 1));
    for (int k = kmin; k <= kmax; ++k) {
      const double lo = k * dx - x;
      const double hi = lo + dx;
      row.weights[static_cast<std::size_t>(k - kmin)] =
          omega_odd_integral(kernel_, std::max(lo, f1), std::min(hi, f2));
    }
  }
}

void NonlocalOperator::apply_base(std::span<const double> hu, std::span<double> out) const {
  const int M = grid_.cells();
  if (mode_.bounded()) {
    for (int i = 0; i < M; ++i) {
      const Row& row = rows_[static_cast<std::size_t>(i)];
      double acc = 0.0;
      const double* hp = hu.data() + row.first;
      for (std::size_t k = 0; k < row.weights.size(); ++k) acc += row.weights[k] * hp[k];
      out[static_cast<std::size_t>(i)] = acc;
    }
    return;
  }
  if (fft_) {
    const std::size_t nh = static_cast<std::size_t>(M / 2 + 1);
    FftBuffers& buf = fft_buffers(static_cast<std::size_t>(M));
    std::copy(hu.begin(), hu.end(), buf.real);
    fftw_execute_dft_r2c(fft_->forward, buf.real, buf.cplx);
    for (std::size_t k = 0; k < nh; ++k) {
      // spelled out: operator* on std::complex goes through the NaN-safe slow path
      const double a = buf.cplx[k][0], b = buf.cplx[k][1];
      const double c = fft_->kernel_hat[k].real(), d = fft_->kernel_hat[k].imag();
      buf.cplx[k][0] = a * c - b * d;
      buf.cplx[k][1] = a * d + b * c;
    }
    fftw_execute_dft_c2r(fft_->backward, buf.cplx, buf.real);
    std::copy(buf.real, buf.real + M, out.begin());
    return;
  }
  const int J = static_cast<int>(stencil_.size()) - 1;
  std::vector<double> padded(static_cast<std::size_t>(M + 2 * J));
  for (int i = -J; i < M + J; ++i)
    padded[static_cast<std::size_t>(i + J)] = hu[static_cast<std::size_t>(wrap(i, M))];
  for (int i = 0; i < M; ++i) {
    const double* c = padded.data() + i + J;
    double acc = 0.0;
    for (int j = 1; j <= J; ++j) acc += stencil_[static_cast<std::size_t>(j)] * (c[j] - c[-j]);
    out[static_cast<std::size_t>(i)] = acc;
  }
}

void NonlocalOperator::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t M = static_cast<std::size_t>(grid_.cells());
  if (u.size() != M || out.size() != M)
    throw Error(ErrorKind::GridMismatch, "field size does not match the operator grid");
  if (h_.is_linear()) {
    apply_base(u, out);
  } else {
    thread_local std::vector<double> hu;
    hu.resize(M);
    for (std::size_t i = 0; i < M; ++i) hu[i] = h_.value(u[i]);
    apply_base(hu, out);
  }
  if (!offset_.empty())
    for (std::size_t i = 0; i < M; ++i) out[i] += offset_[i];
}

Field NonlocalOperator::apply(const Field& u) const {
  grid_.check(u);
  Field out(u.size());
  apply(std::span<const double>(u), std::span<double>(out));
  return out;
}

double NonlocalOperator::sample(const Field& u, double y) const {
  const int M = grid_.cells();
  const double s = y / grid_.dx() - 0.5;
  const int i0 = static_cast<int>(std::floor(s));
  const double t = s - i0;
  auto at = [&](int i) {
    if (mode_.bounded()) i = std::clamp(i, 0, M - 1);
    else i = wrap(i, M);
    return u[static_cast<std::size_t>(i)];
  };
  return (1.0 - t) * at(i0) + t * at(i0 + 1);
}

Field NonlocalOperator::apply_prime(const Field& u) const {
  grid_.check(u);
  const int M = grid_.cells();
  const double dx = grid_.dx();
  const double R = kernel_.R;
  const double L = grid_.length();
  Field hu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) hu[i] = h_.value(u[i]);
  Field d(u.size());
  for (int i = 0; i < M; ++i) {
    int ip = i + 1, im = i - 1;
    if (mode_.bounded()) {
      ip = std::min(ip, M - 1);  // mirror ghost: h_{M} = h_{M−1}
      im = std::max(im, 0);
    } else {
      ip = wrap(ip, M);
      im = wrap(im, M);
    }
    d[static_cast<std::size_t>(i)] =
        (hu[static_cast<std::size_t>(ip)] - hu[static_cast<std::size_t>(im)]) / (2.0 * dx);
  }
  Field out(u.size());
  apply_base(d, out);
  if (!mode_.bounded()) return out;

  const double h_ref = mode_.neutral ? h_.value(mode_.u_ref) : 0.0;
  for (int i = 0; i < M; ++i) {
    const double x = grid_.x(i);
    const auto [f1, f2] = sensing_limits(mode_, x, R, L);
    const auto [s1, s2] = sensing_slopes(mode_, x, R, L);
    double extra = 0.0;
    if (s2 != 0.0) extra += s2 * (h_.value(sample(u, x + f2)) - h_ref) * omega_odd(kernel_, f2);
    if (s1 != 0.0) extra -= s1 * (h_.value(sample(u, x + f1)) - h_ref) * omega_odd(kernel_, f1);
    if (mode_.weighted) {
      if (x < R) extra += mode_.beta0 * omega(kernel_, x);
      if (x > L - R) extra += mode_.betaL * omega(kernel_, L - x);
    }
    out[static_cast<std::size_t>(i)] += extra;
  }
  return out;
}

double NonlocalOperator::evaluate_at(const Field& u, double x) const {
  grid_.check(u);
  const int M = grid_.cells();
  const double dx = grid_.dx();
  const double R = kernel_.R;
  const double L = grid_.length();
  const auto [f1, f2] = sensing_limits(mode_, x, R, L);
  double acc = 0.0;
  if (f2 > f1) {
    const int kmin = static_cast<int>(std::floor((x + f1) / dx));
    const int kmax = static_cast<int>(std::floor((x + f2) / dx));
    for (int k = kmin; k <= kmax; ++k) {
      const double lo = k * dx - x;
      const double w = omega_odd_integral(kernel_, std::max(lo, f1), std::min(lo + dx, f2));
      if (w == 0.0) continue;
      const int idx = mode_.bounded() ? std::clamp(k, 0, M - 1) : wrap(k, M);
      acc += w * h_.value(u[static_cast<std::size_t>(idx)]);
    }
    if (mode_.neutral) acc -= h_.value(mode_.u_ref) * omega_odd_integral(kernel_, f1, f2);
  }
  if (mode_.weighted) {
    if (x <= R) acc += mode_.beta0 * omega_odd_integral(kernel_, -R, -x);
    if (x >= L - R) acc += mode_.betaL * omega_odd_integral(kernel_, L - x, R);
  }
  return acc;
}

std::pair<double, double> weighted_boundary_noflux_beta(const Grid& grid, const KernelSpec& kernel,
                                                        const SensingMode& base,
                                                        const AdhesionFunction& h, const Field& u) {
  if (!base.bounded())
    throw Error(ErrorKind::InvalidParameter, "boundary weights need a bounded sensing domain");
  SensingMode plain = base;
  plain.weighted = false;
  plain.beta0 = plain.betaL = 0.0;
  NonlocalOperator op(grid, kernel, plain, h, NonlocalOperator::Backend::Direct);
  const double L = grid.length();
  const double R = op.kernel().R;
  const double left = op.evaluate_at(u, 0.0);
  const double right = op.evaluate_at(u, L);
  // K(0) = left + β⁰∫_{−R}^{0}Ω and K(L) = right + βᴸ∫_{0}^{R}Ω.
  const double half = omega_integral(op.kernel(), 0.0, R);
  return {left / half, -right / half};
}

}  // namespace adhesim

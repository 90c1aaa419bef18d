#pragma once

// Divergence-free random velocity fields on a doubly periodic N x N grid with a
// prescribed shell-summed kinetic-energy spectrum, built from a random-phase
// vorticity field through the streamfunction.
//
// Wavenumbers are measured in mode-index units n = (n_1, n_2) (multiples of
// the fundamental 2 pi / L); shell k collects the modes with round(|n|) = k.
// The realized spectrum is E(k) = sum_{n in shell k} (|u1_n|^2 + |u2_n|^2) / 2
// with u_n the normalized discrete Fourier coefficients, so sum_k E(k) is the
// mean kinetic energy per unit mass.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace eulerrom {

struct TurbulenceSpectrum {
  double u0 = 25.0;
  double peak_wavenumber = 25.0;  // k_p
  double shape = 3.0;             // s
  double amplitude = 1.0;         // a

  /// e(k) = 50/k_p a u0^2 (k/k_p)^(2s+1) exp(-(s + 1/2)(k/k_p)^2)
  double operator()(double k) const {
    const double x = k / peak_wavenumber;
    return 50.0 / peak_wavenumber * amplitude * u0 * u0 * std::pow(x, 2 * shape + 1) *
           std::exp(-(shape + 0.5) * x * x);
  }
};

using ComplexGrid = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;
using RealGrid = Eigen::MatrixXd;  // (i, j) = (x_1 index, x_2 index)

namespace detail {

inline void transform_2d(ComplexGrid& g, bool inverse) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  const Eigen::Index n0 = g.rows(), n1 = g.cols();
  std::vector<std::complex<double>> in, out;
  for (Eigen::Index j = 0; j < n1; ++j) {
    in.assign(g.col(j).data(), g.col(j).data() + n0);
    if (inverse) fft.inv(out, in); else fft.fwd(out, in);
    for (Eigen::Index i = 0; i < n0; ++i) g(i, j) = out[i];
  }
  for (Eigen::Index i = 0; i < n0; ++i) {
    in.resize(n1);
    for (Eigen::Index j = 0; j < n1; ++j) in[j] = g(i, j);
    if (inverse) fft.inv(out, in); else fft.fwd(out, in);
    for (Eigen::Index j = 0; j < n1; ++j) g(i, j) = out[j];
  }
}

inline int signed_mode(Eigen::Index idx, Eigen::Index n) {
  return idx < n / 2 ? int(idx) : int(idx - n);
}

}  // namespace detail

/// Normalized Fourier coefficients: f_n = (1/N^2) sum_x f(x) exp(-i 2 pi n.x / N).
inline ComplexGrid fourier_coefficients(const RealGrid& f) {
  ComplexGrid g = f.cast<std::complex<double>>();
  detail::transform_2d(g, false);
  return g / double(f.size());
}

/// Inverse of fourier_coefficients; imaginary residue is dropped.
inline RealGrid synthesize(const ComplexGrid& coeffs) {
  ComplexGrid g = coeffs;
  detail::transform_2d(g, true);
  return g.real();
}

/// Highest shell kept by the generator: N/2 - 1.
inline int max_resolved_shell(int n) { return n / 2 - 1; }

inline std::vector<double> realized_spectrum(const RealGrid& u1, const RealGrid& u2) {
  const Eigen::Index n = u1.rows();
  const ComplexGrid c1 = fourier_coefficients(u1);
  const ComplexGrid c2 = fourier_coefficients(u2);
  const int kmax = int(std::ceil(std::sqrt(2.0) * (n / 2))) + 1;
  std::vector<double> shells(kmax + 1, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const int n1 = detail::signed_mode(i, n), n2 = detail::signed_mode(j, n);
      const int k = int(std::lround(std::sqrt(double(n1 * n1 + n2 * n2))));
      shells[k] += 0.5 * (std::norm(c1(i, j)) + std::norm(c2(i, j)));
    }
  }
  return shells;
}

/// Max over modes of |k . u_n| relative to max |k| |u_n| (spectral divergence).
inline double spectral_divergence(const RealGrid& u1, const RealGrid& u2) {
  const Eigen::Index n = u1.rows();
  const ComplexGrid c1 = fourier_coefficients(u1);
  const ComplexGrid c2 = fourier_coefficients(u2);
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double k1 = detail::signed_mode(i, n), k2 = detail::signed_mode(j, n);
      num = std::max(num, std::abs(k1 * c1(i, j) + k2 * c2(i, j)));
      den = std::max(den, std::hypot(k1, k2) * std::sqrt(std::norm(c1(i, j)) + std::norm(c2(i, j))));
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

struct VelocityField {
  RealGrid u1;
  RealGrid u2;
};

/// Random-phase vorticity -> streamfunction (lap psi = -omega) ->
/// u1 = d psi/d x2, u2 = -d psi/d x1, rescaled shell by shell to the target
/// spectrum. Modes on the Nyquist lines and shells above N/2 - 1 are zero.
inline VelocityField random_solenoidal_velocity(int n, double box_length,
                                                const TurbulenceSpectrum& spectrum,
                                                std::uint64_t seed) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("turbulence grid size must be even");
  if (n / 2 < spectrum.peak_wavenumber) {
    throw std::invalid_argument("turbulence grid too coarse: Nyquist wavenumber " +
                                std::to_string(n / 2) + " < k_p");
  }
  const int kmax = max_resolved_shell(n);
  const double two_pi_over_l = 2.0 * std::numbers::pi / box_length;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  ComplexGrid omega = ComplexGrid::Zero(n, n);
  auto index = [n](int m) { return Eigen::Index(m < 0 ? m + n : m); };
  for (int n2 = 0; n2 <= n / 2 - 1; ++n2) {
    for (int n1 = -(n / 2 - 1); n1 <= n / 2 - 1; ++n1) {
      if (n2 == 0 && n1 <= 0) continue;  // canonical half plane
      const int k = int(std::lround(std::hypot(double(n1), double(n2))));
      if (k < 1 || k > kmax) continue;
      const std::complex<double> w = std::polar(1.0, phase(rng));
      omega(index(n1), index(n2)) = w;
      omega(index(-n1), index(-n2)) = std::conj(w);
    }
  }

  ComplexGrid c1 = ComplexGrid::Zero(n, n), c2 = ComplexGrid::Zero(n, n);
  const std::complex<double> I(0.0, 1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (omega(i, j) == 0.0) continue;
      const double k1 = two_pi_over_l * detail::signed_mode(i, n);
      const double k2 = two_pi_over_l * detail::signed_mode(j, n);
      const std::complex<double> psi = omega(i, j) / (k1 * k1 + k2 * k2);
      c1(i, j) = I * k2 * psi;
      c2(i, j) = -I * k1 * psi;
    }
  }

  std::vector<double> shell_energy(kmax + 1, 0.0);
  auto shell_of = [n](Eigen::Index i, Eigen::Index j) {
    const int n1 = detail::signed_mode(i, n), n2 = detail::signed_mode(j, n);
    return int(std::lround(std::hypot(double(n1), double(n2))));
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const int k = shell_of(i, j);
      if (k >= 1 && k <= kmax) shell_energy[k] += 0.5 * (std::norm(c1(i, j)) + std::norm(c2(i, j)));
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const int k = shell_of(i, j);
      if (k < 1 || k > kmax || shell_energy[k] <= 0.0) continue;
      const double scale = std::sqrt(spectrum(double(k)) / shell_energy[k]);
      c1(i, j) *= scale;
      c2(i, j) *= scale;
    }
  }
  return {synthesize(c1), synthesize(c2)};
}

}  // namespace eulerrom

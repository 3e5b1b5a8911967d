#include "ogsg/montecarlo.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "ogsg/numerics.hpp"
#include "ogsg/parallel.hpp"
#include "ogsg/rng.hpp"
#include "ogsg/transforms.hpp"

namespace ogsg {

namespace {

constexpr int kChunkBits = 12;  // fixed block size keeps reductions worker-invariant

}  // namespace

HaarSample sample_haar(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_haar: n must be >= 1");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(Rng::substream(seed, attempt));
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd r_diag = qr.matrixQR().diagonal();
    for (int j = 0; j < n; ++j) {
      if (r_diag(j) < 0.0) q.col(j) = -q.col(j);
    }
    double residual = (q * q.transpose() - Eigen::MatrixXd::Identity(n, n))
                          .cwiseAbs()
                          .maxCoeff();
    if (residual < 1e-12) return {n, std::move(q), seed};
    if (attempt >= 8) {
      throw num::NoConvergenceError("sample_haar: orthogonality residual too large");
    }
  }
}

double exact_log_partition(const std::vector<double>& d_values,
                           const Eigen::MatrixXd& orthogonal, double beta,
                           int workers) {
  const int n = static_cast<int>(d_values.size());
  if (n < 1) throw std::invalid_argument("exact_log_partition: empty spectrum");
  if (n > kEnumerationCap) {
    throw std::invalid_argument("exact_log_partition: n exceeds the enumeration cap");
  }
  if (orthogonal.rows() != n || orthogonal.cols() != n) {
    throw std::invalid_argument("exact_log_partition: dimension mismatch");
  }

  const std::uint64_t total = 1ULL << n;
  const std::uint64_t chunk = std::min<std::uint64_t>(total, 1ULL << kChunkBits);
  const std::size_t num_chunks = static_cast<std::size_t>(total / chunk);
  std::vector<num::LogSumAcc> partial(num_chunks);

  // Row k of O, stored contiguously: rows_flat[k*n .. k*n+n).
  std::vector<double> rows_flat(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      rows_flat[static_cast<std::size_t>(k) * n + i] = orthogonal(k, i);
    }
  }
  const double* dptr = d_values.data();

  parallel_tasks(num_chunks, workers, [&](std::size_t c) {
    const std::uint64_t t0 = static_cast<std::uint64_t>(c) * chunk;
    const std::uint64_t t1 = t0 + chunk;
    // Gray-code state at t0: bit i set means sigma_i = -1. Both v and the
    // energy are rebuilt fresh here, so incremental rounding cannot
    // accumulate past one chunk.
    std::uint64_t gray = t0 ^ (t0 >> 1);
    std::vector<double> sigma(static_cast<std::size_t>(n));
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      sigma[static_cast<std::size_t>(i)] = (gray >> i) & 1ULL ? -1.0 : 1.0;
    }
    for (int k = 0; k < n; ++k) {
      const double* row = rows_flat.data() + static_cast<std::size_t>(k) * n;
      double s = sigma[static_cast<std::size_t>(k)];
      for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] += s * row[i];
    }
    double energy = 0.0;
    for (int i = 0; i < n; ++i) {
      energy += dptr[i] * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    num::LogSumAcc acc;
    for (std::uint64_t t = t0;;) {
      acc.add(beta * energy);
      if (++t >= t1) break;
      int k = std::countr_zero(t);
      // Flipping spin k moves v by -2 sigma_k * (row k of O).
      const double* row = rows_flat.data() + static_cast<std::size_t>(k) * n;
      double scale = -2.0 * sigma[static_cast<std::size_t>(k)];
      double* vp = v.data();
      for (int i = 0; i < n; ++i) {
        double delta = scale * row[i];
        energy += dptr[i] * delta * (2.0 * vp[i] + delta);
        vp[i] += delta;
      }
      sigma[static_cast<std::size_t>(k)] = -sigma[static_cast<std::size_t>(k)];
    }
    partial[c] = acc;
  });

  num::LogSumAcc totalacc;
  for (const auto& acc : partial) totalacc.merge(acc);
  // 2^-N applied by exact exponent scaling so beta = 0 gives exactly zero.
  double scaled = std::ldexp(totalacc.scaled_sum(), -n);
  return (totalacc.max_exponent() + std::log(scaled)) / n;
}

QuenchedEstimate quenched_free_energy(const ModelSpec& spec, int n, double beta,
                                      int num_samples, std::uint64_t seed,
                                      int workers) {
  if (n > kEnumerationCap) {
    throw std::invalid_argument("quenched_free_energy: n exceeds the enumeration cap");
  }
  if (num_samples < 1) {
    throw std::invalid_argument("quenched_free_energy: num_samples must be >= 1");
  }
  QuenchedEstimate est;
  est.n = n;
  est.beta = beta;
  est.phi_values.resize(static_cast<std::size_t>(num_samples));
  est.phi_expected_values.resize(static_cast<std::size_t>(num_samples));
  est.seeds.resize(static_cast<std::size_t>(num_samples));

  parallel_tasks(static_cast<std::size_t>(num_samples), workers, [&](std::size_t s) {
    std::uint64_t coupling_seed = Rng::substream(seed, 2 * s);
    std::uint64_t haar_seed = Rng::substream(seed, 2 * s + 1);
    CouplingSample cs = sample_coupling(spec, n, coupling_seed);
    HaarSample o = sample_haar(n, haar_seed);
    est.phi_values[s] = exact_log_partition(cs.d_values, o.matrix, beta, 1);
    est.phi_expected_values[s] =
        exact_log_partition(cs.expected_d, o.matrix, beta, 1);
    est.seeds[s] = haar_seed;
  });

  auto stats = num::mean_std_err(est.phi_values);
  est.mean = stats.mean;
  est.std_err = stats.std_err;
  auto stats_e = num::mean_std_err(est.phi_expected_values);
  est.mean_expected = stats_e.mean;
  est.std_err_expected = stats_e.std_err;
  return est;
}

namespace {

struct TiltedSpectrum {
  std::vector<double> lambdas;
  std::vector<double> sigmas;    // per-coordinate sampling std dev
  double k_point = 0.0;          // empirical K at 2 beta
  double half_log_det = 0.0;     // (1/2) sum log(K/(K - lambda_i))
  bool tilted = false;
};

TiltedSpectrum make_tilt(const std::vector<double>& spectrum, double beta) {
  TiltedSpectrum t;
  t.lambdas = spectrum;
  const std::size_t n = spectrum.size();
  t.sigmas.assign(n, 1.0);
  if (beta <= 0.0) return t;
  double lmax = spectrum[0];
  for (double l : spectrum) lmax = std::max(lmax, l);
  // Empirical H(w) = (1/n) sum 1/(w - l) is decreasing with an infinite
  // one-sided limit at lmax, so H(K) = 2 beta always brackets.
  auto h = [&](double w) {
    double acc = 0.0;
    for (double l : spectrum) acc += 1.0 / (w - l);
    return acc / static_cast<double>(n);
  };
  double lo = lmax + 1e-13 * (1.0 + std::abs(lmax));
  double hi = lmax + 1.0 / (2.0 * beta) + 1.0;
  t.k_point = num::bisect_monotone(h, lo, hi, 2.0 * beta, 1e-14, 200);
  for (std::size_t i = 0; i < n; ++i) {
    double ratio = t.k_point / (t.k_point - spectrum[i]);
    t.sigmas[i] = std::sqrt(ratio);
    t.half_log_det += 0.5 * std::log(ratio);
  }
  t.tilted = true;
  return t;
}

// Spectral linear statistic of a direction vector: sum l_i u_i^2 with
// u = x / |x|; also returns |x|^2 split out for the projection step.
double rayleigh(const std::vector<double>& lambdas, const Eigen::VectorXd& x) {
  double num = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    num += lambdas[static_cast<std::size_t>(i)] * x(i) * x(i);
  }
  return num / x.squaredNorm();
}

}  // namespace

AnnealedEstimate annealed_moments(const std::vector<double>& spectrum,
                                  double beta, int num_samples,
                                  std::uint64_t seed, int workers) {
  const int n = static_cast<int>(spectrum.size());
  if (n < 2) throw std::invalid_argument("annealed_moments: spectrum too short");
  if (num_samples < 2) {
    throw std::invalid_argument("annealed_moments: num_samples must be >= 2");
  }
  const TiltedSpectrum tilt = make_tilt(spectrum, beta);
  const double nd = static_cast<double>(n);

  const std::size_t kBlock = 1024;
  const std::size_t blocks =
      (static_cast<std::size_t>(num_samples) + kBlock - 1) / kBlock;
  struct BlockAcc {
    num::LogSumAcc first, first_sq, second, second_sq;
  };
  std::vector<BlockAcc> partial(blocks);

  parallel_tasks(blocks, workers, [&](std::size_t b) {
    BlockAcc acc;
    Eigen::VectorXd x(n), y(n);
    const std::size_t s_end = std::min<std::size_t>(
        (b + 1) * kBlock, static_cast<std::size_t>(num_samples));
    for (std::size_t s = b * kBlock; s < s_end; ++s) {
      Rng rng(Rng::substream(seed, s));
      for (int i = 0; i < n; ++i) {
        x(i) = tilt.sigmas[static_cast<std::size_t>(i)] * rng.gaussian();
      }
      for (int i = 0; i < n; ++i) {
        y(i) = tilt.sigmas[static_cast<std::size_t>(i)] * rng.gaussian();
      }
      double v1 = rayleigh(tilt.lambdas, x);
      double v2p = rayleigh(tilt.lambdas, y);
      Eigen::VectorXd z = y - (x.dot(y) / x.squaredNorm()) * x;
      double v2 = rayleigh(tilt.lambdas, z);

      // Angular likelihood ratio of the tilt depends on the direction only
      // through the Rayleigh quotient: (N/2) log((K - V)/K) + half_log_det.
      double w1 = 0.0;
      double w2 = 0.0;
      if (tilt.tilted) {
        w1 = 0.5 * nd * std::log((tilt.k_point - v1) / tilt.k_point) +
             tilt.half_log_det;
        w2 = 0.5 * nd * std::log((tilt.k_point - v2p) / tilt.k_point) +
             tilt.half_log_det;
      }
      double log_term1 = nd * beta * v1 + w1;
      double f = beta * (v1 + v2) + num::log_cosh(beta * (v1 - v2));
      double log_term2 = nd * f + w1 + w2;
      acc.first.add(log_term1);
      acc.first_sq.add(2.0 * log_term1);
      acc.second.add(log_term2);
      acc.second_sq.add(2.0 * log_term2);
    }
    partial[b] = acc;
  });

  num::LogSumAcc first, first_sq, second, second_sq;
  for (const auto& acc : partial) {
    first.merge(acc.first);
    first_sq.merge(acc.first_sq);
    second.merge(acc.second);
    second_sq.merge(acc.second_sq);
  }

  const double log_s = std::log(static_cast<double>(num_samples));
  AnnealedEstimate est;
  est.n = n;
  est.beta = beta;
  est.num_samples = num_samples;
  est.log_first_moment_rate = (first.log_total() - log_s) / nd;
  est.log_second_moment_rate = (second.log_total() - log_s) / (2.0 * nd);
  // Delta method on the log scale: se = sqrt((m2/m1^2 - 1)/S) / N.
  auto se = [&](const num::LogSumAcc& m1, const num::LogSumAcc& m2) {
    double log_ratio = (m2.log_total() - log_s) - 2.0 * (m1.log_total() - log_s);
    double ratio = std::exp(log_ratio);
    return std::sqrt(std::max(ratio - 1.0, 0.0) /
                     static_cast<double>(num_samples));
  };
  est.std_err_first = se(first, first_sq) / nd;
  est.std_err_second = se(second, second_sq) / (2.0 * nd);
  return est;
}

AnnealedEstimate annealed_moments(const SpectralMeasure& measure, int n,
                                  double beta, int num_samples,
                                  std::uint64_t seed, int workers) {
  return annealed_moments(measure.quantile_grid(n), beta, num_samples, seed,
                          workers);
}

std::vector<ConcentrationRow> concentration_scan(const ModelSpec& spec,
                                                 double beta,
                                                 const std::vector<int>& n_list,
                                                 int samples_per_n,
                                                 std::uint64_t seed,
                                                 int workers) {
  std::vector<ConcentrationRow> rows;
  for (int n : n_list) {
    if (n > kEnumerationCap) {
      throw std::invalid_argument("concentration_scan: n exceeds the enumeration cap");
    }
    std::vector<double> expected =
        sample_coupling(spec, n, Rng::substream(seed, 0)).expected_d;
    std::vector<double> phis(static_cast<std::size_t>(samples_per_n));
    parallel_tasks(phis.size(), workers, [&](std::size_t s) {
      std::uint64_t haar_seed =
          Rng::substream(seed, (static_cast<std::uint64_t>(n) << 32) + s + 1);
      HaarSample o = sample_haar(n, haar_seed);
      phis[s] = exact_log_partition(expected, o.matrix, beta, 1);
    });
    auto stats = num::mean_std_err(phis);
    ConcentrationRow row;
    row.n = n;
    row.mean = stats.mean;
    row.std_dev = stats.std_dev;
    row.std_err_of_std =
        samples_per_n > 1
            ? stats.std_dev / std::sqrt(2.0 * (samples_per_n - 1))
            : 0.0;
    row.num_samples = samples_per_n;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ogsg

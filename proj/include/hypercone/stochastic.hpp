#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypercone/ifs_core.hpp"
#include "hypercone/multicone.hpp"

namespace hypercone {

/// Shannon entropy in nats.
double entropy(const std::vector<double>& p);

/// Mean with a batch-means standard error (32 batches; NaN below 64 steps).
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Order in which the random product is grown: A_{i1} ... A_{in} (right) or
/// A_{in} ... A_{i1} (left).  Both define the same exponent.
enum class ProductOrder { Right, Left };

/// (1/steps) log ||A_{i1} ... A_{i_steps}|| for i.i.d. symbols drawn by p.
Estimate lyapunov_random(const IfsSystem& system, const std::vector<double>& p,
                         std::uint64_t steps, std::uint64_t seed,
                         ProductOrder order = ProductOrder::Right);

/// Birkhoff average of -log |phi'_{i_k}(theta_k)| along the chain
/// theta_{k+1} = phi_{i_k}(theta_k) started at the centre of U.
Estimate lyapunov_ifs(const IfsSystem& system, const std::vector<double>& p, const Multicone& u,
                      std::uint64_t steps, std::uint64_t burn_in, std::uint64_t seed);

struct StationarySample {
  std::uint64_t seed = 0;
  std::uint64_t burn_in = 0;
  std::vector<ProjPoint> points;
  /// FNV-1a over the drawn symbol indices (little-endian 64-bit words).
  std::uint64_t symbol_stream_hash = 0;
  std::optional<std::string> warning;
};

StationarySample furstenberg_sample(const IfsSystem& system, const std::vector<double>& p,
                                    std::uint64_t steps, std::uint64_t burn_in,
                                    std::uint64_t seed);

/// Kolmogorov distance on [0, pi) between the sample's empirical CDF and that
/// of the mixture sum_i p_i (phi_i)_* sample.
double stationarity_residual(const StationarySample& sample, const IfsSystem& system,
                             const std::vector<double>& p);

struct FurstenbergDimension {
  double entropy = 0.0;
  Estimate chi_a;
  double dimension = 0.0;  // min(1, H / (2 chi_A))
  std::optional<Estimate> chi_phi;
  std::optional<double> dimension_phi;  // min(1, H / chi_Phi)
  bool disagreement = false;            // relative gap above 5%
  std::vector<std::string> notes;
};

/// The chi_Phi variant is computed when U is given and verified.
FurstenbergDimension furstenberg_dimension(const IfsSystem& system, const std::vector<double>& p,
                                           const std::optional<Multicone>& u, std::uint64_t steps,
                                           std::uint64_t seed, std::uint64_t burn_in = 1000);

}  // namespace hypercone

#include "scgl/isotonic.hpp"

#include "scgl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace scgl {

double spectral_level(double trace, Index stalk_dim, double beta) {
  const double n = static_cast<double>(stalk_dim);
  return (trace + std::sqrt(trace * trace + 4.0 * n * n / beta)) / (2.0 * n);
}

Eigen::VectorXd bounded_spectral_isotonic(const Eigen::VectorXd& traces, Index stalk_dim,
                                          double beta, double c1, double c2) {
  if (!(c1 <= c2)) throw ConfigError("bounded_spectral_isotonic: need c1 <= c2");
  if (!(beta > 0.0)) throw ConfigError("bounded_spectral_isotonic: need beta > 0");

  struct Pool {
    double trace_sum;
    Index count;
    double level;
  };
  std::vector<Pool> pools;
  pools.reserve(static_cast<std::size_t>(traces.size()));
  for (Index i = 0; i < traces.size(); ++i) {
    pools.push_back({traces(i), 1, spectral_level(traces(i), stalk_dim, beta)});
    while (pools.size() > 1 && pools[pools.size() - 2].level > pools.back().level) {
      const Pool top = pools.back();
      pools.pop_back();
      auto& prev = pools.back();
      prev.trace_sum += top.trace_sum;
      prev.count += top.count;
      prev.level = spectral_level(prev.trace_sum / static_cast<double>(prev.count), stalk_dim, beta);
    }
  }
  Eigen::VectorXd out(traces.size());
  Index pos = 0;
  for (const auto& p : pools) {
    out.segment(pos, p.count).setConstant(std::clamp(p.level, c1, c2));
    pos += p.count;
  }
  return out;
}

}  // namespace scgl

#include "coopsched/sim_engine.hpp"

#include <stdexcept>

namespace coopsched {

BatchSummary run_batch_serial(const WorldParams& world, PolicyKind policy,
                              const PolicyParams& params, std::size_t n_traces,
                              std::uint64_t base_seed) {
  if (n_traces == 0) throw std::invalid_argument("n_traces must be >= 1");
  detail::BatchAccumulator sums(world.horizon);
  std::vector<double> trace_energy(n_traces);
  for (std::size_t i = 0; i < n_traces; ++i) {
    trace_energy[i] = sums.add_trace(world, policy, params, TraceSeed{base_seed, i});
  }
  return detail::finalize(policy, base_seed, sums, std::move(trace_energy));
}

}  // namespace coopsched

#include <omp.h>

#include <algorithm>
#include <exception>
#include <stdexcept>

#include "coopsched/sim_engine.hpp"

namespace coopsched {

namespace {

// Fixed partition of traces into blocks; blocks in a wave run concurrently and are folded in
// block order. Neither constant depends on the thread count, so neither does the result.
constexpr std::size_t kBlockTraces = 32;
constexpr std::size_t kWaveBlocks = 16;

}  // namespace

BatchSummary run_batch(const WorldParams& world, PolicyKind policy, const PolicyParams& params,
                       std::size_t n_traces, std::uint64_t base_seed, int workers) {
  if (n_traces == 0) throw std::invalid_argument("n_traces must be >= 1");
  if (workers <= 0) workers = omp_get_max_threads();

  const std::size_t n_blocks = (n_traces + kBlockTraces - 1) / kBlockTraces;
  const std::size_t wave_size = std::min(kWaveBlocks, n_blocks);
  std::vector<detail::BatchAccumulator> wave(wave_size, detail::BatchAccumulator(world.horizon));
  std::vector<std::exception_ptr> errors(wave_size);
  detail::BatchAccumulator total(world.horizon);
  std::vector<double> trace_energy(n_traces);

  for (std::size_t first = 0; first < n_blocks; first += wave_size) {
    const auto blocks = static_cast<std::ptrdiff_t>(std::min(wave_size, n_blocks - first));

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
      auto& acc = wave[static_cast<std::size_t>(b)];
      try {
        acc.reset();
        const std::size_t begin = (first + static_cast<std::size_t>(b)) * kBlockTraces;
        const std::size_t end = std::min(begin + kBlockTraces, n_traces);
        for (std::size_t i = begin; i < end; ++i) {
          trace_energy[i] = acc.add_trace(world, policy, params, TraceSeed{base_seed, i});
        }
      } catch (...) {
        errors[static_cast<std::size_t>(b)] = std::current_exception();
      }
    }

    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
      if (auto& e = errors[static_cast<std::size_t>(b)]) std::rethrow_exception(e);
      total.merge(wave[static_cast<std::size_t>(b)]);
    }
  }
  return detail::finalize(policy, base_seed, total, std::move(trace_energy));
}

}  // namespace coopsched

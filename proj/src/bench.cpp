#include "rsgd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <stdexcept>

#include "rsgd/experiment.hpp"
#include "rsgd/rng.hpp"

namespace rsgd {

namespace {

// Keeps the optimizer from discarding aggregator results.
volatile double g_sink = 0.0;

double time_call(AggregatorKind kind, const VectorSet& set) {
  const auto start = std::chrono::steady_clock::now();
  switch (kind) {
    case AggregatorKind::Medoid:
      g_sink = g_sink + static_cast<double>(medoid(set).index);
      break;
    case AggregatorKind::ElementwiseMedian:
      g_sink = g_sink + elementwise_median(set)[0];
      break;
    case AggregatorKind::Mean:
      g_sink = g_sink + mean(set)[0];
      break;
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<BenchRow> bench_aggregators(const std::vector<std::size_t>& dims,
                                        const std::vector<std::size_t>& chunks,
                                        std::size_t repetitions, std::uint64_t seed) {
  if (repetitions == 0) throw std::invalid_argument("bench_aggregators: repetitions must be >= 1");
  std::vector<BenchRow> rows;
  for (std::size_t d : dims) {
    for (std::size_t m : chunks) {
      VectorSet set(m, d);
      RngStream stream(seed, {d, m, 0});
      for (std::size_t j = 0; j < m; ++j)
        for (double& v : set[j]) v = stream.normal();
      for (AggregatorKind kind :
           {AggregatorKind::Medoid, AggregatorKind::ElementwiseMedian, AggregatorKind::Mean}) {
        std::vector<double> times(repetitions);
        for (auto& t : times) t = time_call(kind, set);
        std::nth_element(times.begin(), times.begin() + repetitions / 2, times.end());
        rows.push_back({d, m, kind, repetitions, times[repetitions / 2]});
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "d,M,aggregator,repetitions,median_seconds\n";
  for (const auto& r : rows) {
    out << r.dimension << ',' << r.chunks << ',' << to_string(r.aggregator) << ','
        << r.repetitions << ',' << format_double(r.median_seconds) << '\n';
  }
}

}  // namespace rsgd
